//! Verification tables and their CSV/JSON forms.

use std::path::{Path, PathBuf};

use hopf_core::field::FieldRecord;
use hopf_core::io::{fmt17, write_atomic};
use serde::Serialize;

use crate::config::OutputFormat;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// `value < tolerance`.
    #[serde(rename = "<")]
    Below,
    /// `value >= -tolerance`.
    #[serde(rename = ">=")]
    AtLeastNegative,
    /// Categorical check; `value` is 1 on success.
    #[serde(rename = "==")]
    Holds,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Below => "<",
            Relation::AtLeastNegative => ">=",
            Relation::Holds => "==",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub case: String,
    pub seed: Option<u64>,
    pub value: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn below(check: &str, case: impl Into<String>, seed: Option<u64>, value: f64, tolerance: f64) -> Self {
        Self { check: check.into(), case: case.into(), seed, value, relation: Relation::Below, tolerance, pass: value < tolerance }
    }

    pub fn at_least(check: &str, case: impl Into<String>, seed: Option<u64>, value: f64, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            case: case.into(),
            seed,
            value,
            relation: Relation::AtLeastNegative,
            tolerance,
            pass: value >= -tolerance,
        }
    }

    pub fn holds(check: &str, case: impl Into<String>, seed: Option<u64>, ok: bool) -> Self {
        Self {
            check: check.into(),
            case: case.into(),
            seed,
            value: if ok { 1.0 } else { 0.0 },
            relation: Relation::Holds,
            tolerance: 1.0,
            pass: ok,
        }
    }
}

/// A row together with the field that produced it, kept for replay.
pub struct Check {
    pub row: CheckRow,
    pub field: Option<FieldRecord>,
}

impl From<CheckRow> for Check {
    fn from(row: CheckRow) -> Self {
        Self { row, field: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub basis_degree: usize,
    pub grid: [usize; 3],
    pub seed: u64,
    pub rows: Vec<CheckRow>,
}

pub const VERIFY_CSV_HEADER: [&str; 7] = ["check", "case", "seed", "value", "relation", "tolerance", "pass"];

impl VerifyReport {
    pub fn passes(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(VERIFY_CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.check.clone(),
                r.case.clone(),
                r.seed.map(|s| s.to_string()).unwrap_or_default(),
                fmt17(r.value),
                r.relation.symbol().to_string(),
                fmt17(r.tolerance),
                r.pass.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn render(&self, format: OutputFormat) -> Result<String, CliError> {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
        }
    }
}

/// Failing rows with the fields that produced them.
#[derive(Debug, Clone, Serialize)]
pub struct FailureRecord {
    pub suite: String,
    pub seed: u64,
    pub failures: Vec<FailedCheck>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FailedCheck {
    pub row: CheckRow,
    pub field: Option<FieldRecord>,
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}
