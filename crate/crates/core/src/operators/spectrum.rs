//! Closed-form and numerically computed spectra of the three Jacobi-type
//! operators, with per-degree labelling and report export.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::assemble::FrameDerivatives;
use crate::eigen::{hermitian_eigen, symmetric_eigen};
use crate::error::{Error, Result};
use crate::harmonics::HarmonicBasis;
use crate::io::fmt17;

/// Eigenvalues closer than this are merged into one multiplicity.
pub const MULTIPLICITY_TOL: f64 = 1e-7;

/// Largest distance to a closed-form value still accepted as a match.
pub const MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumKind {
    Vertical,
    HopfMap,
    Identity,
}

impl fmt::Display for SpectrumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpectrumKind::Vertical => "vertical",
            SpectrumKind::HopfMap => "hopf-map",
            SpectrumKind::Identity => "identity",
        })
    }
}

impl std::str::FromStr for SpectrumKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "vertical" => Ok(Self::Vertical),
            "hopf-map" | "hopf_map" => Ok(Self::HopfMap),
            "identity" => Ok(Self::Identity),
            other => Err(format!("unknown spectrum kind `{other}`")),
        }
    }
}

/// Eigenvalue family. The identity-map operator has two families indexed by
/// `k` alone; the scalar operators are indexed by `(n, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Vertical,
    HopfMap,
    IdentityExact,
    IdentityCoexact,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Vertical => "vertical",
            Family::HopfMap => "hopf-map",
            Family::IdentityExact => "identity-exact",
            Family::IdentityCoexact => "identity-coexact",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpectrumLabel {
    pub family: Family,
    pub n: Option<usize>,
    pub k: i64,
}

impl SpectrumLabel {
    pub fn eigenvalue(&self) -> f64 {
        let k = self.k as f64;
        match (self.family, self.n) {
            (Family::Vertical, Some(n)) => (n * (n + 2)) as f64 + 2.0 * k,
            (Family::HopfMap, Some(n)) => (n * (n + 2)) as f64 + 4.0 * k,
            (Family::IdentityExact, _) => k * k + 4.0 * k - 1.0,
            (Family::IdentityCoexact, _) => k * k + 4.0 * k,
            _ => f64::NAN,
        }
    }

    /// Real multiplicity of the label over the whole function space.
    pub fn multiplicity_real(&self) -> usize {
        let k = self.k.unsigned_abs() as usize;
        match (self.family, self.n) {
            (Family::Vertical | Family::HopfMap, Some(n)) => 2 * (n + 1),
            (Family::IdentityExact, _) => (k + 2) * (k + 2),
            (Family::IdentityCoexact, _) => 2 * (k + 1) * (k + 3),
            _ => 0,
        }
    }

    /// Real multiplicity carried by polynomial degree `n` of the frame components.
    fn multiplicity_in_degree(&self, n: usize) -> usize {
        let k = self.k;
        let n_i = n as i64;
        match self.family {
            Family::Vertical | Family::HopfMap => {
                if self.n == Some(n) {
                    2 * (n + 1)
                } else {
                    0
                }
            }
            Family::IdentityExact => {
                if k == n_i - 1 {
                    (n + 1) * (n + 1)
                } else {
                    0
                }
            }
            Family::IdentityCoexact => {
                if k == n_i {
                    (n + 1) * (n + 3)
                } else if k == n_i - 2 {
                    (n - 1) * (n + 1)
                } else {
                    0
                }
            }
        }
    }

    /// Whether a basis of degree ≤ `max_degree` carries the full multiplicity.
    pub fn resolvable(&self, max_degree: usize) -> bool {
        let k = self.k.max(0) as usize;
        match self.family {
            Family::Vertical | Family::HopfMap => self.n.is_some_and(|n| n <= max_degree),
            Family::IdentityExact => k < max_degree,
            Family::IdentityCoexact => k + 2 <= max_degree,
        }
    }
}

/// One eigenvalue with multiplicities in both conventions and the closed-form
/// labels that produce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub eigenvalue: f64,
    pub multiplicity_real: usize,
    /// `None` for the identity operator, which is real.
    pub multiplicity_complex: Option<usize>,
    pub labels: Vec<SpectrumLabel>,
}

fn candidate_labels(kind: SpectrumKind, n: usize) -> Vec<SpectrumLabel> {
    let ks = || (0..=n).map(move |s| 2 * s as i64 - n as i64);
    match kind {
        SpectrumKind::Vertical => ks().map(|k| SpectrumLabel { family: Family::Vertical, n: Some(n), k }).collect(),
        SpectrumKind::HopfMap => ks().map(|k| SpectrumLabel { family: Family::HopfMap, n: Some(n), k }).collect(),
        SpectrumKind::Identity => {
            let n_i = n as i64;
            let mut out = vec![SpectrumLabel { family: Family::IdentityCoexact, n: None, k: n_i }];
            if n >= 1 {
                out.push(SpectrumLabel { family: Family::IdentityExact, n: None, k: n_i - 1 });
            }
            if n >= 2 {
                out.push(SpectrumLabel { family: Family::IdentityCoexact, n: None, k: n_i - 2 });
            }
            out
        }
    }
}

fn aggregate(kind: SpectrumKind, per_label: impl IntoIterator<Item = (SpectrumLabel, usize)>) -> Vec<SpectrumEntry> {
    let mut groups: BTreeMap<i64, SpectrumEntry> = BTreeMap::new();
    for (label, mult) in per_label {
        let value = label.eigenvalue();
        let e = groups.entry(value.round() as i64).or_insert_with(|| SpectrumEntry {
            eigenvalue: value,
            multiplicity_real: 0,
            multiplicity_complex: None,
            labels: Vec::new(),
        });
        e.multiplicity_real += mult;
        e.labels.push(label);
    }
    groups
        .into_values()
        .map(|mut e| {
            if kind != SpectrumKind::Identity {
                e.multiplicity_complex = Some(e.multiplicity_real / 2);
            }
            e.labels.sort();
            e
        })
        .collect()
}

/// Closed-form spectrum: all `(n, k)` with `n ≤ N` for the scalar operators,
/// all `k ≤ N` for the identity operator.
pub fn closed_form_spectrum(kind: SpectrumKind, max_degree: usize) -> Vec<SpectrumEntry> {
    let labels: Vec<SpectrumLabel> = match kind {
        SpectrumKind::Identity => (0..=max_degree as i64)
            .flat_map(|k| {
                [
                    SpectrumLabel { family: Family::IdentityExact, n: None, k },
                    SpectrumLabel { family: Family::IdentityCoexact, n: None, k },
                ]
            })
            .collect(),
        _ => (0..=max_degree).flat_map(|n| candidate_labels(kind, n)).collect(),
    };
    aggregate(kind, labels.into_iter().map(|l| (l, l.multiplicity_real())))
}

/// Numeric result for one label: eigenvalues found in the blocks where the
/// label lives.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub kind: Family,
    pub n: Option<usize>,
    pub k: i64,
    pub eigenvalue_closed_form: f64,
    pub eigenvalue_numeric: f64,
    pub mult_real_closed: usize,
    pub mult_real_numeric: usize,
    pub abs_error: f64,
}

impl SpectrumRow {
    pub fn passes(&self, tol: f64) -> bool {
        self.abs_error < tol && self.mult_real_closed == self.mult_real_numeric
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub kind: SpectrumKind,
    pub max_degree: usize,
    /// Labels whose full multiplicity lies within the basis.
    pub rows: Vec<SpectrumRow>,
    /// Labels only partially represented at this degree (identity operator).
    pub truncated: Vec<SpectrumRow>,
}

pub const CSV_HEADER: [&str; 8] = [
    "kind",
    "n",
    "k",
    "eigenvalue_closed_form",
    "eigenvalue_numeric",
    "mult_real_closed",
    "mult_real_numeric",
    "abs_error",
];

impl SpectrumReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.rows.iter().all(|r| r.passes(tol))
    }

    pub fn max_abs_error(&self) -> f64 {
        self.rows.iter().map(|r| r.abs_error).fold(0.0, f64::max)
    }

    /// Rows aggregated by eigenvalue.
    pub fn entries(&self) -> Vec<SpectrumEntry> {
        aggregate(self.kind, self.rows.iter().map(|r| (SpectrumLabel { family: r.kind, n: r.n, k: r.k }, r.mult_real_numeric)))
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).map_err(csv_error)?;
        for r in &self.rows {
            w.write_record([
                r.kind.to_string(),
                r.n.map(|n| n.to_string()).unwrap_or_default(),
                r.k.to_string(),
                fmt17(r.eigenvalue_closed_form),
                fmt17(r.eigenvalue_numeric),
                r.mult_real_closed.to_string(),
                r.mult_real_numeric.to_string(),
                fmt17(r.abs_error),
            ])
            .map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| csv_error(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

struct BlockResult {
    /// `(label, eigenvalue)` per real eigenvalue (complex ones counted twice).
    assigned: Vec<(SpectrumLabel, f64)>,
}

fn block_eigenvalues(kind: SpectrumKind, d: &FrameDerivatives, n: usize) -> Result<(Vec<f64>, usize)> {
    match kind {
        SpectrumKind::Vertical => Ok((hermitian_eigen(&d.shifted_block(n, 2.0))?.values, 2)),
        SpectrumKind::HopfMap => Ok((hermitian_eigen(&d.shifted_block(n, 4.0))?.values, 2)),
        SpectrumKind::Identity => {
            let m = d.rough_laplacian_block(n);
            let shifted = &m - nalgebra::DMatrix::identity(m.nrows(), m.nrows()) * 2.0;
            Ok((symmetric_eigen(&shifted)?.values, 1))
        }
    }
}

fn label_block(kind: SpectrumKind, d: &FrameDerivatives, n: usize) -> Result<BlockResult> {
    let (values, weight) = block_eigenvalues(kind, d, n)?;
    let candidates = candidate_labels(kind, n);
    let mut assigned = Vec::with_capacity(values.len() * weight);
    for v in values {
        let (label, distance) = candidates
            .iter()
            .map(|l| (*l, (l.eigenvalue() - v).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("every block has a candidate");
        if distance > MATCH_TOL {
            return Err(Error::UnmatchedEigenvalue { degree: n, value: v, distance });
        }
        for _ in 0..weight {
            assigned.push((label, v));
        }
    }
    Ok(BlockResult { assigned })
}

/// Numeric spectrum of the chosen operator on all blocks of `derivatives`.
pub fn numeric_spectrum(kind: SpectrumKind, derivatives: &FrameDerivatives) -> Result<SpectrumReport> {
    let max_degree = derivatives.max_degree();
    let blocks = (0..=max_degree)
        .into_par_iter()
        .map(|n| label_block(kind, derivatives, n))
        .collect::<Result<Vec<_>>>()?;
    let mut found: BTreeMap<SpectrumLabel, Vec<f64>> = BTreeMap::new();
    for b in blocks {
        for (label, v) in b.assigned {
            found.entry(label).or_default().push(v);
        }
    }
    let mut rows = Vec::new();
    let mut truncated = Vec::new();
    for (label, values) in found {
        let closed = label.eigenvalue();
        let row = SpectrumRow {
            kind: label.family,
            n: label.n,
            k: label.k,
            eigenvalue_closed_form: closed,
            eigenvalue_numeric: values.iter().sum::<f64>() / values.len() as f64,
            mult_real_closed: label.multiplicity_real(),
            mult_real_numeric: values.len(),
            abs_error: values.iter().map(|v| (v - closed).abs()).fold(0.0, f64::max),
        };
        if label.resolvable(max_degree) {
            rows.push(row);
        } else {
            let expected: usize = (0..=max_degree).map(|n| label.multiplicity_in_degree(n)).sum();
            truncated.push(SpectrumRow { mult_real_closed: expected, ..row });
        }
    }
    let order = |r: &SpectrumRow| (r.eigenvalue_closed_form, r.n, r.k);
    rows.sort_by(|a, b| order(a).partial_cmp(&order(b)).expect("finite"));
    truncated.sort_by(|a, b| order(a).partial_cmp(&order(b)).expect("finite"));
    Ok(SpectrumReport { kind, max_degree, rows, truncated })
}

pub fn vertical_jacobi_spectrum(basis: &HarmonicBasis) -> Result<Vec<SpectrumEntry>> {
    Ok(numeric_spectrum(SpectrumKind::Vertical, &FrameDerivatives::new(basis))?.entries())
}

pub fn hopf_map_jacobi_spectrum(basis: &HarmonicBasis) -> Result<Vec<SpectrumEntry>> {
    Ok(numeric_spectrum(SpectrumKind::HopfMap, &FrameDerivatives::new(basis))?.entries())
}

pub fn identity_jacobi_spectrum(basis: &HarmonicBasis) -> Result<Vec<SpectrumEntry>> {
    Ok(numeric_spectrum(SpectrumKind::Identity, &FrameDerivatives::new(basis))?.entries())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::build_basis;

    #[test]
    fn closed_vertical_values() {
        let s = closed_form_spectrum(SpectrumKind::Vertical, 3);
        let values: Vec<f64> = s.iter().map(|e| e.eigenvalue).collect();
        assert_eq!(&values[..8], &[0.0, 1.0, 4.0, 5.0, 8.0, 9.0, 12.0, 13.0]);
        assert_eq!(s[0].multiplicity_real, 2);
        assert_eq!(s[1].multiplicity_real, 4);
        assert_eq!(s[1].multiplicity_complex, Some(2));
    }

    #[test]
    fn closed_hopf_map_values() {
        let s = closed_form_spectrum(SpectrumKind::HopfMap, 4);
        let negative: Vec<&SpectrumEntry> = s.iter().filter(|e| e.eigenvalue < 0.0).collect();
        assert_eq!(negative.len(), 1);
        assert_eq!(negative[0].eigenvalue, -1.0);
        assert_eq!(negative[0].multiplicity_real, 4);
        let zero = s.iter().find(|e| e.eigenvalue == 0.0).unwrap();
        assert_eq!(zero.multiplicity_real, 8);
        assert_eq!(zero.labels.len(), 2);
    }

    #[test]
    fn closed_identity_values() {
        let s = closed_form_spectrum(SpectrumKind::Identity, 3);
        assert_eq!((s[0].eigenvalue, s[0].multiplicity_real), (-1.0, 4));
        assert_eq!((s[1].eigenvalue, s[1].multiplicity_real), (0.0, 6));
    }

    #[test]
    fn degree_multiplicities_add_up() {
        for n in 0..8 {
            for kind in [SpectrumKind::Vertical, SpectrumKind::HopfMap, SpectrumKind::Identity] {
                let total: usize = candidate_labels(kind, n).iter().map(|l| l.multiplicity_in_degree(n)).sum();
                let expect = match kind {
                    SpectrumKind::Identity => 3 * (n + 1) * (n + 1),
                    _ => 2 * (n + 1) * (n + 1),
                };
                assert_eq!(total, expect, "{kind} degree {n}");
            }
        }
    }

    #[test]
    fn numeric_spectra_match_closed_forms() {
        let basis = build_basis(4).unwrap();
        let d = FrameDerivatives::new(&basis);
        for kind in [SpectrumKind::Vertical, SpectrumKind::HopfMap, SpectrumKind::Identity] {
            let r = numeric_spectrum(kind, &d).unwrap();
            assert!(r.passes(1e-8), "{kind}: {:?}", r.rows.iter().find(|r| !r.passes(1e-8)));
        }
        let id = numeric_spectrum(SpectrumKind::Identity, &d).unwrap();
        assert_eq!((id.rows[0].eigenvalue_closed_form, id.rows[0].mult_real_numeric), (-1.0, 4));
        let zero = id.entries().into_iter().find(|e| e.eigenvalue == 0.0).unwrap();
        assert_eq!(zero.multiplicity_real, 6);
        for t in &id.truncated {
            assert_eq!(t.mult_real_closed, t.mult_real_numeric);
        }
    }

    #[test]
    fn csv_has_schema_header() {
        let basis = build_basis(1).unwrap();
        let r = numeric_spectrum(SpectrumKind::Vertical, &FrameDerivatives::new(&basis)).unwrap();
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("kind,n,k,eigenvalue_closed_form,eigenvalue_numeric,mult_real_closed,mult_real_numeric,abs_error\n"));
        assert_eq!(csv.lines().count(), 1 + 3);
    }
}
