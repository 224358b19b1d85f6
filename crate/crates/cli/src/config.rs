//! Run configuration: built-in defaults, then a `key = value` file, then
//! `--set` overrides, then dedicated flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hopf_core::harmonics::MAX_SUPPORTED_DEGREE;
use hopf_core::GridLevels;
use serde::Serialize;

/// Seed used by the randomized suites unless another is configured.
pub const DEFAULT_SEED: u64 = 42;

pub const DEFAULT_DEGREE: usize = 6;

pub const DEFAULT_GRID: GridLevels = GridLevels::new(8, 16, 16);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => err(format!("unknown output format `{other}`")),
        }
    }
}

/// Named tolerances; every key is settable as `tol.<name>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub spectrum: f64,
    pub identity_relative: f64,
    pub identity_pointwise: f64,
    pub identity_hopf: f64,
    pub inequality: f64,
    pub hessian: f64,
    pub second_difference: f64,
    pub bochner_yano: f64,
    pub rigidity: f64,
    pub classify: f64,
    pub flow: f64,
    pub energy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            spectrum: 1e-8,
            identity_relative: 1e-6,
            identity_pointwise: 1e-8,
            identity_hopf: 1e-10,
            inequality: 1e-10,
            hessian: 1e-8,
            second_difference: 0.01,
            bochner_yano: 1e-8,
            rigidity: 1e-10,
            classify: 1e-3,
            flow: 1e-7,
            energy: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowSettings {
    pub step: f64,
    pub max_iters: usize,
    pub amplitude: f64,
    pub random_degree: usize,
}

impl Default for FlowSettings {
    fn default() -> Self {
        Self { step: 0.05, max_iters: 5000, amplitude: 0.3, random_degree: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub basis_degree: usize,
    /// `None` picks [`DEFAULT_GRID`] when it is fine enough for the degree,
    /// otherwise the smallest grid that is.
    pub grid: Option<GridLevels>,
    pub seed: u64,
    pub format: OutputFormat,
    pub output: PathBuf,
    pub cache: Option<PathBuf>,
    pub samples: usize,
    pub tolerances: Tolerances,
    pub flow: FlowSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            basis_degree: DEFAULT_DEGREE,
            grid: None,
            seed: DEFAULT_SEED,
            format: OutputFormat::Csv,
            output: PathBuf::from("hopf-output"),
            cache: None,
            samples: 100_000,
            tolerances: Tolerances::default(),
            flow: FlowSettings::default(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().or_else(|_| err(format!("invalid value `{value}` for `{key}`")))
}

/// Parses `t,xi1,xi2` (commas or `x` as separators).
pub fn parse_grid(value: &str) -> Result<GridLevels, ConfigError> {
    let parts: Vec<&str> = value.split([',', 'x']).map(str::trim).collect();
    match parts.as_slice() {
        [t, a, b] => Ok(GridLevels::new(parse("grid", t)?, parse("grid", a)?, parse("grid", b)?)),
        _ => err(format!("grid must be three integers `t,xi1,xi2`, got `{value}`")),
    }
}

/// Smallest grid with exactness at least `2N + 2`.
pub fn minimal_grid(degree: usize) -> GridLevels {
    let need = 2 * degree + 2;
    GridLevels::new(need.div_ceil(4).max(1), need + 1, need + 1)
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let t = &mut self.tolerances;
        match key {
            "degree" | "basis_degree" => self.basis_degree = parse(key, value)?,
            "grid" => self.grid = Some(parse_grid(value)?),
            "seed" => self.seed = parse(key, value)?,
            "format" => self.format = value.parse()?,
            "output" => self.output = PathBuf::from(value),
            "cache" => self.cache = Some(PathBuf::from(value)),
            "samples" => self.samples = parse(key, value)?,
            "flow.step" => self.flow.step = parse(key, value)?,
            "flow.max_iters" => self.flow.max_iters = parse(key, value)?,
            "flow.amplitude" => self.flow.amplitude = parse(key, value)?,
            "flow.random_degree" => self.flow.random_degree = parse(key, value)?,
            "tol.spectrum" => t.spectrum = parse(key, value)?,
            "tol.identity_relative" => t.identity_relative = parse(key, value)?,
            "tol.identity_pointwise" => t.identity_pointwise = parse(key, value)?,
            "tol.identity_hopf" => t.identity_hopf = parse(key, value)?,
            "tol.inequality" => t.inequality = parse(key, value)?,
            "tol.hessian" => t.hessian = parse(key, value)?,
            "tol.second_difference" => t.second_difference = parse(key, value)?,
            "tol.bochner_yano" => t.bochner_yano = parse(key, value)?,
            "tol.rigidity" => t.rigidity = parse(key, value)?,
            "tol.classify" => t.classify = parse(key, value)?,
            "tol.flow" => t.flow = parse(key, value)?,
            "tol.energy" => t.energy = parse(key, value)?,
            other => return err(format!("unknown configuration key `{other}`")),
        }
        Ok(())
    }

    /// Applies a `key = value` document. Blank lines and `#` comments are
    /// ignored.
    pub fn apply_str(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("line {}: expected `key = value`", i + 1));
            };
            self.set(key.trim(), value.trim()).map_err(|e| ConfigError(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).or_else(|e| err(format!("cannot read {}: {e}", path.display())))?;
        self.apply_str(&text)
    }

    /// Applies `KEY=VALUE` strings from the command line.
    pub fn apply_overrides(&mut self, items: &[String]) -> Result<(), ConfigError> {
        for item in items {
            let Some((key, value)) = item.split_once('=') else {
                return err(format!("override `{item}` is not KEY=VALUE"));
            };
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn levels(&self) -> GridLevels {
        self.grid.unwrap_or_else(|| {
            if DEFAULT_GRID.exactness() >= 2 * self.basis_degree + 2 {
                DEFAULT_GRID
            } else {
                minimal_grid(self.basis_degree)
            }
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.basis_degree > MAX_SUPPORTED_DEGREE {
            return err(format!("degree {} exceeds the supported maximum {MAX_SUPPORTED_DEGREE}", self.basis_degree));
        }
        let levels = self.levels();
        if levels.t == 0 || levels.xi1 == 0 || levels.xi2 == 0 {
            return err("grid levels must be positive");
        }
        if levels.exactness() < 2 * self.basis_degree + 2 {
            return err(format!(
                "grid {},{},{} is exact to degree {}, degree {} needs {}",
                levels.t,
                levels.xi1,
                levels.xi2,
                levels.exactness(),
                self.basis_degree,
                2 * self.basis_degree + 2
            ));
        }
        let positive = [
            self.tolerances.spectrum,
            self.tolerances.identity_relative,
            self.tolerances.identity_pointwise,
            self.tolerances.identity_hopf,
            self.tolerances.inequality,
            self.tolerances.hessian,
            self.tolerances.second_difference,
            self.tolerances.bochner_yano,
            self.tolerances.rigidity,
            self.tolerances.classify,
            self.tolerances.flow,
            self.tolerances.energy,
            self.flow.step,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return err("tolerances and the flow step must be positive");
        }
        if self.samples == 0 {
            return err("samples must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let mut c = RunConfig::default();
        c.apply_str("# comment\ndegree = 4\ngrid = 6,12,12\n\ntol.flow = 1e-6 # trailing\n").unwrap();
        assert_eq!(c.basis_degree, 4);
        assert_eq!(c.levels(), GridLevels::new(6, 12, 12));
        assert_eq!(c.tolerances.flow, 1e-6);
        c.apply_overrides(&["seed=7".into(), "format=json".into()]).unwrap();
        assert_eq!((c.seed, c.format), (7, OutputFormat::Json));
        assert!(c.validate().is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = RunConfig::default();
        assert!(c.apply_str("nonsense").is_err());
        assert!(c.set("bogus", "1").is_err());
        assert!(c.set("degree", "six").is_err());
        c.set("grid", "2,4,4").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn default_grid_grows_with_degree() {
        let mut c = RunConfig::default();
        assert_eq!(c.levels(), DEFAULT_GRID);
        c.basis_degree = 10;
        assert!(c.levels().exactness() >= 22);
        assert!(c.validate().is_ok());
        c.basis_degree = 13;
        assert!(c.validate().is_err());
    }
}
