//! The `hopf` command-line tool.

pub mod config;
pub mod error;
pub mod flow;
pub mod report;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hopf_core::harmonics::load_or_build;
use hopf_core::operators::{numeric_spectrum, FrameDerivatives, SpectrumKind};
use hopf_core::{build_basis, FieldSpace, HarmonicBasis};

pub use config::{OutputFormat, RunConfig};
pub use error::{CliError, Status};

use crate::config::parse_grid;
use crate::report::{write_text, FailedCheck, FailureRecord, VerifyReport};

/// Environment variable that sets the worker thread count.
pub const THREADS_ENV: &str = "HOPF_THREADS";

#[derive(Debug, Parser)]
#[command(name = "hopf", version, about = "Spectra, identities and energy flows for unit vector fields on S³")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Largest harmonic degree of the basis.
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    /// Quadrature levels `t,xi1,xi2`.
    #[arg(long, global = true, value_parser = parse_grid_arg)]
    pub grid: Option<String>,
    #[arg(long, global = true, conflicts_with = "fresh")]
    pub seed: Option<u64>,
    /// Draw a new seed and print it.
    #[arg(long, global = true)]
    pub fresh: bool,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Directory for report files.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Basis and quadrature cache file.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Override a configuration key.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
}

fn parse_grid_arg(s: &str) -> Result<String, String> {
    parse_grid(s).map(|_| s.to_string()).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare numeric and closed-form Jacobi spectra.
    Spectrum {
        #[arg(value_parser = parse_kind)]
        kind: SpectrumKind,
    },
    /// Run a randomized verification suite.
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
        /// Sample points for the inequality scan.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Minimize the vertical energy from an initial field.
    Flow {
        #[arg(value_enum)]
        init: flow::Init,
        /// Size of the perturbation for `perturbed`.
        #[arg(long)]
        amplitude: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Stopping tolerance on the tension norm.
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn parse_kind(s: &str) -> Result<SpectrumKind, String> {
    s.parse()
}

impl Cli {
    /// Defaults, then the config file, then `--set`, then dedicated flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let g = &self.global;
        let mut c = RunConfig::default();
        if let Some(path) = &g.config {
            c.apply_file(path)?;
        }
        c.apply_overrides(&g.overrides)?;
        if let Some(d) = g.degree {
            c.basis_degree = d;
        }
        if let Some(grid) = &g.grid {
            c.grid = Some(parse_grid(grid)?);
        }
        if let Some(s) = g.seed {
            c.seed = s;
        }
        if g.fresh {
            c.seed = rand::random();
        }
        if let Some(f) = g.format {
            c.format = f;
        }
        if let Some(o) = &g.output {
            c.output = o.clone();
        }
        if let Some(p) = &g.cache {
            c.cache = Some(p.clone());
        }
        match &self.command {
            Command::Spectrum { .. } => {}
            Command::Verify { samples, .. } => {
                if let Some(n) = samples {
                    c.samples = *n;
                }
            }
            Command::Flow { amplitude, step, max_iters, tol, .. } => {
                if let Some(a) = amplitude {
                    c.flow.amplitude = *a;
                }
                if let Some(s) = step {
                    c.flow.step = *s;
                }
                if let Some(m) = max_iters {
                    c.flow.max_iters = *m;
                }
                if let Some(t) = tol {
                    c.tolerances.flow = *t;
                }
            }
        }
        c.validate()?;
        Ok(c)
    }
}

fn build_space(config: &RunConfig) -> Result<FieldSpace, CliError> {
    let levels = config.levels();
    Ok(match &config.cache {
        Some(path) => {
            let (basis, grid) = load_or_build(path, config.basis_degree, levels)?;
            FieldSpace::from_parts(basis, grid)?
        }
        None => FieldSpace::new(config.basis_degree, levels)?,
    })
}

fn build_basis_only(config: &RunConfig) -> Result<HarmonicBasis, CliError> {
    Ok(match &config.cache {
        Some(path) => load_or_build(path, config.basis_degree, config.levels())?.0,
        None => build_basis(config.basis_degree)?,
    })
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| config::ConfigError(format!("{THREADS_ENV} must be a positive integer, got `{value}`")))?;
    // A pool that already exists keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn cmd_spectrum(kind: SpectrumKind, config: &RunConfig) -> Result<Status, CliError> {
    let basis = build_basis_only(config)?;
    let derivatives = FrameDerivatives::new(&basis);
    let report = match numeric_spectrum(kind, &derivatives) {
        Ok(r) => r,
        Err(e @ hopf_core::Error::UnmatchedEigenvalue { .. }) => {
            eprintln!("spectrum {kind}: {e}");
            return Ok(Status::VerificationFailed);
        }
        Err(e) => return Err(e.into()),
    };
    let text = match config.format {
        OutputFormat::Csv => report.to_csv()?,
        OutputFormat::Json => report.to_json()? + "\n",
    };
    let name = format!("spectrum-{kind}.{}", config.format.extension());
    let path = write_text(&config.output, &name, &text)?;
    let tol = config.tolerances.spectrum;
    let pass = report.passes(tol);
    println!(
        "spectrum {kind}: degree {}, {} rows, max abs error {:.16e}, {}",
        config.basis_degree,
        report.rows.len(),
        report.max_abs_error(),
        if pass { "pass" } else { "FAIL" }
    );
    for row in report.rows.iter().filter(|r| !r.passes(tol)) {
        println!(
            "  mismatch n={:?} k={}: closed {:.16e} numeric {:.16e} multiplicity {} vs {}",
            row.n, row.k, row.eigenvalue_closed_form, row.eigenvalue_numeric, row.mult_real_closed, row.mult_real_numeric
        );
    }
    println!("wrote {}", path.display());
    Ok(if pass { Status::Success } else { Status::VerificationFailed })
}

fn cmd_verify(suite: verify::Suite, config: &RunConfig) -> Result<Status, CliError> {
    let space = build_space(config)?;
    let checks = verify::run(suite, &space, config)?;
    let levels = config.levels();
    let mut failures = Vec::new();
    let mut rows = Vec::with_capacity(checks.len());
    for c in checks {
        if !c.row.pass {
            failures.push(FailedCheck { row: c.row.clone(), field: c.field });
        }
        rows.push(c.row);
    }
    let report = VerifyReport {
        suite: suite.name().into(),
        basis_degree: config.basis_degree,
        grid: [levels.t, levels.xi1, levels.xi2],
        seed: config.seed,
        rows,
    };
    let name = format!("verify-{}.{}", suite.name(), config.format.extension());
    let path = write_text(&config.output, &name, &report.render(config.format)?)?;
    println!("verify {}: seed {}, {} checks, {} failed", suite.name(), config.seed, report.rows.len(), failures.len());
    for f in &failures {
        let seed = f.row.seed.map(|s| format!(" seed {s}")).unwrap_or_default();
        println!(
            "  FAIL {} [{}]{seed}: {:.16e} {:?} {:.16e}",
            f.row.check, f.row.case, f.row.value, f.row.relation, f.row.tolerance
        );
    }
    println!("wrote {}", path.display());
    if failures.is_empty() {
        return Ok(Status::Success);
    }
    let record = FailureRecord { suite: suite.name().into(), seed: config.seed, failures };
    let name = format!("verify-{}-failure.json", suite.name());
    let path = write_text(&config.output, &name, &(serde_json::to_string_pretty(&record)? + "\n"))?;
    println!("wrote {}", path.display());
    Ok(Status::VerificationFailed)
}

fn dispatch(cli: &Cli) -> Result<Status, CliError> {
    configure_threads()?;
    let config = cli.resolve()?;
    if cli.global.fresh {
        println!("seed {}", config.seed);
    }
    match &cli.command {
        Command::Spectrum { kind } => cmd_spectrum(*kind, &config),
        Command::Verify { suite, .. } => cmd_verify(*suite, &config),
        Command::Flow { init, .. } => {
            let space = build_space(&config)?;
            flow::run(*init, &space, &config)
        }
    }
}

/// Parses `args` and runs the command, returning the process status.
pub fn run<I, T>(args: I) -> Status
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Status::Usage } else { Status::Success };
        }
    };
    match dispatch(&cli) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            e.status()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(args: &[&str]) -> RunConfig {
        Cli::try_parse_from(args).unwrap().resolve().unwrap()
    }

    #[test]
    fn flags_override_set_and_defaults() {
        let c = resolve(&["hopf", "--set", "seed=5", "--set", "degree=4", "--degree", "3", "spectrum", "vertical"]);
        assert_eq!((c.seed, c.basis_degree), (5, 3));
        let c = resolve(&["hopf", "flow", "perturbed", "--amplitude", "0.2", "--tol", "1e-6", "--seed", "7"]);
        assert_eq!((c.flow.amplitude, c.tolerances.flow, c.seed), (0.2, 1e-6, 7));
    }

    #[test]
    fn usage_errors() {
        assert!(Cli::try_parse_from(["hopf", "spectrum", "sideways"]).is_err());
        assert!(Cli::try_parse_from(["hopf", "--grid", "1,2", "spectrum", "vertical"]).is_err());
        assert!(Cli::try_parse_from(["hopf", "--seed", "1", "--fresh", "verify", "rigidity"]).is_err());
        let cli = Cli::try_parse_from(["hopf", "--set", "bogus=1", "verify", "rigidity"]).unwrap();
        assert_eq!(cli.resolve().unwrap_err().status(), Status::Usage);
    }
}
