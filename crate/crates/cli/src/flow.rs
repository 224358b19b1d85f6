//! The `flow` command.

use std::f64::consts::PI;

use hopf_core::field::generators::{hopf_left, perturbed_hopf, random_unit};
use hopf_core::io::fmt17;
use hopf_core::variational::{classify_hopf, gradient_flow, FlowParams, FlowStatus, HopfClassification};
use hopf_core::FieldSpace;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Status};
use crate::report::write_text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Init {
    Hopf,
    Perturbed,
    Random,
}

impl Init {
    pub fn name(self) -> &'static str {
        match self {
            Init::Hopf => "hopf",
            Init::Perturbed => "perturbed",
            Init::Random => "random",
        }
    }
}

/// How the recorded energies are normalized.
pub const ENERGY_CONVENTION: &str = "E = 1/2 * integral of |grad F|^2; the unnormalized integral doubles every value";

#[derive(Debug, Clone, Serialize)]
pub struct FlowSummary {
    pub energy_convention: &'static str,
    pub init: Init,
    pub seed: Option<u64>,
    pub basis_degree: usize,
    pub grid: [usize; 3],
    pub params: FlowParams,
    pub status: FlowStatus,
    pub iterations: usize,
    pub rejections: usize,
    pub initial_energy: f64,
    pub final_energy: f64,
    /// `E − 2π²`.
    pub energy_gap: f64,
    pub final_residual: f64,
    pub monotone: bool,
    pub classification: HopfClassification,
    pub exit_status: u8,
}

pub fn run(init: Init, space: &FieldSpace, config: &RunConfig) -> Result<Status, CliError> {
    let (initial, seed) = match init {
        Init::Hopf => (hopf_left(space, [1.0, 0.0, 0.0])?, None),
        Init::Perturbed => (perturbed_hopf(space, config.flow.amplitude), None),
        Init::Random => (random_unit(space, config.flow.random_degree, config.seed)?, Some(config.seed)),
    };
    let params = FlowParams {
        step: config.flow.step,
        max_iters: config.flow.max_iters,
        tol: config.tolerances.flow,
        classify_tol: config.tolerances.classify,
        ..FlowParams::default()
    };
    let outcome = gradient_flow(space, &initial, &params)?;
    let trace = &outcome.trace;
    let classification = match &trace.classification {
        Some(c) => c.clone(),
        None => classify_hopf(space, &outcome.field, params.classify_tol)?,
    };
    let first = trace.steps.first().expect("trace records the initial field");
    let last = trace.final_step().expect("trace records the initial field");
    let gap = last.energy - 2.0 * PI * PI;

    let status = if !trace.converged() {
        Status::NotConverged
    } else if init != Init::Hopf && !(classification.is_hopf && gap.abs() < config.tolerances.energy) {
        Status::VerificationFailed
    } else {
        Status::Success
    };

    let levels = config.levels();
    let summary = FlowSummary {
        energy_convention: ENERGY_CONVENTION,
        init,
        seed,
        basis_degree: config.basis_degree,
        grid: [levels.t, levels.xi1, levels.xi2],
        params,
        status: trace.status,
        iterations: trace.iterations(),
        rejections: trace.rejections,
        initial_energy: first.energy,
        final_energy: last.energy,
        energy_gap: gap,
        final_residual: last.residual,
        monotone: trace.is_monotone(),
        classification: classification.clone(),
        exit_status: status as u8,
    };

    let stem = format!("flow-{}", init.name());
    let dir = &config.output;
    let trace_path = write_text(dir, &format!("{stem}-trace.csv"), &trace.to_csv()?)?;
    let summary_path = write_text(dir, &format!("{stem}-summary.json"), &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    let record = outcome.field.to_record(space);
    let field_path = write_text(dir, &format!("{stem}-field.json"), &(serde_json::to_string_pretty(&record)? + "\n"))?;

    println!("flow {}: {:?} after {} iterations ({} rejected steps)", init.name(), trace.status, trace.iterations(), trace.rejections);
    println!("  energy {} -> {}", fmt17(first.energy), fmt17(last.energy));
    println!("  E - 2pi^2 = {}", fmt17(gap));
    println!("  tension {}", fmt17(last.residual));
    println!(
        "  classification: hopf {}, side {}, axis [{}, {}, {}], distance {}",
        classification.is_hopf,
        classification.side,
        fmt17(classification.axis[0]),
        fmt17(classification.axis[1]),
        fmt17(classification.axis[2]),
        fmt17(classification.l2_distance)
    );
    for p in [trace_path, summary_path, field_path] {
        println!("wrote {}", p.display());
    }
    Ok(status)
}
