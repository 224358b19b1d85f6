//! Randomized verification suites.

use std::f64::consts::PI;

use hopf_core::field::generators::{
    bumped_hopf, conformal_gradient_horizontal, conformal_lift, hopf_left, hopf_right, random_unit, random_variation,
};
use hopf_core::field::{inequality_gap, FieldSpace, FramedField, GapKind, VariationField};
use hopf_core::variational::hessian::SECOND_DIFFERENCE_STEP;
use hopf_core::variational::{
    bochner_yano, classify_hopf, energy_identity_report, energy_second_difference, hessian, pointwise_identity_residual,
    rigidity_diagnostics, vertical_energy, Side,
};
use hopf_core::UnitQuaternion;
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{Check, CheckRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Identities,
    Inequalities,
    Hessians,
    Rigidity,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Inequalities => "inequalities",
            Suite::Hessians => "hessians",
            Suite::Rigidity => "rigidity",
        }
    }
}

/// Random fields per randomized suite.
pub const FIELDS_PER_SUITE: u64 = 20;

/// Variation pairs in the Hessian suite.
pub const HESSIAN_PAIRS: u64 = 50;

/// Degree of the random fields in the identity, inequality and Bochner–Yano checks.
pub const RANDOM_FIELD_DEGREE: usize = 3;

fn with_field(row: CheckRow, space: &FieldSpace, field: &FramedField) -> Check {
    Check { row, field: Some(field.to_record(space)) }
}

/// Per-field seeds derived from the run seed.
fn seeds(base: u64, count: u64) -> impl Iterator<Item = u64> {
    (0..count).map(move |i| base.wrapping_add(i))
}

fn hopf_cases(space: &FieldSpace) -> Result<Vec<(String, FramedField, Side, [f64; 3])>, CliError> {
    let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.48, -0.6, 0.64]];
    let mut out = Vec::new();
    for u in axes {
        let tag = format!("{},{},{}", u[0], u[1], u[2]);
        out.push((format!("left({tag})"), hopf_left(space, u)?, Side::Left, u));
        out.push((format!("right({tag})"), hopf_right(space, u)?, Side::Right, u));
    }
    Ok(out)
}

pub fn run(suite: Suite, space: &FieldSpace, config: &RunConfig) -> Result<Vec<Check>, CliError> {
    match suite {
        Suite::Identities => identities(space, config),
        Suite::Inequalities => inequalities(space, config),
        Suite::Hessians => hessians(space, config),
        Suite::Rigidity => rigidity(space, config),
    }
}

fn identities(space: &FieldSpace, config: &RunConfig) -> Result<Vec<Check>, CliError> {
    let tol = &config.tolerances;
    let pi2 = PI * PI;
    let mut checks = Vec::new();
    for seed in seeds(config.seed, FIELDS_PER_SUITE) {
        let f = random_unit(space, RANDOM_FIELD_DEGREE, seed)?;
        let r = energy_identity_report(space, &f)?;
        checks.push(with_field(CheckRow::below("energy_identity", "random", Some(seed), r.relative_residual(), tol.identity_relative), space, &f));
        let p = pointwise_identity_residual(space, &f, None)?;
        let worst = p.iter().map(|v| v.abs()).fold(0.0, f64::max);
        checks.push(with_field(CheckRow::below("pointwise_identity", "random", Some(seed), worst, tol.identity_pointwise), space, &f));
        let floor = r.e_vertical - 2.0 * pi2;
        checks.push(with_field(CheckRow::at_least("energy_above_minimum", "random", Some(seed), floor, 1e-6), space, &f));
    }
    for t in [0.1, 0.2, 0.3] {
        let f = bumped_hopf(space, t);
        let r = energy_identity_report(space, &f)?;
        checks.push(with_field(CheckRow::below("energy_identity", format!("bump({t})"), None, r.relative_residual(), tol.identity_relative), space, &f));
    }
    for (case, f, _, _) in hopf_cases(space)? {
        let r = energy_identity_report(space, &f)?;
        checks.push(CheckRow::below("energy_identity", case.clone(), None, r.identity_residual.abs(), tol.identity_hopf).into());
        let rel = (r.e_vertical - 2.0 * pi2).abs() / (2.0 * pi2);
        checks.push(CheckRow::below("hopf_energy", case, None, rel, tol.identity_hopf).into());
    }
    Ok(checks)
}

fn inequalities(space: &FieldSpace, config: &RunConfig) -> Result<Vec<Check>, CliError> {
    let tol = config.tolerances.inequality;
    let per_field = config.samples.div_ceil(FIELDS_PER_SUITE as usize);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sigma = hopf_left(space, [1.0, 0.0, 0.0])?;
    let mut checks = Vec::new();
    for seed in seeds(config.seed, FIELDS_PER_SUITE) {
        let nodes = space.sample((0..per_field).map(|_| UnitQuaternion::random(&mut rng)).collect());
        let f = random_unit(space, RANDOM_FIELD_DEGREE, seed)?;
        let r = inequality_gap(space, GapKind::Nonlinear, &f, None, Some(&nodes))?;
        checks.push(with_field(CheckRow::at_least("nonlinear_gap", format!("random, {per_field} points"), Some(seed), r.min_gap(), tol), space, &f));
        let a = random_variation(space, RANDOM_FIELD_DEGREE, seed).to_framed();
        let r = inequality_gap(space, GapKind::Linear, &sigma, Some(&a), Some(&nodes))?;
        checks.push(with_field(CheckRow::at_least("linear_gap", format!("random variation, {per_field} points"), Some(seed), r.min_gap(), tol), space, &a));
        checks.push(CheckRow::below("linear_hypotheses", "violations", Some(seed), r.violations.len() as f64, 0.5).into());
    }
    for (case, f, _, _) in hopf_cases(space)? {
        let r = inequality_gap(space, GapKind::Nonlinear, &f, None, None)?;
        let worst = r.gap.iter().map(|g| g.abs()).fold(0.0, f64::max);
        checks.push(CheckRow::below("equality_case", case, None, worst, tol).into());
    }
    Ok(checks)
}

fn hessians(space: &FieldSpace, config: &RunConfig) -> Result<Vec<Check>, CliError> {
    let tol = &config.tolerances;
    let degree = space.max_degree();
    let mut checks = Vec::new();
    for pair in 0..HESSIAN_PAIRS {
        let sa = config.seed.wrapping_add(2 * pair);
        let a = random_variation(space, degree, sa);
        let b = random_variation(space, degree, sa.wrapping_add(1));
        let gap = match hessian(space, &a, &b) {
            Ok(h) => h.relative_gap(h.jacobi.abs().max(h.bochner.abs()).max(f64::MIN_POSITIVE)),
            Err(hopf_core::Error::Disagreement { .. }) => f64::INFINITY,
            Err(e) => return Err(e.into()),
        };
        checks.push(with_field(CheckRow::below("hessian_pair", format!("pair {pair}"), Some(sa), gap, tol.hessian), space, &a.to_framed()));
    }
    let constant = VariationField::from_parts(&space.constant(1.0), &DVector::zeros(space.dim()));
    let gradient = conformal_gradient_horizontal(space, [0.5, 0.5, -0.5, 0.5])?;
    let lift = conformal_lift(space, [0.0, 1.0, 0.0])?;
    for (name, v, lambda) in [("constant", &constant, 0.0), ("conformal_gradient", &gradient, 1.0), ("conformal_lift", &lift, 4.0)] {
        let h = hessian(space, v, v)?;
        let n = v.norm_sq();
        checks.push(CheckRow::below("eigenvalue_jacobi", format!("{name} (expect {lambda})"), None, (h.jacobi / n - lambda).abs(), tol.hessian).into());
        checks.push(CheckRow::below("eigenvalue_bochner", format!("{name} (expect {lambda})"), None, (h.bochner / n - lambda).abs(), tol.hessian).into());
        if lambda > 0.0 {
            let d = energy_second_difference(space, v, SECOND_DIFFERENCE_STEP)?;
            checks.push(CheckRow::below("second_difference", name, None, (d / n - lambda).abs() / lambda, tol.second_difference).into());
        }
    }
    for seed in seeds(config.seed, FIELDS_PER_SUITE) {
        let x = random_unit(space, RANDOM_FIELD_DEGREE, seed)?.to_linear(space);
        let (lhs, rhs) = bochner_yano(space, &x)?;
        let rel = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);
        checks.push(with_field(CheckRow::below("bochner_yano", "random", Some(seed), rel, tol.bochner_yano), space, &x));
    }
    Ok(checks)
}

fn rigidity(space: &FieldSpace, config: &RunConfig) -> Result<Vec<Check>, CliError> {
    let tol = &config.tolerances;
    let mut checks = Vec::new();
    for (case, f, side, u) in hopf_cases(space)? {
        let r = rigidity_diagnostics(space, &f)?;
        checks.push(CheckRow::holds("rigidity_applicable", case.clone(), None, r.applicable).into());
        checks.push(CheckRow::below("rigidity_residual", case.clone(), None, r.max_residual(), tol.rigidity).into());
        let c = classify_hopf(space, &f, tol.classify)?;
        let norm = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
        let axis_ok = (0..3).all(|l| (c.axis[l] - u[l] / norm).abs() < 1e-8);
        checks.push(CheckRow::holds("classified_side", case.clone(), None, c.is_hopf && c.side == side && axis_ok).into());
        checks.push(CheckRow::below("classification_distance", case, None, c.l2_distance, tol.classify).into());
    }
    let bumped = bumped_hopf(space, 0.1);
    let c = classify_hopf(space, &bumped, tol.classify)?;
    checks.push(with_field(CheckRow::holds("perturbation_rejected", "bump(0.1)", None, !c.is_hopf), space, &bumped));
    let slight = bumped_hopf(space, 0.05);
    let r = rigidity_diagnostics(space, &slight)?;
    checks.push(with_field(CheckRow::holds("non_geodesic_flagged", "bump(0.05)", None, !r.applicable), space, &slight));
    let e = vertical_energy(space, &slight)?;
    checks.push(CheckRow::at_least("energy_above_minimum", "bump(0.05)", None, e - 2.0 * PI * PI, 1e-6).into());
    Ok(checks)
}
