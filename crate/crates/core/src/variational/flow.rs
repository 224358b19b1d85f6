//! Gradient descent of the vertical energy over unit fields.
//!
//! The unknowns are the coefficients `c` of a polynomial triple `G`, and the
//! field is `F = G/|G|` at the nodes. The discrete energy
//! `E(c) = Σᵢ wᵢ·½|∇F|²(xᵢ)` is differentiated exactly: with
//! `Vⱼ = ∇_{σⱼ}F`, `r = |G|`, `Pⱼ = Vⱼ/r` and
//! `Q = Σⱼ(Vⱼ × eⱼ − Vⱼ·σⱼr/r − |Vⱼ|²F)/r`, the gradient in the component
//! `k` is `Σⱼ Dⱼᵀ·Π(Pⱼₖ) + Π(Qₖ)`, where `Π` is the quadrature projection.
//!
//! After each step `G` is replaced by `Π(G/|G|)`. Without this `G` is free to
//! develop near-zeros between the nodes, where `G/|G|` turns sharply and the
//! quadrature underestimates the energy; the descent then chases that error.
//! With `reproject` off, `c` is only rescaled to `∫|G|² = 2π²`.
//!
//! Since `|F| = 1` at every node, the energy is recorded as
//! `Σᵢwᵢ + ½Σᵢwᵢ(|∇F|² − 2)`; only the second sum changes between iterates.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::classify::{classify_hopf, HopfClassification, CLASSIFY_TOL};
use super::energy::harmonic_residual_from_jets;
use crate::error::{Error, Result};
use crate::field::jets::{cross, field_jets, norm_sq, unit, Jet};
use crate::field::{FieldSpace, FramedField, Normalization, Provenance};
use crate::harmonics::sphere_volume;
use crate::io::fmt17;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowParams {
    /// Initial and largest step size.
    pub step: f64,
    pub max_iters: usize,
    /// Stop once the `L²` norm of the tension is below this.
    pub tol: f64,
    /// Factor applied to the step after an accepted step.
    pub growth: f64,
    /// Line search gives up below this step.
    pub min_step: f64,
    /// Tolerance passed to the final Hopf classification.
    pub classify_tol: f64,
    /// Replace `G` by the projection of `G/|G|` after every step.
    pub reproject: bool,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self { step: 0.05, max_iters: 5000, tol: 1e-7, growth: 1.2, min_step: 1e-12, classify_tol: CLASSIFY_TOL, reproject: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowStep {
    pub iter: usize,
    pub energy: f64,
    /// `L²` norm of `∇*∇F − |∇F|²F`.
    pub residual: f64,
    /// Step that produced this iterate (zero for the initial field).
    pub step: f64,
    pub unit_violation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStatus {
    Converged,
    MaxIterations,
    StepCollapse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    pub params: FlowParams,
    pub steps: Vec<FlowStep>,
    pub status: FlowStatus,
    /// Line-search rejections over the whole run.
    pub rejections: usize,
    pub classification: Option<HopfClassification>,
}

pub const TRACE_CSV_HEADER: [&str; 5] = ["iter", "energy", "residual", "step", "unit_violation"];

impl FlowTrace {
    pub fn iterations(&self) -> usize {
        self.steps.last().map_or(0, |s| s.iter)
    }

    pub fn final_step(&self) -> Option<&FlowStep> {
        self.steps.last()
    }

    pub fn converged(&self) -> bool {
        self.status == FlowStatus::Converged
    }

    /// Whether recorded energies never increase.
    pub fn is_monotone(&self) -> bool {
        self.steps.windows(2).all(|w| w[1].energy <= w[0].energy)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(TRACE_CSV_HEADER).map_err(csv_error)?;
        for s in &self.steps {
            w.write_record([s.iter.to_string(), fmt17(s.energy), fmt17(s.residual), fmt17(s.step), fmt17(s.unit_violation)])
                .map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub struct FlowOutcome {
    pub trace: FlowTrace,
    pub field: FramedField,
}

struct State {
    coeffs: [DVector<f64>; 3],
    energy: f64,
    /// `∫(|∇F|² − 2|F|²)`, the part of the energy compared in the line search.
    excess: f64,
    residual: f64,
    unit_violation: f64,
    gradient: [DVector<f64>; 3],
}

fn evaluate(space: &FieldSpace, coeffs: [DVector<f64>; 3]) -> State {
    let field = FramedField::normalized(coeffs.clone());
    let jets = field_jets(space, &field, space.nodes());
    let grid = space.grid();
    let excess = grid.integrate_values(jets.iter().map(Jet::excess_density));
    let residual = harmonic_residual_from_jets(space, &jets).norm;
    let unit_violation = jets.iter().map(|j| (1.0 - norm_sq(j.value)).abs()).fold(0.0, f64::max);
    State { coeffs, energy: space.volume() + 0.5 * excess, excess, residual, unit_violation, gradient: gradient(space, &jets) }
}

fn gradient(space: &FieldSpace, jets: &[Jet]) -> [DVector<f64>; 3] {
    let m = jets.len();
    let mut p = vec![DVector::zeros(m); 9];
    let mut q = [DVector::zeros(m), DVector::zeros(m), DVector::zeros(m)];
    for (i, jet) in jets.iter().enumerate() {
        let v = jet.covariant();
        let r = jet.radius;
        for j in 0..3 {
            let vxe = cross(v[j], unit(j));
            let vv = norm_sq(v[j]);
            for k in 0..3 {
                p[3 * j + k][i] = v[j][k] / r;
                q[k][i] += (vxe[k] - v[j][k] * jet.radius_d[j] / r - vv * jet.value[k]) / r;
            }
        }
    }
    [0, 1, 2].map(|k| {
        let mut g = space.project(&q[k]);
        for j in 0..3 {
            g -= space.derivative(j, &space.project(&p[3 * j + k]));
        }
        g
    })
}

fn reproject(space: &FieldSpace, c: [DVector<f64>; 3]) -> [DVector<f64>; 3] {
    let values = FramedField::normalized(c).nodal_values(space);
    values.each_ref().map(|v| space.project(v))
}

fn rescale(mut c: [DVector<f64>; 3]) -> [DVector<f64>; 3] {
    let norm = c.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
    let target = sphere_volume().sqrt();
    for v in &mut c {
        *v *= target / norm;
    }
    c
}

/// Discrete energy and its exact coefficient gradient for `G/|G|`.
pub fn energy_and_gradient(space: &FieldSpace, g: &[DVector<f64>; 3]) -> (f64, [DVector<f64>; 3]) {
    let s = evaluate(space, g.clone());
    (s.energy, s.gradient)
}

/// Descend from `initial` until the tension norm drops below `params.tol`,
/// the iteration budget runs out, or the line search collapses. A step is
/// accepted only if the energy does not increase; otherwise it is halved.
pub fn gradient_flow(space: &FieldSpace, initial: &FramedField, params: &FlowParams) -> Result<FlowOutcome> {
    initial.require_unit(space)?;
    if !(params.step > 0.0 && params.tol > 0.0 && params.growth >= 1.0 && params.min_step > 0.0) {
        return Err(Error::Degenerate("flow parameters must be positive"));
    }
    let start = initial.coeffs().clone();
    let mut state = evaluate(space, if params.reproject { reproject(space, start) } else { rescale(start) });
    let mut steps = vec![FlowStep {
        iter: 0,
        energy: state.energy,
        residual: state.residual,
        step: 0.0,
        unit_violation: state.unit_violation,
    }];
    let mut tau = params.step;
    let mut rejections = 0;
    let mut iter = 0;
    let status = loop {
        if state.residual < params.tol {
            break FlowStatus::Converged;
        }
        if iter >= params.max_iters {
            break FlowStatus::MaxIterations;
        }
        let accepted = loop {
            let trial: [DVector<f64>; 3] = [0, 1, 2].map(|k| &state.coeffs[k] - &state.gradient[k] * tau);
            let trial = if params.reproject { reproject(space, trial) } else { rescale(trial) };
            let next = evaluate(space, trial);
            if next.excess <= state.excess {
                break Some(next);
            }
            rejections += 1;
            tau *= 0.5;
            if tau < params.min_step {
                break None;
            }
        };
        let Some(next) = accepted else { break FlowStatus::StepCollapse };
        iter += 1;
        steps.push(FlowStep { iter, energy: next.energy, residual: next.residual, step: tau, unit_violation: next.unit_violation });
        state = next;
        tau = (tau * params.growth).min(params.step);
    };
    let provenance = Provenance::new("gradient_flow", initial.provenance.seed, vec![params.step, params.tol]);
    let field = FramedField::new(state.coeffs, Normalization::Nodal).with_provenance(provenance);
    let classification = Some(classify_hopf(space, &field, params.classify_tol)?);
    Ok(FlowOutcome { trace: FlowTrace { params: *params, steps, status, rejections, classification }, field })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::generators::{hopf_left, perturbed_hopf, random_unit};
    use crate::harmonics::GridLevels;
    use std::f64::consts::PI;

    #[test]
    fn gradient_matches_finite_differences() {
        let s = FieldSpace::new(3, GridLevels::new(5, 10, 10)).unwrap();
        let f = random_unit(&s, 3, 4).unwrap();
        let g = f.coeffs().clone();
        let (_, grad) = energy_and_gradient(&s, &g);
        let h = 1e-6;
        for (k, i) in [(0, 0), (1, 3), (2, 7), (0, 12), (1, 29)] {
            let mut gp = g.clone();
            gp[k][i] += h;
            let mut gm = g.clone();
            gm[k][i] -= h;
            let fd = (energy_and_gradient(&s, &gp).0 - energy_and_gradient(&s, &gm).0) / (2.0 * h);
            assert!((fd - grad[k][i]).abs() < 1e-6 * (1.0 + fd.abs()), "{k},{i}: {fd} vs {}", grad[k][i]);
        }
    }

    #[test]
    fn hopf_start_is_already_converged() {
        let s = FieldSpace::new(3, GridLevels::new(5, 10, 10)).unwrap();
        let out = gradient_flow(&s, &hopf_left(&s, [1.0, 0.0, 0.0]).unwrap(), &FlowParams::default()).unwrap();
        assert_eq!(out.trace.status, FlowStatus::Converged);
        assert_eq!(out.trace.iterations(), 0);
        assert!((out.trace.steps[0].energy - 2.0 * PI * PI).abs() < 1e-10);
        assert!(out.trace.classification.unwrap().is_hopf);
    }

    #[test]
    fn perturbed_start_descends_to_hopf() {
        let s = FieldSpace::new(3, GridLevels::new(5, 10, 10)).unwrap();
        let out = gradient_flow(&s, &perturbed_hopf(&s, 0.3), &FlowParams::default()).unwrap();
        let t = &out.trace;
        assert!(t.is_monotone());
        assert_eq!(t.status, FlowStatus::Converged, "{:?}", t.final_step());
        assert!((t.final_step().unwrap().energy - 2.0 * PI * PI).abs() < 1e-6);
        assert!(t.classification.as_ref().unwrap().is_hopf);
        let csv = t.to_csv().unwrap();
        assert_eq!(csv.lines().count(), t.steps.len() + 1);
    }

    #[test]
    fn rejects_bad_parameters() {
        let s = FieldSpace::new(2, GridLevels::new(3, 8, 8)).unwrap();
        let p = FlowParams { step: -1.0, ..FlowParams::default() };
        assert!(gradient_flow(&s, &hopf_left(&s, [1.0, 0.0, 0.0]).unwrap(), &p).is_err());
    }
}
