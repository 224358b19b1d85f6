//! Second variation of the vertical energy at the Hopf field `σ₁`.
//!
//! For variations `α, β ⊥ σ₁` two evaluations are compared: the Jacobi form
//! `∫⟨Jα, β⟩ = Re⟨Λa, b⟩` on coefficients, and the Lie-derivative form
//! `∫(½⟨L_α g, L_β g⟩ − div α · div β)` by quadrature.

use serde::{Deserialize, Serialize};

use super::energy::vertical_energy;
use crate::error::{Error, Result};
use crate::field::calculus::lambda_apply;
use crate::field::generators::along_variation;
use crate::field::jets::{grid_jets, norm_sq, Jet};
use crate::field::{FieldSpace, FramedField, VariationField};

/// Relative agreement required between the two Hessian evaluations.
pub const HESSIAN_AGREEMENT_TOL: f64 = 1e-8;

/// Step of the central second difference of the energy.
pub const SECOND_DIFFERENCE_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HessianValues {
    pub jacobi: f64,
    pub bochner: f64,
}

impl HessianValues {
    /// `|jacobi − bochner|` relative to `scale`.
    pub fn relative_gap(&self, scale: f64) -> f64 {
        (self.jacobi - self.bochner).abs() / scale.max(f64::MIN_POSITIVE)
    }
}

fn lie_pairing(a: &Jet, b: &Jet) -> f64 {
    let (la, lb) = (a.lie_tensor(), b.lie_tensor());
    let inner: f64 = la.iter().flatten().zip(lb.iter().flatten()).map(|(x, y)| x * y).sum();
    0.5 * inner - a.divergence() * b.divergence()
}

/// `∫(½⟨L_α g, L_β g⟩ − div α · div β)` over the grid.
pub fn lie_form(space: &FieldSpace, a: &FramedField, b: &FramedField) -> Result<f64> {
    a.check_space(space)?;
    b.check_space(space)?;
    let (ja, jb) = (grid_jets(space, a), grid_jets(space, b));
    Ok(space.grid().integrate_values(ja.iter().zip(&jb).map(|(x, y)| lie_pairing(x, y))))
}

/// Both evaluations of `H(α, β)`; errors when they disagree beyond
/// [`HESSIAN_AGREEMENT_TOL`] relative to `‖Λa‖‖b‖ + ‖a‖‖Λb‖`.
pub fn hessian(space: &FieldSpace, a: &VariationField, b: &VariationField) -> Result<HessianValues> {
    let la = lambda_apply(space, a);
    let jacobi = la.inner(b);
    let bochner = lie_form(space, &a.to_framed(), &b.to_framed())?;
    let values = HessianValues { jacobi, bochner };
    let lb = lambda_apply(space, b);
    let scale = (la.norm_sq() * b.norm_sq()).sqrt() + (a.norm_sq() * lb.norm_sq()).sqrt();
    if values.relative_gap(scale) > HESSIAN_AGREEMENT_TOL {
        return Err(Error::Disagreement { what: "Jacobi and Lie-derivative Hessians", lhs: jacobi, rhs: bochner });
    }
    Ok(values)
}

/// Both sides of `∫(|∇X|² − 2|X|²) = ∫(½|L_X g|² − (div X)²)`.
pub fn bochner_yano(space: &FieldSpace, x: &FramedField) -> Result<(f64, f64)> {
    x.check_space(space)?;
    let jets = grid_jets(space, x);
    let lhs = space.grid().integrate_values(jets.iter().map(|j| j.energy_density() - 2.0 * norm_sq(j.value)));
    let rhs = space.grid().integrate_values(jets.iter().map(|j| lie_pairing(j, j)));
    Ok((lhs, rhs))
}

/// `(E(t = h) − 2E(0) + E(−h))/h²` along `t ↦ normalize(σ₁ + t·a)`.
pub fn energy_second_difference(space: &FieldSpace, a: &VariationField, h: f64) -> Result<f64> {
    let e = |t: f64| vertical_energy(space, &along_variation(space, a, t));
    Ok((e(h)? - 2.0 * e(0.0)? + e(-h)?) / (h * h))
}
