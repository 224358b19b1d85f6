//! Vertical energy `E(F) = ½∫|∇F|²`, the energies of the maps `μ∘F` and
//! `η∘F` into su(2), and the identity tying them together.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::jets::{dot, field_jets, grid_jets, norm_sq, Jet, Vec3};
use crate::field::{FieldSpace, FramedField, NodeSet};
use crate::harmonics::sphere_volume;
use crate::su2::{Quaternion, UnitQuaternion};

/// Which translation turns a unit field into a map `S³ → S²ᵤ ⊂ su(2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    /// `η(Y) = Y·x⁻¹`, the right translation.
    Eta,
    /// `μ(Y) = x⁻¹·Y`, the left translation.
    Mu,
}

/// `½∫|∇F|²` from the jets, accumulated as `∫|F|² + ½∫(|∇F|² − 2|F|²)` so
/// that fields close to a Hopf field do not lose digits to the constant part.
pub fn energy_from_jets(space: &FieldSpace, jets: &[Jet]) -> f64 {
    let base = space.grid().integrate_values(jets.iter().map(|j| norm_sq(j.value)));
    let excess = space.grid().integrate_values(jets.iter().map(Jet::excess_density));
    base + 0.5 * excess
}

/// Vertical energy `½∫|∇F|²` of a unit field.
pub fn vertical_energy(space: &FieldSpace, field: &FramedField) -> Result<f64> {
    field.require_unit(space)?;
    Ok(energy_from_jets(space, &grid_jets(space, field)))
}

/// `|d(μ∘F)|²` at one point: the frame components of `F` are `μ∘F`.
pub fn mu_density(jet: &Jet) -> f64 {
    jet.d.iter().map(|row| norm_sq(*row)).sum()
}

/// `|d(η∘F)|²` at `x`, using `η∘F(x) = x·F⃗·x̄` so that along `x·exp(teⱼ)`
/// the derivative is `x·(σⱼF⃗ + eⱼF⃗ − F⃗eⱼ)·x̄`.
pub fn eta_density(x: UnitQuaternion, jet: &Jet) -> f64 {
    let f = Quaternion::pure(jet.value);
    (0..3)
        .map(|j| {
            let e = Quaternion::unit(j);
            let inner = Quaternion::pure(jet.d[j]) + e * f - f * e;
            let q = x.quaternion();
            (q * inner * q.conj()).imag()
        })
        .map(norm_sq)
        .sum()
}

/// `½∫|d(κ∘F)|²` for `κ = η` or `μ`.
pub fn map_energy(space: &FieldSpace, kind: MapKind, field: &FramedField) -> Result<f64> {
    field.require_unit(space)?;
    let jets = grid_jets(space, field);
    let nodes = space.grid().nodes();
    let density: Vec<f64> = match kind {
        MapKind::Mu => jets.iter().map(mu_density).collect(),
        MapKind::Eta => jets.iter().zip(nodes).map(|(j, x)| eta_density(*x, j)).collect(),
    };
    Ok(0.5 * space.grid().integrate_values(density))
}

/// Pointwise `|d(ηF)|² − 4|F|² − 2|∇F|² + |d(μF)|²` at `nodes` (the grid
/// when `None`).
pub fn pointwise_identity_residual(space: &FieldSpace, field: &FramedField, nodes: Option<&NodeSet>) -> Result<Vec<f64>> {
    field.require_unit(space)?;
    let nodes = nodes.unwrap_or(space.nodes());
    let jets = field_jets(space, field, nodes);
    Ok(jets
        .iter()
        .zip(nodes.points())
        .map(|(j, x)| eta_density(*x, j) - 4.0 * norm_sq(j.value) - 2.0 * j.energy_density() + mu_density(j))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub e_vertical: f64,
    pub e_eta: f64,
    pub e_mu: f64,
    /// `E_eta − (4π² + 2E_vertical − E_mu)`.
    pub identity_residual: f64,
}

impl EnergyReport {
    /// `|identity_residual| / (1 + E_eta)`.
    pub fn relative_residual(&self) -> f64 {
        self.identity_residual.abs() / (1.0 + self.e_eta)
    }
}

/// All three energies of a unit field and the residual of
/// `E(η∘F) = 4π² + 2E(F) − E(μ∘F)`.
pub fn energy_identity_report(space: &FieldSpace, field: &FramedField) -> Result<EnergyReport> {
    field.require_unit(space)?;
    let jets = grid_jets(space, field);
    let e_vertical = energy_from_jets(space, &jets);
    let e_mu = 0.5 * space.grid().integrate_values(jets.iter().map(mu_density));
    let e_eta = 0.5 * space.grid().integrate_values(jets.iter().zip(space.grid().nodes()).map(|(j, x)| eta_density(*x, j)));
    let constant = 2.0 * sphere_volume();
    Ok(EnergyReport { e_vertical, e_eta, e_mu, identity_residual: e_eta - (constant + 2.0 * e_vertical - e_mu) })
}

/// Tension `∇*∇F − |∇F|²F` of a unit field at the grid nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicResidual {
    pub values: Vec<Vec3>,
    /// `L²` norm of the tension.
    pub norm: f64,
    /// Largest `|⟨tension, F⟩|`; zero up to roundoff for unit fields.
    pub max_normal: f64,
}

pub fn harmonic_residual_from_jets(space: &FieldSpace, jets: &[Jet]) -> HarmonicResidual {
    let values: Vec<Vec3> = jets.iter().map(Jet::tension).collect();
    let norm = space.grid().integrate_values(values.iter().map(|v| norm_sq(*v))).max(0.0).sqrt();
    let max_normal = values.iter().zip(jets).map(|(v, j)| dot(*v, j.value).abs()).fold(0.0, f64::max);
    HarmonicResidual { values, norm, max_normal }
}

/// Residual of the harmonic section equation `∇*∇F = |∇F|²F`.
pub fn harmonic_section_residual(space: &FieldSpace, field: &FramedField) -> Result<HarmonicResidual> {
    field.require_unit(space)?;
    Ok(harmonic_residual_from_jets(space, &grid_jets(space, field)))
}

/// The field `x ↦ dψ⁻¹F(ψ(x))` for the isometry `ψ(x) = u·x·v`. Its frame
/// components are `v·F⃗(uxv)·v̄`, which keeps the polynomial degree, so the
/// coefficients are recovered exactly by projection.
pub fn isometry_pullback(space: &FieldSpace, field: &FramedField, u: UnitQuaternion, v: UnitQuaternion) -> Result<FramedField> {
    field.check_space(space)?;
    let moved: Vec<UnitQuaternion> = space.grid().nodes().iter().map(|x| u.mul(*x).mul(v)).collect();
    let samples = space.sample(moved);
    let g = field.coeffs().each_ref().map(|c| samples.evaluate(c));
    let rot = v.adjoint_matrix();
    let m = g[0].len();
    let rotated: [DVector<f64>; 3] =
        [0, 1, 2].map(|l| DVector::from_fn(m, |i, _| (0..3).map(|k| rot[l][k] * g[k][i]).sum::<f64>()));
    let coeffs = rotated.each_ref().map(|c| space.project(c));
    Ok(FramedField::new(coeffs, field.normalization()).with_provenance(field.provenance.clone()))
}

/// `|dφ|²` at a point for the Hopf map written as `η∘σ₁`: the derivative
/// along `σⱼ` is `x·(eⱼe₁ − e₁eⱼ)·x̄`.
pub fn hopf_map_density(x: UnitQuaternion) -> f64 {
    let e1 = Quaternion::I;
    let q = x.quaternion();
    (0..3)
        .map(|j| {
            let e = Quaternion::unit(j);
            norm_sq((q * (e * e1 - e1 * e) * q.conj()).imag())
        })
        .sum()
}
