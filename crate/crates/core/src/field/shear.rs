//! Shear parameter `Φ = μ + iν` of a unit field and its derivatives.
//!
//! At each point a horizontal orthonormal pair `(α, β)` is built from the
//! frame: `α` is the part of `σ₂` orthogonal to `F`, normalized, except where
//! `|⟨F, σ₂⟩| > 0.9`, where `σ₃` is used instead; `β = F × α`. With
//! `Z = α + iβ`,
//! `μ = ½(⟨α, ∇_αF⟩ + ⟨β, ∇_βF⟩)` and `ν = ½(⟨α, ∇_βF⟩ − ⟨β, ∇_αF⟩)`.
//! Rotating `Z` by a pointwise phase leaves `Φ` unchanged, so `Φ` does not
//! depend on the choice of `α`; `Z̄.Φ` changes only by that phase.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::framed::FramedField;
use super::jets::{cross, dot, grid_jets, norm_sq, Jet, Vec3};
use super::space::FieldSpace;
use crate::error::Result;

/// `|⟨F, σ₂⟩|` above which the frame falls back to `σ₃`.
pub const FALLBACK_THRESHOLD: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizontalFrame {
    pub alpha: Vec3,
    pub beta: Vec3,
    pub fallback: bool,
}

pub fn horizontal_frame(f: Vec3) -> HorizontalFrame {
    let fallback = f[1].abs() > FALLBACK_THRESHOLD;
    let axis = if fallback { [0.0, 0.0, 1.0] } else { [0.0, 1.0, 0.0] };
    let p = dot(f, axis);
    let h = [0, 1, 2].map(|l| axis[l] - p * f[l]);
    let n = norm_sq(h).sqrt();
    let alpha = h.map(|v| v / n);
    HorizontalFrame { alpha, beta: cross(f, alpha), fallback }
}

/// Shear data at the grid nodes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShearReport {
    pub phi: Vec<Complex64>,
    /// `|∇_F F|`.
    pub geodesity: Vec<f64>,
    /// Frobenius norm of the trace-free part of `L_F g` on the horizontal plane.
    pub shear: Vec<f64>,
    pub fallback_nodes: usize,
}

impl ShearReport {
    pub fn max_geodesity(&self) -> f64 {
        self.geodesity.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_shear(&self) -> f64 {
        self.shear.iter().copied().fold(0.0, f64::max)
    }
}

fn node_shear(jet: &Jet) -> (Complex64, f64, f64, bool) {
    let f = jet.value;
    let fr = horizontal_frame(f);
    let (a, b) = (fr.alpha, fr.beta);
    let (na, nb) = (jet.directional(a), jet.directional(b));
    let mu = 0.5 * (dot(a, na) + dot(b, nb));
    let nu = 0.5 * (dot(a, nb) - dot(b, na));
    let geodesity = norm_sq(jet.directional(f)).sqrt();
    let l = jet.lie_tensor();
    let bil = |u: Vec3, v: Vec3| -> f64 { (0..3).flat_map(|j| (0..3).map(move |k| u[j] * l[j][k] * v[k])).sum() };
    let (haa, hbb, hab) = (bil(a, a), bil(b, b), bil(a, b));
    let half_diff = 0.5 * (haa - hbb);
    let shear = (2.0 * half_diff * half_diff + 2.0 * hab * hab).sqrt();
    (Complex64::new(mu, nu), geodesity, shear, fr.fallback)
}

/// `Φ`, geodesity and shear of a unit field at the grid nodes.
pub fn shear_parameters(space: &FieldSpace, field: &FramedField) -> Result<ShearReport> {
    field.require_unit(space)?;
    let jets = grid_jets(space, field);
    let mut report = ShearReport {
        phi: Vec::with_capacity(jets.len()),
        geodesity: Vec::with_capacity(jets.len()),
        shear: Vec::with_capacity(jets.len()),
        fallback_nodes: 0,
    };
    for jet in &jets {
        let (phi, g, s, fb) = node_shear(jet);
        report.phi.push(phi);
        report.geodesity.push(g);
        report.shear.push(s);
        report.fallback_nodes += fb as usize;
    }
    Ok(report)
}

/// Derivatives of `Φ` obtained by projecting it onto the basis:
/// `σ.Φ = Σⱼ Fⱼ σⱼΦ`, `Z̄.Φ = Σⱼ (αⱼ − iβⱼ) σⱼΦ` and `ΔΦ`, at the grid nodes.
#[derive(Debug, Clone)]
pub struct PhiDerivatives {
    pub along_field: Vec<Complex64>,
    pub along_zbar: Vec<Complex64>,
    pub laplacian: Vec<Complex64>,
}

pub fn phi_derivatives(space: &FieldSpace, field: &FramedField, phi: &[Complex64]) -> PhiDerivatives {
    let values = field.nodal_values(space);
    let re = space.project(&DVector::from_iterator(phi.len(), phi.iter().map(|z| z.re)));
    let im = space.project(&DVector::from_iterator(phi.len(), phi.iter().map(|z| z.im)));
    let nodes = space.nodes();
    let d = [0, 1, 2].map(|j| (nodes.evaluate(&space.derivative(j, &re)), nodes.evaluate(&space.derivative(j, &im))));
    let lap = (nodes.evaluate(&space.laplacian(&re)), nodes.evaluate(&space.laplacian(&im)));
    let mut out = PhiDerivatives { along_field: Vec::new(), along_zbar: Vec::new(), laplacian: Vec::new() };
    for i in 0..phi.len() {
        let f = [values[0][i], values[1][i], values[2][i]];
        let fr = horizontal_frame(f);
        let dphi = [0, 1, 2].map(|j| Complex64::new(d[j].0[i], d[j].1[i]));
        out.along_field.push((0..3).map(|j| dphi[j] * f[j]).sum());
        out.along_zbar.push((0..3).map(|j| dphi[j] * Complex64::new(fr.alpha[j], -fr.beta[j])).sum());
        out.laplacian.push(Complex64::new(lap.0[i], lap.1[i]));
    }
    out
}
