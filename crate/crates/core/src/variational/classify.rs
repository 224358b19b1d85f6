//! Recognizing Hopf fields: distance to the nearest left- or
//! right-invariant candidate, Killing, geodesity and shear residuals, and the
//! shear-parameter diagnostics of geodesic unit fields.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::jets::{grid_jets, norm_sq, Vec3};
use crate::field::shear::{phi_derivatives, shear_parameters};
use crate::field::{FieldSpace, FramedField};
use crate::harmonics::sphere_volume;
use crate::su2::AlgebraVector;

/// Default tolerance on the distance and residuals of a Hopf classification.
pub const CLASSIFY_TOL: f64 = 1e-4;

/// `|∫F|` below which an averaged axis is treated as undefined.
pub const AXIS_DEGENERACY_TOL: f64 = 1e-8;

/// Geodesity RMS below which the shear-parameter equations apply.
pub const RIGIDITY_GEODESIC_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    None,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::None => "none",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub axis: Vec3,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfClassification {
    pub is_hopf: bool,
    pub side: Side,
    pub axis: Vec3,
    pub l2_distance: f64,
    /// RMS of `|L_F g|`.
    pub killing_residual: f64,
    /// RMS of `|∇_F F|`.
    pub geodesity_residual: f64,
    /// RMS of the horizontal shear.
    pub shear_residual: f64,
    pub left: Option<Candidate>,
    pub right: Option<Candidate>,
    pub tol: f64,
}

fn normalize(v: Vec3) -> Option<Vec3> {
    let n = norm_sq(v).sqrt();
    (n > AXIS_DEGENERACY_TOL).then(|| v.map(|c| c / n))
}

fn rms(space: &FieldSpace, sq: impl IntoIterator<Item = f64>) -> f64 {
    (space.grid().integrate_values(sq) / sphere_volume()).max(0.0).sqrt()
}

/// Compare `F` with the left-invariant field of axis `normalize(∫μ∘F)` and
/// the right-invariant field of axis `normalize(∫η∘F)`. The field is Hopf
/// when the nearer candidate and all three residuals are below `tol`.
pub fn classify_hopf(space: &FieldSpace, field: &FramedField, tol: f64) -> Result<HopfClassification> {
    field.require_unit(space)?;
    let values = field.nodal_values(space);
    let nodes = space.grid().nodes();
    let f_at = |i: usize| -> Vec3 { [values[0][i], values[1][i], values[2][i]] };
    let integrate_vec = |g: &dyn Fn(usize) -> Vec3| -> Vec3 {
        [0, 1, 2].map(|l| space.grid().integrate_values((0..nodes.len()).map(|i| g(i)[l])))
    };
    let distance = |cand: &dyn Fn(usize) -> Vec3| -> f64 {
        let sq = (0..nodes.len()).map(|i| {
            let (f, c) = (f_at(i), cand(i));
            norm_sq([f[0] - c[0], f[1] - c[1], f[2] - c[2]])
        });
        rms(space, sq)
    };

    let left = normalize(integrate_vec(&f_at)).map(|u| Candidate { axis: u, distance: distance(&|_| u) });
    let right = normalize(integrate_vec(&|i| nodes[i].adjoint(AlgebraVector(f_at(i))).0)).map(|u| {
        let cand = |i: usize| nodes[i].inverse().adjoint(AlgebraVector(u)).0;
        Candidate { axis: u, distance: distance(&cand) }
    });

    let jets = grid_jets(space, field);
    let killing_residual = rms(space, jets.iter().map(|j| j.lie_tensor().iter().flatten().map(|v| v * v).sum()));
    let geodesity_residual = rms(space, jets.iter().map(|j| norm_sq(j.directional(j.value))));
    let shear = shear_parameters(space, field)?;
    let shear_residual = rms(space, shear.shear.iter().map(|s| s * s));

    let best = match (left, right) {
        (Some(l), Some(r)) if r.distance < l.distance => Some((Side::Right, r)),
        (Some(l), _) => Some((Side::Left, l)),
        (None, Some(r)) => Some((Side::Right, r)),
        (None, None) => None,
    };
    let (side, axis, l2_distance) = match best {
        Some((side, c)) => (side, c.axis, c.distance),
        None => (Side::None, [0.0; 3], f64::INFINITY),
    };
    let is_hopf = side != Side::None
        && l2_distance < tol
        && killing_residual < tol
        && geodesity_residual < tol
        && shear_residual < tol;
    Ok(HopfClassification {
        is_hopf,
        side: if is_hopf || side == Side::None { side } else { Side::None },
        axis,
        l2_distance,
        killing_residual,
        geodesity_residual,
        shear_residual,
        left,
        right,
        tol,
    })
}

/// Residuals of the shear-parameter equations on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    /// Whether the field is geodesic, the precondition for the equations.
    pub applicable: bool,
    pub geodesity_residual: f64,
    /// `max |σ.Φ + 1 + Φ²|`.
    pub structure_residual: f64,
    /// `max |Z̄.Φ|`.
    pub antiholomorphic_residual: f64,
    /// `max |ΔΦ|`.
    pub laplacian_residual: f64,
    /// `max min(|Φ − i|, |Φ + i|)`.
    pub phi_deviation: f64,
    pub phi_mean: Complex64,
    pub phi_min_abs: f64,
    pub phi_max_abs: f64,
}

impl RigidityReport {
    pub fn max_residual(&self) -> f64 {
        self.structure_residual.max(self.antiholomorphic_residual).max(self.laplacian_residual).max(self.phi_deviation)
    }
}

pub fn rigidity_diagnostics(space: &FieldSpace, field: &FramedField) -> Result<RigidityReport> {
    let shear = shear_parameters(space, field)?;
    let phi = &shear.phi;
    let d = phi_derivatives(space, field, phi);
    let geodesity_residual = rms(space, shear.geodesity.iter().map(|g| g * g));
    let max = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, f64::max);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let weights = DVector::from_column_slice(space.grid().weights());
    let mean_re = phi.iter().zip(weights.iter()).map(|(z, w)| z.re * w).sum::<f64>() / sphere_volume();
    let mean_im = phi.iter().zip(weights.iter()).map(|(z, w)| z.im * w).sum::<f64>() / sphere_volume();
    Ok(RigidityReport {
        applicable: geodesity_residual < RIGIDITY_GEODESIC_TOL,
        geodesity_residual,
        structure_residual: max(&mut phi.iter().zip(&d.along_field).map(|(p, s)| (s + one + p * p).norm())),
        antiholomorphic_residual: max(&mut d.along_zbar.iter().map(|z| z.norm())),
        laplacian_residual: max(&mut d.laplacian.iter().map(|z| z.norm())),
        phi_deviation: max(&mut phi.iter().map(|p| (p - i).norm().min((p + i).norm()))),
        phi_mean: Complex64::new(mean_re, mean_im),
        phi_min_abs: phi.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min),
        phi_max_abs: max(&mut phi.iter().map(|p| p.norm())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::generators::{bumped_hopf, hopf_left, hopf_right};
    use crate::harmonics::GridLevels;

    fn space() -> FieldSpace {
        FieldSpace::new(4, GridLevels::new(6, 12, 12)).unwrap()
    }

    #[test]
    fn canonical_families() {
        let s = space();
        let c = classify_hopf(&s, &hopf_left(&s, [1.0, 0.0, 0.0]).unwrap(), CLASSIFY_TOL).unwrap();
        assert!(c.is_hopf && c.side == Side::Left);
        assert!(c.l2_distance < 1e-14 && (c.axis[0] - 1.0).abs() < 1e-14);
        let c = classify_hopf(&s, &hopf_right(&s, [0.0, 1.0, 0.0]).unwrap(), CLASSIFY_TOL).unwrap();
        assert!(c.is_hopf && c.side == Side::Right, "{c:?}");
        assert!(c.l2_distance < 1e-12 && (c.axis[1] - 1.0).abs() < 1e-12);
        let tilted = [0.48, -0.6, 0.64];
        let c = classify_hopf(&s, &hopf_right(&s, tilted).unwrap(), CLASSIFY_TOL).unwrap();
        assert!(c.is_hopf && c.side == Side::Right);
        assert!((0..3).all(|l| (c.axis[l] - tilted[l]).abs() < 1e-12));
    }

    #[test]
    fn perturbation_is_not_hopf() {
        let s = space();
        let c = classify_hopf(&s, &bumped_hopf(&s, 0.1), 1e-3).unwrap();
        assert!(!c.is_hopf && c.side == Side::None);
        assert!(c.l2_distance > 0.01 && c.l2_distance < 0.2, "{c:?}");
    }

    #[test]
    fn hopf_rigidity_residuals_vanish() {
        let s = space();
        for (f, phi) in [(hopf_left(&s, [0.0, 0.0, 1.0]).unwrap(), 1.0), (hopf_right(&s, [1.0, 0.0, 0.0]).unwrap(), -1.0)] {
            let r = rigidity_diagnostics(&s, &f).unwrap();
            assert!(r.applicable);
            assert!(r.max_residual() < 1e-10, "{r:?}");
            assert!((r.phi_min_abs - 1.0).abs() < 1e-12);
            assert!((r.phi_mean - Complex64::new(0.0, phi)).norm() < 1e-10, "{r:?}");
        }
        let r = rigidity_diagnostics(&s, &bumped_hopf(&s, 0.05)).unwrap();
        assert!(!r.applicable);
    }
}
