//! Pointwise inequalities `(n−1)|L_X g|² ≥ 4(div X)²` on S³ (`n = 3`).
//!
//! In an orthonormal frame `(σ, e₂, e₃)` adapted to a unit field `σ`, with
//! `dᵢ = L(eᵢ, eᵢ)`, the gap splits into squares:
//!
//! `(n−1)|L|² − (tr L)² = 2(n−1)Σᵢ L(σ, eᵢ)² + (d₂ − d₃)² + 2(n−1)L(e₂, e₃)²
//!                        + d₀² − 2d₀(d₂ + d₃)`,
//!
//! and the last group vanishes when `L(σ, σ) = 0`, which holds for `X = σ`
//! unit, and for `X ⊥ σ` when `σ` is geodesic.

use serde::{Deserialize, Serialize};

use super::framed::FramedField;
use super::jets::{field_jets, Jet, Mat3, Vec3};
use super::shear::horizontal_frame;
use super::space::{FieldSpace, NodeSet};
use crate::error::{Error, Result};

/// Dimension of the sphere the inequalities are evaluated on.
pub const SPHERE_DIMENSION: usize = 3;

/// Largest geodesity `|∇_σσ|` accepted for the linear inequality.
pub const GEODESIC_TOL: f64 = 1e-8;

/// Largest `|⟨A, σ⟩|` accepted as orthogonal.
pub const ORTHOGONAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapKind {
    /// `X = A ⊥ σ` with `σ` geodesic.
    Linear,
    /// `X = σ` unit.
    Nonlinear,
}

/// The sum-of-squares pieces of the gap at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapTerms {
    pub mixed: f64,
    pub spread: f64,
    pub off_diagonal: f64,
    pub normal: f64,
}

impl GapTerms {
    pub fn total(&self) -> f64 {
        self.mixed + self.spread + self.off_diagonal + self.normal
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapReport {
    pub kind: GapKind,
    pub gap: Vec<f64>,
    pub terms: Vec<GapTerms>,
    /// Points where the hypotheses of the inequality fail.
    pub violations: Vec<usize>,
}

impl GapReport {
    pub fn min_gap(&self) -> f64 {
        self.gap.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest `|gap − Σ terms|`.
    pub fn decomposition_residual(&self) -> f64 {
        self.gap.iter().zip(&self.terms).map(|(g, t)| (g - t.total()).abs()).fold(0.0, f64::max)
    }
}

fn gap_of(l: &Mat3) -> f64 {
    let n1 = (SPHERE_DIMENSION - 1) as f64;
    let norm: f64 = l.iter().flatten().map(|v| v * v).sum();
    let tr = l[0][0] + l[1][1] + l[2][2];
    n1 * norm - tr * tr
}

fn terms_of(l: &Mat3, sigma: Vec3) -> GapTerms {
    let n1 = (SPHERE_DIMENSION - 1) as f64;
    let fr = horizontal_frame(sigma);
    let basis = [sigma, fr.alpha, fr.beta];
    let mut r = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            r[a][b] = (0..3).flat_map(|j| (0..3).map(move |k| (j, k))).map(|(j, k)| basis[a][j] * l[j][k] * basis[b][k]).sum();
        }
    }
    let (d0, d1, d2) = (r[0][0], r[1][1], r[2][2]);
    GapTerms {
        mixed: 2.0 * n1 * (r[0][1] * r[0][1] + r[0][2] * r[0][2]),
        spread: (d1 - d2) * (d1 - d2),
        off_diagonal: 2.0 * n1 * r[1][2] * r[1][2],
        normal: d0 * d0 - 2.0 * d0 * (d1 + d2),
    }
}

fn evaluate(kind: GapKind, sigma: &[Jet], x: &[Jet]) -> GapReport {
    let mut report = GapReport { kind, gap: Vec::new(), terms: Vec::new(), violations: Vec::new() };
    for (i, (s, a)) in sigma.iter().zip(x).enumerate() {
        let l = a.lie_tensor();
        report.gap.push(gap_of(&l));
        report.terms.push(terms_of(&l, s.value));
        let ok = match kind {
            GapKind::Nonlinear => (1.0 - super::jets::norm_sq(s.value)).abs() < super::framed::UNIT_FIELD_TOL,
            GapKind::Linear => {
                let geodesic = super::jets::norm_sq(s.directional(s.value)).sqrt() < GEODESIC_TOL;
                let inner = super::jets::dot(s.value, a.value).abs();
                geodesic && inner < ORTHOGONAL_TOL * (1.0 + super::jets::norm_sq(a.value).sqrt())
            }
        };
        if !ok {
            report.violations.push(i);
        }
    }
    report
}

/// Gap of the inequality at the points of `nodes` (the grid when `None`).
///
/// `Nonlinear` evaluates `X = F`; `Linear` evaluates `X = A` against the
/// reference field `F`, and needs `A`.
pub fn inequality_gap(
    space: &FieldSpace,
    kind: GapKind,
    field: &FramedField,
    variation: Option<&FramedField>,
    nodes: Option<&NodeSet>,
) -> Result<GapReport> {
    field.require_unit(space)?;
    let nodes = nodes.unwrap_or(space.nodes());
    let sigma = field_jets(space, field, nodes);
    match kind {
        GapKind::Nonlinear => Ok(evaluate(kind, &sigma, &sigma)),
        GapKind::Linear => {
            let a = variation.ok_or(Error::Degenerate("linear inequality needs a variation field"))?;
            a.check_space(space)?;
            let x = field_jets(space, a, nodes);
            Ok(evaluate(kind, &sigma, &x))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::framed::VariationField;
    use crate::harmonics::{GridLevels, Polynomial};
    use nalgebra::DVector;

    #[test]
    fn hopf_is_equality_case() {
        let s = FieldSpace::new(2, GridLevels::new(3, 8, 8)).unwrap();
        let f = FramedField::constant(&s, [1.0, 0.0, 0.0]);
        let r = inequality_gap(&s, GapKind::Nonlinear, &f, None, None).unwrap();
        assert!(r.gap.iter().all(|g| g.abs() < 1e-14));
        assert!(r.violations.is_empty());
    }

    #[test]
    fn linear_gap_decomposes_into_squares() {
        let s = FieldSpace::new(3, GridLevels::new(4, 10, 10)).unwrap();
        let f = FramedField::constant(&s, [1.0, 0.0, 0.0]);
        let f2 = s.basis().project_polynomial(&(&Polynomial::coordinate(0) * &Polynomial::coordinate(3)));
        let f3 = s.basis().project_polynomial(&(&Polynomial::coordinate(2) + &Polynomial::constant(0.3)));
        let a = VariationField::from_parts(&f2, &f3).to_framed();
        let r = inequality_gap(&s, GapKind::Linear, &f, Some(&a), None).unwrap();
        assert!(r.violations.is_empty());
        assert!(r.min_gap() > -1e-12);
        assert!(r.decomposition_residual() < 1e-9);
        assert!(r.terms.iter().all(|t| t.normal.abs() < 1e-12));
        let sigma2 = VariationField::from_parts(&s.constant(1.0), &DVector::zeros(s.dim())).to_framed();
        let r = inequality_gap(&s, GapKind::Linear, &f, Some(&sigma2), None).unwrap();
        assert!(r.gap.iter().all(|g| g.abs() < 1e-12));
    }

    #[test]
    fn linear_kind_flags_non_orthogonal_variation() {
        let s = FieldSpace::new(2, GridLevels::new(3, 8, 8)).unwrap();
        let f = FramedField::constant(&s, [1.0, 0.0, 0.0]);
        let a = FramedField::constant(&s, [0.5, 0.5, 0.0]);
        let r = inequality_gap(&s, GapKind::Linear, &f, Some(&a), None).unwrap();
        assert_eq!(r.violations.len(), s.nodes().len());
    }
}
