//! Covariant derivatives, rough Laplacian, Lie derivative of the metric,
//! divergence and the vertical Jacobi operator at the Hopf field.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::framed::{FramedField, Normalization, VariationField};
use super::jets::{grid_jets, Jet, Mat3, Vec3};
use super::space::FieldSpace;
use crate::error::{Error, Result};
use crate::su2::levi_civita;

/// Agreement required between the spectral and pointwise Jacobi operators.
pub const JACOBI_CROSS_CHECK_TOL: f64 = 1e-8;

/// Pointwise symmetric tensor `L(σⱼ, σₖ)` on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameTensor {
    pub values: Vec<Mat3>,
}

impl FrameTensor {
    pub fn trace(&self) -> Vec<f64> {
        self.values.iter().map(|m| m[0][0] + m[1][1] + m[2][2]).collect()
    }

    pub fn norm_sq(&self) -> Vec<f64> {
        self.values.iter().map(|m| m.iter().flatten().map(|v| v * v).sum()).collect()
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|m| (0..3).flat_map(move |j| (0..3).map(move |k| (m[j][k] - m[k][j]).abs())))
            .fold(0.0, f64::max)
    }
}

/// `∇_{σⱼ}F`. Exact on coefficients for linear fields; for normalized fields
/// the pointwise values are projected onto the basis.
pub fn covariant_derivative(space: &FieldSpace, j: usize, field: &FramedField) -> Result<FramedField> {
    field.check_space(space)?;
    match field.normalization() {
        Normalization::Linear => {
            let c = field.coeffs();
            Ok(FramedField::linear([0, 1, 2].map(|l| {
                let mut out = space.derivative(j, &c[l]);
                for k in 0..3 {
                    let e = levi_civita(j, k, l);
                    if e != 0.0 {
                        out.axpy(e, &c[k], 1.0);
                    }
                }
                out
            })))
        }
        Normalization::Nodal => {
            let jets = grid_jets(space, field);
            Ok(FramedField::linear([0, 1, 2].map(|l| {
                space.project(&DVector::from_iterator(jets.len(), jets.iter().map(|p| p.covariant()[j][l])))
            })))
        }
    }
}

/// `|∇F|²` at the grid nodes of a unit field.
pub fn energy_density(space: &FieldSpace, field: &FramedField) -> Result<DVector<f64>> {
    field.require_unit(space)?;
    let jets = grid_jets(space, field);
    Ok(DVector::from_iterator(jets.len(), jets.iter().map(Jet::energy_density)))
}

pub fn lie_derivative_metric(space: &FieldSpace, field: &FramedField) -> Result<FrameTensor> {
    field.check_space(space)?;
    Ok(FrameTensor { values: grid_jets(space, field).iter().map(Jet::lie_tensor).collect() })
}

pub fn divergence(space: &FieldSpace, field: &FramedField) -> Result<DVector<f64>> {
    field.check_space(space)?;
    let jets = grid_jets(space, field);
    Ok(DVector::from_iterator(jets.len(), jets.iter().map(Jet::divergence)))
}

/// `∇*∇F` for a linear field, exact on coefficients.
pub fn rough_laplacian(space: &FieldSpace, field: &FramedField) -> Result<FramedField> {
    field.check_space(space)?;
    if field.normalization() != Normalization::Linear {
        return Err(Error::Degenerate("coefficient rough Laplacian needs a linear field"));
    }
    let c = field.coeffs();
    Ok(FramedField::linear([0, 1, 2].map(|l| {
        let mut out = space.laplacian(&c[l]) + &c[l] * 2.0;
        for j in 0..3 {
            for k in 0..3 {
                let e = levi_civita(j, k, l);
                if e != 0.0 {
                    out.axpy(-2.0 * e, &space.derivative(j, &c[k]), 1.0);
                }
            }
        }
        out
    })))
}

/// `∇*∇F` at the grid nodes from `∇*∇(fσₖ) = (Δf)σₖ + f∇*∇σₖ − 2∇_{grad f}σₖ`
/// with `∇*∇σₖ = 2σₖ` and `∇_{σⱼ}σₖ = Σₗ ε_{jkl}σₗ`.
pub fn rough_laplacian_nodal(space: &FieldSpace, field: &FramedField) -> Result<Vec<Vec3>> {
    field.check_space(space)?;
    Ok(grid_jets(space, field)
        .iter()
        .map(|p| {
            let mut out = [0.0; 3];
            for k in 0..3 {
                out[k] += p.lap[k] + 2.0 * p.value[k];
                for j in 0..3 {
                    let grad_j = p.d[j][k];
                    for (l, o) in out.iter_mut().enumerate() {
                        *o -= 2.0 * grad_j * levi_civita(j, k, l);
                    }
                }
            }
            out
        })
        .collect())
}

/// `Λf = Δf − 2iσ₁f` on coefficients.
pub fn lambda_apply(space: &FieldSpace, v: &VariationField) -> VariationField {
    let re = v.real_part();
    let im = v.imag_part();
    let d_re = space.derivative(0, &re);
    let d_im = space.derivative(0, &im);
    let lre = space.laplacian(&re) + &d_im * 2.0;
    let lim = space.laplacian(&im) - &d_re * 2.0;
    VariationField::new(DVector::from_fn(re.len(), |i, _| Complex64::new(lre[i], lim[i])))
}

/// `J(α) = ∇*∇α − |∇σ|²α − 2⟨∇σ, ∇α⟩σ` at the Hopf field `σ = σ₁`,
/// pointwise on the grid.
pub fn vertical_jacobi_nodal(space: &FieldSpace, v: &VariationField) -> Result<Vec<Vec3>> {
    let alpha = v.to_framed();
    alpha.check_space(space)?;
    let sigma = FramedField::constant(space, [1.0, 0.0, 0.0]);
    let ja = grid_jets(space, &alpha);
    let js = grid_jets(space, &sigma);
    Ok(ja
        .iter()
        .zip(&js)
        .map(|(a, s)| {
            let r = a.rough_laplacian();
            let e = s.energy_density();
            let (ca, cs) = (a.covariant(), s.covariant());
            let inner: f64 = (0..3).flat_map(|j| (0..3).map(move |l| (j, l))).map(|(j, l)| ca[j][l] * cs[j][l]).sum();
            [0, 1, 2].map(|l| r[l] - e * a.value[l] - 2.0 * inner * s.value[l])
        })
        .collect())
}

/// `Λv` computed spectrally, after checking it against the pointwise form of
/// the Jacobi operator.
pub fn apply_vertical_jacobi(space: &FieldSpace, v: &VariationField) -> Result<VariationField> {
    let out = lambda_apply(space, v);
    let nodal = vertical_jacobi_nodal(space, v)?;
    let f2 = space.nodes().evaluate(&out.real_part());
    let f3 = space.nodes().evaluate(&out.imag_part());
    let scale = 1.0 + f2.amax().max(f3.amax());
    let mut worst: (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (i, n) in nodal.iter().enumerate() {
        let dev = n[0].abs().max((n[1] - f2[i]).abs()).max((n[2] - f3[i]).abs());
        if dev > worst.0 {
            worst = (dev, n[1], f2[i]);
        }
    }
    if worst.0 > JACOBI_CROSS_CHECK_TOL * scale {
        return Err(Error::Disagreement { what: "spectral and pointwise Jacobi operators", lhs: worst.2, rhs: worst.1 });
    }
    Ok(out)
}
