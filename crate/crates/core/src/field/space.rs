//! The discretization shared by all field computations: a harmonic basis, a
//! quadrature grid, the frame-derivative blocks and the table of basis values
//! at the grid nodes.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harmonics::{build_basis, hopf_grid, GridLevels, HarmonicBasis, QuadratureGrid};
use crate::operators::FrameDerivatives;
use crate::su2::UnitQuaternion;

/// Points with the basis evaluated on them. Grid node sets carry weights;
/// random sample sets do not.
#[derive(Debug, Clone)]
pub struct NodeSet {
    points: Vec<UnitQuaternion>,
    weights: Option<Vec<f64>>,
    /// `points × dim` basis values.
    table: DMatrix<f64>,
}

impl NodeSet {
    fn new(basis: &HarmonicBasis, points: Vec<UnitQuaternion>, weights: Option<Vec<f64>>) -> Self {
        let dim = basis.dim();
        let rows: Vec<DVector<f64>> = points.par_iter().map(|x| basis.evaluate_all(x.to_array())).collect();
        let mut table = DMatrix::zeros(points.len(), dim);
        for (i, r) in rows.iter().enumerate() {
            table.row_mut(i).tr_copy_from(r);
        }
        Self { points, weights, table }
    }

    pub fn points(&self) -> &[UnitQuaternion] {
        &self.points
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn table(&self) -> &DMatrix<f64> {
        &self.table
    }

    /// Values at the points of the function with the given coefficients.
    pub fn evaluate(&self, coeffs: &DVector<f64>) -> DVector<f64> {
        &self.table * coeffs
    }
}

#[derive(Debug, Clone)]
pub struct FieldSpace {
    basis: HarmonicBasis,
    grid: QuadratureGrid,
    derivatives: FrameDerivatives,
    nodes: NodeSet,
    laplacian: DVector<f64>,
}

impl FieldSpace {
    /// Builds basis and grid; the grid must integrate products of two
    /// degree-`N` functions with a margin, i.e. be exact to `2N + 2`.
    pub fn new(max_degree: usize, levels: GridLevels) -> Result<Self> {
        Self::from_parts(build_basis(max_degree)?, hopf_grid(levels)?)
    }

    pub fn from_parts(basis: HarmonicBasis, grid: QuadratureGrid) -> Result<Self> {
        grid.require_exactness(2 * basis.max_degree() + 2)?;
        let derivatives = FrameDerivatives::new(&basis);
        let nodes = NodeSet::new(&basis, grid.nodes().to_vec(), Some(grid.weights().to_vec()));
        let laplacian = DVector::from_fn(basis.dim(), |i, _| {
            let n = basis.degree_of(i);
            (n * (n + 2)) as f64
        });
        Ok(Self { basis, grid, derivatives, nodes, laplacian })
    }

    pub fn basis(&self) -> &HarmonicBasis {
        &self.basis
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn derivatives(&self) -> &FrameDerivatives {
        &self.derivatives
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn max_degree(&self) -> usize {
        self.basis.max_degree()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn volume(&self) -> f64 {
        self.integrate(&DVector::from_element(self.nodes.len(), 1.0))
    }

    /// Basis evaluated at arbitrary points, for pointwise checks off the grid.
    pub fn sample(&self, points: Vec<UnitQuaternion>) -> NodeSet {
        NodeSet::new(&self.basis, points, None)
    }

    /// `Σ wᵢ vᵢ` over the grid.
    pub fn integrate(&self, values: &DVector<f64>) -> f64 {
        self.grid.integrate_values(values.iter().copied())
    }

    /// Quadrature projection of grid values onto the basis.
    pub fn project(&self, values: &DVector<f64>) -> DVector<f64> {
        let weighted = DVector::from_fn(values.len(), |i, _| values[i] * self.grid.weights()[i]);
        self.nodes.table.tr_mul(&weighted)
    }

    /// `σⱼ` on coefficients.
    pub fn derivative(&self, j: usize, coeffs: &DVector<f64>) -> DVector<f64> {
        self.derivatives.apply(j, coeffs)
    }

    /// `Δ` on coefficients (diagonal with `n(n+2)`).
    pub fn laplacian(&self, coeffs: &DVector<f64>) -> DVector<f64> {
        coeffs.component_mul(&self.laplacian)
    }

    pub fn laplacian_diagonal(&self) -> &DVector<f64> {
        &self.laplacian
    }

    /// Coefficient vector of the constant function `c`.
    pub fn constant(&self, c: f64) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        v[0] = c / self.basis.block(0).coeffs()[(0, 0)];
        v
    }

    pub fn check_coeffs(&self, coeffs: &DVector<f64>) -> Result<()> {
        if coeffs.len() != self.dim() {
            return Err(Error::DegreeMismatch { field: coeffs.len(), space: self.dim() });
        }
        Ok(())
    }
}
