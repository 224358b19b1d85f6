//! Degree-block matrices of the frame derivatives and the operators built
//! from them.
//!
//! `σⱼ(x) = x·eⱼ` is the linear vector field `x ↦ Aⱼx`, so
//! `σⱼf(x) = Df(x)[Aⱼx]` maps homogeneous polynomials of degree `n` to
//! themselves and, commuting with the Laplacian, preserves each `Hₙ`. The
//! block of `Dⱼ` is therefore `Q·M·T·Qᵀ` with `Q` the basis rows, `M` the
//! exact monomial Gram matrix and `T` the monomial matrix of `Aⱼ`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::harmonics::basis::linear_field_matrix;
use crate::harmonics::HarmonicBasis;
use crate::su2::{levi_civita, Quaternion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    Laplacian,
    Derivative(usize),
    Lambda,
    Lambda4,
    RoughLaplacian,
}

#[derive(Debug, Clone)]
pub enum BlockEntries {
    Real(Vec<DMatrix<f64>>),
    Complex(Vec<DMatrix<Complex64>>),
}

/// Block-diagonal operator on the harmonic basis, one block per degree.
///
/// Scalar operators use blocks of size `(n+1)²`. The rough Laplacian acts on
/// frame-component triples and uses blocks of size `3(n+1)²` ordered
/// component-major.
#[derive(Debug, Clone)]
pub struct DegreeBlockOperator {
    pub kind: OperatorKind,
    pub entries: BlockEntries,
}

impl DegreeBlockOperator {
    pub fn num_blocks(&self) -> usize {
        match &self.entries {
            BlockEntries::Real(b) => b.len(),
            BlockEntries::Complex(b) => b.len(),
        }
    }

    pub fn real_block(&self, n: usize) -> Option<&DMatrix<f64>> {
        match &self.entries {
            BlockEntries::Real(b) => b.get(n),
            BlockEntries::Complex(_) => None,
        }
    }

    pub fn complex_block(&self, n: usize) -> Option<&DMatrix<Complex64>> {
        match &self.entries {
            BlockEntries::Complex(b) => b.get(n),
            BlockEntries::Real(_) => None,
        }
    }

    /// Complex view of every block.
    pub fn complex_blocks(&self) -> Vec<DMatrix<Complex64>> {
        match &self.entries {
            BlockEntries::Complex(b) => b.clone(),
            BlockEntries::Real(b) => b.iter().map(|m| m.map(|x| Complex64::new(x, 0.0))).collect(),
        }
    }
}

/// Matrix of `x ↦ x·eⱼ` on ℝ⁴ (index `j` in `0..3`).
pub fn frame_generator(j: usize) -> [[f64; 4]; 4] {
    let e = Quaternion::unit(j);
    let mut a = [[0.0; 4]; 4];
    for c in 0..4 {
        let mut basis = [0.0; 4];
        basis[c] = 1.0;
        let col = (Quaternion::from_array(basis) * e).to_array();
        for r in 0..4 {
            a[r][c] = col[r];
        }
    }
    a
}

/// The three frame derivatives `D₁, D₂, D₃` on every degree block.
#[derive(Debug, Clone)]
pub struct FrameDerivatives {
    blocks: Vec<[DMatrix<f64>; 3]>,
    leakage: f64,
}

impl FrameDerivatives {
    pub fn new(basis: &HarmonicBasis) -> Self {
        let per_block: Vec<([DMatrix<f64>; 3], f64)> = basis
            .blocks()
            .par_iter()
            .map(|b| {
                let q = b.coeffs();
                let m = b.monomial_gram();
                let mut leak: f64 = 0.0;
                let d = [0, 1, 2].map(|j| {
                    let t = linear_field_matrix(b.table(), &frame_generator(j));
                    let tq = t * q.transpose();
                    let d = q * m * &tq;
                    let r = tq - q.transpose() * &d;
                    let mr = m * &r;
                    for c in 0..r.ncols() {
                        leak = leak.max(r.column(c).dot(&mr.column(c)).max(0.0).sqrt());
                    }
                    d
                });
                (d, leak)
            })
            .collect();
        let leakage = per_block.iter().map(|(_, l)| *l).fold(0.0, f64::max);
        Self { blocks: per_block.into_iter().map(|(d, _)| d).collect(), leakage }
    }

    pub fn max_degree(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, j: usize, n: usize) -> &DMatrix<f64> {
        &self.blocks[n][j]
    }

    /// Largest `L²` norm of the part of `σⱼb` outside the degree block of `b`,
    /// over all basis elements `b` and all `j`.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    /// `Dⱼ` applied to a global coefficient vector.
    pub fn apply(&self, j: usize, coeffs: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(coeffs.len());
        let mut offset = 0;
        for b in &self.blocks {
            let d = &b[j];
            let size = d.nrows();
            out.rows_mut(offset, size).copy_from(&(d * coeffs.rows(offset, size)));
            offset += size;
        }
        out
    }

    pub fn derivative(&self, j: usize) -> DegreeBlockOperator {
        DegreeBlockOperator {
            kind: OperatorKind::Derivative(j),
            entries: BlockEntries::Real(self.blocks.iter().map(|b| b[j].clone()).collect()),
        }
    }

    fn laplacian_block(&self, n: usize) -> DMatrix<f64> {
        DMatrix::identity((n + 1) * (n + 1), (n + 1) * (n + 1)) * (n * (n + 2)) as f64
    }

    pub fn laplacian(&self) -> DegreeBlockOperator {
        DegreeBlockOperator {
            kind: OperatorKind::Laplacian,
            entries: BlockEntries::Real((0..self.blocks.len()).map(|n| self.laplacian_block(n)).collect()),
        }
    }

    /// Independent Laplacian `−Σⱼ Dⱼ²` per block.
    pub fn casimir_block(&self, n: usize) -> DMatrix<f64> {
        let d = &self.blocks[n];
        -(&d[0] * &d[0] + &d[1] * &d[1] + &d[2] * &d[2])
    }

    /// Block of `Δ − i·c·D₁` at degree `n`.
    pub fn shifted_block(&self, n: usize, coupling: f64) -> DMatrix<Complex64> {
        let lap = self.laplacian_block(n).map(|x| Complex64::new(x, 0.0));
        lap + self.blocks[n][0].map(|x| Complex64::new(0.0, -coupling * x))
    }

    fn shifted(&self, kind: OperatorKind, coupling: f64) -> DegreeBlockOperator {
        let blocks = (0..self.blocks.len()).map(|n| self.shifted_block(n, coupling)).collect();
        DegreeBlockOperator { kind, entries: BlockEntries::Complex(blocks) }
    }

    /// `Λ = Δ − 2i·D₁`.
    pub fn lambda(&self) -> DegreeBlockOperator {
        self.shifted(OperatorKind::Lambda, 2.0)
    }

    /// `Λ₄ = Δ − 4i·D₁`.
    pub fn lambda4(&self) -> DegreeBlockOperator {
        self.shifted(OperatorKind::Lambda4, 4.0)
    }

    /// Rough Laplacian on frame triples at degree `n`:
    /// `(∇*∇F)ₗ = ΔFₗ + 2Fₗ − 2Σⱼₖ ε_{jkl} DⱼFₖ`.
    pub fn rough_laplacian_block(&self, n: usize) -> DMatrix<f64> {
        let d = self.blocks[n][0].nrows();
        let mut m = DMatrix::zeros(3 * d, 3 * d);
        let diag = self.laplacian_block(n) + DMatrix::identity(d, d) * 2.0;
        for l in 0..3 {
            for k in 0..3 {
                let mut b = if l == k { diag.clone() } else { DMatrix::zeros(d, d) };
                for j in 0..3 {
                    let e = levi_civita(j, k, l);
                    if e != 0.0 {
                        b -= &self.blocks[n][j] * (2.0 * e);
                    }
                }
                m.view_mut((l * d, k * d), (d, d)).copy_from(&b);
            }
        }
        m
    }

    pub fn rough_laplacian(&self) -> DegreeBlockOperator {
        let blocks = (0..self.blocks.len()).map(|n| self.rough_laplacian_block(n)).collect();
        DegreeBlockOperator { kind: OperatorKind::RoughLaplacian, entries: BlockEntries::Real(blocks) }
    }
}

/// Matrix of `f ↦ σⱼf` on every degree block.
pub fn assemble_derivative(j: usize, basis: &HarmonicBasis) -> DegreeBlockOperator {
    FrameDerivatives::new(basis).derivative(j)
}

pub fn lambda_matrix(basis: &HarmonicBasis) -> DegreeBlockOperator {
    FrameDerivatives::new(basis).lambda()
}

pub fn lambda4_matrix(basis: &HarmonicBasis) -> DegreeBlockOperator {
    FrameDerivatives::new(basis).lambda4()
}

pub fn rough_laplacian_field_operator(basis: &HarmonicBasis) -> DegreeBlockOperator {
    FrameDerivatives::new(basis).rough_laplacian()
}
