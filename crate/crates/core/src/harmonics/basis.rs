//! Orthonormal harmonic basis of L²(S³) up to a fixed degree.
//!
//! The degree-`n` block is the space `Hₙ` of harmonic homogeneous
//! polynomials of degree `n` restricted to S³ (dimension `(n+1)²`, Laplace
//! eigenvalue `n(n+2)`).
//!
//! Construction per degree: a harmonic polynomial `h = Σₖ x₀ᵏ cₖ(x₁,x₂,x₃)`
//! is fixed by `(c₀, c₁)` through `c_{k+2} = −Δ'cₖ / ((k+2)(k+1))`. Seeding
//! `(c₀, c₁)` with each monomial of degree `n` (resp. `n−1`) in `(x₁,x₂,x₃)`
//! gives a spanning set of exactly `(n+1)²` elements, which is then
//! orthonormalized by two passes of Gram–Schmidt under the exact
//! `L²(S³)` inner product of monomials.

use nalgebra::{DMatrix, DVector};

use super::integral::monomial_integral;
use super::polynomial::{Exponent, MonomialTable, Polynomial};
use super::quadrature::QuadratureGrid;
use crate::error::{Error, Result};

/// Largest degree for which the double-precision construction is supported.
pub const MAX_SUPPORTED_DEGREE: usize = 12;

/// Loss of orthogonality that triggers an extra Gram–Schmidt pass.
const REORTHOGONALIZE_TOL: f64 = 1e-10;

/// Exact Gram matrix of the monomials in `table` under `L²(S³)`.
pub fn monomial_gram(table: &MonomialTable) -> DMatrix<f64> {
    let e = table.exponents();
    DMatrix::from_fn(e.len(), e.len(), |a, b| monomial_integral(add(e[a], e[b])))
}

fn add(a: Exponent, b: Exponent) -> Exponent {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

/// Matrix of `f ↦ Df(x)[A·x]` acting on the dense coefficients of `table`.
pub fn linear_field_matrix(table: &MonomialTable, a: &[[f64; 4]; 4]) -> DMatrix<f64> {
    let n = table.len();
    let mut t = DMatrix::zeros(n, n);
    for (col, e) in table.exponents().iter().enumerate() {
        let image = Polynomial::monomial(*e, 1.0).directional_linear(a);
        for (row, c) in image.to_dense(table).into_iter().enumerate() {
            t[(row, col)] = c;
        }
    }
    t
}

/// One degree block: rows of `coeffs` are basis polynomials in monomial coordinates.
#[derive(Debug, Clone)]
pub struct DegreeBlock {
    degree: usize,
    table: MonomialTable,
    coeffs: DMatrix<f64>,
    gram: DMatrix<f64>,
}

impl DegreeBlock {
    fn from_coeffs(degree: usize, coeffs: DMatrix<f64>) -> Self {
        let table = MonomialTable::new(degree as u32);
        let gram = monomial_gram(&table);
        Self { degree, table, coeffs, gram }
    }

    fn build(degree: usize) -> Result<Self> {
        let table = MonomialTable::new(degree as u32);
        let gram = monomial_gram(&table);
        let spanning = harmonic_spanning_set(degree, &table);
        let coeffs = orthonormalize(&spanning, &gram)?;
        Ok(Self { degree, table, coeffs, gram })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn table(&self) -> &MonomialTable {
        &self.table
    }

    /// `dim × #monomials` coefficient matrix.
    pub fn coeffs(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    /// Exact monomial Gram matrix for this degree.
    pub fn monomial_gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn polynomial(&self, i: usize) -> Polynomial {
        let row: Vec<f64> = self.coeffs.row(i).iter().copied().collect();
        Polynomial::from_dense(&self.table, &row)
    }

    pub fn evaluate_all(&self, x: [f64; 4]) -> DVector<f64> {
        let m = DVector::from_vec(self.table.evaluate_all(x));
        &self.coeffs * m
    }

    /// Largest ambient-Laplacian coefficient over the block, relative to the
    /// size of the coefficients it is computed from.
    pub fn harmonicity_residual(&self) -> f64 {
        let scale = (self.degree * self.degree.max(1)) as f64;
        (0..self.dim())
            .map(|i| {
                let p = self.polynomial(i);
                let size = p.terms().map(|(_, c)| c.abs()).fold(0.0, f64::max) * scale;
                let lap = p.laplacian().terms().map(|(_, c)| c.abs()).fold(0.0, f64::max);
                if size > 0.0 {
                    lap / size
                } else {
                    lap
                }
            })
            .fold(0.0, f64::max)
    }
}

fn harmonic_spanning_set(degree: usize, table: &MonomialTable) -> Vec<DVector<f64>> {
    let mut out = Vec::with_capacity((degree + 1) * (degree + 1));
    for first in 0..=1usize {
        if first > degree {
            continue;
        }
        let seeds = MonomialTable::new((degree - first) as u32);
        for seed in seeds.exponents().iter().filter(|e| e[0] == 0) {
            let mut h = Polynomial::zero();
            let mut ck = Polynomial::monomial(*seed, 1.0);
            let mut k = first;
            while !ck.is_zero() {
                for (e, c) in ck.terms() {
                    h.add_term([e[0] + k as u32, e[1], e[2], e[3]], *c);
                }
                let scale = -1.0 / ((k + 2) * (k + 1)) as f64;
                ck = ck.laplacian_over(&[1, 2, 3]).scale(scale);
                k += 2;
            }
            out.push(DVector::from_vec(h.to_dense(table)));
        }
    }
    out
}

fn orthonormalize(spanning: &[DVector<f64>], gram: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let len = gram.nrows();
    let mut q: Vec<DVector<f64>> = Vec::with_capacity(spanning.len());
    let mut mq: Vec<DVector<f64>> = Vec::with_capacity(spanning.len());
    for v0 in spanning {
        let mut v = v0.clone();
        let mut mv = gram * &v;
        let scale = v.dot(&mv).sqrt();
        v /= scale;
        mv /= scale;
        for pass in 0..3 {
            let mut worst: f64 = 0.0;
            for (qi, mqi) in q.iter().zip(&mq) {
                let c = qi.dot(&mv);
                worst = worst.max(c.abs());
                v.axpy(-c, qi, 1.0);
                mv.axpy(-c, mqi, 1.0);
            }
            if pass > 0 && worst < REORTHOGONALIZE_TOL {
                break;
            }
        }
        let norm = v.dot(&mv).sqrt();
        if !(norm > 1e-8) {
            return Err(Error::Degenerate("harmonic spanning set is linearly dependent"));
        }
        q.push(v / norm);
        mq.push(mv / norm);
    }
    Ok(DMatrix::from_fn(q.len(), len, |i, j| q[i][j]))
}

/// Orthonormal harmonic basis of degrees `0..=max_degree`.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    max_degree: usize,
    blocks: Vec<DegreeBlock>,
    offsets: Vec<usize>,
}

/// Builds the orthonormal basis up to degree `max_degree`.
pub fn build_basis(max_degree: usize) -> Result<HarmonicBasis> {
    if max_degree > MAX_SUPPORTED_DEGREE {
        return Err(Error::DegreeTooLarge { requested: max_degree, cap: MAX_SUPPORTED_DEGREE });
    }
    let blocks = (0..=max_degree).map(DegreeBlock::build).collect::<Result<Vec<_>>>()?;
    Ok(HarmonicBasis::from_blocks(blocks))
}

/// `Σ_{m<n} (m+1)²`.
pub fn block_offset(n: usize) -> usize {
    n * (n + 1) * (2 * n + 1) / 6
}

impl HarmonicBasis {
    fn from_blocks(blocks: Vec<DegreeBlock>) -> Self {
        let max_degree = blocks.len() - 1;
        let offsets = (0..=max_degree).map(block_offset).collect();
        Self { max_degree, blocks, offsets }
    }

    pub(crate) fn from_coefficient_tables(tables: Vec<DMatrix<f64>>) -> Result<Self> {
        if tables.is_empty() {
            return Err(Error::CacheMismatch("empty basis".into()));
        }
        let mut blocks = Vec::with_capacity(tables.len());
        for (n, c) in tables.into_iter().enumerate() {
            let expected = MonomialTable::new(n as u32).len();
            if c.nrows() != (n + 1) * (n + 1) || c.ncols() != expected {
                return Err(Error::CacheMismatch(format!("degree {n} block has shape {}x{}", c.nrows(), c.ncols())));
            }
            blocks.push(DegreeBlock::from_coeffs(n, c));
        }
        Ok(Self::from_blocks(blocks))
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// `Σ_{n≤N} (n+1)²`.
    pub fn dim(&self) -> usize {
        block_offset(self.max_degree + 1)
    }

    pub fn blocks(&self) -> &[DegreeBlock] {
        &self.blocks
    }

    pub fn block(&self, n: usize) -> &DegreeBlock {
        &self.blocks[n]
    }

    pub fn offset(&self, n: usize) -> usize {
        self.offsets[n]
    }

    /// Index range of the degree-`n` block in global coefficient vectors.
    pub fn range(&self, n: usize) -> std::ops::Range<usize> {
        self.offsets[n]..self.offsets[n] + (n + 1) * (n + 1)
    }

    pub fn degree_of(&self, index: usize) -> usize {
        self.offsets.iter().rposition(|&o| o <= index).expect("index in range")
    }

    /// Values of all basis functions at `x`, in global order.
    pub fn evaluate_all(&self, x: [f64; 4]) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        for b in &self.blocks {
            out.rows_mut(self.offsets[b.degree], b.dim()).copy_from(&b.evaluate_all(x));
        }
        out
    }

    pub fn evaluate(&self, coeffs: &DVector<f64>, x: [f64; 4]) -> f64 {
        self.evaluate_all(x).dot(coeffs)
    }

    /// Exact `L²(S³)` inner product of basis functions `i` and `j`.
    pub fn inner_product_exact(&self, i: usize, j: usize) -> f64 {
        let (ni, nj) = (self.degree_of(i), self.degree_of(j));
        let (bi, bj) = (&self.blocks[ni], &self.blocks[nj]);
        let (ri, rj) = (i - self.offsets[ni], j - self.offsets[nj]);
        let mut s = 0.0;
        for (a, ea) in bi.table.exponents().iter().enumerate() {
            let ca = bi.coeffs[(ri, a)];
            if ca == 0.0 {
                continue;
            }
            for (b, eb) in bj.table.exponents().iter().enumerate() {
                let cb = bj.coeffs[(rj, b)];
                if cb != 0.0 {
                    s += ca * cb * monomial_integral(add(*ea, *eb));
                }
            }
        }
        s
    }

    /// Full exact Gram matrix, including cross-degree entries.
    pub fn gram_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut g = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let v = self.inner_product_exact(i, j);
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }

    /// Exact coefficients `⟨bₘ, p⟩` of a polynomial; exact projection when
    /// `deg p ≤ N`.
    pub fn project_polynomial(&self, p: &Polynomial) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        for b in &self.blocks {
            let mut moments = DVector::zeros(b.table.len());
            for (a, ea) in b.table.exponents().iter().enumerate() {
                moments[a] = p.terms().map(|(e, c)| c * monomial_integral(add(*ea, *e))).sum();
            }
            out.rows_mut(self.offsets[b.degree], b.dim()).copy_from(&(&b.coeffs * moments));
        }
        out
    }

    /// Quadrature projection of nodal values; requires exactness `≥ 2N`.
    pub fn project(&self, grid: &QuadratureGrid, values: &[f64]) -> Result<DVector<f64>> {
        grid.require_exactness(2 * self.max_degree)?;
        let mut out = DVector::zeros(self.dim());
        for ((x, w), v) in grid.nodes().iter().zip(grid.weights()).zip(values) {
            out.axpy(w * v, &self.evaluate_all(x.to_array()), 1.0);
        }
        Ok(out)
    }

    pub fn harmonicity_residual(&self) -> f64 {
        self.blocks.iter().map(DegreeBlock::harmonicity_residual).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::integral::sphere_volume;
    use crate::harmonics::quadrature::{hopf_grid, GridLevels};

    #[test]
    fn block_dimensions_and_total() {
        let b = build_basis(4).unwrap();
        assert_eq!(b.dim(), 55);
        for n in 0..=4 {
            assert_eq!(b.block(n).dim(), (n + 1) * (n + 1));
        }
        assert_eq!(b.degree_of(0), 0);
        assert_eq!(b.degree_of(4), 1);
        assert_eq!(b.degree_of(54), 4);
    }

    #[test]
    fn constant_and_linear_blocks() {
        let b = build_basis(1).unwrap();
        let c = b.block(0).coeffs()[(0, 0)];
        assert!((c.abs() - 1.0 / sphere_volume().sqrt()).abs() < 1e-15);
        // ∫xᵢ² = π²/2 so the degree-1 functions are ±xᵢ·√(2/π²)
        let expect = (2.0 / (std::f64::consts::PI.powi(2))).sqrt();
        let m = b.block(1).coeffs();
        for i in 0..4 {
            let row: Vec<f64> = m.row(i).iter().copied().collect();
            let nz: Vec<f64> = row.into_iter().filter(|v| v.abs() > 1e-14).collect();
            assert_eq!(nz.len(), 1);
            assert!((nz[0].abs() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn basis_is_harmonic_and_orthonormal() {
        let b = build_basis(6).unwrap();
        assert!(b.harmonicity_residual() < 1e-10);
        let g = b.gram_matrix();
        let dev = (g - DMatrix::identity(b.dim(), b.dim())).abs().max();
        assert!(dev < 1e-10, "gram deviation {dev}");
    }

    #[test]
    fn degree_cap_enforced() {
        assert!(matches!(build_basis(13), Err(Error::DegreeTooLarge { .. })));
    }

    #[test]
    fn projection_round_trip_and_block_support() {
        let b = build_basis(4).unwrap();
        let grid = hopf_grid(GridLevels::new(4, 10, 10)).unwrap();
        let e7 = DVector::from_fn(b.dim(), |i, _| if i == 7 { 1.0 } else { 0.0 });
        let vals: Vec<f64> = grid.nodes().iter().map(|x| b.evaluate(&e7, x.to_array())).collect();
        let back = b.project(&grid, &vals).unwrap();
        assert!((back - e7).abs().max() < 1e-13);

        // x₀x₁ is harmonic of degree 2
        let p = &Polynomial::coordinate(0) * &Polynomial::coordinate(1);
        let c = b.project_polynomial(&p);
        for i in 0..b.dim() {
            if b.degree_of(i) != 2 {
                assert!(c[i].abs() < 1e-14);
            }
        }
        // x₀² = ¼ + (x₀² − ¼|x|²) on S³
        let p = &Polynomial::coordinate(0) * &Polynomial::coordinate(0);
        let c = b.project_polynomial(&p);
        let c0 = b.block(0).coeffs()[(0, 0)];
        assert!((c[0] - 0.25 * sphere_volume() * c0).abs() < 1e-14);
        for i in 1..b.dim() {
            if b.degree_of(i) != 2 {
                assert!(c[i].abs() < 1e-14);
            }
        }
        let x = [0.5, 0.5, -0.5, 0.5];
        assert!((b.evaluate(&c, x) - 0.25).abs() < 1e-13);
    }

    #[test]
    fn insufficient_grid_rejected() {
        let b = build_basis(4).unwrap();
        let grid = hopf_grid(GridLevels::new(2, 6, 6)).unwrap();
        let vals = vec![0.0; grid.len()];
        assert!(matches!(b.project(&grid, &vals), Err(Error::InsufficientExactness { .. })));
    }

    #[test]
    fn parity_follows_degree() {
        let b = build_basis(3).unwrap();
        let x = [0.1, -0.7, 0.3, 0.2];
        let mx = x.map(|v| -v);
        let (v, mv) = (b.evaluate_all(x), b.evaluate_all(mx));
        for i in 0..b.dim() {
            let sign = if b.degree_of(i) % 2 == 0 { 1.0 } else { -1.0 };
            assert!((mv[i] - sign * v[i]).abs() < 1e-14);
        }
    }
}
