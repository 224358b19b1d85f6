//! Product quadrature on S³ in Hopf coordinates.
//!
//! `z₁ = cos η·e^{iξ₁}`, `z₂ = sin η·e^{iξ₂}` with `η ∈ [0, π/2]`. Under
//! `t = cos 2η` the volume element is `¼ dt dξ₁ dξ₂`; the grid is
//! Gauss–Legendre in `t` and the uniform trapezoidal rule in each angle.
//!
//! Node order: `t` index outermost (ascending Gauss–Legendre nodes), then
//! `ξ₁ = 2πa/L₁`, then `ξ₂ = 2πb/L₂` innermost.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::su2::UnitQuaternion;

/// Gauss–Legendre nodes and weights on `[−1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Levels `(L_t, L₁, L₂)` of a Hopf-coordinate product grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridLevels {
    pub t: usize,
    pub xi1: usize,
    pub xi2: usize,
}

impl GridLevels {
    pub const fn new(t: usize, xi1: usize, xi2: usize) -> Self {
        Self { t, xi1, xi2 }
    }

    /// Largest total degree `D` such that every monomial of degree ≤ D is
    /// integrated exactly.
    ///
    /// A monomial of degree `d` integrates, after the angles, to a polynomial of
    /// degree ≤ ⌊d/2⌋ in `t` (Gauss exact up to `2L_t − 1`), and carries
    /// angular frequencies ≤ d (trapezoid exact below `Lᵢ`).
    pub fn exactness(&self) -> usize {
        (4 * self.t - 1).min(self.xi1 - 1).min(self.xi2 - 1)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadratureGrid {
    levels: GridLevels,
    nodes: Vec<UnitQuaternion>,
    weights: Vec<f64>,
}

/// Builds the product grid for the given levels.
pub fn hopf_grid(levels: GridLevels) -> Result<QuadratureGrid> {
    if levels.t == 0 || levels.xi1 == 0 || levels.xi2 == 0 {
        return Err(Error::InvalidGrid { t: levels.t, xi1: levels.xi1, xi2: levels.xi2 });
    }
    let (ts, tw) = gauss_legendre(levels.t);
    let dxi1 = 2.0 * PI / levels.xi1 as f64;
    let dxi2 = 2.0 * PI / levels.xi2 as f64;
    let mut nodes = Vec::with_capacity(levels.t * levels.xi1 * levels.xi2);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for (t, wt) in ts.iter().zip(&tw) {
        let c = ((1.0 + t) / 2.0).sqrt();
        let s = ((1.0 - t) / 2.0).sqrt();
        for a in 0..levels.xi1 {
            let z1 = Complex64::from_polar(c, a as f64 * dxi1);
            for b in 0..levels.xi2 {
                let z2 = Complex64::from_polar(s, b as f64 * dxi2);
                nodes.push(UnitQuaternion::from_pauli_coordinates(z1, z2)?);
                weights.push(0.25 * wt * dxi1 * dxi2);
            }
        }
    }
    Ok(QuadratureGrid { levels, nodes, weights })
}

impl QuadratureGrid {
    pub fn levels(&self) -> GridLevels {
        self.levels
    }

    pub fn exactness(&self) -> usize {
        self.levels.exactness()
    }

    pub fn nodes(&self) -> &[UnitQuaternion] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ wᵢ f(xᵢ)` with compensated summation.
    pub fn integrate<F: Fn(UnitQuaternion) -> f64>(&self, f: F) -> f64 {
        self.integrate_values(self.nodes.iter().map(|x| f(*x)))
    }

    /// Weighted sum of nodal values given in node order.
    pub fn integrate_values<I: IntoIterator<Item = f64>>(&self, values: I) -> f64 {
        neumaier_sum(self.weights.iter().zip(values).map(|(w, v)| w * v))
    }

    pub fn require_exactness(&self, required: usize) -> Result<()> {
        if self.exactness() < required {
            return Err(Error::InsufficientExactness { required, available: self.exactness() });
        }
        Ok(())
    }
}

/// Neumaier's compensated summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
