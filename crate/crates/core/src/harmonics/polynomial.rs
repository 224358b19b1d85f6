//! Polynomials on ℝ⁴ in the coordinates `(x₀, x₁, x₂, x₃) = (w, x, y, z)`.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Sub};

/// Exponent vector of a monomial `x₀^a₀ x₁^a₁ x₂^a₂ x₃^a₃`.
pub type Exponent = [u32; 4];

pub fn total_degree(e: Exponent) -> u32 {
    e.iter().sum()
}

/// All monomials of one total degree, in a fixed order.
///
/// Order: lexicographically descending in `(a₀, a₁, a₂)`, so `x₀ⁿ` comes first
/// and `x₃ⁿ` last.
#[derive(Debug, Clone)]
pub struct MonomialTable {
    degree: u32,
    exponents: Vec<Exponent>,
    index: HashMap<Exponent, usize>,
}

impl MonomialTable {
    pub fn new(degree: u32) -> Self {
        let mut exponents = Vec::new();
        for a0 in (0..=degree).rev() {
            for a1 in (0..=degree - a0).rev() {
                for a2 in (0..=degree - a0 - a1).rev() {
                    exponents.push([a0, a1, a2, degree - a0 - a1 - a2]);
                }
            }
        }
        let index = exponents.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        Self { degree, exponents, index }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Exponent] {
        &self.exponents
    }

    pub fn index_of(&self, e: &Exponent) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// Values of every monomial of this degree at `x`.
    pub fn evaluate_all(&self, x: [f64; 4]) -> Vec<f64> {
        let powers = powers(x, self.degree);
        self.exponents
            .iter()
            .map(|e| (0..4).map(|i| powers[i][e[i] as usize]).product())
            .collect()
    }
}

pub(crate) fn powers(x: [f64; 4], max: u32) -> [Vec<f64>; 4] {
    x.map(|v| {
        let mut p = Vec::with_capacity(max as usize + 1);
        let mut acc = 1.0;
        for _ in 0..=max {
            p.push(acc);
            acc *= v;
        }
        p
    })
}

/// Sparse polynomial on ℝ⁴; not necessarily homogeneous.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Polynomial {
    terms: BTreeMap<Exponent, f64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial([0, 0, 0, 0], c)
    }

    pub fn monomial(e: Exponent, c: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    /// The coordinate function `xᵢ`.
    pub fn coordinate(i: usize) -> Self {
        let mut e = [0; 4];
        e[i] = 1;
        Self::monomial(e, 1.0)
    }

    /// The linear functional `x ↦ ⟨a, x⟩`.
    pub fn linear(a: [f64; 4]) -> Self {
        let mut p = Self::zero();
        for (i, c) in a.into_iter().enumerate() {
            let mut e = [0; 4];
            e[i] = 1;
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: Exponent, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(e).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &f64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| total_degree(*e)).max().unwrap_or(0)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, c * s);
        }
        out
    }

    pub fn evaluate(&self, x: [f64; 4]) -> f64 {
        let p = powers(x, self.degree());
        self.terms
            .iter()
            .map(|(e, c)| c * (0..4).map(|i| p[i][e[i] as usize]).product::<f64>())
            .sum()
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut d = *e;
                d[i] -= 1;
                out.add_term(d, c * e[i] as f64);
            }
        }
        out
    }

    /// Ambient Laplacian `Σᵢ ∂ᵢ²` restricted to the coordinates in `axes`.
    pub fn laplacian_over(&self, axes: &[usize]) -> Self {
        let mut out = Self::zero();
        for &i in axes {
            out = &out + &self.partial(i).partial(i);
        }
        out
    }

    pub fn laplacian(&self) -> Self {
        self.laplacian_over(&[0, 1, 2, 3])
    }

    /// `x ↦ Df(x)[A·x]` for a linear vector field `A`.
    pub fn directional_linear(&self, a: &[[f64; 4]; 4]) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            for i in 0..4 {
                if e[i] == 0 {
                    continue;
                }
                for (k, aik) in a[i].iter().enumerate() {
                    if *aik == 0.0 {
                        continue;
                    }
                    let mut d = *e;
                    d[i] -= 1;
                    d[k] += 1;
                    out.add_term(d, c * e[i] as f64 * aik);
                }
            }
        }
        out
    }

    /// Homogeneous part of the given degree.
    pub fn homogeneous_part(&self, degree: u32) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if total_degree(*e) == degree {
                out.add_term(*e, *c);
            }
        }
        out
    }

    /// Dense coefficients on the monomial table (terms of other degrees ignored).
    pub fn to_dense(&self, table: &MonomialTable) -> Vec<f64> {
        let mut v = vec![0.0; table.len()];
        for (e, c) in &self.terms {
            if let Some(i) = table.index_of(e) {
                v[i] += c;
            }
        }
        v
    }

    pub fn from_dense(table: &MonomialTable, coeffs: &[f64]) -> Self {
        let mut p = Self::zero();
        for (e, c) in table.exponents().iter().zip(coeffs) {
            p.add_term(*e, *c);
        }
        p
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, *c);
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -*c);
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}
