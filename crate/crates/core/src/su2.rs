//! Quaternion model of S³ ≅ SU(2).
//!
//! A point of S³ is a unit quaternion `q = w + x·i + y·j + z·k`. The map
//! `q ↦ w·I + x·P₁ + y·P₂ + z·P₃` is an algebra isomorphism onto SU(2), and
//! in matrix form `[[z₁, −z̄₂], [z₂, z̄₁]]` it fixes the complex coordinates
//!
//! ```text
//! z₁ = w + i·x,    z₂ = z + i·y.
//! ```
//!
//! The left-invariant frame is `σⱼ(q) = q·eⱼ` with `(e₁, e₂, e₃) = (i, j, k)`;
//! `σ₁` is complex multiplication by `i` on `(z₁, z₂)`, i.e. the canonical
//! Hopf field. Lie algebra elements are stored as their coefficients on the
//! Pauli basis, which coincide with the imaginary quaternion units.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for accepting a quaternion as a point of S³.
pub const UNIT_TOL: f64 = 1e-12;
/// Tangency tolerance for ambient tangent vectors.
pub const TANGENT_TOL: f64 = 1e-12;
const RENORMALIZE_TOL: f64 = 1e-14;

/// Totally antisymmetric symbol on indices `0..3`.
#[inline]
pub fn levi_civita(j: usize, k: usize, l: usize) -> f64 {
    match (j, k, l) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    /// Pure imaginary quaternion with the given `(i, j, k)` coefficients.
    pub fn pure(v: [f64; 3]) -> Self {
        Self::new(0.0, v[0], v[1], v[2])
    }

    /// The imaginary unit `eⱼ` for `j ∈ {0, 1, 2}`.
    pub fn unit(j: usize) -> Self {
        match j {
            0 => Self::I,
            1 => Self::J,
            2 => Self::K,
            _ => panic!("imaginary unit index {j} out of range"),
        }
    }

    pub fn imag(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn dot(self, other: Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    /// Hamilton product.
    fn mul(self, b: Quaternion) -> Quaternion {
        let a = self;
        Quaternion::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, b: Quaternion) -> Quaternion {
        Quaternion::new(self.w + b.w, self.x + b.x, self.y + b.y, self.z + b.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, b: Quaternion) -> Quaternion {
        Quaternion::new(self.w - b.w, self.x - b.x, self.y - b.y, self.z - b.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

/// Hamilton product as a free function.
pub fn quat_mul(a: Quaternion, b: Quaternion) -> Quaternion {
    a * b
}

/// A point of S³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Quaternion", into = "Quaternion")]
pub struct UnitQuaternion(Quaternion);

impl UnitQuaternion {
    pub const IDENTITY: UnitQuaternion = UnitQuaternion(Quaternion::ONE);

    /// Accepts `q` if `|q|² = 1` within [`UNIT_TOL`]; renormalizes drift above 1e−14.
    pub fn new(q: Quaternion) -> Result<Self> {
        let n2 = q.norm_sq();
        if (1.0 - n2).abs() > UNIT_TOL {
            return Err(Error::NotUnit { norm_sq: n2 });
        }
        Ok(Self::renormalized(q))
    }

    /// Projects a nonzero quaternion onto S³.
    pub fn normalize(q: Quaternion) -> Result<Self> {
        let n = q.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Degenerate("cannot normalize a zero quaternion"));
        }
        Ok(Self(q.scale(1.0 / n)))
    }

    fn renormalized(q: Quaternion) -> Self {
        if (1.0 - q.norm_sq()).abs() > RENORMALIZE_TOL {
            Self(q.scale(1.0 / q.norm()))
        } else {
            Self(q)
        }
    }

    pub fn from_array(a: [f64; 4]) -> Result<Self> {
        Self::new(Quaternion::from_array(a))
    }

    /// Uniformly distributed point of S³.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let q = Quaternion::new(
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            );
            if q.norm() > 1e-6 {
                return Self(q.scale(1.0 / q.norm()));
            }
        }
    }

    /// `exp(v)` for a pure imaginary `v = v₁i + v₂j + v₃k`.
    pub fn exp(v: AlgebraVector) -> Self {
        let theta = v.norm();
        if theta == 0.0 {
            return Self::IDENTITY;
        }
        let s = theta.sin() / theta;
        Self::renormalized(Quaternion::new(theta.cos(), v.0[0] * s, v.0[1] * s, v.0[2] * s))
    }

    pub fn quaternion(self) -> Quaternion {
        self.0
    }

    pub fn to_array(self) -> [f64; 4] {
        self.0.to_array()
    }

    pub fn inverse(self) -> Self {
        Self(self.0.conj())
    }

    pub fn mul(self, other: UnitQuaternion) -> Self {
        Self::renormalized(self.0 * other.0)
    }

    /// Complex coordinates `(z₁, z₂) = (w + i·x, z + i·y)`.
    pub fn pauli_coordinates(self) -> (Complex64, Complex64) {
        let q = self.0;
        (Complex64::new(q.w, q.x), Complex64::new(q.z, q.y))
    }

    pub fn from_pauli_coordinates(z1: Complex64, z2: Complex64) -> Result<Self> {
        Self::new(Quaternion::new(z1.re, z1.im, z2.im, z2.re))
    }

    /// Conjugation `a ↦ q·a·q⁻¹` on su(2).
    pub fn adjoint(self, a: AlgebraVector) -> AlgebraVector {
        AlgebraVector((self.0 * a.to_quaternion() * self.0.conj()).imag())
    }

    /// 3×3 rotation matrix of [`Self::adjoint`] acting on Pauli coefficients.
    pub fn adjoint_matrix(self) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for k in 0..3 {
            let col = self.adjoint(AlgebraVector::basis(k)).0;
            for (l, row) in m.iter_mut().enumerate() {
                row[k] = col[l];
            }
        }
        m
    }
}

impl TryFrom<Quaternion> for UnitQuaternion {
    type Error = Error;
    fn try_from(q: Quaternion) -> Result<Self> {
        Self::new(q)
    }
}

impl From<UnitQuaternion> for Quaternion {
    fn from(u: UnitQuaternion) -> Quaternion {
        u.0
    }
}

/// An element of su(2) by its coefficients on `(P₁, P₂, P₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AlgebraVector(pub [f64; 3]);

impl AlgebraVector {
    pub fn basis(j: usize) -> Self {
        let mut v = [0.0; 3];
        v[j] = 1.0;
        Self(v)
    }

    pub fn to_quaternion(self) -> Quaternion {
        Quaternion::pure(self.0)
    }

    pub fn dot(self, other: Self) -> f64 {
        self.0.iter().zip(other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self(self.0.map(|a| a * s))
    }

    /// `[a, b] = ab − ba`; on the Pauli basis `[Pⱼ, Pₖ] = 2ε_{jkl} Pₗ`.
    pub fn bracket(self, other: Self) -> Self {
        let (a, b) = (self.0, other.0);
        Self([
            2.0 * (a[1] * b[2] - a[2] * b[1]),
            2.0 * (a[2] * b[0] - a[0] * b[2]),
            2.0 * (a[0] * b[1] - a[1] * b[0]),
        ])
    }
}

impl Add for AlgebraVector {
    type Output = AlgebraVector;
    fn add(self, b: AlgebraVector) -> AlgebraVector {
        AlgebraVector([self.0[0] + b.0[0], self.0[1] + b.0[1], self.0[2] + b.0[2]])
    }
}

impl Sub for AlgebraVector {
    type Output = AlgebraVector;
    fn sub(self, b: AlgebraVector) -> AlgebraVector {
        AlgebraVector([self.0[0] - b.0[0], self.0[1] - b.0[1], self.0[2] - b.0[2]])
    }
}

/// A tangent vector to S³ in ambient ℝ⁴ coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub base: UnitQuaternion,
    pub vec: [f64; 4],
}

impl TangentVector {
    pub fn new(base: UnitQuaternion, vec: [f64; 4]) -> Result<Self> {
        let inner = base.quaternion().dot(Quaternion::from_array(vec));
        if inner.abs() > TANGENT_TOL {
            return Err(Error::NotTangent { inner });
        }
        Ok(Self::project(base, vec))
    }

    /// Tangential projection `v − ⟨v, x⟩x`.
    pub fn project(base: UnitQuaternion, vec: [f64; 4]) -> Self {
        let x = base.quaternion();
        let v = Quaternion::from_array(vec);
        let p = v - x.scale(v.dot(x));
        Self { base, vec: p.to_array() }
    }

    pub fn quaternion(self) -> Quaternion {
        Quaternion::from_array(self.vec)
    }

    pub fn dot(self, other: TangentVector) -> f64 {
        self.quaternion().dot(other.quaternion())
    }

    /// Tangent vector with the given coefficients on the left-invariant frame.
    pub fn from_frame(base: UnitQuaternion, coeffs: [f64; 3]) -> Self {
        let v = base.quaternion() * Quaternion::pure(coeffs);
        Self::project(base, v.to_array())
    }

    /// Coefficients on `(σ₁, σ₂, σ₃)` at the base point.
    pub fn frame_coefficients(self) -> [f64; 3] {
        mu_coefficients(self.base, self.quaternion())
    }
}

/// Left-invariant orthonormal frame `σⱼ(x) = x·eⱼ`.
pub fn frame_at(x: UnitQuaternion) -> [TangentVector; 3] {
    let q = x.quaternion();
    [0, 1, 2].map(|j| TangentVector::project(x, (q * Quaternion::unit(j)).to_array()))
}

/// Same as [`frame_at`] but validating an arbitrary quaternion first.
pub fn frame_at_checked(q: Quaternion) -> Result<[TangentVector; 3]> {
    Ok(frame_at(UnitQuaternion::new(q)?))
}

/// Canonical Hopf field `σ(x) = ix` (complex multiplication on `(z₁, z₂)`).
pub fn hopf_field(x: UnitQuaternion) -> TangentVector {
    frame_at(x)[0]
}

/// Hopf map `φ(z₁, z₂) = (2·z̄₁z₂, |z₂|² − |z₁|²) ∈ ℂ × ℝ ≅ ℝ³`.
pub fn hopf_map(x: UnitQuaternion) -> [f64; 3] {
    let (z1, z2) = x.pauli_coordinates();
    let c = z1.conj() * z2 * 2.0;
    [c.re, c.im, z2.norm_sqr() - z1.norm_sqr()]
}

fn mu_coefficients(x: UnitQuaternion, v: Quaternion) -> [f64; 3] {
    (x.quaternion().conj() * v).imag()
}

/// Maurer–Cartan form `μ(Y) = x⁻¹·Y`.
pub fn mu_translate(x: UnitQuaternion, y: TangentVector) -> Result<AlgebraVector> {
    check_tangent(x, y)?;
    Ok(AlgebraVector(mu_coefficients(x, y.quaternion())))
}

/// Right-invariant form `η(Y) = Y·x⁻¹`.
pub fn eta_translate(x: UnitQuaternion, y: TangentVector) -> Result<AlgebraVector> {
    check_tangent(x, y)?;
    Ok(AlgebraVector((y.quaternion() * x.quaternion().conj()).imag()))
}

fn check_tangent(x: UnitQuaternion, y: TangentVector) -> Result<()> {
    let inner = x.quaternion().dot(y.quaternion());
    if inner.abs() > TANGENT_TOL {
        return Err(Error::NotTangent { inner });
    }
    Ok(())
}

/// Identification of the unit sphere in su(2) with S² ⊂ ℝ³ under which
/// `η∘σ` is the Hopf map: coordinates on the basis `(P₂, −P₃, −P₁)`.
pub fn pauli_to_s2(a: AlgebraVector) -> [f64; 3] {
    [a.0[1], -a.0[2], -a.0[0]]
}

/// Inverse of [`pauli_to_s2`].
pub fn s2_to_pauli(p: [f64; 3]) -> AlgebraVector {
    AlgebraVector([-p[2], p[0], -p[1]])
}
