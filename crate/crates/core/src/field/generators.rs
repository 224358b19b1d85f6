//! Test fields: Hopf fields of both families, conformal variations, random
//! unit fields and random variations.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::framed::{FramedField, Provenance, VariationField};
use super::space::FieldSpace;
use crate::error::{Error, Result};
use crate::harmonics::{sphere_volume, Polynomial};
use crate::operators::frame_generator;
use crate::su2::{s2_to_pauli, Quaternion};

/// Smallest `min|G| / max|G|` over the grid accepted for a random unit field.
pub const RANDOM_FIELD_MIN_RATIO: f64 = 0.1;

/// Default RMS size of the degree-1 part of each component of a random
/// field, relative to the unit constant part; degree `n` gets this divided by `n`.
pub const RANDOM_FIELD_AMPLITUDE: f64 = 0.5;

const MAX_ATTEMPTS: usize = 1000;

fn unit_axis<const N: usize>(u: [f64; N]) -> Result<[f64; N]> {
    let n = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(n > 1e-12) {
        return Err(Error::Degenerate("zero axis"));
    }
    Ok(u.map(|v| v / n))
}

/// Frame components of `x ↦ x̄·A·x` as quadratic polynomials.
pub fn adjoint_inverse_polynomials(a: [f64; 3]) -> [Polynomial; 3] {
    let aq = Quaternion::pure(a);
    let q = |x: [f64; 4]| {
        let x = Quaternion::from_array(x);
        (x.conj() * aq * x).imag()
    };
    let e = |i: usize| {
        let mut v = [0.0; 4];
        v[i] = 1.0;
        v
    };
    let mut out = [Polynomial::zero(), Polynomial::zero(), Polynomial::zero()];
    for i in 0..4 {
        let qi = q(e(i));
        for (l, p) in out.iter_mut().enumerate() {
            let mut ex = [0u32; 4];
            ex[i] = 2;
            p.add_term(ex, qi[l]);
        }
        for j in i + 1..4 {
            let mut s = e(i);
            s[j] = 1.0;
            let (qs, qj) = (q(s), q(e(j)));
            for (l, p) in out.iter_mut().enumerate() {
                let mut ex = [0u32; 4];
                ex[i] = 1;
                ex[j] = 1;
                p.add_term(ex, qs[l] - qi[l] - qj[l]);
            }
        }
    }
    out
}

/// Left-invariant Hopf field with constant frame components `u/|u|`.
pub fn hopf_left(space: &FieldSpace, u: [f64; 3]) -> Result<FramedField> {
    let u = unit_axis(u)?;
    Ok(FramedField::constant(space, u).with_provenance(Provenance::new("hopf_left", None, u.to_vec())))
}

/// Right-invariant Hopf field `x ↦ u·x`, whose frame components are `x̄ u x`.
pub fn hopf_right(space: &FieldSpace, u: [f64; 3]) -> Result<FramedField> {
    if space.max_degree() < 2 {
        return Err(Error::DegreeMismatch { field: 2, space: space.max_degree() });
    }
    let u = unit_axis(u)?;
    let p = adjoint_inverse_polynomials(u);
    Ok(FramedField::linear(p.each_ref().map(|p| space.basis().project_polynomial(p)))
        .with_provenance(Provenance::new("hopf_right", None, u.to_vec())))
}

/// Horizontal part of the conformal gradient field `Γₐ(x) = a − ⟨a,x⟩x`:
/// `f₂ = ⟨a, x·j⟩`, `f₃ = ⟨a, x·k⟩`.
pub fn conformal_gradient_horizontal(space: &FieldSpace, a: [f64; 4]) -> Result<VariationField> {
    unit_axis(a)?;
    let comp = |j: usize| {
        let g = frame_generator(j);
        let lin: [f64; 4] = [0, 1, 2, 3].map(|c| (0..4).map(|r| a[r] * g[r][c]).sum());
        space.basis().project_polynomial(&Polynomial::linear(lin))
    };
    Ok(VariationField::from_parts(&comp(1), &comp(2))
        .with_provenance(Provenance::new("conformal_gradient_horizontal", None, a.to_vec())))
}

/// Horizontal lift of the conformal gradient field of S² along `a ∈ ℝ³`.
///
/// With `A` the su(2) element identified with `a`, `g = ½·x̄Ax` and the lift
/// is `α = −g₃σ₂ + g₂σ₃`, the field with `dφ(α) = 2η(iα)` equal to the
/// conformal gradient at `φ(x)`.
pub fn conformal_lift(space: &FieldSpace, a: [f64; 3]) -> Result<VariationField> {
    if space.max_degree() < 2 {
        return Err(Error::DegreeMismatch { field: 2, space: space.max_degree() });
    }
    unit_axis(a)?;
    let p = adjoint_inverse_polynomials(s2_to_pauli(a).0);
    let g2 = space.basis().project_polynomial(&p[1].scale(0.5));
    let g3 = space.basis().project_polynomial(&p[2].scale(0.5));
    Ok(VariationField::from_parts(&(-g3), &g2).with_provenance(Provenance::new("conformal_lift", None, a.to_vec())))
}

fn random_coefficients(space: &FieldSpace, max_degree: usize, amplitude: f64, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let vol = sphere_volume().sqrt();
    let mut c = DVector::zeros(space.dim());
    for n in 1..=max_degree.min(space.max_degree()) {
        let sd = amplitude * vol / (n * (n + 1)) as f64;
        for i in space.basis().range(n) {
            c[i] = sd * rng.sample::<f64, _>(StandardNormal);
        }
    }
    c
}

/// `G/|G|` for a random polynomial triple `G` of degree ≤ `max_degree`: a
/// random unit constant plus components decaying with degree. Draws whose
/// `min|G|/max|G|` on the grid is below [`RANDOM_FIELD_MIN_RATIO`] are
/// rejected and redrawn from the same stream.
pub fn random_unit(space: &FieldSpace, max_degree: usize, seed: u64) -> Result<FramedField> {
    random_unit_with_amplitude(space, max_degree, RANDOM_FIELD_AMPLITUDE, seed)
}

/// [`random_unit`] with the size of the non-constant part set by `amplitude`.
pub fn random_unit_with_amplitude(space: &FieldSpace, max_degree: usize, amplitude: f64, seed: u64) -> Result<FramedField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let axis: [f64; 3] = [0, 1, 2].map(|_| rng.sample(StandardNormal));
        let axis = unit_axis(axis)?;
        let g: [DVector<f64>; 3] = [0, 1, 2].map(|l| space.constant(axis[l]) + random_coefficients(space, max_degree, amplitude, &mut rng));
        let values = g.each_ref().map(|c| space.nodes().evaluate(c));
        let norms: Vec<f64> = (0..values[0].len())
            .map(|i| (values[0][i].powi(2) + values[1][i].powi(2) + values[2][i].powi(2)).sqrt())
            .collect();
        let min = norms.iter().copied().fold(f64::INFINITY, f64::min);
        let max = norms.iter().copied().fold(0.0, f64::max);
        if min / max >= RANDOM_FIELD_MIN_RATIO {
            return Ok(FramedField::normalized(g)
                .with_provenance(Provenance::new("random_unit", Some(seed), vec![max_degree as f64, amplitude])));
        }
    }
    Err(Error::Degenerate("no admissible random unit field drawn"))
}

/// Random complex coefficients of degree ≤ `max_degree`, decaying as `1/(n+1)`.
pub fn random_variation(space: &FieldSpace, max_degree: usize, seed: u64) -> VariationField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = DVector::from_element(space.dim(), Complex64::new(0.0, 0.0));
    for n in 0..=max_degree.min(space.max_degree()) {
        let sd = 1.0 / (n + 1) as f64;
        for i in space.basis().range(n) {
            c[i] = Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)) * sd;
        }
    }
    VariationField::new(c).with_provenance(Provenance::new("random_variation", Some(seed), vec![max_degree as f64]))
}

/// `normalize(σ₁ + t·(x₀σ₂ − x₁σ₃))`.
pub fn perturbed_hopf(space: &FieldSpace, amplitude: f64) -> FramedField {
    let g = [
        space.constant(1.0),
        space.basis().project_polynomial(&Polynomial::coordinate(0).scale(amplitude)),
        space.basis().project_polynomial(&Polynomial::coordinate(1).scale(-amplitude)),
    ];
    FramedField::normalized(g).with_provenance(Provenance::new("perturbed", None, vec![amplitude]))
}

/// `normalize(σ₁ + t·x₀σ₂)`.
pub fn bumped_hopf(space: &FieldSpace, t: f64) -> FramedField {
    let g = [
        space.constant(1.0),
        space.basis().project_polynomial(&Polynomial::coordinate(0).scale(t)),
        DVector::zeros(space.dim()),
    ];
    FramedField::normalized(g).with_provenance(Provenance::new("bumped", None, vec![t]))
}

/// `normalize(σ₁ + t·a)` for a variation `a`.
pub fn along_variation(space: &FieldSpace, a: &VariationField, t: f64) -> FramedField {
    let g = [space.constant(1.0), a.real_part() * t, a.imag_part() * t];
    FramedField::normalized(g).with_provenance(Provenance::new("along_variation", None, vec![t]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::calculus::lambda_apply;
    use crate::harmonics::GridLevels;
    use crate::su2::UnitQuaternion;
    use rand::SeedableRng;

    fn space() -> FieldSpace {
        FieldSpace::new(4, GridLevels::new(5, 12, 12)).unwrap()
    }

    #[test]
    fn adjoint_polynomials_match_quaternion_products() {
        let a = [0.2, -0.7, 0.4];
        let p = adjoint_inverse_polynomials(a);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let x = UnitQuaternion::random(&mut rng);
            let expect = x.inverse().adjoint(crate::su2::AlgebraVector(a)).0;
            for l in 0..3 {
                assert!((p[l].evaluate(x.to_array()) - expect[l]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn hopf_generators() {
        let s = space();
        let f = hopf_left(&s, [2.0, 0.0, 0.0]).unwrap();
        assert_eq!(f, FramedField::constant(&s, [1.0, 0.0, 0.0]).with_provenance(f.provenance.clone()));
        let r = hopf_right(&s, [0.0, 1.0, 0.0]).unwrap();
        assert!(r.unit_deviation(&s) < 1e-13);
        assert!(matches!(hopf_left(&s, [0.0; 3]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn conformal_gradient_is_eigenvalue_one() {
        let s = space();
        let v = conformal_gradient_horizontal(&s, [0.1, 0.4, -0.3, 0.8]).unwrap();
        for n in 0..=4 {
            if n != 1 {
                assert!(s.basis().range(n).all(|i| v.coeffs()[i].norm() < 1e-14));
            }
        }
        let lv = lambda_apply(&s, &v);
        assert!((lv.coeffs() - v.coeffs()).norm() < 1e-12);
    }

    #[test]
    fn conformal_lift_is_eigenvalue_four() {
        let s = space();
        let v = conformal_lift(&s, [0.3, -0.5, 0.6]).unwrap();
        assert!(v.norm_sq() > 0.1);
        let lv = lambda_apply(&s, &v);
        assert!((lv.coeffs() - v.coeffs() * Complex64::new(4.0, 0.0)).norm() < 1e-11);
    }

    #[test]
    fn random_unit_is_unit_and_seeded() {
        let s = space();
        let a = random_unit(&s, 3, 9).unwrap();
        let b = random_unit(&s, 3, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.unit_deviation(&s) < 1e-14);
        assert_ne!(a, random_unit(&s, 3, 10).unwrap());
    }

    #[test]
    fn random_variation_has_bounded_degree() {
        let s = space();
        let v = random_variation(&s, 2, 4);
        assert!(s.basis().range(3).chain(s.basis().range(4)).all(|i| v.coeffs()[i] == Complex64::new(0.0, 0.0)));
        assert!(v.to_framed().component(0).iter().all(|c| *c == 0.0));
    }
}
