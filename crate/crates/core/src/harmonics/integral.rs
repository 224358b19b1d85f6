use std::f64::consts::PI;

use super::polynomial::{Exponent, Polynomial};

/// Volume of the unit 3-sphere, `2π²`.
pub fn sphere_volume() -> f64 {
    2.0 * PI * PI
}

/// `∫_{S³} x₀^α₀ x₁^α₁ x₂^α₂ x₃^α₃ dS`.
///
/// Zero when any exponent is odd; otherwise, with `αᵢ = 2βᵢ` and `B = Σβᵢ`,
/// `2·ΠΓ(βᵢ + ½) / Γ(B + 2) = 2π²·Π(2βᵢ − 1)!! / (2^B·(B + 1)!)`.
pub fn monomial_integral(alpha: Exponent) -> f64 {
    if alpha.iter().any(|a| a % 2 == 1) {
        return 0.0;
    }
    let beta = alpha.map(|a| a / 2);
    let b: u32 = beta.iter().sum();
    let mut num = 1.0;
    for &bi in &beta {
        // (2βᵢ − 1)!!
        let mut k = 2 * bi as i64 - 1;
        while k > 1 {
            num *= k as f64;
            k -= 2;
        }
    }
    let mut den = 1.0;
    for k in 2..=(b + 1) {
        den *= k as f64;
    }
    den *= 2f64.powi(b as i32);
    sphere_volume() * num / den
}

/// Exact `∫_{S³} p dS` for a polynomial.
pub fn integrate_polynomial(p: &Polynomial) -> f64 {
    p.terms().map(|(e, c)| c * monomial_integral(*e)).sum()
}
