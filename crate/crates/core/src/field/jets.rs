//! Pointwise values, frame derivatives and Laplacians of field components.
//!
//! For a normalized field `F = G·s` with `s = |G|⁻¹` the quotient rule gives
//! `σⱼF = s·σⱼG + G·σⱼs`, `σⱼs = −s³pⱼ` with `pⱼ = ⟨G, σⱼG⟩`, and
//! `ΔF = sΔG − 2Σⱼ(σⱼs)σⱼG − G·Σⱼσⱼσⱼs` where
//! `Σⱼσⱼσⱼs = 3s⁵Σⱼpⱼ² − s³(Σⱼ|σⱼG|² − ⟨G, ΔG⟩)`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::framed::{FramedField, Normalization};
use super::space::{FieldSpace, NodeSet};
use crate::su2::levi_civita;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// Jets at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: Vec3,
    /// `d[j][l] = σⱼFₗ`.
    pub d: Mat3,
    /// `ΔFₗ` with `Δ = −Σⱼσⱼσⱼ`.
    pub lap: Vec3,
    /// `|G|` and `σⱼ|G|` for normalized fields; `(1, 0)` for linear ones.
    pub radius: f64,
    pub radius_d: Vec3,
}

impl Jet {
    /// `(∇ⱼF)ₗ = σⱼFₗ + Σₖ ε_{jkl} Fₖ`.
    pub fn covariant(&self) -> Mat3 {
        let mut c = self.d;
        for (j, row) in c.iter_mut().enumerate() {
            for (l, v) in row.iter_mut().enumerate() {
                for k in 0..3 {
                    *v += levi_civita(j, k, l) * self.value[k];
                }
            }
        }
        c
    }

    /// `(∇*∇F)ₗ = ΔFₗ + 2Fₗ − 2Σⱼₖ ε_{jkl}σⱼFₖ`.
    pub fn rough_laplacian(&self) -> Vec3 {
        let mut r = [0.0; 3];
        for (l, out) in r.iter_mut().enumerate() {
            *out = self.lap[l] + 2.0 * self.value[l];
            for j in 0..3 {
                for k in 0..3 {
                    *out -= 2.0 * levi_civita(j, k, l) * self.d[j][k];
                }
            }
        }
        r
    }

    /// `|∇F|² = Σⱼ|∇ⱼF|²`.
    pub fn energy_density(&self) -> f64 {
        self.covariant().iter().flatten().map(|v| v * v).sum()
    }

    /// `|∇F|² − 2|F|²`, evaluated without cancellation against the constant:
    /// `Σⱼ|σⱼF|² + 2Σⱼ⟨σⱼF, eⱼ × F⟩`.
    pub fn excess_density(&self) -> f64 {
        let f = self.value;
        let mut s = 0.0;
        for j in 0..3 {
            let e_cross = cross(unit(j), f);
            for l in 0..3 {
                s += self.d[j][l] * (self.d[j][l] + 2.0 * e_cross[l]);
            }
        }
        s
    }

    /// `L(σⱼ, σₖ) = ⟨∇ⱼF, σₖ⟩ + ⟨σⱼ, ∇ₖF⟩`.
    pub fn lie_tensor(&self) -> Mat3 {
        let c = self.covariant();
        let mut l = [[0.0; 3]; 3];
        for j in 0..3 {
            for k in 0..3 {
                l[j][k] = c[j][k] + c[k][j];
            }
        }
        l
    }

    pub fn divergence(&self) -> f64 {
        let c = self.covariant();
        c[0][0] + c[1][1] + c[2][2]
    }

    /// `∇_v F` for a direction with frame components `v`.
    pub fn directional(&self, v: Vec3) -> Vec3 {
        let c = self.covariant();
        let mut out = [0.0; 3];
        for j in 0..3 {
            for l in 0..3 {
                out[l] += v[j] * c[j][l];
            }
        }
        out
    }

    /// `∇*∇F − |∇F|²F`.
    pub fn tension(&self) -> Vec3 {
        let r = self.rough_laplacian();
        let e = self.energy_density();
        [0, 1, 2].map(|l| r[l] - e * self.value[l])
    }
}

pub fn unit(j: usize) -> Vec3 {
    let mut e = [0.0; 3];
    e[j] = 1.0;
    e
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm_sq(a: Vec3) -> f64 {
    dot(a, a)
}

/// Jets of `field` at every point of `nodes`.
pub fn field_jets(space: &FieldSpace, field: &FramedField, nodes: &NodeSet) -> Vec<Jet> {
    let dim = space.dim();
    let mut c = DMatrix::zeros(dim, 15);
    for l in 0..3 {
        let g = field.component(l);
        c.set_column(l, g);
        for j in 0..3 {
            c.set_column(3 + 3 * j + l, &space.derivative(j, g));
        }
        c.set_column(12 + l, &space.laplacian(g));
    }
    let t = nodes.table() * c;
    let normalization = field.normalization();
    (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let g = [t[(i, 0)], t[(i, 1)], t[(i, 2)]];
            let dg = [0, 1, 2].map(|j| [0, 1, 2].map(|l| t[(i, 3 + 3 * j + l)]));
            let lg = [t[(i, 12)], t[(i, 13)], t[(i, 14)]];
            match normalization {
                Normalization::Linear => Jet { value: g, d: dg, lap: lg, radius: 1.0, radius_d: [0.0; 3] },
                Normalization::Nodal => normalized_jet(g, dg, lg),
            }
        })
        .collect()
}

fn normalized_jet(g: Vec3, dg: Mat3, lg: Vec3) -> Jet {
    let q = norm_sq(g);
    let r = q.sqrt();
    let s = 1.0 / r;
    let p = [0, 1, 2].map(|j| dot(g, dg[j]));
    let ds = p.map(|pj| -s * s * s * pj);
    let value = g.map(|v| v * s);
    let mut d = [[0.0; 3]; 3];
    for j in 0..3 {
        for l in 0..3 {
            d[j][l] = s * dg[j][l] + g[l] * ds[j];
        }
    }
    let sum_p2: f64 = p.iter().map(|v| v * v).sum();
    let sum_dg2: f64 = dg.iter().map(|row| norm_sq(*row)).sum();
    let sum_dds = 3.0 * s.powi(5) * sum_p2 - s.powi(3) * (sum_dg2 - dot(g, lg));
    let mut lap = [0.0; 3];
    for l in 0..3 {
        lap[l] = s * lg[l] - g[l] * sum_dds;
        for j in 0..3 {
            lap[l] -= 2.0 * ds[j] * dg[j][l];
        }
    }
    Jet { value, d, lap, radius: r, radius_d: p.map(|pj| pj * s) }
}

/// Jets on the quadrature grid.
pub fn grid_jets(space: &FieldSpace, field: &FramedField) -> Vec<Jet> {
    field_jets(space, field, space.nodes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::{GridLevels, Polynomial};
    use crate::su2::{Quaternion, UnitQuaternion};
    use nalgebra::DVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn exp_frame(x: UnitQuaternion, j: usize, t: f64) -> UnitQuaternion {
        let e = Quaternion::unit(j);
        UnitQuaternion::normalize(x.quaternion() * (Quaternion::ONE.scale(t.cos()) + e.scale(t.sin()))).unwrap()
    }

    /// `F/|F|` along `x·exp(t·eⱼ)`, second differences give `Σⱼσⱼσⱼ`.
    #[test]
    fn normalized_jets_match_finite_differences() {
        let s = FieldSpace::new(3, GridLevels::new(4, 10, 10)).unwrap();
        let g = [
            s.basis().project_polynomial(&(&Polynomial::constant(1.0) + &Polynomial::coordinate(0).scale(0.3))),
            s.basis().project_polynomial(&(&Polynomial::coordinate(1) * &Polynomial::coordinate(2)).scale(0.5)),
            s.basis().project_polynomial(&Polynomial::coordinate(3).scale(-0.4)),
        ];
        let field = FramedField::normalized(g.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let points: Vec<UnitQuaternion> = (0..20).map(|_| UnitQuaternion::random(&mut rng)).collect();
        let eval = |x: UnitQuaternion| -> Vec3 {
            let b = s.basis().evaluate_all(x.to_array());
            let v = g.each_ref().map(|c| b.dot(c));
            let r = norm_sq(v).sqrt();
            v.map(|c| c / r)
        };
        let jets = field_jets(&s, &field, &s.sample(points.clone()));
        let h = 1e-4;
        for (x, jet) in points.iter().zip(&jets) {
            let f0 = eval(*x);
            let mut lap = [0.0; 3];
            for j in 0..3 {
                let (fp, fm) = (eval(exp_frame(*x, j, h)), eval(exp_frame(*x, j, -h)));
                for l in 0..3 {
                    assert!(((fp[l] - fm[l]) / (2.0 * h) - jet.d[j][l]).abs() < 1e-6);
                    lap[l] -= (fp[l] - 2.0 * f0[l] + fm[l]) / (h * h);
                }
            }
            for l in 0..3 {
                assert!((lap[l] - jet.lap[l]).abs() < 1e-4, "{} vs {}", lap[l], jet.lap[l]);
                assert!((f0[l] - jet.value[l]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn excess_density_matches_energy_density_for_unit_fields() {
        let s = FieldSpace::new(2, GridLevels::new(3, 8, 8)).unwrap();
        let mut g = FramedField::constant(&s, [1.0, 0.0, 0.0]).coeffs().clone();
        g[1] = &g[1] + s.basis().project_polynomial(&Polynomial::coordinate(0).scale(0.4));
        for jet in grid_jets(&s, &FramedField::normalized(g)) {
            assert!((jet.excess_density() - (jet.energy_density() - 2.0)).abs() < 1e-13);
        }
        let jets = grid_jets(&s, &FramedField::linear([DVector::zeros(s.dim()), DVector::zeros(s.dim()), s.constant(1.0)]));
        assert!(jets.iter().all(|j| (j.energy_density() - 2.0).abs() < 1e-14 && j.excess_density().abs() < 1e-14));
    }
}
