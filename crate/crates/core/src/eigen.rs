//! Dense eigensolvers: cyclic Jacobi rotations for real symmetric matrices,
//! and Hermitian matrices through their real symmetric embedding.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative off-diagonal size at which Jacobi sweeps stop.
pub const JACOBI_TOL: f64 = 1e-13;

/// Relative `‖M − M†‖` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues ascending with eigenvectors as matching columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi on a real symmetric matrix. The input is symmetrized first.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Degenerate("eigenproblem needs a square matrix"));
    }
    let deviation = (m - m.transpose()).norm();
    let scale = m.norm();
    if deviation > HERMITIAN_TOL * scale.max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let mut a = (m + m.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let target = JACOBI_TOL * scale;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen { values, vectors })
}

/// `[[A, −B], [B, A]]` for `M = A + iB`.
pub fn real_embedding(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// Every eigenvalue of the real embedding appears twice; clusters are paired
/// back into complex eigenvectors by pivoted complex Gram–Schmidt.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<HermitianEigen> {
    let n = m.nrows();
    let deviation = (m - m.adjoint()).norm();
    if deviation > HERMITIAN_TOL * m.norm().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let sym = symmetric_eigen(&real_embedding(m))?;
    let cluster_tol = 1e-7 * sym.values.iter().fold(1.0_f64, |a, v| a.max(v.abs()));

    let mut values = Vec::with_capacity(n);
    let mut vectors: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < 2 * n {
        let mut end = start + 1;
        while end < 2 * n && sym.values[end] - sym.values[end - 1] < cluster_tol {
            end += 1;
        }
        let keep = (end - start).div_ceil(2);
        let mut candidates: Vec<DVector<Complex64>> = (start..end)
            .map(|c| DVector::from_fn(n, |i, _| Complex64::new(sym.vectors[(i, c)], sym.vectors[(i + n, c)])))
            .collect();
        for _ in 0..keep {
            let (best, _) = candidates
                .iter()
                .enumerate()
                .map(|(i, c)| (i, c.norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("cluster is non-empty");
            let q = candidates.swap_remove(best);
            let q = q.unscale(q.norm());
            for c in candidates.iter_mut() {
                let proj = q.dotc(c);
                c.axpy(-proj, &q, Complex64::new(1.0, 0.0));
            }
            vectors.push(q);
        }
        let mean = sym.values[start..end].iter().sum::<f64>() / (end - start) as f64;
        values.extend(std::iter::repeat_n(mean, keep));
        start = end;
    }
    values.truncate(n);
    vectors.truncate(n);
    Ok(HermitianEigen { values, vectors: DMatrix::from_columns(&vectors) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Number of eigenvalues below `lambda` from the inertia of `M − λI`.
    fn count_below(m: &DMatrix<f64>, lambda: f64) -> usize {
        let n = m.nrows();
        let mut a = m - DMatrix::identity(n, n) * lambda;
        let mut negatives = 0;
        for k in 0..n {
            let pivot = a[(k, k)];
            if pivot < 0.0 {
                negatives += 1;
            }
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                for j in k..n {
                    a[(i, j)] -= f * a[(k, j)];
                }
            }
        }
        negatives
    }

    fn bisect_eigenvalue(m: &DMatrix<f64>, index: usize, lo: f64, hi: f64) -> f64 {
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if count_below(m, mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn random_hermitian(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
    }

    #[test]
    fn diagonal_and_swap() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0, 2.0]));
        assert_eq!(symmetric_eigen(&d).unwrap().values, vec![-1.0, 2.0, 3.0]);
        let s = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = symmetric_eigen(&s).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_hermitian_matches_inertia_bisection() {
        for seed in 0..5 {
            let m = random_hermitian(6, seed);
            let e = hermitian_eigen(&m).unwrap();
            let emb = real_embedding(&m);
            let bound = m.norm() + 1.0;
            for (i, v) in e.values.iter().enumerate() {
                let oracle = bisect_eigenvalue(&emb, 2 * i, -bound, bound);
                assert!((v - oracle).abs() < 1e-9, "{v} vs {oracle}");
            }
        }
    }

    #[test]
    fn hermitian_pairs_are_orthonormal_eigenvectors() {
        let m = random_hermitian(8, 42);
        let e = hermitian_eigen(&m).unwrap();
        let scale = m.norm();
        for (c, &lambda) in e.values.iter().enumerate() {
            let v = e.vectors.column(c);
            let r = &m * v - v * Complex64::new(lambda, 0.0);
            assert!(r.norm() <= 1e-10 * scale);
        }
        let g = e.vectors.adjoint() * &e.vectors;
        assert!((g - DMatrix::identity(8, 8)).norm() < 1e-10);
    }

    #[test]
    fn degenerate_hermitian_clusters() {
        // i·(rotation generator) ⊕ same: eigenvalues ±1 each twice
        let mut m = DMatrix::<Complex64>::zeros(4, 4);
        for b in [0, 2] {
            m[(b, b + 1)] = Complex64::new(0.0, -1.0);
            m[(b + 1, b)] = Complex64::new(0.0, 1.0);
        }
        let e = hermitian_eigen(&m).unwrap();
        let expect = [-1.0, -1.0, 1.0, 1.0];
        for (v, x) in e.values.iter().zip(expect) {
            assert!((v - x).abs() < 1e-14);
        }
        let g = e.vectors.adjoint() * &e.vectors;
        assert!((g - DMatrix::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]).map(|x| Complex64::new(x, 0.0));
        assert!(matches!(hermitian_eigen(&m), Err(Error::NotHermitian { .. })));
    }

    proptest::proptest! {
        #[test]
        fn symmetric_reconstruction(seed in 0u64..1000, n in 1usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let m = &g + g.transpose();
            let e = symmetric_eigen(&m).unwrap();
            let back = &e.vectors * DMatrix::from_diagonal(&DVector::from_vec(e.values.clone())) * e.vectors.transpose();
            proptest::prop_assert!((back - &m).norm() < 1e-11 * (1.0 + m.norm()));
            proptest::prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
