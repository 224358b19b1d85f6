use std::sync::OnceLock;

use hopf_core::field::calculus::{apply_vertical_jacobi, divergence, lambda_apply, lie_derivative_metric};
use hopf_core::field::generators::{random_unit, random_unit_with_amplitude, random_variation};
use hopf_core::field::{inequality_gap, GapKind};
use hopf_core::su2::{eta_translate, frame_at, hopf_field, hopf_map};
use hopf_core::variational::{
    bochner_yano, energy_identity_report, gradient_flow, hessian, isometry_pullback, pointwise_identity_residual,
    vertical_energy, FlowParams,
};
use hopf_core::{AlgebraVector, FieldSpace, GridLevels, Quaternion, UnitQuaternion};
use proptest::prelude::*;

fn space() -> &'static FieldSpace {
    static SPACE: OnceLock<FieldSpace> = OnceLock::new();
    SPACE.get_or_init(|| FieldSpace::new(4, GridLevels::new(4, 12, 12)).unwrap())
}

fn fine_space() -> &'static FieldSpace {
    static SPACE: OnceLock<FieldSpace> = OnceLock::new();
    SPACE.get_or_init(|| FieldSpace::new(3, GridLevels::new(10, 24, 24)).unwrap())
}

fn unit() -> impl Strategy<Value = UnitQuaternion> {
    prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("away from the origin", |a| a.iter().map(|v| v * v).sum::<f64>() > 1e-2)
        .prop_map(|a| UnitQuaternion::normalize(Quaternion::from_array(a)).unwrap())
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().map(f64::abs).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frame_is_orthonormal(x in unit()) {
        let f = frame_at(x);
        for j in 0..3 {
            for k in 0..3 {
                let expect = if j == k { 1.0 } else { 0.0 };
                prop_assert!((f[j].dot(f[k]) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hopf_map_is_constant_on_fibres(x in unit(), t in -4.0f64..4.0) {
        let y = x.mul(UnitQuaternion::exp(AlgebraVector([t, 0.0, 0.0])));
        let (a, b) = (hopf_map(x), hopf_map(y));
        prop_assert!((0..3).all(|l| (a[l] - b[l]).abs() < 1e-12));
    }

    #[test]
    fn hopf_map_is_equivariant(x in unit(), u in prop::array::uniform3(-1.0f64..1.0)) {
        let n = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(n > 1e-3);
        let u = UnitQuaternion::normalize(Quaternion::pure([u[0] / n, u[1] / n, u[2] / n])).unwrap();
        let ux = u.mul(x);
        let lhs = eta_translate(ux, hopf_field(ux)).unwrap();
        let rhs = u.adjoint(eta_translate(x, hopf_field(x)).unwrap());
        prop_assert!((0..3).all(|l| (lhs.0[l] - rhs.0[l]).abs() < 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lie_trace_is_twice_divergence(seed in any::<u64>()) {
        let s = space();
        let f = random_unit(s, 3, seed).unwrap().to_linear(s);
        let tr = lie_derivative_metric(s, &f).unwrap().trace();
        let div = divergence(s, &f).unwrap();
        prop_assert!(max_abs(tr.iter().zip(div.iter()).map(|(t, d)| t - 2.0 * d)) < 1e-10);
    }

    #[test]
    fn energy_identity_for_unit_fields(seed in any::<u64>()) {
        let s = space();
        let f = random_unit(s, 3, seed).unwrap();
        prop_assert!(energy_identity_report(s, &f).unwrap().relative_residual() < 1e-10);
        prop_assert!(max_abs(pointwise_identity_residual(s, &f, None).unwrap()) < 1e-10);
    }

    #[test]
    fn nonlinear_gap_is_nonnegative_and_decomposes(seed in any::<u64>()) {
        let s = space();
        let f = random_unit(s, 3, seed).unwrap();
        let r = inequality_gap(s, GapKind::Nonlinear, &f, None, None).unwrap();
        prop_assert!(r.min_gap() >= -1e-10);
        prop_assert!(r.decomposition_residual() < 1e-9);
    }

    #[test]
    fn jacobi_matches_matrix_action(seed in any::<u64>()) {
        let s = space();
        let a = random_variation(s, 4, seed);
        let direct = apply_vertical_jacobi(s, &a).unwrap();
        let matrix = lambda_apply(s, &a);
        let diff = (direct.coeffs() - matrix.coeffs()).norm();
        prop_assert!(diff < 1e-10 * (1.0 + matrix.coeffs().norm()));
    }

    #[test]
    fn hessian_forms_agree(sa in any::<u64>(), sb in any::<u64>()) {
        let s = space();
        let (a, b) = (random_variation(s, 4, sa), random_variation(s, 4, sb));
        let h = hessian(s, &a, &b).unwrap();
        prop_assert!(h.relative_gap(h.jacobi.abs().max(h.bochner.abs()).max(1.0)) < 1e-8);
    }

    #[test]
    fn bochner_yano_integral(seed in any::<u64>()) {
        let s = space();
        let x = random_unit(s, 3, seed).unwrap().to_linear(s);
        let (lhs, rhs) = bochner_yano(s, &x).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-8 * lhs.abs().max(rhs.abs()).max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn energy_is_isometry_invariant(seed in any::<u64>(), u in unit(), v in unit()) {
        let s = fine_space();
        let f = random_unit_with_amplitude(s, 3, 0.1, seed).unwrap();
        let e = vertical_energy(s, &f).unwrap();
        let g = isometry_pullback(s, &f, u, v).unwrap();
        let e2 = vertical_energy(s, &g).unwrap();
        prop_assert!((e - e2).abs() < 1e-8 * e, "{} vs {}", e, e2);
    }

    #[test]
    fn flow_energy_never_increases(seed in any::<u64>()) {
        let s = space();
        let f = random_unit(s, 2, seed).unwrap();
        let params = FlowParams { max_iters: 60, ..FlowParams::default() };
        let out = gradient_flow(s, &f, &params).unwrap();
        prop_assert!(out.trace.is_monotone());
        let first = out.trace.steps.first().unwrap().energy;
        let last = out.trace.final_step().unwrap().energy;
        prop_assert!(last <= first);
    }
}
