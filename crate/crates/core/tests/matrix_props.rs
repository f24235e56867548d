use lclab_core::matrixineq::{exp_trace_hessian_check, softmax_proxy, sym_gaussian, trace_inequality_relative, wishart};
use lclab_core::rng;
use nalgebra::DMatrix;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn trace_inequality_slack_nonnegative(seed in any::<u64>(), n in 1usize..7, alpha in 0.01f64..3.0, beta in 0.01f64..3.0) {
        let mut r = rng::stream(seed, rng::label("trace-prop"));
        let k = wishart(n, &mut r);
        let h = sym_gaussian(n, &mut r);
        prop_assert!(trace_inequality_relative(&k, &h, alpha, beta).unwrap() >= -1e-10);
    }

    #[test]
    fn softmax_sandwich(seed in any::<u64>(), n in 1usize..9, beta in 0.01f64..50.0) {
        let mut r = rng::stream(seed, rng::label("softmax-prop"));
        let m = sym_gaussian(n, &mut r);
        let s = softmax_proxy(&m, beta).unwrap();
        prop_assert!(s.holds);
        prop_assert!(s.lambda_max <= s.h && s.h <= s.upper);
    }

    #[test]
    fn exp_hessian_shift_invariant(seed in any::<u64>(), n in 1usize..6, c in -20.0f64..20.0) {
        let mut r = rng::stream(seed, rng::label("exp-hessian-prop"));
        let a = sym_gaussian(n, &mut r);
        let h = sym_gaussian(n, &mut r);
        let plain = exp_trace_hessian_check(&a, &h);
        let shifted = exp_trace_hessian_check(&(&a + DMatrix::identity(n, n) * c), &h);
        prop_assert!(plain.slack_rel >= -1e-6);
        // both runs shift by λ_max internally; the residue is finite-difference rounding,
        // at the same 1e-6 resolution as the slack itself
        prop_assert!((plain.slack_rel - shifted.slack_rel).abs() <= 1e-6, "{} {}", plain.slack_rel, shifted.slack_rel);
    }
}
