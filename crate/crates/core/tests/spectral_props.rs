use lclab_core::cubature::Cubature;
use lclab_core::linalg::op_norm;
use lclab_core::mc::{covariance_summary, sample, Method};
use lclab_core::measures::{LogConcaveMeasure as M, Potential};
use lclab_core::spectral::{bochner_check, random_poly, rayleigh_ritz_cp, FunctionBasis};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn one_dim() -> Vec<M> {
    vec![
        M::interval(-1.0, 2.0),
        M::ShiftedExponential,
        M::std_gaussian(1),
        M::GaussianTilt { base: Box::new(M::interval(0.0, 1.0)), theta: vec![0.5], t: 3.0 },
        M::GaussianTilt { base: Box::new(M::ShiftedExponential), theta: vec![-0.2], t: 0.7 },
    ]
}

fn ritz(m: &M, basis: &FunctionBasis) -> f64 {
    let order = if m.dim() > 2 { 10 } else { 24 };
    rayleigh_ritz_cp(&Cubature::for_measure(m, order).unwrap(), basis).unwrap().value
}

fn spd(entries: &[f64], n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_row_slice(n, n, &entries[..n * n]);
    &a * a.transpose() + DMatrix::identity(n, n) * 0.2
}

#[test]
fn ritz_tensorizes() {
    let basis = FunctionBasis::poly(1, 3);
    for a in one_dim() {
        for b in one_dim() {
            let (ra, rb) = (ritz(&a, &basis), ritz(&b, &basis));
            let both = M::Product { factors: vec![a.clone(), b.clone()] };
            let rp = ritz(&both, &FunctionBasis::product(&basis, &basis));
            assert!((rp - ra.max(rb)).abs() < 1e-8 * ra.max(rb), "{} {}: {rp} vs {ra} {rb}", a.kind_name(), b.kind_name());
        }
    }
}

#[test]
fn ritz_grows_with_the_basis() {
    for m in one_dim() {
        let small = ritz(&m, &FunctionBasis::linear(1));
        let mid = ritz(&m, &FunctionBasis::poly(1, 2));
        let big = ritz(&m, &FunctionBasis::poly(1, 2).extend(&FunctionBasis::trig(1, 0, 2, -3.0, 4.0)));
        assert!(small <= mid * (1.0 + 1e-10) && mid <= big * (1.0 + 1e-10), "{}", m.kind_name());
    }
}

#[test]
fn covariance_below_poincare_constant_by_sampling() {
    let cases = [
        (M::cube(3, 1.0), 1.0 / std::f64::consts::PI.powi(2)),
        (M::exp_product(2), 4.0),
        (M::gaussian(vec![0.0, 1.0], DMatrix::from_row_slice(2, 2, &[2.0, 0.6, 0.6, 1.0])), 2.6),
        (M::std_gaussian(4), 1.0),
    ];
    for (i, (m, cp)) in cases.iter().enumerate() {
        let s = covariance_summary(&sample(m, 100_000, 11 + i as u64, Method::Direct).unwrap());
        assert!(s.op_norm <= cp + 3.0 * s.se_op_norm, "{}: {} > {cp}", m.kind_name(), s.op_norm);
    }
}

#[test]
fn mala_recovers_gaussian_covariance() {
    let cov = DMatrix::from_row_slice(2, 2, &[1.5, -0.4, -0.4, 0.8]);
    let m = M::gaussian(vec![0.5, -1.0], cov.clone());
    let b = sample(&m, 200_000, 3, Method::Mala { step: 0.5, burn_in: 2000 }).unwrap();
    let s = covariance_summary(&b);
    for i in 0..2 {
        for j in 0..2 {
            let err = (s.cov[i][j] - cov[(i, j)]).abs();
            assert!(err <= 4.0 * s.se_cov[i][j], "cov[{i}][{j}] = {} (se {})", s.cov[i][j], s.se_cov[i][j]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn strongly_convex_ritz_below_inverse_modulus(n in 1usize..4, a in prop::collection::vec(-1.0f64..1.0, 9), t in 0.2f64..3.0) {
        let g = M::gaussian(vec![0.0; n], spd(&a, n));
        let k = n.min(2);
        for m in [g.clone(), M::GaussianTilt { base: Box::new(M::cube(k, 2.0)), theta: vec![0.3; k], t }] {
            let modulus = Potential::new(&m).regularity().strongly_convex.unwrap();
            let r = ritz(&m, &FunctionBasis::poly(m.dim(), 2));
            prop_assert!(r <= (1.0 + 1e-9) / modulus, "{}: {r} > {}", m.kind_name(), 1.0 / modulus);
        }
        let cov = spd(&a, n);
        prop_assert!((ritz(&g, &FunctionBasis::linear(n)) - op_norm(&cov)).abs() < 1e-9 * op_norm(&cov));
    }

    #[test]
    fn bochner_identity_on_gaussians(n in 1usize..4, d in 1u32..5, a in prop::collection::vec(-1.0f64..1.0, 9), seed in 0u64..1000) {
        let mean: Vec<f64> = a[..n].to_vec();
        let m = M::gaussian(mean, spd(&a, n));
        let cub = Cubature::for_measure(&m, 8).unwrap();
        let r = bochner_check(&m, &random_poly(n, d, seed), &cub).unwrap();
        prop_assert!(r.residual <= 1e-8, "residual {}", r.residual);
    }
}
