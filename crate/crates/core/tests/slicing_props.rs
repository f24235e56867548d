use lclab_core::linalg::to_rows;
use lclab_core::measures::LogConcaveMeasure as M;
use lclab_core::slicing::{f_gradient_check, gaussian_l, isotropic_constant, LMethod, LogLaplace};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn closed(m: &M) -> f64 {
    isotropic_constant(m, LMethod::ClosedForm).unwrap().l
}

fn bodies() -> Vec<M> {
    vec![
        M::cube(3, 1.0),
        M::simplex(3),
        M::ball(3, 2.0),
        M::exp_product(3),
        M::gaussian(vec![1.0, 0.0, -1.0], DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 1.0, 0.2, 0.0, 0.2, 3.0])),
    ]
}

fn catalog() -> Vec<M> {
    let mut out = bodies();
    out.extend([
        M::interval(-2.0, 5.0),
        M::ShiftedExponential,
        M::ComplexExponential { n: 2 },
        M::simplex(1),
        M::simplex(2),
        M::simplex(6),
        M::ball(1, 1.0),
        M::ball(10, 1.0),
        M::cube(12, 3.0),
        M::Product { factors: vec![M::simplex(2), M::ShiftedExponential, M::ball(2, 1.0)] },
    ]);
    out
}

#[test]
fn gaussian_lower_bound_on_catalog() {
    for m in catalog() {
        let l = closed(&m);
        assert!(l >= gaussian_l() * (1.0 - 1e-12), "{}: {l}", m.kind_name());
    }
}

#[test]
fn gradient_and_hessian_at_zero_are_moments() {
    let centered = M::Affine {
        base: Box::new(M::simplex(2)),
        matrix: vec![vec![2.0, 0.5], vec![0.0, 1.0]],
        shift: vec![0.3, -0.1],
    };
    for m in [M::cube(2, 1.0), M::simplex(3), M::ball(2, 1.0), M::exp_product(2), centered] {
        let v = LogLaplace::new(&m).unwrap().eval(&vec![0.0; m.dim()]).unwrap();
        let (mean, cov) = m.moments().unwrap();
        assert!(v.value.abs() < 1e-12);
        for i in 0..m.dim() {
            assert!((v.grad[i] - mean[i]).abs() < 1e-10, "{}", m.kind_name());
        }
        assert!((v.hess - cov).amax() < 1e-10, "{}", m.kind_name());
    }
}

#[test]
fn f_gradient_on_isotropic_products() {
    let s3 = 3f64.sqrt();
    for m in [
        M::exp_product(3),
        M::std_gaussian(2),
        M::Product { factors: vec![M::interval(-s3, s3), M::std_gaussian(1), M::ShiftedExponential] },
    ] {
        let chk = f_gradient_check(&m, 1e-3).unwrap();
        assert!(chk.holds(), "{}: {} > {}", m.kind_name(), chk.metric_norm, chk.bound);
        for (a, b) in chk.grad_fd.iter().zip(&chk.grad_exact) {
            assert!((a - b).abs() < 1e-5, "{a} {b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn isotropic_constant_is_affine_invariant(k in 0usize..5, a in prop::collection::vec(-2.0f64..2.0, 9), b in prop::collection::vec(-3.0f64..3.0, 3)) {
        let mat = DMatrix::from_row_slice(3, 3, &a) + DMatrix::identity(3, 3) * 2.5;
        prop_assume!(mat.determinant().abs() > 0.1);
        let m = &bodies()[k];
        let image = M::Affine { base: Box::new(m.clone()), matrix: to_rows(&mat), shift: b };
        prop_assert!((closed(&image) - closed(m)).abs() < 1e-6 * closed(m));
    }

    #[test]
    fn isotropic_constant_product_rule(i in 0usize..5, j in 0usize..5) {
        let (x, y) = (&bodies()[i], &bodies()[j]);
        let both = M::Product { factors: vec![x.clone(), y.clone()] };
        prop_assert!((closed(&both) - (closed(x) * closed(y)).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn log_laplace_is_convex_on_segments(k in 0usize..4, y0 in prop::collection::vec(-0.45f64..0.45, 3), y1 in prop::collection::vec(-0.45f64..0.45, 3)) {
        let m = [M::Affine { base: Box::new(M::cube(3, 1.0)), matrix: to_rows(&DMatrix::identity(3, 3)), shift: vec![-0.5; 3] },
                 M::simplex(2), M::exp_product(3), M::ball(3, 1.0)][k].clone();
        let n = m.dim();
        let ll = LogLaplace::new(&m).unwrap();
        let scale = if k == 2 { 1.0 } else { 6.0 };
        let at = |s: f64| -> f64 {
            let y: Vec<f64> = (0..n).map(|i| scale * (y0[i] + s * (y1[i] - y0[i]))).collect();
            ll.value(&y).unwrap()
        };
        let h = 0.05;
        for step in 1..20 {
            let s = step as f64 * h;
            prop_assert!(at(s - h) - 2.0 * at(s) + at(s + h) >= -1e-8);
        }
    }
}
