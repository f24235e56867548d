use lclab_core::linalg::{lambda_min, op_norm};
use lclab_core::measures::{LogConcaveMeasure as M, Potential};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn bases() -> Vec<M> {
    vec![
        M::interval(0.0, 2.0),
        M::ShiftedExponential,
        M::exp_product(2),
        M::cube(2, 1.0),
        M::gaussian(vec![0.5, -1.0], DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0])),
        M::Product { factors: vec![M::interval(-1.0, 1.0), M::ShiftedExponential] },
    ]
}

/// A point inside the support of `bases()[k]`, from p ∈ (0, 1)².
fn probe(k: usize, p: &[f64]) -> Vec<f64> {
    match k {
        0 => vec![2.0 * p[0]],
        1 => vec![4.0 * p[0] - 1.0],
        2 => vec![4.0 * p[0] - 1.0, 4.0 * p[1] - 1.0],
        3 => vec![p[0], p[1]],
        4 => vec![4.0 * p[0] - 2.0, 4.0 * p[1] - 2.0],
        _ => vec![2.0 * p[0] - 1.0, 4.0 * p[1] - 1.0],
    }
}

fn catalog() -> Vec<M> {
    vec![
        M::interval(0.0, std::f64::consts::PI),
        M::ShiftedExponential,
        M::std_gaussian(3),
        M::gaussian(vec![0.0, 0.0], DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 1.0])),
        M::cube(3, 2.0),
        M::ball(1, 1.5),
        M::exp_product(4),
        M::Product { factors: vec![M::interval(0.0, 3.0), M::std_gaussian(2)] },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn tilts_compose(k in 0usize..6, a in prop::collection::vec(-0.4f64..0.4, 2), b in prop::collection::vec(-0.4f64..0.4, 2),
                     t1 in 0.0f64..2.0, t2 in 0.0f64..2.0, p in prop::collection::vec(0.02f64..0.98, 2)) {
        let m = &bases()[k];
        let n = m.dim();
        let (a, b) = (&a[..n], &b[..n]);
        let once: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        let m1 = m.tilt(a, t1).unwrap();
        let z1 = m.log_laplace_tilt(a, t1).unwrap();
        let z2 = m1.log_laplace_tilt(b, t2).unwrap();
        let z = m.log_laplace_tilt(&once, t1 + t2).unwrap();
        prop_assert!((z1 + z2 - z).abs() <= 1e-10 * (1.0 + z.abs()), "{} vs {}", z1 + z2, z);

        let x = probe(k, &p);
        let sq: f64 = x.iter().map(|v| v * v).sum();
        let lin = |th: &[f64]| x.iter().zip(th).map(|(u, v)| u * v).sum::<f64>();
        let base = Potential::normalized(m).unwrap().eval(&x);
        let two_step = base + z1 - lin(a) + 0.5 * t1 * sq + z2 - lin(b) + 0.5 * t2 * sq;
        let direct = Potential::normalized(&m.tilt(&once, t1 + t2).unwrap()).unwrap().eval(&x);
        prop_assert!((two_step - direct).abs() <= 1e-10 * (1.0 + direct.abs()), "{} vs {}", two_step, direct);
    }

    #[test]
    fn gaussian_tilt_is_strongly_convex(k in 0usize..6, th in prop::collection::vec(-0.5f64..0.5, 2), t in 0.05f64..3.0,
                                        p in prop::collection::vec(0.02f64..0.98, 2)) {
        let m = &bases()[k];
        let n = m.dim();
        let tilted = m.tilt(&th[..n], t).unwrap();
        let pot = Potential::new(&tilted);
        prop_assert!(pot.regularity().strongly_convex.unwrap() >= t - 1e-12);
        let h = pot.hessian(&probe(k, &p)).unwrap();
        prop_assert!(lambda_min(&h) >= t - 1e-9);
    }
}

#[test]
fn covariance_below_poincare_constant() {
    let mut checked = 0;
    for m in catalog() {
        let e = m.exact_moments().unwrap();
        if let Some(cp) = e.cp {
            let cov = lclab_core::linalg::from_rows(&e.cov);
            assert!(op_norm(&cov) <= cp * (1.0 + 1e-12), "{}", m.kind_name());
            checked += 1;
        }
    }
    assert!(checked >= 7);
}
