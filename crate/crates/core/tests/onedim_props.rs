use lclab_core::measures::LogConcaveMeasure as M;
use lclab_core::onedim::{concavity_defect, default_p_grid, isoperimetric_profile, moment_norm, Law1D};
use lclab_core::special::{norm_cdf, norm_quantile};
use proptest::prelude::*;

fn isotropic_laws() -> Vec<(&'static str, Law1D)> {
    [("uniform", M::interval(0.0, 1.0)), ("exponential", M::ShiftedExponential), ("gaussian", M::std_gaussian(1))]
        .into_iter()
        .map(|(name, m)| (name, Law1D::from_measure(&m).unwrap().isotropic()))
        .collect()
}

const P_GRID: [f64; 7] = [-0.9, -0.5, 0.0, 1.0, 2.0, 4.0, 8.0];

#[test]
fn reverse_holder_monotone_and_windowed() {
    for (name, law) in isotropic_laws() {
        let norms: Vec<f64> = P_GRID.iter().map(|&p| moment_norm(&law, p).unwrap()).collect();
        for w in norms.windows(2) {
            assert!(w[1] >= w[0] * (1.0 - 1e-10), "{name}: {norms:?}");
        }
        for (&p, &v) in P_GRID.iter().zip(&norms) {
            assert!(v >= 0.05 * (p + 1.0).min(1.0) && v <= 20.0 * (p.abs() + 1.0), "{name} p={p}: {v}");
        }
        // the p = 2 norm of an isotropic law is 1
        assert!((norms[4] - 1.0).abs() < 1e-9, "{name}");
    }
}

#[test]
fn profile_is_concave() {
    let grid = default_p_grid(200);
    for (name, law) in isotropic_laws() {
        let prof = isoperimetric_profile(&law, &grid, None).unwrap();
        assert!(prof.concavity_defect <= 1e-6, "{name}: {}", prof.concavity_defect);
    }
}

#[test]
fn gaussian_shift_of_probability_is_concave() {
    let grid = default_p_grid(400);
    for eps in [0.1, 1.0] {
        let f: Vec<f64> = grid.iter().map(|&p| norm_cdf(norm_quantile(p) + eps)).collect();
        assert!(concavity_defect(&grid, &f) <= 1e-12, "eps {eps}");
    }
}

#[test]
fn neighbourhood_gain_is_proportional_to_smaller_side() {
    let grid = default_p_grid(100);
    for (name, law) in isotropic_laws() {
        for eps in [0.1, 1.0] {
            let prof = isoperimetric_profile(&law, &grid, Some(eps)).unwrap();
            let gains = &prof.i_eps.unwrap().1;
            // half-line oracle: the least gain ratio over the grid
            let c_hat = grid
                .iter()
                .zip(gains)
                .map(|(p, g)| g / (eps * p.min(1.0 - p)))
                .fold(f64::INFINITY, f64::min);
            assert!(c_hat >= 0.2, "{name} eps {eps}: {c_hat}");
        }
    }
}

proptest! {
    #[test]
    fn quantile_and_cdf_are_inverse(k in 0usize..3, p in 0.001f64..0.999) {
        let (_, law) = &isotropic_laws()[k];
        let x = law.quantile(p);
        prop_assert!((law.cdf(x) - p).abs() < 1e-9);
    }

    #[test]
    fn moment_norm_monotone_in_p(k in 0usize..3, p in -0.8f64..6.0, dp in 0.01f64..2.0) {
        let (_, law) = &isotropic_laws()[k];
        prop_assert!(moment_norm(law, p + dp).unwrap() >= moment_norm(law, p).unwrap() * (1.0 - 1e-10));
    }
}
