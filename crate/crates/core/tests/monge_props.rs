use lclab_core::monge::{brute_force_matching, duality_report, solve_primal, TransportInstance};
use proptest::prelude::*;

fn transformed(inst: &TransportInstance, angle: f64, shift: [f64; 2]) -> TransportInstance {
    let (c, s) = (angle.cos(), angle.sin());
    let map = |atoms: &Vec<(Vec<f64>, f64)>| {
        atoms.iter().map(|(x, w)| (vec![c * x[0] - s * x[1] + shift[0], s * x[0] + c * x[1] + shift[1]], *w)).collect()
    };
    TransportInstance::new(map(&inst.source), map(&inst.target))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn strong_duality(seed in any::<u64>(), ns in 1usize..9, nt in 1usize..9) {
        let inst = TransportInstance::random_uniform(ns, nt, 2, seed);
        let rep = duality_report(&inst, seed).unwrap();
        prop_assert!(rep.gap <= 1e-9, "{:?}", rep);
        prop_assert!(rep.lipschitz_excess <= 1e-9 && rep.cm_violation <= 1e-9);
    }

    #[test]
    fn primal_matches_matching_and_two_opt(seed in any::<u64>(), n in 2usize..8) {
        let inst = TransportInstance::random_uniform(n, n, 2, seed);
        let (_, cost) = solve_primal(&inst).unwrap();
        let (perm, best) = brute_force_matching(&inst).unwrap();
        prop_assert!((cost - best).abs() <= 1e-9);
        let c = inst.cost_matrix();
        let w = 1.0 / n as f64;
        for i in 0..n {
            for j in i + 1..n {
                let swapped = c[i][perm[j]] + c[j][perm[i]];
                prop_assert!(swapped >= c[i][perm[i]] + c[j][perm[j]] - 1e-12, "swap {} {} lowers cost", i, j);
            }
        }
        prop_assert!((perm.iter().enumerate().map(|(i, &j)| c[i][j]).sum::<f64>() * w - best).abs() <= 1e-12);
    }

    #[test]
    fn cost_invariant_under_rigid_motions(seed in any::<u64>(), n in 1usize..8, angle in 0.0f64..6.3, dx in -5.0f64..5.0, dy in -5.0f64..5.0) {
        let inst = TransportInstance::random_uniform(n, n + 1, 2, seed);
        let (_, a) = solve_primal(&inst).unwrap();
        let (_, b) = solve_primal(&transformed(&inst, angle, [dx, dy])).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a));
    }
}
