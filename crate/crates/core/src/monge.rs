//! Discrete transport with Monge cost |x − y|: primal solver, the chain
//! construction of the dual potential, cyclical monotonicity and planar
//! non-crossing.

use crate::error::{LcError, Result};
use crate::rng;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

pub type Atom = (Vec<f64>, f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportInstance {
    pub source: Vec<Atom>,
    pub target: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<Vec<Vec<f64>>>,
    /// Potential at the source atoms followed by the target atoms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_u: Option<Vec<f64>>,
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl TransportInstance {
    pub fn new(source: Vec<Atom>, target: Vec<Atom>) -> Self {
        TransportInstance { source, target, coupling: None, dual_u: None }
    }

    /// n source and n target atoms of mass 1/n, uniform in [0,1]^dim.
    pub fn random_uniform(n_src: usize, n_tgt: usize, dim: usize, seed: u64) -> Self {
        use rand::Rng;
        let mut r = rng::stream(seed, rng::label("monge-instance"));
        let mut pts = |k: usize| -> Vec<Atom> {
            (0..k).map(|_| ((0..dim).map(|_| r.random::<f64>()).collect(), 1.0 / k as f64)).collect()
        };
        let source = pts(n_src);
        let target = pts(n_tgt);
        TransportInstance::new(source, target)
    }

    pub fn cost_matrix(&self) -> Vec<Vec<f64>> {
        self.source.iter().map(|(x, _)| self.target.iter().map(|(y, _)| dist(x, y)).collect()).collect()
    }

    pub fn coupling_cost(&self, g: &[Vec<f64>]) -> f64 {
        let c = self.cost_matrix();
        g.iter().zip(&c).map(|(gr, cr)| gr.iter().zip(cr).map(|(a, b)| a * b).sum::<f64>()).sum()
    }

    fn check_mass(&self) -> Result<()> {
        let a: f64 = self.source.iter().map(|s| s.1).sum();
        let b: f64 = self.target.iter().map(|s| s.1).sum();
        if (a - b).abs() > 1e-10 * a.abs().max(b.abs()).max(1.0) {
            return Err(LcError::UnequalMass(a, b));
        }
        Ok(())
    }

    /// Row sums equal source weights and column sums target weights.
    pub fn marginals_ok(&self, g: &[Vec<f64>], tol: f64) -> bool {
        let rows = g.iter().zip(&self.source).all(|(r, s)| (r.iter().sum::<f64>() - s.1).abs() <= tol);
        let cols = (0..self.target.len()).all(|j| (g.iter().map(|r| r[j]).sum::<f64>() - self.target[j].1).abs() <= tol);
        rows && cols && g.iter().flatten().all(|v| *v >= -tol)
    }
}

/// Transportation simplex (MODI) from a north-west corner basis.
pub fn transport_simplex(a: &[f64], b: &[f64], cost: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (m, n) = (a.len(), b.len());
    let mut flow = vec![vec![0.0; n]; m];
    let mut basic = vec![vec![false; n]; m];
    let (mut ra, mut rb) = (a.to_vec(), b.to_vec());
    let (mut i, mut j) = (0, 0);
    loop {
        let q = ra[i].min(rb[j]).max(0.0);
        flow[i][j] = q;
        basic[i][j] = true;
        ra[i] -= q;
        rb[j] -= q;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if (ra[i] <= rb[j] && i < m - 1) || j == n - 1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    let scale = cost.iter().flatten().fold(0.0f64, |s, c| s.max(c.abs())).max(1e-300);
    for _ in 0..100_000 {
        // potentials over the basis tree: u_i + v_j = c_ij
        let mut u = vec![f64::NAN; m];
        let mut v = vec![f64::NAN; n];
        u[0] = 0.0;
        let mut queue = VecDeque::from([(true, 0usize)]);
        while let Some((is_row, k)) = queue.pop_front() {
            if is_row {
                for jj in 0..n {
                    if basic[k][jj] && v[jj].is_nan() {
                        v[jj] = cost[k][jj] - u[k];
                        queue.push_back((false, jj));
                    }
                }
            } else {
                for ii in 0..m {
                    if basic[ii][k] && u[ii].is_nan() {
                        u[ii] = cost[ii][k] - v[k];
                        queue.push_back((true, ii));
                    }
                }
            }
        }
        let mut best = (-1e-12 * scale, usize::MAX, usize::MAX);
        for ii in 0..m {
            for jj in 0..n {
                if !basic[ii][jj] {
                    let r = cost[ii][jj] - u[ii] - v[jj];
                    if r < best.0 {
                        best = (r, ii, jj);
                    }
                }
            }
        }
        if best.1 == usize::MAX {
            break;
        }
        let (ei, ej) = (best.1, best.2);
        // tree path from row ei to column ej; nodes are rows 0..m, columns m..m+n
        let mut parent = vec![usize::MAX; m + n];
        parent[ei] = ei;
        let mut queue = VecDeque::from([ei]);
        while let Some(node) = queue.pop_front() {
            if node == m + ej {
                break;
            }
            if node < m {
                for jj in 0..n {
                    if basic[node][jj] && parent[m + jj] == usize::MAX {
                        parent[m + jj] = node;
                        queue.push_back(m + jj);
                    }
                }
            } else {
                let jj = node - m;
                for ii in 0..m {
                    if basic[ii][jj] && parent[ii] == usize::MAX {
                        parent[ii] = node;
                        queue.push_back(ii);
                    }
                }
            }
        }
        let mut path = vec![m + ej];
        while *path.last().unwrap() != ei {
            path.push(parent[*path.last().unwrap()]);
        }
        path.reverse();
        let cells: Vec<(usize, usize)> = path
            .windows(2)
            .map(|w| if w[0] < m { (w[0], w[1] - m) } else { (w[1], w[0] - m) })
            .collect();
        let mut theta = f64::INFINITY;
        let mut leave = cells[0];
        for (k, &(ci, cj)) in cells.iter().enumerate() {
            if k % 2 == 0 && flow[ci][cj] < theta {
                theta = flow[ci][cj];
                leave = (ci, cj);
            }
        }
        for (k, &(ci, cj)) in cells.iter().enumerate() {
            if k % 2 == 0 {
                flow[ci][cj] -= theta;
            } else {
                flow[ci][cj] += theta;
            }
        }
        flow[ei][ej] += theta;
        basic[ei][ej] = true;
        basic[leave.0][leave.1] = false;
        flow[leave.0][leave.1] = 0.0;
    }
    flow
}

/// Optimal coupling and its cost.
pub fn solve_primal(inst: &TransportInstance) -> Result<(Vec<Vec<f64>>, f64)> {
    inst.check_mass()?;
    if inst.source.is_empty() || inst.target.is_empty() {
        return Err(LcError::InvalidArgument("empty measure".into()));
    }
    let a: Vec<f64> = inst.source.iter().map(|s| s.1).collect();
    let b: Vec<f64> = inst.target.iter().map(|s| s.1).collect();
    let g = transport_simplex(&a, &b, &inst.cost_matrix());
    let c = inst.coupling_cost(&g);
    Ok((g, c))
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Cheapest perfect matching between equal-size uniform atom sets, by
/// enumerating all permutations.
pub fn brute_force_matching(inst: &TransportInstance) -> Result<(Vec<usize>, f64)> {
    let n = inst.source.len();
    if n != inst.target.len() || n > 9 {
        return Err(LcError::InvalidArgument("brute force needs equal sizes ≤ 9".into()));
    }
    let c = inst.cost_matrix();
    let w = inst.source[0].1;
    let mut p: Vec<usize> = (0..n).collect();
    let mut best = (p.clone(), f64::INFINITY);
    loop {
        let s: f64 = (0..n).map(|i| c[i][p[i]]).sum::<f64>() * w;
        if s < best.1 {
            best = (p.clone(), s);
        }
        if !next_permutation(&mut p) {
            break;
        }
    }
    Ok(best)
}

/// Support pairs (i, j) of a coupling.
pub fn support_pairs(g: &[Vec<f64>], tol: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, r) in g.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            if *v > tol {
                out.push((i, j));
            }
        }
    }
    out
}

/// 1-Lipschitz potential increasing at unit speed along the coupling's
/// support: longest chains x → y (gain |y − x| on support pairs) and
/// y → x' (gain −|y − x'|), then u(z) = max_j (L(y_j) − |y_j − z|).
/// Returns values at sources then targets.
pub fn build_dual(inst: &TransportInstance, g: &[Vec<f64>]) -> Result<Vec<f64>> {
    let (m, n) = (inst.source.len(), inst.target.len());
    let c = inst.cost_matrix();
    let pairs = support_pairs(g, 1e-14);
    let scale = c.iter().flatten().fold(0.0f64, |s, v| s.max(*v)).max(1e-300);
    let eps = 1e-12 * scale;
    let mut lx = vec![f64::NEG_INFINITY; m];
    let mut ly = vec![f64::NEG_INFINITY; n];
    let root = pairs.first().map(|p| p.0).unwrap_or(0);
    lx[root] = 0.0;
    let rounds = m + n + 1;
    let mut changed = true;
    let mut round = 0;
    while changed {
        if round > rounds {
            return Err(LcError::NotCyclicallyMonotone);
        }
        changed = false;
        for &(i, j) in &pairs {
            if lx[i] > f64::NEG_INFINITY && lx[i] + c[i][j] > ly[j] + eps {
                ly[j] = lx[i] + c[i][j];
                changed = true;
            }
        }
        for j in 0..n {
            if ly[j] == f64::NEG_INFINITY {
                continue;
            }
            for i in 0..m {
                if ly[j] - c[i][j] > lx[i] + eps {
                    lx[i] = ly[j] - c[i][j];
                    changed = true;
                }
            }
        }
        round += 1;
    }
    let reached: Vec<usize> = (0..n).filter(|&j| ly[j] > f64::NEG_INFINITY).collect();
    let points = inst.source.iter().chain(&inst.target).map(|a| &a.0);
    Ok(points.map(|z| reached.iter().map(|&j| ly[j] - dist(&inst.target[j].0, z)).fold(f64::NEG_INFINITY, f64::max)).collect())
}

/// ∫u d(μ₂ − μ₁).
pub fn dual_value(inst: &TransportInstance, u: &[f64]) -> f64 {
    let m = inst.source.len();
    inst.target.iter().zip(&u[m..]).map(|(t, v)| t.1 * v).sum::<f64>()
        - inst.source.iter().zip(&u[..m]).map(|(s, v)| s.1 * v).sum::<f64>()
}

/// Largest violations of the dual certificate: (Lipschitz excess, support-pair
/// gap |u(y) − u(x) − |y − x||).
pub fn certify_dual(inst: &TransportInstance, g: &[Vec<f64>], u: &[f64]) -> (f64, f64) {
    let pts: Vec<&Vec<f64>> = inst.source.iter().chain(&inst.target).map(|a| &a.0).collect();
    let mut lip = f64::NEG_INFINITY;
    for a in 0..pts.len() {
        for b in 0..pts.len() {
            lip = lip.max((u[a] - u[b]).abs() - dist(pts[a], pts[b]));
        }
    }
    let m = inst.source.len();
    let gap = support_pairs(g, 1e-14)
        .iter()
        .map(|&(i, j)| (u[m + j] - u[i] - dist(&inst.source[i].0, &inst.target[j].0)).abs())
        .fold(0.0, f64::max);
    (lip, gap)
}

/// min over tested subsets and permutations of (permuted − identity) cost.
/// Subsets of size ≤ 7 are enumerated exhaustively when the support is
/// that small, otherwise `n_subsets` random 7-subsets are drawn.
pub fn cyclical_monotonicity_check(pairs: &[(Vec<f64>, Vec<f64>)], n_subsets: usize, seed: u64) -> f64 {
    let check = |idx: &[usize]| -> f64 {
        let base: f64 = idx.iter().map(|&k| dist(&pairs[k].0, &pairs[k].1)).sum();
        let mut p: Vec<usize> = (0..idx.len()).collect();
        let mut worst = 0.0f64;
        while next_permutation(&mut p) {
            let s: f64 = (0..idx.len()).map(|a| dist(&pairs[idx[a]].0, &pairs[idx[p[a]]].1)).sum();
            worst = worst.min(s - base);
        }
        worst
    };
    if pairs.len() <= 7 {
        return check(&(0..pairs.len()).collect::<Vec<_>>());
    }
    let mut r = rng::stream(seed, rng::label("cyclical"));
    let mut all: Vec<usize> = (0..pairs.len()).collect();
    (0..n_subsets)
        .map(|_| {
            all.shuffle(&mut r);
            check(&all[..7])
        })
        .fold(0.0, f64::min)
}

fn orient(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Number of pairs of open planar segments that cross at a single interior
/// point; collinear overlaps and shared endpoints are not crossings.
pub fn noncrossing_check(segments: &[(Vec<f64>, Vec<f64>)]) -> usize {
    let mut count = 0;
    for a in 0..segments.len() {
        for b in a + 1..segments.len() {
            let (p, q) = (&segments[a].0, &segments[a].1);
            let (r, s) = (&segments[b].0, &segments[b].1);
            let (o1, o2) = (orient(p, q, r), orient(p, q, s));
            let (o3, o4) = (orient(r, s, p), orient(r, s, q));
            if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
                count += 1;
            }
        }
    }
    count
}

/// Segments of a permutation coupling.
pub fn matching_segments(inst: &TransportInstance, g: &[Vec<f64>]) -> Vec<(Vec<f64>, Vec<f64>)> {
    support_pairs(g, 1e-14).into_iter().map(|(i, j)| (inst.source[i].0.clone(), inst.target[j].0.clone())).collect()
}

/// Result of a full duality check on one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub cost: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub lipschitz_excess: f64,
    pub support_gap: f64,
    pub cm_violation: f64,
}

pub fn duality_report(inst: &TransportInstance, seed: u64) -> Result<DualityReport> {
    let (g, cost) = solve_primal(inst)?;
    let u = build_dual(inst, &g)?;
    let dv = dual_value(inst, &u);
    let (lip, sg) = certify_dual(inst, &g, &u);
    let pairs = matching_segments(inst, &g);
    Ok(DualityReport {
        cost,
        dual_value: dv,
        gap: (cost - dv).abs(),
        lipschitz_excess: lip,
        support_gap: sg,
        cm_violation: cyclical_monotonicity_check(&pairs, 50, seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn inst(src: &[[f64; 2]], tgt: &[[f64; 2]]) -> TransportInstance {
        let w = |k: usize| 1.0 / k as f64;
        TransportInstance::new(
            src.iter().map(|p| (p.to_vec(), w(src.len()))).collect(),
            tgt.iter().map(|p| (p.to_vec(), w(tgt.len()))).collect(),
        )
    }

    #[test]
    fn single_atoms() {
        let t = inst(&[[0.0, 0.0]], &[[1.0, 0.0]]);
        let (g, c) = solve_primal(&t).unwrap();
        assert_relative_eq!(c, 1.0);
        let u = build_dual(&t, &g).unwrap();
        assert_relative_eq!(u[1] - u[0], 1.0);
    }

    #[test]
    fn vertical_beats_crossing() {
        let t = inst(&[[0.0, 0.0], [1.0, 0.0]], &[[0.0, 1.0], [1.0, 1.0]]);
        let (g, c) = solve_primal(&t).unwrap();
        assert_relative_eq!(c, 1.0, epsilon = 1e-12);
        assert_relative_eq!(brute_force_matching(&t).unwrap().1, 1.0, epsilon = 1e-12);
        assert_eq!(noncrossing_check(&matching_segments(&t, &g)), 0);
        let crossed = vec![(vec![0.0, 0.0], vec![1.0, 1.0]), (vec![1.0, 0.0], vec![0.0, 1.0])];
        assert!(cyclical_monotonicity_check(&crossed, 0, 0) < -0.5);
        assert_eq!(noncrossing_check(&crossed), 1);
    }

    #[test]
    fn identical_measures() {
        let pts = [[0.0, 0.0], [0.3, 0.9], [2.0, 1.0]];
        let t = inst(&pts, &pts);
        let (g, c) = solve_primal(&t).unwrap();
        assert!(c.abs() < 1e-14);
        for i in 0..3 {
            assert_relative_eq!(g[i][i], 1.0 / 3.0);
        }
    }

    #[test]
    fn unequal_mass_rejected() {
        let mut t = inst(&[[0.0, 0.0]], &[[1.0, 0.0]]);
        t.target[0].1 = 2.0;
        assert!(matches!(solve_primal(&t), Err(LcError::UnequalMass(..))));
    }

    #[test]
    fn random_five_by_five_duality() {
        for seed in 0..20 {
            let t = TransportInstance::random_uniform(5, 5, 2, seed);
            let r = duality_report(&t, seed).unwrap();
            let (_, brute) = brute_force_matching(&t).unwrap();
            assert!((r.cost - brute).abs() < 1e-9);
            assert!(r.gap < 1e-9);
            assert!(r.lipschitz_excess < 1e-12);
            assert!(r.support_gap < 1e-12);
            assert!(r.cm_violation >= -1e-10);
        }
    }

    #[test]
    fn non_optimal_coupling_detected() {
        let t = inst(&[[0.0, 0.0], [1.0, 0.0]], &[[0.0, 1.0], [1.0, 1.0]]);
        let crossed = vec![vec![0.0, 0.5], vec![0.5, 0.0]];
        assert_eq!(build_dual(&t, &crossed).unwrap_err(), LcError::NotCyclicallyMonotone);
    }

    #[test]
    fn unbalanced_atom_counts() {
        let t = TransportInstance::random_uniform(3, 5, 2, 9);
        let (g, c) = solve_primal(&t).unwrap();
        assert!(t.marginals_ok(&g, 1e-12));
        let u = build_dual(&t, &g).unwrap();
        assert!((dual_value(&t, &u) - c).abs() < 1e-12);
    }
}
