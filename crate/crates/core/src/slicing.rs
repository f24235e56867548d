//! Isotropic constants, differential entropy, the log-Laplace transform and
//! its Hessian metric, and central hyperplane sections.

use crate::cubature::{canon_rule, Cubature};
use crate::error::{LcError, Result};
use crate::linalg::{dot, from_rows, op_norm, sym_eigen};
use crate::mc::{self, Method};
use crate::measures::{block_moments, block_tilt, Block, Canon1D, ConvexBody, LogConcaveMeasure as M, Prim1};
use crate::quad::{gauss_legendre, Rule1D};
use crate::special::ln_unit_ball_volume;
use crate::stats::{self, Estimate};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{digamma, ln_gamma};
use std::f64::consts::{E, LN_2, PI};

/// Neighbour rank of the entropy estimator.
pub const KNN_K: usize = 5;
/// Smallest batch accepted by the entropy estimator.
pub const MIN_ENTROPY_SAMPLES: usize = 10_000;
/// Slab widths of the section estimator, extrapolated linearly to zero.
pub const SLAB_WIDTHS: [f64; 2] = [0.02, 0.01];

/// 1/√(2πe), the isotropic constant of every Gaussian.
pub fn gaussian_l() -> f64 {
    (2.0 * PI * E).sqrt().recip()
}

/// (n!)^{1/n} / ((n+1)^{(n+1)/(2n)} √(n+2)), the isotropic constant of the regular simplex.
pub fn simplex_l(n: usize) -> f64 {
    let n = n as f64;
    (ln_gamma(n + 1.0) / n - (n + 1.0) / (2.0 * n) * (n + 1.0).ln() - 0.5 * (n + 2.0).ln()).exp()
}

/// (det Cov / e^{2 Ent})^{1/2n} from ln det Cov.
pub fn l_from_entropy(entropy: f64, ln_det: f64, dim: usize) -> f64 {
    ((ln_det - 2.0 * entropy) / (2.0 * dim as f64)).exp()
}

// ------------------------------------------------------- isotropic constant

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LMethod {
    ClosedForm,
    McEntropy { n_samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotropicConstantReport {
    pub body: String,
    pub dim: usize,
    /// Differential entropy in nats.
    pub entropy: f64,
    pub cov_det: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub method: LMethod,
}

pub fn isotropic_constant(m: &M, method: LMethod) -> Result<IsotropicConstantReport> {
    let n = m.dim();
    let (entropy, cov) = match method {
        LMethod::ClosedForm => {
            let e = m.exact_moments()?;
            (e.entropy.ok_or(LcError::NoExactOracle)?, from_rows(&e.cov))
        }
        LMethod::McEntropy { n_samples, seed } => {
            if n_samples < MIN_ENTROPY_SAMPLES {
                return Err(LcError::EntropyUnreliable);
            }
            if n > 8 {
                return Err(LcError::Unsupported("entropy estimation above dimension 8".into()));
            }
            let batch = mc::sample(m, n_samples, seed, Method::Direct)?;
            let h = knn_entropy(&batch.data, n, m.is_bounded());
            (h, from_rows(&mc::covariance_summary(&batch).cov))
        }
    };
    let (vals, _) = sym_eigen(&cov);
    if vals[0] <= 0.0 {
        return Err(LcError::NotPsd);
    }
    let ln_det: f64 = vals.iter().map(|v| v.ln()).sum();
    Ok(IsotropicConstantReport {
        body: m.kind_name().to_string(),
        dim: n,
        entropy,
        cov_det: ln_det.exp(),
        l: l_from_entropy(entropy, ln_det, n),
        method,
    })
}

// ------------------------------------------------------------ k-NN entropy

const LEAF: usize = 8;

/// Median-split k-d tree over row-major points, stored as a permutation.
struct KdTree<'a> {
    pts: &'a [f64],
    dim: usize,
    idx: Vec<usize>,
}

impl<'a> KdTree<'a> {
    fn new(pts: &'a [f64], dim: usize) -> Self {
        let mut idx: Vec<usize> = (0..pts.len() / dim).collect();
        build(&mut idx, pts, dim, 0);
        KdTree { pts, dim, idx }
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.pts[i * self.dim..(i + 1) * self.dim]
    }

    /// Squared distance from point `q` to its k-th nearest other point.
    fn kth_sq(&self, q: usize, k: usize) -> f64 {
        let mut best: Vec<f64> = Vec::with_capacity(k + 1);
        self.search(0, self.idx.len(), 0, q, k, &mut best);
        best[k - 1]
    }

    fn consider(&self, i: usize, q: usize, k: usize, best: &mut Vec<f64>) {
        if i == q {
            return;
        }
        let d2: f64 = self.point(i).iter().zip(self.point(q)).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.len() == k {
            if d2 >= best[k - 1] {
                return;
            }
            best.pop();
        }
        let at = best.partition_point(|&v| v < d2);
        best.insert(at, d2);
    }

    fn search(&self, lo: usize, hi: usize, depth: usize, q: usize, k: usize, best: &mut Vec<f64>) {
        if hi - lo <= LEAF {
            for &i in &self.idx[lo..hi] {
                self.consider(i, q, k, best);
            }
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let ax = depth % self.dim;
        let p = self.idx[mid];
        self.consider(p, q, k, best);
        let diff = self.point(q)[ax] - self.point(p)[ax];
        let (near, far) = if diff < 0.0 { ((lo, mid), (mid + 1, hi)) } else { ((mid + 1, hi), (lo, mid)) };
        self.search(near.0, near.1, depth + 1, q, k, best);
        if best.len() < k || diff * diff < best[k - 1] {
            self.search(far.0, far.1, depth + 1, q, k, best);
        }
    }
}

fn build(idx: &mut [usize], pts: &[f64], dim: usize, depth: usize) {
    if idx.len() <= LEAF {
        return;
    }
    let ax = depth % dim;
    let mid = idx.len() / 2;
    idx.select_nth_unstable_by(mid, |&a, &b| pts[a * dim + ax].total_cmp(&pts[b * dim + ax]));
    let (l, r) = idx.split_at_mut(mid);
    build(l, pts, dim, depth + 1);
    build(&mut r[1..], pts, dim, depth + 1);
}

/// Distance from every point to its k-th nearest neighbour.
pub fn kth_neighbor_distances(pts: &[f64], dim: usize, k: usize) -> Vec<f64> {
    let tree = KdTree::new(pts, dim);
    (0..pts.len() / dim).into_par_iter().map(|q| tree.kth_sq(q, k).sqrt()).collect()
}

/// Kozachenko–Leonenko estimate ψ(N) − ψ(k) + ln V_d + (d/N) Σ ln ε_i.
pub fn kozachenko_leonenko(pts: &[f64], dim: usize, k: usize) -> f64 {
    let eps = kth_neighbor_distances(pts, dim, k);
    let n = eps.len() as f64;
    let mean_ln = eps.iter().map(|e| e.ln()).sum::<f64>() / n;
    digamma(n) - digamma(k as f64) + ln_unit_ball_volume(dim) + dim as f64 * mean_ln
}

/// Entropy estimate with k = 5. On bounded supports the boundary bias
/// decays like N^{−1/d}; it is removed by extrapolating the full batch
/// against its two halves.
pub fn knn_entropy(pts: &[f64], dim: usize, bounded: bool) -> f64 {
    let full = kozachenko_leonenko(pts, dim, KNN_K);
    if !bounded {
        return full;
    }
    let n = pts.len() / dim;
    let cut = (n / 2) * dim;
    let half = 0.5 * (kozachenko_leonenko(&pts[..cut], dim, KNN_K) + kozachenko_leonenko(&pts[cut..2 * cut], dim, KNN_K));
    let c = 0.5f64.powf(1.0 / dim as f64);
    (full - c * half) / (1.0 - c)
}

// ---------------------------------------------------------- entropy sandwich

/// The three inequalities ψ(EX) ≤ Ent ≤ inf ψ + n and
/// ln E e^{ψ/2} ≤ inf ψ/2 + n ln 2, for ψ = −log density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropySandwich {
    pub dim: usize,
    pub psi_at_mean: f64,
    pub entropy: f64,
    pub inf_psi: f64,
    pub log_exp_half_psi: f64,
    pub lower_slack: f64,
    pub upper_slack: f64,
    pub exp_slack: f64,
}

impl EntropySandwich {
    pub fn holds(&self, tol: f64) -> bool {
        self.lower_slack >= -tol && self.upper_slack >= -tol && self.exp_slack >= -tol
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Parts {
    psi_mean: f64,
    entropy: f64,
    inf_psi: f64,
    log_eh: f64,
}

impl Parts {
    fn add(self, o: Parts) -> Parts {
        Parts {
            psi_mean: self.psi_mean + o.psi_mean,
            entropy: self.entropy + o.entropy,
            inf_psi: self.inf_psi + o.inf_psi,
            log_eh: self.log_eh + o.log_eh,
        }
    }

    fn constant(c: f64) -> Parts {
        Parts { psi_mean: c, entropy: c, inf_psi: c, log_eh: 0.5 * c }
    }
}

/// Gaussian with covariance determinant `det`: ψ = inf ψ + Q/2 with Q ~ χ²_n.
fn gaussian_parts(n: usize, ln_det: f64) -> Parts {
    let inf = 0.5 * (n as f64 * (2.0 * PI).ln() + ln_det);
    Parts { psi_mean: inf, entropy: inf + 0.5 * n as f64, inf_psi: inf, log_eh: 0.5 * inf + 0.5 * n as f64 * LN_2 }
}

fn canon_parts(c: &Canon1D) -> Parts {
    if c.is_gaussian() {
        let (_, v, _) = c.moments();
        return gaussian_parts(1, v.ln());
    }
    let psi = |x: f64| -c.log_density(x);
    let (x, w) = canon_rule(c, 40);
    let entropy: f64 = x.iter().zip(&w).map(|(x, w)| w * psi(*x)).sum();
    let half: Vec<f64> = x.iter().zip(&w).map(|(x, w)| w.ln() + 0.5 * psi(*x)).collect();
    let mx = half.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let log_eh = mx + half.iter().map(|v| (v - mx).exp()).sum::<f64>().ln();
    let (mean, var, _) = c.moments();
    let (lo, hi) = c.support();
    let sd = var.sqrt();
    let (mut a, mut b) = (lo.max(mean - 40.0 * sd), hi.min(mean + 40.0 * sd));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if psi(x1) <= psi(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let inf_psi = psi(0.5 * (a + b));
    Parts { psi_mean: psi(mean), entropy, inf_psi, log_eh }
}

fn sandwich_parts(m: &M) -> Result<Parts> {
    match m {
        M::UniformBody { body } => return Ok(Parts::constant(body.ln_volume().ok_or(LcError::NoExactOracle)?)),
        M::Affine { base, matrix, .. } => {
            let ln_det = from_rows(matrix).determinant().abs().ln();
            let p = sandwich_parts(base)?;
            return Ok(p.add(Parts::constant(ln_det)));
        }
        _ => {}
    }
    let mut total = Parts::default();
    for b in m.blocks()? {
        let p = match &b {
            Block::One(c) => canon_parts(c),
            Block::Gauss { cov, .. } => gaussian_parts(cov.nrows(), cov.clone().determinant().ln()),
            Block::Pair { theta, t } if theta == &[0.0, 0.0] && *t == 0.0 => {
                let inf = (2.0 * PI).ln();
                Parts { psi_mean: inf, entropy: inf + 2.0, inf_psi: inf, log_eh: 0.5 * inf + 4f64.ln() }
            }
            Block::Other(o) if !matches!(o, M::Product { .. } | M::GaussianTilt { .. }) => sandwich_parts(o)?,
            _ => return Err(LcError::Unsupported("entropy sandwich for this block".into())),
        };
        total = total.add(p);
    }
    Ok(total)
}

pub fn entropy_sandwich_check(m: &M) -> Result<EntropySandwich> {
    let p = sandwich_parts(m)?;
    let n = m.dim() as f64;
    Ok(EntropySandwich {
        dim: m.dim(),
        psi_at_mean: p.psi_mean,
        entropy: p.entropy,
        inf_psi: p.inf_psi,
        log_exp_half_psi: p.log_eh,
        lower_slack: p.entropy - p.psi_mean,
        upper_slack: p.inf_psi + n - p.entropy,
        exp_slack: 0.5 * p.inf_psi + n * LN_2 - p.log_eh,
    })
}

// -------------------------------------------------------------- log-Laplace

/// Λ(y), ∇Λ(y) = E X_y and ∇²Λ(y) = Cov X_y.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceValue {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: DMatrix<f64>,
}

#[derive(Debug, Clone)]
enum Route {
    Blocks(Vec<Block>),
    Rule(Cubature),
    Affine { inner: Box<LogLaplace>, a: DMatrix<f64>, b: DVector<f64> },
}

/// Log-Laplace transform Λ(y) = log E e^{X·y} of a measure.
///
/// Products of one-dimensional and Gaussian blocks use closed-form tilts;
/// balls and simplices up to dimension 3 use a fixed quadrature.
#[derive(Debug, Clone)]
pub struct LogLaplace {
    pub dim: usize,
    route: Route,
}

const BODY_ORDER: usize = 20;

impl LogLaplace {
    pub fn new(m: &M) -> Result<Self> {
        let dim = m.dim();
        if let M::Affine { base, matrix, shift } = m {
            let inner = LogLaplace::new(base)?;
            return Ok(LogLaplace {
                dim,
                route: Route::Affine { inner: Box::new(inner), a: from_rows(matrix), b: DVector::from_vec(shift.clone()) },
            });
        }
        if let M::UniformBody { body } = m {
            if !matches!(body, ConvexBody::Cube { .. }) {
                if dim > 3 {
                    return Err(LcError::Unsupported("log-Laplace quadrature above dimension 3".into()));
                }
                return Ok(LogLaplace { dim, route: Route::Rule(Cubature::for_body(body, BODY_ORDER)?) });
            }
        }
        let blocks = m.blocks()?;
        if blocks.iter().any(|b| matches!(b, Block::Other(_))) {
            return Err(LcError::Unsupported("log-Laplace transform of this measure".into()));
        }
        Ok(LogLaplace { dim, route: Route::Blocks(blocks) })
    }

    pub fn value(&self, y: &[f64]) -> Result<f64> {
        match &self.route {
            Route::Blocks(bs) => {
                let mut off = 0;
                let mut total = 0.0;
                for b in bs {
                    let d = b.dim();
                    total += tilt_block(b, &y[off..off + d])?.1;
                    off += d;
                }
                Ok(total)
            }
            Route::Rule(c) => Ok(rule_log_weights(c, y).0),
            Route::Affine { inner, a, b } => {
                let pulled = a.transpose() * DVector::from_column_slice(y);
                Ok(b.dot(&DVector::from_column_slice(y)) + inner.value(pulled.as_slice())?)
            }
        }
    }

    pub fn eval(&self, y: &[f64]) -> Result<LaplaceValue> {
        match &self.route {
            Route::Blocks(bs) => {
                let mut off = 0;
                let mut value = 0.0;
                let mut grad = Vec::with_capacity(self.dim);
                let mut hess = DMatrix::zeros(self.dim, self.dim);
                for b in bs {
                    let d = b.dim();
                    let (tb, rel) = tilt_block(b, &y[off..off + d])?;
                    let (mean, cov) = block_moments(&tb)?;
                    value += rel;
                    grad.extend(mean);
                    hess.view_mut((off, off), (d, d)).copy_from(&cov);
                    off += d;
                }
                Ok(LaplaceValue { value, grad, hess })
            }
            Route::Rule(c) => {
                let (value, lw) = rule_log_weights(c, y);
                let n = c.dim;
                let mut mean = vec![0.0; n];
                for (i, l) in lw.iter().enumerate() {
                    let p = (l - value).exp();
                    mean.iter_mut().zip(c.point(i)).for_each(|(m, x)| *m += p * x);
                }
                let mut hess = DMatrix::zeros(n, n);
                for (i, l) in lw.iter().enumerate() {
                    let p = (l - value).exp();
                    let x = c.point(i);
                    for r in 0..n {
                        for s in 0..n {
                            hess[(r, s)] += p * (x[r] - mean[r]) * (x[s] - mean[s]);
                        }
                    }
                }
                Ok(LaplaceValue { value, grad: mean, hess })
            }
            Route::Affine { inner, a, b } => {
                let yv = DVector::from_column_slice(y);
                let pulled = a.transpose() * &yv;
                let v = inner.eval(pulled.as_slice())?;
                let grad = b + a * DVector::from_vec(v.grad);
                Ok(LaplaceValue { value: b.dot(&yv) + v.value, grad: grad.iter().copied().collect(), hess: a * v.hess * a.transpose() })
            }
        }
    }

    /// Second derivative of τ ↦ Λ(τu) at τ = s, i.e. ∇²Λ(su)u·u.
    pub fn directional_second(&self, u: &[f64], s: f64) -> Result<f64> {
        match &self.route {
            Route::Rule(c) => {
                let y: Vec<f64> = u.iter().map(|v| s * v).collect();
                let (value, lw) = rule_log_weights(c, &y);
                let (mut m1, mut m2) = (0.0, 0.0);
                for (i, l) in lw.iter().enumerate() {
                    let p = (l - value).exp();
                    let x = dot(c.point(i), u);
                    m1 += p * x;
                    m2 += p * x * x;
                }
                Ok(m2 - m1 * m1)
            }
            Route::Affine { inner, a, .. } => {
                let pulled = a.transpose() * DVector::from_column_slice(u);
                inner.directional_second(pulled.as_slice(), s)
            }
            Route::Blocks(_) => {
                let y: Vec<f64> = u.iter().map(|v| s * v).collect();
                let h = self.eval(&y)?.hess;
                let uv = DVector::from_column_slice(u);
                Ok(uv.dot(&(&h * &uv)))
            }
        }
    }

    pub fn in_domain(&self, y: &[f64]) -> bool {
        self.value(y).is_ok()
    }
}

fn tilt_block(b: &Block, y: &[f64]) -> Result<(Block, f64)> {
    block_tilt(b, y, 0.0).map_err(|e| match e {
        LcError::TiltNotIntegrable | LcError::QuadratureFailure { .. } => LcError::LaplaceDiverges,
        other => other,
    })
}

fn rule_log_weights(c: &Cubature, y: &[f64]) -> (f64, Vec<f64>) {
    let lw: Vec<f64> = (0..c.len()).map(|i| c.weights[i].ln() + dot(c.point(i), y)).collect();
    let mx = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (mx + lw.iter().map(|v| (v - mx).exp()).sum::<f64>().ln(), lw)
}

/// Shorthand for `LogLaplace::new(m)?.eval(y)`.
pub fn log_laplace(m: &M, y: &[f64]) -> Result<LaplaceValue> {
    LogLaplace::new(m)?.eval(y)
}

/// Smallest s > 0 with f(s) ≥ level for increasing f, treating a divergent
/// transform as above the level.
fn radial_root(f: impl Fn(f64) -> Result<f64>, level: f64) -> Result<f64> {
    let above = |s: f64| -> Result<bool> {
        match f(s) {
            Ok(v) => Ok(v >= level),
            Err(LcError::LaplaceDiverges) => Ok(true),
            Err(e) => Err(e),
        }
    };
    let mut hi = 1.0;
    let mut k = 0;
    while !above(hi)? {
        hi *= 2.0;
        k += 1;
        if k > 200 {
            return Err(LcError::Unsupported("unbounded sublevel set".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if above(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn require_centered(m: &M) -> Result<()> {
    let (mean, _) = m.moments()?;
    if mean.iter().any(|v| v.abs() > 1e-9) {
        return Err(LcError::InvalidArgument("a centered measure is required".into()));
    }
    Ok(())
}

/// Riemannian length of the segment [0, y] in the metric ∇²Λ.
pub fn segment_length(ll: &LogLaplace, y: &[f64]) -> Result<f64> {
    let rule = Rule1D::composite(0.0, 1.0, 8, 10);
    let mut total = 0.0;
    for (t, w) in rule.x.iter().zip(&rule.w) {
        total += w * ll.directional_second(y, *t)?.max(0.0).sqrt();
    }
    Ok(total)
}

// ----------------------------------------------------- Hessian-metric balls

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianBallRow {
    pub direction: Vec<f64>,
    /// Boundary point y of ½{Λ ≤ r} in this direction.
    pub boundary: Vec<f64>,
    /// g-length of the segment [0, y].
    pub length: f64,
    /// √(ln 2 · Λ(2y)).
    pub refined_bound: f64,
    pub contained: bool,
    pub refined_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianBallReport {
    pub r: f64,
    pub rows: Vec<HessianBallRow>,
}

impl HessianBallReport {
    pub fn all_contained(&self) -> bool {
        self.rows.iter().all(|r| r.contained && r.refined_ok)
    }

    pub fn max_length_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.length / self.r.sqrt()).fold(0.0, f64::max)
    }
}

/// Checks ½{Λ ≤ r} ⊆ B_g(0, √r) along `n_directions` directions. The
/// straight segment from 0 bounds the Riemannian distance from above, so a
/// short segment certifies containment.
pub fn hessian_metric_ball_check(m: &M, r: f64, n_directions: usize, seed: u64) -> Result<HessianBallReport> {
    require_centered(m)?;
    let ll = LogLaplace::new(m)?;
    let dirs: Vec<Vec<f64>> = mc::direction_net(m.dim(), seed).into_iter().take(n_directions).collect();
    let rows = dirs
        .into_par_iter()
        .map(|u| {
            let s = radial_root(|s| ll.value(&u.iter().map(|v| 2.0 * s * v).collect::<Vec<_>>()), r)?;
            let y: Vec<f64> = u.iter().map(|v| s * v).collect();
            let length = segment_length(&ll, &y)?;
            let two_y: Vec<f64> = y.iter().map(|v| 2.0 * v).collect();
            let refined_bound = (LN_2 * ll.value(&two_y)?.max(0.0)).sqrt();
            let tol = 1e-9 * r.sqrt().max(1e-300);
            Ok(HessianBallRow {
                contained: length <= r.sqrt() + tol,
                refined_ok: length <= refined_bound + tol,
                direction: u,
                boundary: y,
                length,
                refined_bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HessianBallReport { r, rows })
}

// ----------------------------------------------------- estimates (i), (ii)

/// Unit directions and weights of a rule on the sphere, with Σ w = |S^{n−1}|.
fn sphere_rule(dim: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    Ok(match dim {
        1 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
        2 => {
            let k = 512;
            (0..k)
                .map(|i| {
                    let phi = 2.0 * PI * (i as f64 + 0.5) / k as f64;
                    (vec![phi.cos(), phi.sin()], 2.0 * PI / k as f64)
                })
                .collect()
        }
        3 => {
            let (z, wz) = gauss_legendre(16);
            let k = 32;
            let mut out = Vec::with_capacity(16 * k);
            for (zc, wc) in z.iter().zip(&wz) {
                let sin = (1.0 - zc * zc).sqrt();
                for i in 0..k {
                    let phi = 2.0 * PI * (i as f64 + 0.5) / k as f64;
                    out.push((vec![sin * phi.cos(), sin * phi.sin(), *zc], wc * 2.0 * PI / k as f64));
                }
            }
            out
        }
        _ => return Err(LcError::Unsupported("sphere rule above dimension 3".into())),
    })
}

/// Support function of the body carrying `m`, if `m` is a uniform body or an
/// affine image of one.
pub fn body_support(m: &M, y: &[f64]) -> Option<f64> {
    match m {
        M::UniformBody { body } => Some(body.support_function(y)),
        M::Affine { base, matrix, shift } => {
            let a = from_rows(matrix);
            let pulled = a.transpose() * DVector::from_column_slice(y);
            Some(body_support(base, pulled.as_slice())? + dot(shift, y))
        }
        M::Interval { a, b } => Some((a * y[0]).max(b * y[0])),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlicingEstimates {
    pub dim: usize,
    pub r: f64,
    pub l: f64,
    /// e^{Ent}, the volume of K for a uniform body.
    pub volume: f64,
    pub vol_sublevel: f64,
    /// Volume of {y : g-length of [0, y] ≤ √r}, a lower bound for Vol B_g(0, √r).
    pub vol_metric_ball: f64,
    /// Vol(rK°), when the measure is a body.
    pub vol_polar: Option<f64>,
    pub containment_probes: usize,
    pub containment_violations: usize,
    /// Vol(K) / (e^{−n} Vol B_g).
    pub est_i_ratio: f64,
    /// Vol({Λ ≤ r})^{1/n} / ((r/n) L).
    pub est_ii_ratio: f64,
}

/// g-distance along the ray su at which the segment length reaches `target`.
fn metric_radius(ll: &LogLaplace, u: &[f64], target: f64, scale: f64) -> Result<f64> {
    let (z, w) = gauss_legendre(6);
    let speed = |s: f64| -> Result<f64> { Ok(ll.directional_second(u, s)?.max(0.0).sqrt()) };
    let panel = |a: f64, b: f64| -> Result<f64> {
        let mut acc = 0.0;
        for (zi, wi) in z.iter().zip(&w) {
            acc += wi * speed(a + 0.5 * (b - a) * (zi + 1.0))?;
        }
        Ok(0.5 * (b - a) * acc)
    };
    let mut a = 0.0;
    let mut len = 0.0;
    let mut h = scale / 64.0;
    for _ in 0..20_000 {
        let step = panel(a, a + h)?;
        if len + step >= target {
            let (mut lo, mut hi) = (a, a + h);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if len + panel(a, mid)? >= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        len += step;
        a += h;
        h *= 1.02;
    }
    Err(LcError::Unsupported("metric ball radius did not converge".into()))
}

/// Volumes behind estimates (i) and (ii) at dimension ≤ 3, and the exact
/// containment {Λ ≤ r} ⊇ rK° on probe points of ∂(rK°) and its midpoints.
pub fn slicing_estimates_check(m: &M, r: f64) -> Result<SlicingEstimates> {
    require_centered(m)?;
    let n = m.dim();
    let nf = n as f64;
    let ll = LogLaplace::new(m)?;
    let rule = sphere_rule(n)?;
    let iso = isotropic_constant(m, LMethod::ClosedForm)?;
    let rows = rule
        .par_iter()
        .map(|(u, w)| {
            let rho = radial_root(|s| ll.value(&u.iter().map(|v| s * v).collect::<Vec<_>>()), r)?;
            let rho_g = metric_radius(&ll, u, r.sqrt(), rho)?;
            let mut probes = 0;
            let mut bad = 0;
            let polar = match body_support(m, u) {
                Some(h) if h > 0.0 => {
                    let rp = r / h;
                    for f in [0.5, 1.0] {
                        let y: Vec<f64> = u.iter().map(|v| f * rp * v).collect();
                        probes += 1;
                        if ll.value(&y)? > r * (1.0 + 1e-9) + 1e-12 {
                            bad += 1;
                        }
                    }
                    Some(w * rp.powi(n as i32))
                }
                _ => None,
            };
            Ok((w * rho.powi(n as i32), w * rho_g.powi(n as i32), polar, probes, bad))
        })
        .collect::<Result<Vec<_>>>()?;
    let vol_sublevel = rows.iter().map(|r| r.0).sum::<f64>() / nf;
    let vol_metric_ball = rows.iter().map(|r| r.1).sum::<f64>() / nf;
    let vol_polar = rows.iter().map(|r| r.2).sum::<Option<f64>>().map(|v| v / nf);
    let volume = iso.entropy.exp();
    Ok(SlicingEstimates {
        dim: n,
        r,
        l: iso.l,
        volume,
        vol_sublevel,
        vol_metric_ball,
        vol_polar,
        containment_probes: rows.iter().map(|r| r.3).sum(),
        containment_violations: rows.iter().map(|r| r.4).sum(),
        est_i_ratio: volume / ((-nf).exp() * vol_metric_ball),
        est_ii_ratio: vol_sublevel.powf(1.0 / nf) / (r / nf * iso.l),
    })
}

// ------------------------------------------------------------- F gradient

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FGradientCheck {
    /// ∇F(0) by central differences of log det ∇²Λ.
    pub grad_fd: Vec<f64>,
    /// E X_i |X|², the exact gradient for an isotropic vector.
    pub grad_exact: Vec<f64>,
    /// |(∇²Λ(0))^{−1/2} ∇F(0)|.
    pub metric_norm: f64,
    /// √Var(|X|²) = √n σ̂.
    pub bound: f64,
}

impl FGradientCheck {
    pub fn holds(&self) -> bool {
        self.metric_norm <= self.bound * (1.0 + 1e-6)
    }
}

/// Spot check of (∇²Λ)^{−1}∇F·∇F ≤ Var(|X|²) at y = 0 for a product of
/// centered one-dimensional laws with unit variance.
pub fn f_gradient_check(m: &M, step: f64) -> Result<FGradientCheck> {
    let blocks = m.blocks()?;
    let canons: Vec<Canon1D> = blocks
        .iter()
        .map(|b| match b {
            Block::One(c) => Ok(*c),
            _ => Err(LcError::Unsupported("F-gradient check needs a product of 1D laws".into())),
        })
        .collect::<Result<_>>()?;
    let n = canons.len();
    let moments: Vec<(f64, f64, f64, f64)> = canons
        .iter()
        .map(|c| {
            let (x, w) = match c.prim {
                Prim1::Uniform { .. } | Prim1::Normal { .. } => canon_rule(c, 24),
                _ => canon_rule(c, 40),
            };
            let mom = |k: i32| x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum::<f64>();
            (mom(1), mom(2), mom(3), mom(4))
        })
        .collect();
    if moments.iter().any(|m| m.0.abs() > 1e-8 || (m.1 - 1.0).abs() > 1e-8) {
        return Err(LcError::NotIsotropic("F-gradient check".into()));
    }
    let grad_exact: Vec<f64> = moments.iter().map(|m| m.2).collect();
    let bound = moments.iter().map(|m| m.3 - m.1 * m.1).sum::<f64>().sqrt();
    let ll = LogLaplace::new(m)?;
    let logdet = |y: &[f64]| -> Result<f64> { Ok(ll.eval(y)?.hess.determinant().ln()) };
    let mut grad_fd = Vec::with_capacity(n);
    for i in 0..n {
        let mut yp = vec![0.0; n];
        let mut ym = vec![0.0; n];
        yp[i] = step;
        ym[i] = -step;
        grad_fd.push((logdet(&yp)? - logdet(&ym)?) / (2.0 * step));
    }
    let h0 = ll.eval(&vec![0.0; n])?.hess;
    let g = DVector::from_vec(grad_fd.clone());
    let hinv = h0.try_inverse().ok_or(LcError::SingularHessian)?;
    Ok(FGradientCheck { metric_norm: g.dot(&(hinv * &g)).sqrt(), grad_fd, grad_exact, bound })
}

// ---------------------------------------------------------------- sections

/// Central section volumes relative to Vol_n(K): the density of X·θ at the
/// barycenter's level, by slab counting extrapolated to zero width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionRatio {
    pub sections: [Estimate; 2],
    pub ratio: Estimate,
}

impl SectionRatio {
    /// The Hensley bound with `k` standard errors of slack.
    pub fn within_hensley(&self, k: f64) -> bool {
        self.ratio.value <= 6f64.sqrt() + k * self.ratio.se
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionRow {
    pub direction_index: usize,
    pub h_wide: f64,
    pub h_narrow: f64,
    pub section: f64,
    pub se: f64,
}

fn slab_weight(z: f64) -> f64 {
    let [h2, h1] = SLAB_WIDTHS;
    let inside = |h: f64| if z.abs() <= 0.5 * h { 1.0 / h } else { 0.0 };
    2.0 * inside(h1) - inside(h2)
}

fn projections(m: &M, dirs: &[Vec<f64>], n_samples: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let (mean, cov) = m.moments()?;
    let c0 = cov[(0, 0)];
    if (&cov - DMatrix::identity(cov.nrows(), cov.ncols()) * c0).amax() > 1e-9 * c0 {
        return Err(LcError::NotIsotropic("central sections need a scalar covariance".into()));
    }
    let batch = mc::sample(m, n_samples, seed, Method::Direct)?;
    let scale = c0.sqrt();
    Ok(dirs
        .iter()
        .map(|th| {
            let nt = dot(th, th).sqrt() * scale;
            batch.rows().map(|x| x.iter().zip(&mean).zip(th).map(|((a, b), t)| (a - b) * t).sum::<f64>() / nt).collect()
        })
        .collect())
}

/// Ratio Vol(K ∩ θ₁⊥) / Vol(K ∩ θ₂⊥) for a body with scalar covariance,
/// hyperplanes through the barycenter.
pub fn hyperplane_section_ratio(m: &M, theta1: &[f64], theta2: &[f64], n_samples: usize, seed: u64) -> Result<SectionRatio> {
    let z = projections(m, &[theta1.to_vec(), theta2.to_vec()], n_samples, seed)?;
    let scale = m.moments()?.1[(0, 0)].sqrt();
    let n = z[0].len();
    let f = |k: usize, r: std::ops::Range<usize>| {
        let len = r.len() as f64;
        z[k][r].iter().map(|&v| slab_weight(v)).sum::<f64>() / len
    };
    let est = |k: usize| {
        let e = stats::batch_statistic(n, |r| f(k, r));
        Estimate::new(e.value / scale, e.se / scale)
    };
    let ratio = stats::batch_statistic(n, |r| f(0, r.clone()) / f(1, r));
    Ok(SectionRatio { sections: [est(0), est(1)], ratio })
}

/// Central sections over the direction net for the volume-one dilate of K,
/// and max section × √‖Cov‖_op. Reported without a pass bar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionProfile {
    pub rows: Vec<SectionRow>,
    pub max_section: f64,
    pub min_section: f64,
    pub op_norm: f64,
    pub scaled_max: f64,
}

pub fn section_profile(m: &M, n_samples: usize, seed: u64) -> Result<SectionProfile> {
    let dirs = mc::direction_net(m.dim(), seed);
    let z = projections(m, &dirs, n_samples, seed)?;
    let cov = m.moments()?.1;
    let scale = cov[(0, 0)].sqrt();
    let n = m.dim() as f64;
    let dilate = (m.exact_moments()?.entropy.ok_or(LcError::NoExactOracle)? / n).exp();
    let rows: Vec<SectionRow> = z
        .iter()
        .enumerate()
        .map(|(i, zs)| {
            let e = stats::batch_means(&zs.iter().map(|&v| slab_weight(v)).collect::<Vec<_>>());
            SectionRow {
                direction_index: i,
                h_wide: SLAB_WIDTHS[0],
                h_narrow: SLAB_WIDTHS[1],
                section: e.value / scale * dilate,
                se: e.se / scale * dilate,
            }
        })
        .collect();
    let max_section = rows.iter().map(|r| r.section).fold(0.0, f64::max);
    let min_section = rows.iter().map(|r| r.section).fold(f64::INFINITY, f64::min);
    let op_norm = op_norm(&cov) / (dilate * dilate);
    Ok(SectionProfile { rows, max_section, min_section, op_norm, scaled_max: max_section * op_norm.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn centered_cube(n: usize) -> M {
        M::Affine {
            base: Box::new(M::cube(n, 1.0)),
            matrix: (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect(),
            shift: vec![-0.5; n],
        }
    }

    #[test]
    fn closed_form_constants() {
        for n in [1, 3, 7] {
            let l = isotropic_constant(&M::cube(n, 2.0), LMethod::ClosedForm).unwrap().l;
            assert_relative_eq!(l, 12f64.sqrt().recip(), epsilon = 1e-12);
            let g = isotropic_constant(&M::std_gaussian(n), LMethod::ClosedForm).unwrap().l;
            assert_relative_eq!(g, gaussian_l(), epsilon = 1e-12);
        }
        assert_relative_eq!(gaussian_l(), 0.241_970_724_519_143_37, epsilon = 1e-15);
        let s2 = isotropic_constant(&M::simplex(2), LMethod::ClosedForm).unwrap().l;
        assert_relative_eq!(s2, 2f64.sqrt() / (3f64.powf(0.75) * 2.0), epsilon = 1e-12);
        assert_relative_eq!(simplex_l(2), s2, epsilon = 1e-12);
        assert!((s2 - 0.31020).abs() < 5e-6);
        // equilateral triangle: Cov = a²/24 Id, area √3a²/4, L⁴ = 1/108
        assert_relative_eq!(s2, 108f64.powf(-0.25), epsilon = 1e-12);
        for n in 1..6 {
            let l = isotropic_constant(&M::simplex(n), LMethod::ClosedForm).unwrap().l;
            assert_relative_eq!(l, simplex_l(n), epsilon = 1e-12);
        }
    }

    #[test]
    fn mc_entropy_requires_samples() {
        let e = isotropic_constant(&M::cube(2, 1.0), LMethod::McEntropy { n_samples: 9_999, seed: 1 });
        assert!(matches!(e, Err(LcError::EntropyUnreliable)));
    }

    #[test]
    fn kd_tree_matches_brute_force() {
        let b = mc::sample(&M::std_gaussian(3), 2000, 4, Method::Direct).unwrap();
        let fast = kth_neighbor_distances(&b.data, 3, 5);
        for q in (0..2000).step_by(97) {
            let mut d: Vec<f64> = (0..2000)
                .filter(|&i| i != q)
                .map(|i| b.row(i).iter().zip(b.row(q)).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt())
                .collect();
            d.sort_by(f64::total_cmp);
            assert_eq!(fast[q], d[4]);
        }
    }

    #[test]
    fn knn_entropy_gaussian_and_cube() {
        let b = mc::sample(&M::std_gaussian(3), 50_000, 5, Method::Direct).unwrap();
        let h = knn_entropy(&b.data, 3, false);
        assert!((h - 1.5 * (2.0 * PI * E).ln()).abs() < 0.03, "{h}");
        let r = isotropic_constant(&M::cube(4, 1.0), LMethod::McEntropy { n_samples: 100_000, seed: 6 }).unwrap();
        assert!((r.l / 12f64.sqrt().recip() - 1.0).abs() < 0.02, "{}", r.l);
    }

    #[test]
    fn sandwich_examples() {
        let g = entropy_sandwich_check(&M::std_gaussian(3)).unwrap();
        assert_relative_eq!(g.lower_slack, 1.5, epsilon = 1e-12);
        assert_relative_eq!(g.upper_slack, 1.5, epsilon = 1e-12);
        assert!(g.holds(1e-12));
        let c = entropy_sandwich_check(&M::cube(3, 1.0)).unwrap();
        assert_relative_eq!(c.lower_slack, 0.0, epsilon = 1e-12);
        assert_relative_eq!(c.upper_slack, 3.0, epsilon = 1e-12);
        let e = entropy_sandwich_check(&M::exp_product(2)).unwrap();
        assert_relative_eq!(e.entropy, 2.0, epsilon = 1e-9);
        assert_relative_eq!(e.psi_at_mean, 2.0, epsilon = 1e-9);
        assert_relative_eq!(e.inf_psi, 0.0, epsilon = 1e-9);
        // E e^{(X+1)/2} = 2 per coordinate: the exponential bound is attained
        assert_relative_eq!(e.log_exp_half_psi, 2.0 * LN_2, epsilon = 1e-9);
        assert!(e.holds(1e-8));
        let s = entropy_sandwich_check(&make_iso(&M::simplex(3))).unwrap();
        assert!(s.holds(1e-12));
    }

    fn make_iso(m: &M) -> M {
        crate::measures::make_isotropic(m, None).unwrap()
    }

    #[test]
    fn log_laplace_closed_forms() {
        let g = log_laplace(&M::std_gaussian(2), &[0.3, -1.2]).unwrap();
        assert_relative_eq!(g.value, 0.5 * (0.09 + 1.44), epsilon = 1e-12);
        assert_relative_eq!(g.hess, DMatrix::identity(2, 2), epsilon = 1e-12);
        let e = log_laplace(&M::ShiftedExponential, &[0.4]).unwrap();
        assert_relative_eq!(e.value, -0.4 - (0.6f64).ln(), epsilon = 1e-12);
        let z = log_laplace(&M::cube(2, 1.0), &[0.0, 0.0]).unwrap();
        assert_eq!(z.value, 0.0);
        assert_relative_eq!(z.grad[0], 0.5, epsilon = 1e-14);
        assert!(matches!(log_laplace(&M::ShiftedExponential, &[1.0]), Err(LcError::LaplaceDiverges)));
    }

    #[test]
    fn gradient_and_hessian_match_differences() {
        for m in [M::simplex(2), M::ball(3, 1.0), M::exp_product(2), centered_cube(3)] {
            let ll = LogLaplace::new(&m).unwrap();
            let n = m.dim();
            let y: Vec<f64> = (0..n).map(|i| 0.3 - 0.2 * i as f64).collect();
            let v = ll.eval(&y).unwrap();
            let h = 1e-4;
            for i in 0..n {
                let mut yp = y.clone();
                let mut ym = y.clone();
                yp[i] += h;
                ym[i] -= h;
                let fd = (ll.value(&yp).unwrap() - ll.value(&ym).unwrap()) / (2.0 * h);
                assert!((fd - v.grad[i]).abs() <= 1e-6 * v.grad[i].abs().max(1e-3), "{fd} {}", v.grad[i]);
                let gp = ll.eval(&yp).unwrap().grad;
                let gm = ll.eval(&ym).unwrap().grad;
                for j in 0..n {
                    let fd2 = (gp[j] - gm[j]) / (2.0 * h);
                    assert!((fd2 - v.hess[(j, i)]).abs() <= 1e-6 * v.hess[(i, i)], "{fd2} {}", v.hess[(j, i)]);
                }
            }
        }
    }

    #[test]
    fn quadrature_laplace_matches_moments() {
        let b = M::ball(2, 1.0);
        let v = log_laplace(&b, &[0.0, 0.0]).unwrap();
        assert_relative_eq!(v.value, 0.0, epsilon = 1e-14);
        assert_relative_eq!(v.hess[(0, 0)], 0.25, epsilon = 1e-12);
        // ball in ℝ¹ is [−1, 1]: Λ(y) = ln(sinh y / y)
        let i = log_laplace(&M::ball(1, 1.0), &[2.0]).unwrap();
        assert_relative_eq!(i.value, (2f64.sinh() / 2.0).ln(), epsilon = 1e-12);
    }

    #[test]
    fn hessian_ball_gaussian_is_exact() {
        let rep = hessian_metric_ball_check(&M::std_gaussian(3), 2.0, 50, 3).unwrap();
        assert_eq!(rep.rows.len(), 50);
        for row in &rep.rows {
            assert_relative_eq!(row.length, 1.0, epsilon = 1e-10);
            assert_relative_eq!(row.refined_bound, (2.0 * LN_2).sqrt(), epsilon = 1e-10);
        }
        assert!(rep.all_contained());
    }

    #[test]
    fn hessian_ball_exponential_and_cube() {
        let e = hessian_metric_ball_check(&M::ShiftedExponential, 1.0, 50, 3).unwrap();
        assert_eq!(e.rows.len(), 2);
        // Λ(z) = −z − ln(1 − z) and ∇²Λ(z) = (1 − z)^{−2}: length of [0, y] is −ln(1 − y)
        let up = e.rows.iter().find(|r| r.direction[0] > 0.0).unwrap();
        let y = up.boundary[0];
        assert_relative_eq!(-2.0 * y - (1.0 - 2.0 * y).ln(), 1.0, epsilon = 1e-10);
        assert_relative_eq!(up.length, -(1.0 - y).ln(), epsilon = 1e-9);
        assert!(e.all_contained());
        let c = hessian_metric_ball_check(&centered_cube(3), 0.5, 50, 4).unwrap();
        assert!(c.all_contained());
        let tiny = hessian_metric_ball_check(&M::exp_product(2), 1e-8, 10, 5).unwrap();
        assert!(tiny.rows.iter().all(|r| r.length < 1e-3));
    }

    #[test]
    fn slicing_estimates_gaussian_volumes() {
        let r = 1.5;
        let s = slicing_estimates_check(&M::std_gaussian(2), r).unwrap();
        assert_relative_eq!(s.vol_sublevel, PI * 2.0 * r, epsilon = 1e-9);
        assert_relative_eq!(s.vol_metric_ball, PI * r, epsilon = 1e-8);
        assert!(s.vol_polar.is_none());
        assert_relative_eq!(s.volume, 2.0 * PI * E, epsilon = 1e-12);
        assert_relative_eq!(s.est_i_ratio, 2.0 * PI * E / ((-2.0f64).exp() * PI * r), epsilon = 1e-8);
    }

    #[test]
    fn slicing_containment_on_bodies() {
        let cube = centered_cube(2);
        let s = slicing_estimates_check(&cube, 1.0).unwrap();
        assert_eq!(s.containment_violations, 0);
        assert!(s.containment_probes > 0);
        // K = [−½, ½]²: K° is the cross-polytope of radius 2, area 8
        assert_relative_eq!(s.vol_polar.unwrap(), 8.0, epsilon = 1e-3);
        assert!(s.vol_sublevel >= s.vol_polar.unwrap());
        let ball = slicing_estimates_check(&M::ball(2, 1.0), 2.0).unwrap();
        assert_eq!(ball.containment_violations, 0);
        assert_relative_eq!(ball.vol_polar.unwrap(), PI * 4.0, epsilon = 1e-9);
        let simp = slicing_estimates_check(&M::simplex(2), 1.0).unwrap();
        assert_eq!(simp.containment_violations, 0);
        let c3 = slicing_estimates_check(&centered_cube(3), 1.0).unwrap();
        assert_eq!(c3.containment_violations, 0);
        // cross-polytope of radius 2 in ℝ³ has volume 2³·4/3!
        assert_relative_eq!(c3.vol_polar.unwrap(), 64.0 / 6.0, max_relative = 2e-2);
    }

    #[test]
    fn f_gradient_exponential_product() {
        let chk = f_gradient_check(&M::exp_product(3), 1e-3).unwrap();
        for (fd, ex) in chk.grad_fd.iter().zip(&chk.grad_exact) {
            assert_relative_eq!(*ex, 2.0, epsilon = 1e-9);
            assert!((fd - ex).abs() < 1e-5, "{fd}");
        }
        assert_relative_eq!(chk.bound, 24f64.sqrt(), epsilon = 1e-8);
        assert!(chk.holds());
    }

    #[test]
    fn cube_sections_axis_and_diagonal() {
        let s = 1.0 / 2f64.sqrt();
        let rep = hyperplane_section_ratio(&M::cube(3, 1.0), &[1.0, 0.0, 0.0], &[s, s, 0.0], 1_000_000, 9).unwrap();
        assert!(rep.sections[0].within(1.0, 4.0), "{:?}", rep.sections[0]);
        assert!(rep.sections[1].within(2f64.sqrt(), 4.0), "{:?}", rep.sections[1]);
        assert!(rep.ratio.within(s, 4.0), "{:?}", rep.ratio);
        assert!(rep.within_hensley(4.0));
    }
}
