//! Eldan's stochastic localization: the tilt process
//! dθ_t = dW_t + a(t, θ_t) dt with a = ∇φ, φ(t, θ) = log ∫ e^{⟨x,θ⟩ − t|x|²/2} dμ,
//! and the measures μ_t ∝ e^{⟨x,θ_t⟩ − t|x|²/2} μ.
//!
//! Checks here cover the law of θ_t, the barycenter and covariance
//! equations, martingale properties, Freedman's inequality, operator-norm
//! excursions of A_t = ∇²φ and the two-term concentration split.

use crate::cubature::Cubature;
use crate::error::{LcError, Result};
use crate::linalg::{from_rows, lambda_max, lambda_min, to_rows};
use crate::measures::{block_moments, block_tilt, gaussian_tilt, Block, Canon1D, LogConcaveMeasure as M, Potential, Prim1};
use crate::mc::{self, Method};
use crate::onedim::Law1D;
use crate::rng;
use crate::quad::Rule1D;
use crate::special::{log_norm_sf, norm_sf, LN_SQRT_2PI};
use crate::stats::{self, Estimate};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Starting measure of the localization.
#[derive(Debug, Clone, PartialEq)]
pub enum SlBase {
    /// A catalog measure whose blocks have tilt formulas.
    Measure(M),
    /// Finitely many weighted atoms.
    Atoms { points: Vec<Vec<f64>>, weights: Vec<f64> },
    /// Product of `dim` copies of the uniform law on {−1, 1}.
    TwoPointProduct { dim: usize },
}

impl SlBase {
    pub fn two_point() -> Self {
        SlBase::Atoms { points: vec![vec![-1.0], vec![1.0]], weights: vec![0.5, 0.5] }
    }

    pub fn dim(&self) -> usize {
        match self {
            SlBase::Measure(m) => m.dim(),
            SlBase::Atoms { points, .. } => points[0].len(),
            SlBase::TwoPointProduct { dim } => *dim,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepScheme {
    Euler,
    ExactGaussian,
}

/// Mean, covariance and (when available) the third central moment tensor of
/// μ_t; `third[i]` is ∫ (x − a)^{⊗2} (x − a)_i dμ_t.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltState {
    pub mean: Vec<f64>,
    pub cov: DMatrix<f64>,
    pub third: Option<Vec<DMatrix<f64>>>,
}

enum Engine {
    Blocks(Vec<Block>),
    Atoms { points: Vec<Vec<f64>>, log_w: Vec<f64> },
    TwoPoint(usize),
}

fn fail(t: f64, theta: &[f64]) -> LcError {
    LcError::QuadratureFailure { t, theta: theta.to_vec() }
}

impl Engine {
    fn new(base: &SlBase) -> Result<Self> {
        Ok(match base {
            SlBase::Measure(m) => {
                let blocks = m.blocks()?;
                if blocks.iter().any(|b| matches!(b, Block::Other(_))) {
                    return Err(LcError::Unsupported("localization needs blocks with tilt formulas".into()));
                }
                Engine::Blocks(blocks)
            }
            SlBase::Atoms { points, weights } => {
                if points.is_empty() || points.len() != weights.len() {
                    return Err(LcError::InvalidArgument("atoms and weights".into()));
                }
                Engine::Atoms { points: points.clone(), log_w: weights.iter().map(|w| w.ln()).collect() }
            }
            SlBase::TwoPointProduct { dim } => Engine::TwoPoint(*dim),
        })
    }

    fn atom_probs(points: &[Vec<f64>], log_w: &[f64], t: f64, theta: &[f64]) -> Vec<f64> {
        let l: Vec<f64> = points
            .iter()
            .zip(log_w)
            .map(|(x, lw)| lw + x.iter().zip(theta).map(|(a, b)| a * b - 0.5 * t * a * a).sum::<f64>())
            .collect();
        let mx = l.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut p: Vec<f64> = l.iter().map(|v| (v - mx).exp()).collect();
        let s: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= s);
        p
    }

    /// a(t, θ) = ∇φ(t, θ).
    fn mean(&self, t: f64, theta: &[f64]) -> Result<Vec<f64>> {
        match self {
            Engine::Blocks(blocks) => {
                let mut out = Vec::with_capacity(theta.len());
                let mut off = 0;
                for b in blocks {
                    let d = b.dim();
                    let th = &theta[off..off + d];
                    match b {
                        Block::One(c) => out.push(c.tilted_mean(th[0], t).map_err(|_| fail(t, theta))?),
                        _ => {
                            let (tb, _) = block_tilt(b, th, t).map_err(|_| fail(t, theta))?;
                            out.extend(block_moments(&tb)?.0);
                        }
                    }
                    off += d;
                }
                if out.iter().any(|v| !v.is_finite()) {
                    return Err(fail(t, theta));
                }
                Ok(out)
            }
            _ => Ok(self.state(t, theta)?.mean),
        }
    }

    /// Largest eigenvalue of A(t, θ).
    fn op_norm(&self, t: f64, theta: &[f64]) -> Result<f64> {
        match self {
            Engine::TwoPoint(_) => Ok(theta.iter().map(|v| 1.0 - v.tanh().powi(2)).fold(0.0, f64::max)),
            Engine::Blocks(blocks) => {
                let mut off = 0;
                let mut best = 0.0f64;
                for b in blocks {
                    let d = b.dim();
                    let (tb, _) = block_tilt(b, &theta[off..off + d], t).map_err(|_| fail(t, theta))?;
                    best = best.max(match &tb {
                        Block::One(c) => c.moments().1,
                        _ => lambda_max(&block_moments(&tb)?.1),
                    });
                    off += d;
                }
                Ok(best)
            }
            Engine::Atoms { .. } => Ok(lambda_max(&self.state(t, theta)?.cov)),
        }
    }

    fn state(&self, t: f64, theta: &[f64]) -> Result<TiltState> {
        let n = theta.len();
        match self {
            Engine::TwoPoint(_) => {
                let mean: Vec<f64> = theta.iter().map(|v| v.tanh()).collect();
                let cov = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 - mean[i] * mean[i] } else { 0.0 });
                let third = (0..n)
                    .map(|i| {
                        let m = mean[i];
                        DMatrix::from_fn(n, n, |a, b| if a == i && b == i { -2.0 * m * (1.0 - m * m) } else { 0.0 })
                    })
                    .collect();
                Ok(TiltState { mean, cov, third: Some(third) })
            }
            Engine::Atoms { points, log_w } => {
                let p = Engine::atom_probs(points, log_w, t, theta);
                let mut mean = vec![0.0; n];
                for (x, pi) in points.iter().zip(&p) {
                    for k in 0..n {
                        mean[k] += pi * x[k];
                    }
                }
                let mut cov = DMatrix::zeros(n, n);
                let mut third = vec![DMatrix::zeros(n, n); n];
                for (x, pi) in points.iter().zip(&p) {
                    let d: Vec<f64> = x.iter().zip(&mean).map(|(a, b)| a - b).collect();
                    for a in 0..n {
                        for b in 0..n {
                            let v = pi * d[a] * d[b];
                            cov[(a, b)] += v;
                            for (i, ti) in third.iter_mut().enumerate() {
                                ti[(a, b)] += v * d[i];
                            }
                        }
                    }
                }
                Ok(TiltState { mean, cov, third: Some(third) })
            }
            Engine::Blocks(blocks) => {
                let mut mean = Vec::with_capacity(n);
                let mut cov = DMatrix::zeros(n, n);
                let mut third = Some(vec![DMatrix::zeros(n, n); n]);
                let mut off = 0;
                for b in blocks {
                    let d = b.dim();
                    let th = &theta[off..off + d];
                    match b {
                        Block::One(c) => {
                            let (c2, _) = c.tilt(th[0], t).map_err(|_| fail(t, theta))?;
                            let (m, v, k3) = c2.moments();
                            mean.push(m);
                            cov[(off, off)] = v;
                            if let Some(tt) = third.as_mut() {
                                tt[off][(off, off)] = k3;
                            }
                        }
                        Block::Gauss { mean: m0, cov: c0 } => {
                            let (m, c, _) = gaussian_tilt(m0.as_slice(), c0, th, t);
                            mean.extend(m);
                            cov.view_mut((off, off), (d, d)).copy_from(&c);
                        }
                        _ => {
                            let (tb, _) = block_tilt(b, th, t).map_err(|_| fail(t, theta))?;
                            let (m, c) = block_moments(&tb)?;
                            mean.extend(m);
                            cov.view_mut((off, off), (d, d)).copy_from(&c);
                            third = None;
                        }
                    }
                    off += d;
                }
                if mean.iter().any(|v| !v.is_finite()) {
                    return Err(fail(t, theta));
                }
                Ok(TiltState { mean, cov, third })
            }
        }
    }

    /// ∫ f dμ_t.
    fn integrate(&self, base: &SlBase, f: &(dyn Fn(&[f64]) -> f64 + Sync), t: f64, theta: &[f64]) -> Result<f64> {
        match (self, base) {
            (Engine::Atoms { points, log_w }, _) => {
                let p = Engine::atom_probs(points, log_w, t, theta);
                Ok(points.iter().zip(&p).map(|(x, pi)| pi * f(x)).sum())
            }
            (Engine::TwoPoint(n), _) => {
                if *n > 16 {
                    return Err(LcError::Unsupported("two-point integration needs dim ≤ 16".into()));
                }
                let p: Vec<f64> = theta.iter().map(|v| 0.5 * (1.0 + v.tanh())).collect();
                let mut total = 0.0;
                let mut x = vec![0.0; *n];
                for mask in 0..(1usize << n) {
                    let mut w = 1.0;
                    for k in 0..*n {
                        let plus = mask >> k & 1 == 1;
                        x[k] = if plus { 1.0 } else { -1.0 };
                        w *= if plus { p[k] } else { 1.0 - p[k] };
                    }
                    total += w * f(&x);
                }
                Ok(total)
            }
            (Engine::Blocks(_), SlBase::Measure(m)) => {
                let tilted = m.tilt(theta, t).map_err(|_| fail(t, theta))?;
                Ok(Cubature::for_measure(&tilted, 40)?.expect(f))
            }
            _ => unreachable!("engine built from base"),
        }
    }
}

/// One sample path of the localization on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationPath {
    pub time_grid: Vec<f64>,
    pub theta: Vec<Vec<f64>>,
    pub barycenter: Vec<Vec<f64>>,
    /// A_t at each grid time, as rows.
    pub cov: Vec<Vec<Vec<f64>>>,
    /// Driving increments W_{t_{k+1}} − W_{t_k}; for the exact scheme the
    /// increments implied by θ_{k+1} − θ_k − a_k Δt.
    pub dw: Vec<Vec<f64>>,
    pub seed: u64,
    pub step_scheme: StepScheme,
}

/// Per-coordinate (precision, mean) of a Gaussian base with diagonal covariance.
fn diagonal_gaussian(base: &SlBase) -> Result<(Vec<f64>, Vec<f64>)> {
    if let SlBase::Measure(M::Gaussian { mean, cov }) = base {
        let n = mean.len();
        if (0..n).all(|i| (0..n).all(|j| i == j || cov[i][j] == 0.0)) {
            return Ok(((0..n).map(|i| 1.0 / cov[i][i]).collect(), mean.clone()));
        }
    }
    Err(LcError::Unsupported("exact scheme needs a Gaussian base with diagonal covariance".into()))
}

fn steps(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && t_end >= 0.0) {
        return Err(LcError::InvalidArgument("need dt > 0 and T ≥ 0".into()));
    }
    Ok((t_end / dt).round() as usize)
}

/// Advances θ from t to t + dt. The exact scheme uses
/// θ_t = t·m + (c + t)·∫₀ᵗ dW_s/(c + s) per coordinate (c the precision).
struct Stepper<'a> {
    engine: &'a Engine,
    exact: Option<(Vec<f64>, Vec<f64>)>,
}

impl Stepper<'_> {
    fn step(&self, t: f64, dt: f64, theta: &mut [f64], a: &[f64], r: &mut impl Rng) {
        match &self.exact {
            None => {
                let sq = dt.sqrt();
                for (th, ak) in theta.iter_mut().zip(a) {
                    let z: f64 = StandardNormal.sample(r);
                    *th += sq * z + ak * dt;
                }
            }
            Some((c, m)) => {
                for k in 0..theta.len() {
                    let u = (theta[k] - t * m[k]) / (c[k] + t);
                    let var = 1.0 / (c[k] + t) - 1.0 / (c[k] + t + dt);
                    let z: f64 = StandardNormal.sample(r);
                    theta[k] = (t + dt) * m[k] + (c[k] + t + dt) * (u + var.sqrt() * z);
                }
            }
        }
    }
}

fn stepper<'a>(engine: &'a Engine, base: &SlBase, scheme: StepScheme) -> Result<Stepper<'a>> {
    Ok(Stepper {
        engine,
        exact: match scheme {
            StepScheme::Euler => None,
            StepScheme::ExactGaussian => Some(diagonal_gaussian(base)?),
        },
    })
}

/// Simulates θ_t on [0, T] with step dt, recording a_t and A_t.
pub fn simulate_path(base: &SlBase, t_end: f64, dt: f64, seed: u64, scheme: StepScheme) -> Result<LocalizationPath> {
    let engine = Engine::new(base)?;
    let st = stepper(&engine, base, scheme)?;
    let n = steps(t_end, dt)?;
    let mut r = rng::stream(seed, rng::label("sl-path"));
    run_path(&engine, n, dt, base.dim(), seed, scheme, |t, theta, a| st.step(t, dt, theta, a, &mut r))
}

/// Euler path driven by the given Brownian increments.
pub fn euler_path_from_increments(base: &SlBase, dt: f64, dw: &[Vec<f64>]) -> Result<LocalizationPath> {
    let engine = Engine::new(base)?;
    let mut k = 0;
    run_path(&engine, dw.len(), dt, base.dim(), 0, StepScheme::Euler, |_, theta, a| {
        for ((th, w), ak) in theta.iter_mut().zip(&dw[k]).zip(a) {
            *th += w + ak * dt;
        }
        k += 1;
    })
}

fn run_path(
    engine: &Engine,
    n: usize,
    dt: f64,
    dim: usize,
    seed: u64,
    scheme: StepScheme,
    mut step: impl FnMut(f64, &mut [f64], &[f64]),
) -> Result<LocalizationPath> {
    let mut theta = vec![0.0; dim];
    let mut path = LocalizationPath {
        time_grid: Vec::with_capacity(n + 1),
        theta: Vec::with_capacity(n + 1),
        barycenter: Vec::with_capacity(n + 1),
        cov: Vec::with_capacity(n + 1),
        dw: Vec::with_capacity(n),
        seed,
        step_scheme: scheme,
    };
    for k in 0..=n {
        let t = k as f64 * dt;
        let s = engine.state(t, &theta)?;
        path.time_grid.push(t);
        path.theta.push(theta.clone());
        path.cov.push(to_rows(&s.cov));
        if k < n {
            let before = theta.clone();
            step(t, &mut theta, &s.mean);
            path.dw.push(theta.iter().zip(&before).zip(&s.mean).map(|((a, b), m)| a - b - m * dt).collect());
        }
        path.barycenter.push(s.mean);
    }
    Ok(path)
}

/// θ at the requested times (snapped to the grid) for `n_paths`
/// independent paths; row p holds the times in order, each a dim-vector.
pub fn theta_samples(
    base: &SlBase,
    times: &[f64],
    dt: f64,
    n_paths: usize,
    seed: u64,
    scheme: StepScheme,
) -> Result<Vec<Vec<Vec<f64>>>> {
    let engine = Engine::new(base)?;
    let st = stepper(&engine, base, scheme)?;
    let idx: Vec<usize> = times.iter().map(|t| steps(*t, dt)).collect::<Result<_>>()?;
    let last = idx.iter().copied().max().unwrap_or(0);
    let dim = base.dim();
    (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let mut r = rng::stream(seed, rng::label("sl-ensemble") ^ p as u64);
            let mut theta = vec![0.0; dim];
            let mut out = vec![Vec::new(); idx.len()];
            for k in 0..=last {
                for (j, &i) in idx.iter().enumerate() {
                    if i == k {
                        out[j] = theta.clone();
                    }
                }
                if k < last {
                    let t = k as f64 * dt;
                    let a = if st.exact.is_some() { vec![0.0; dim] } else { st.engine.mean(t, &theta)? };
                    st.step(t, dt, &mut theta, &a, &mut r);
                }
            }
            Ok(out)
        })
        .collect()
}

// ------------------------------------------------------------- law checks

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub t: f64,
    pub ks: f64,
    pub critical: f64,
    pub passes: bool,
}

/// Two-sample KS distance between θ_t from the SDE and tX + W_t sampled
/// directly, for a one-dimensional catalog base.
pub fn tilt_law_check(base: &M, t: f64, n_paths: usize, dt: f64, seed: u64) -> Result<KsReport> {
    if base.dim() != 1 {
        return Err(LcError::InvalidArgument("tilt law check is one-dimensional".into()));
    }
    let sb = SlBase::Measure(base.clone());
    let sde: Vec<f64> = theta_samples(&sb, &[t], dt, n_paths, seed, StepScheme::Euler)?.iter().map(|p| p[0][0]).collect();
    let xs = mc::sample(base, n_paths, rng::derive(seed, rng::label("tilt-law-x")), Method::Direct)?;
    let mut r = rng::stream(seed, rng::label("tilt-law-w"));
    let direct: Vec<f64> = xs
        .data
        .iter()
        .map(|x| {
            let z: f64 = StandardNormal.sample(&mut r);
            t * x + t.sqrt() * z
        })
        .collect();
    let ks = stats::ks_two_sample(&sde, &direct);
    let critical = stats::ks_critical_1pct(n_paths, n_paths);
    Ok(KsReport { t, ks, critical, passes: ks <= critical || t == 0.0 })
}

/// Empirical E θ_s θ_t for the one-dimensional standard Gaussian base and
/// the target st + min(s, t).
pub fn gaussian_theta_covariance(s: f64, t: f64, n_paths: usize, dt: f64, seed: u64) -> Result<(Estimate, f64)> {
    let base = SlBase::Measure(M::std_gaussian(1));
    let paths = theta_samples(&base, &[s, t], dt, n_paths, seed, StepScheme::ExactGaussian)?;
    let prods: Vec<f64> = paths.iter().map(|p| p[0][0] * p[1][0]).collect();
    Ok((stats::batch_means(&prods), s * t + s.min(t)))
}

// --------------------------------------------------- covariance process

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceResidual {
    pub dt: f64,
    /// RMS over steps of |a_{k+1} − a_k − A_k ΔW_k|.
    pub rms_barycenter: f64,
    /// RMS over steps of ‖A_{k+1} − A_k − Σᵢ Tᵢ ΔWᵢ + A_k² Δt‖_F.
    pub rms_cov: f64,
}

/// Discrete residuals of da = A dW and dA = Σᵢ Tᵢ dWᵢ − A² dt along a path.
pub fn covariance_process_checks(base: &SlBase, path: &LocalizationPath) -> Result<CovarianceResidual> {
    let engine = Engine::new(base)?;
    let n = path.dw.len();
    if n == 0 {
        return Err(LcError::InvalidArgument("path has no steps".into()));
    }
    let dt = path.time_grid[1] - path.time_grid[0];
    let (mut ra, mut rc) = (0.0, 0.0);
    for k in 0..n {
        let s = engine.state(path.time_grid[k], &path.theta[k])?;
        let third = s.third.ok_or_else(|| LcError::Unsupported("third moments unavailable for this base".into()))?;
        let dw = nalgebra::DVector::from_column_slice(&path.dw[k]);
        let da = nalgebra::DVector::from_column_slice(&path.barycenter[k + 1])
            - nalgebra::DVector::from_column_slice(&path.barycenter[k]);
        ra += (da - &s.cov * &dw).norm_squared();
        let mut pred = -(&s.cov * &s.cov) * dt;
        for (i, ti) in third.iter().enumerate() {
            pred += ti * dw[i];
        }
        let d_cov = from_rows(&path.cov[k + 1]) - &s.cov;
        rc += (d_cov - pred).norm_squared();
    }
    Ok(CovarianceResidual { dt, rms_barycenter: (ra / n as f64).sqrt(), rms_cov: (rc / n as f64).sqrt() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualStudy {
    pub rows: Vec<CovarianceResidual>,
    /// Slope of log RMS against log dt.
    pub slope_barycenter: f64,
    pub slope_cov: f64,
}

/// Runs `covariance_process_checks` for each dt on `n_paths` Brownian paths
/// shared across step sizes (coarse increments are sums of fine ones), and
/// fits the observed order. Every dt must be a power-of-two multiple of the
/// smallest.
pub fn covariance_residual_study(base: &SlBase, t_end: f64, dts: &[f64], n_paths: usize, seed: u64) -> Result<ResidualStudy> {
    let fine = dts.iter().cloned().fold(f64::INFINITY, f64::min);
    let n_fine = steps(t_end, fine)?;
    let dim = base.dim();
    let mut ms = vec![(0.0, 0.0); dts.len()];
    for p in 0..n_paths {
        let mut r = rng::stream(seed, rng::label("residual-study") ^ p as u64);
        let dw: Vec<Vec<f64>> = (0..n_fine)
            .map(|_| (0..dim).map(|_| { let z: f64 = StandardNormal.sample(&mut r); fine.sqrt() * z }).collect::<Vec<f64>>())
            .collect();
        for (j, &dt) in dts.iter().enumerate() {
            let m = (dt / fine).round() as usize;
            if m == 0 || ((dt / fine) - m as f64).abs() > 1e-9 || n_fine % m != 0 {
                return Err(LcError::InvalidArgument("step sizes must be multiples of the smallest".into()));
            }
            let coarse: Vec<Vec<f64>> = dw
                .chunks(m)
                .map(|c| (0..dim).map(|k| c.iter().map(|w| w[k]).sum()).collect())
                .collect();
            let res = covariance_process_checks(base, &euler_path_from_increments(base, dt, &coarse)?)?;
            ms[j].0 += res.rms_barycenter.powi(2) / n_paths as f64;
            ms[j].1 += res.rms_cov.powi(2) / n_paths as f64;
        }
    }
    let rows: Vec<CovarianceResidual> = dts
        .iter()
        .zip(&ms)
        .map(|(&dt, m)| CovarianceResidual { dt, rms_barycenter: m.0.sqrt(), rms_cov: m.1.sqrt() })
        .collect();
    let x: Vec<f64> = rows.iter().map(|r| r.dt.ln()).collect();
    let ya: Vec<f64> = rows.iter().map(|r| r.rms_barycenter.max(1e-300).ln()).collect();
    let yc: Vec<f64> = rows.iter().map(|r| r.rms_cov.max(1e-300).ln()).collect();
    Ok(ResidualStudy { slope_barycenter: stats::slope(&x, &ya), slope_cov: stats::slope(&x, &yc), rows })
}

// ----------------------------------------------------------- martingales

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleReport {
    pub target: f64,
    pub mean_end: Estimate,
    /// E[(M_T − M_{T/2})·g(M_{T/2})] for g(m) = m − target and g(m) = 1{m > target}.
    pub orthogonality: [Estimate; 2],
}

impl MartingaleReport {
    pub fn passes(&self, k: f64) -> bool {
        self.mean_end.within(self.target, k) && self.orthogonality.iter().all(|e| e.within(0.0, k))
    }
}

/// M_t = ∫ f dμ_t along Euler paths: E M_T = ∫ f dμ and increments are
/// orthogonal to functions of the past.
pub fn martingale_checks(
    base: &SlBase,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    t_end: f64,
    dt: f64,
    n_paths: usize,
    seed: u64,
) -> Result<MartingaleReport> {
    let engine = Engine::new(base)?;
    let dim = base.dim();
    let target = engine.integrate(base, f, 0.0, &vec![0.0; dim])?;
    let half = (t_end / 2.0 / dt).round() * dt;
    let paths = theta_samples(base, &[half, t_end], dt, n_paths, seed, StepScheme::Euler)?;
    let vals: Vec<(f64, f64)> = paths
        .par_iter()
        .map(|p| Ok((engine.integrate(base, f, half, &p[0])?, engine.integrate(base, f, t_end, &p[1])?)))
        .collect::<Result<_>>()?;
    let ends: Vec<f64> = vals.iter().map(|v| v.1).collect();
    let o1: Vec<f64> = vals.iter().map(|(m, e)| (e - m) * (m - target)).collect();
    let o2: Vec<f64> = vals.iter().map(|(m, e)| if *m > target { e - m } else { 0.0 }).collect();
    Ok(MartingaleReport {
        target,
        mean_end: stats::batch_means(&ends),
        orthogonality: [stats::batch_means(&o1), stats::batch_means(&o2)],
    })
}

/// Martingale traces on a shared grid with their predictable quadratic
/// variation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleEnsemble {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub qv: Vec<Vec<f64>>,
}

impl MartingaleEnsemble {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn increments(&self, p: usize) -> Vec<f64> {
        self.values[p].windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Standard Brownian motion as a martingale with ⟨M⟩_t = t.
pub fn brownian_ensemble(n_paths: usize, t_end: f64, dt: f64, seed: u64) -> Result<MartingaleEnsemble> {
    let n = steps(t_end, dt)?;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
    let values: Vec<Vec<f64>> = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let mut r = rng::stream(seed, rng::label("brownian") ^ p as u64);
            let mut v = Vec::with_capacity(n + 1);
            let mut b = 0.0;
            v.push(b);
            for _ in 0..n {
                let z: f64 = StandardNormal.sample(&mut r);
                b += dt.sqrt() * z;
                v.push(b);
            }
            v
        })
        .collect();
    let qv = vec![times.clone(); n_paths];
    Ok(MartingaleEnsemble { times, values, qv })
}

/// M_t = μ_t({+1}) = (1 + tanh θ_t)/2 for the two-point base, with
/// d⟨M⟩ = (A_t/2)² dt.
pub fn two_point_ensemble(n_paths: usize, t_end: f64, dt: f64, seed: u64) -> Result<MartingaleEnsemble> {
    let n = steps(t_end, dt)?;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let mut r = rng::stream(seed, rng::label("two-point") ^ p as u64);
            let (mut th, mut q) = (0.0f64, 0.0);
            let mut v = vec![0.5];
            let mut qs = vec![0.0];
            for _ in 0..n {
                let a = th.tanh();
                let cov = 1.0 - a * a;
                q += 0.25 * cov * cov * dt;
                let z: f64 = StandardNormal.sample(&mut r);
                th += dt.sqrt() * z + a * dt;
                v.push(0.5 * (1.0 + th.tanh()));
                qs.push(q);
            }
            (v, qs)
        })
        .collect();
    let (values, qv) = pairs.into_iter().unzip();
    Ok(MartingaleEnsemble { times, values, qv })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreedmanReport {
    pub u: f64,
    pub sigma2: f64,
    /// P(∃t: M_t − M_0 ≥ u, ⟨M⟩_t ≤ σ²), with Brownian-bridge crossing
    /// probabilities between grid points.
    pub frequency: Estimate,
    /// The same event seen on the grid only.
    pub grid_frequency: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Compares the empirical Freedman event frequency with e^{−u²/2σ²}.
pub fn freedman_tail(ens: &MartingaleEnsemble, u: f64, sigma2: f64) -> FreedmanReport {
    let per_path: Vec<(f64, bool)> = (0..ens.len())
        .into_par_iter()
        .map(|p| {
            let (v, q) = (&ens.values[p], &ens.qv[p]);
            let m0 = v[0];
            if u <= 0.0 {
                return (1.0, true);
            }
            let mut miss = 1.0;
            for k in 0..v.len() - 1 {
                if q[k + 1] > sigma2 * (1.0 + 1e-12) {
                    break;
                }
                let (x0, x1) = (v[k] - m0, v[k + 1] - m0);
                if x1 >= u {
                    return (1.0, true);
                }
                let dq = q[k + 1] - q[k];
                if dq > 0.0 {
                    miss *= 1.0 - (-2.0 * (u - x0) * (u - x1) / dq).exp();
                }
            }
            (1.0 - miss, false)
        })
        .collect();
    let probs: Vec<f64> = per_path.iter().map(|p| p.0).collect();
    let frequency = stats::batch_means(&probs);
    let grid_frequency = per_path.iter().filter(|p| p.1).count() as f64 / ens.len() as f64;
    let bound = (-u * u / (2.0 * sigma2)).exp();
    let n = ens.len() as f64;
    let binom = (bound * (1.0 - bound) / n).sqrt();
    FreedmanReport { u, sigma2, frequency, grid_frequency, bound, holds: frequency.value <= bound + 3.0 * binom.max(frequency.se) }
}

// ---------------------------------------------------- operator-norm excursion

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionReport {
    pub t: Vec<f64>,
    /// P(∃ s ≤ t: ‖A_s‖_op ≥ 2).
    pub probability: Vec<Estimate>,
    pub nondecreasing: bool,
    /// Ĉ from the least-squares fit of −log p = 1/(Ĉ t) over t with 0 < p < 1.
    pub c_hat: Option<f64>,
    /// Every estimate lies below exp(−1/(Ĉ t)) + 3 se.
    pub below_fit: bool,
}

/// Frequency of ‖A_s‖_op ≥ 2 before each time of `t_grid`.
pub fn opnorm_excursion(base: &SlBase, t_grid: &[f64], dt: f64, n_paths: usize, seed: u64) -> Result<ExcursionReport> {
    let engine = Engine::new(base)?;
    let t_max = t_grid.iter().cloned().fold(0.0, f64::max);
    let n = steps(t_max, dt)?;
    let dim = base.dim();
    let first: Vec<f64> = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let mut r = rng::stream(seed, rng::label("excursion") ^ p as u64);
            let mut theta = vec![0.0; dim];
            for k in 0..=n {
                let t = k as f64 * dt;
                if engine.op_norm(t, &theta)? >= 2.0 {
                    return Ok(t);
                }
                if k < n {
                    let a = engine.mean(t, &theta)?;
                    for (th, ak) in theta.iter_mut().zip(&a) {
                        let z: f64 = StandardNormal.sample(&mut r);
                        *th += dt.sqrt() * z + ak * dt;
                    }
                }
            }
            Ok(f64::INFINITY)
        })
        .collect::<Result<_>>()?;
    let probability: Vec<Estimate> = t_grid
        .iter()
        .map(|&t| {
            let k = first.iter().filter(|&&h| h <= t + 1e-12).count();
            let p = k as f64 / n_paths as f64;
            Estimate::new(p, (p * (1.0 - p) / n_paths as f64).sqrt().max(1.0 / n_paths as f64))
        })
        .collect();
    let mut order: Vec<usize> = (0..t_grid.len()).collect();
    order.sort_by(|&a, &b| t_grid[a].total_cmp(&t_grid[b]));
    let nondecreasing = order.windows(2).all(|w| probability[w[0]].value <= probability[w[1]].value);
    let fit: Vec<(f64, f64)> = t_grid
        .iter()
        .zip(&probability)
        .filter(|(t, p)| **t > 0.0 && p.value > 0.0 && p.value < 1.0)
        .map(|(t, p)| (1.0 / t, -p.value.ln()))
        .collect();
    let c_hat = if fit.is_empty() {
        None
    } else {
        let k = fit.iter().map(|(x, y)| x * y).sum::<f64>() / fit.iter().map(|(x, _)| x * x).sum::<f64>();
        Some(1.0 / k)
    };
    let below_fit = match c_hat {
        Some(c) => t_grid
            .iter()
            .zip(&probability)
            .all(|(t, p)| *t <= 0.0 || p.value <= (-1.0 / (c * t)).exp() + 3.0 * p.se),
        None => true,
    };
    Ok(ExcursionReport { t: t_grid.to_vec(), probability, nondecreasing, c_hat, below_fit })
}

// ------------------------------------------------------------ concentration

/// ln P(Y > y) for a canonical one-dimensional law.
pub fn canon_log_sf(c: &Canon1D, y: f64) -> f64 {
    if c.scale > 0.0 {
        let x = (y - c.shift) / c.scale;
        match c.prim {
            Prim1::Normal { m, s } => {
                let prec = 1.0 / (s * s) + c.t;
                let mu = (m / (s * s) + c.theta) / prec;
                return log_norm_sf((x - mu) * prec.sqrt());
            }
            Prim1::ShiftedExp if c.t == 0.0 => return -(1.0 - c.theta) * (x.max(-1.0) + 1.0),
            Prim1::ShiftedExp => {
                let mu = (c.theta - 1.0) / c.t;
                let sig = 1.0 / c.t.sqrt();
                let lo = (-1.0 - mu) / sig;
                let z = ((x - mu) / sig).max(lo);
                return log_norm_sf(z) - log_norm_sf(lo);
            }
            _ => {}
        }
    }
    (1.0 - Law1D::new(*c).cdf(y)).max(0.0).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub r: f64,
    pub t: f64,
    /// ln(1 − μ(S_r)) for S the coordinate half-space {x₁ ≤ median}.
    pub direct_log_alpha: f64,
    /// E (1 − μ_t(S_r)) 1{μ_t(S) ≥ 1/4}.
    pub term_local: f64,
    /// P(μ_t(S) ≤ 1/4).
    pub term_escape: f64,
    /// Half-space concentration over the direction net, by Monte Carlo.
    pub mc_direct: Estimate,
    /// 1 − μ(S_r) ≤ term_local + term_escape.
    pub split_ok: bool,
}

/// The two-term split 1 − μ(S_r) ≤ E(1 − μ_t(S_r))1{μ_t(S) ≥ 1/4} + P(μ_t(S) ≤ 1/4)
/// at t = min(1/r, (c_log·log n)^{−2}) for the first-coordinate half-space
/// of a product base.
///
/// In a product the first coordinate of θ_t is t·X₁ + W_t, and μ_t(S)
/// decreases in it, so both terms are integrals over (X₁, W_t) cut at the
/// level θ* where μ_t(S) = 1/4. They are computed by quadrature: the local
/// term is carried by rare large θ_t that sampling would miss.
pub fn concentration_experiment(base: &M, r_grid: &[f64], c_log: f64, n_samples: usize, seed: u64) -> Result<Vec<ConcentrationRow>> {
    let blocks = base.blocks()?;
    let c = match blocks.first() {
        Some(Block::One(c)) => *c,
        _ => return Err(LcError::Unsupported("concentration split needs a product base with a 1D first factor".into())),
    };
    let dim = base.dim() as f64;
    let law = Law1D::new(c);
    let med = law.quantile(0.5);
    let mc_direct = mc::concentration_function(base, r_grid, n_samples, seed)?;
    r_grid
        .iter()
        .zip(mc_direct)
        .map(|(&rad, mcd)| {
            let tl = (c_log * dim.max(2.0).ln()).powi(-2);
            let t = if rad > 0.0 { (1.0 / rad).min(tl) } else { tl };
            let sq = t.sqrt();
            let mass_s = |th: f64| -> Result<f64> { Ok(1.0 - canon_log_sf(&c.tilt(th, t)?.0, med).exp()) };
            let (mut lo, mut hi) = (-1.0f64, 1.0f64);
            while mass_s(lo)? < 0.25 {
                lo *= 2.0;
            }
            while mass_s(hi)? > 0.25 {
                hi *= 2.0;
            }
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if mass_s(mid)? > 0.25 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let th_star = 0.5 * (lo + hi);
            let term_escape = law.expect(|x| norm_sf((th_star - t * x) / sq));
            let term_local = law.expect(|x| {
                let zmax = ((th_star - t * x) / sq).min(12.0);
                if zmax <= -12.0 {
                    return 0.0;
                }
                Rule1D::composite(-12.0, zmax, 12, 16).integrate(|z| {
                    let th = t * x + sq * z;
                    let out = c.tilt(th, t).map(|ct| canon_log_sf(&ct.0, med + rad)).unwrap_or(f64::NEG_INFINITY);
                    (out - 0.5 * z * z - LN_SQRT_2PI).exp()
                })
            });
            let direct_log_alpha = canon_log_sf(&c, med + rad);
            let split_ok = direct_log_alpha.exp() <= (term_local + term_escape) * (1.0 + 1e-6);
            Ok(ConcentrationRow { r: rad, t, direct_log_alpha, term_local, term_escape, mc_direct: mcd, split_ok })
        })
        .collect()
}

/// α(r) = 1 − Φ(r) for the standard Gaussian.
pub fn gaussian_alpha(r: f64) -> f64 {
    norm_sf(r)
}

// --------------------------------------------------------- μ_t invariants

/// max over probes of |ln(dμ_t/dμ)(x) − (c_t + ⟨x, θ⟩ − t|x|²/2)| with
/// c_t = −log E_μ e^{⟨X,θ⟩ − t|X|²/2}.
pub fn log_ratio_residual(base: &M, t: f64, theta: &[f64], probes: &[Vec<f64>]) -> Result<f64> {
    let tilted = base.tilt(theta, t)?;
    let p0 = Potential::normalized(base)?;
    let p1 = Potential::normalized(&tilted)?;
    let ct = -base.log_laplace_tilt(theta, t)?;
    Ok(probes
        .iter()
        .map(|x| {
            let lhs = p0.eval(x) - p1.eval(x);
            let rhs = ct + x.iter().zip(theta).map(|(a, b)| a * b - 0.5 * t * a * a).sum::<f64>();
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max))
}

/// min over probes of λ_min(∇²(−log dμ_t/dx)) − t; nonnegative when μ_t is
/// t-uniformly log-concave. Probes without a Hessian are skipped.
pub fn uniform_log_concavity_margin(base: &M, t: f64, theta: &[f64], probes: &[Vec<f64>]) -> Result<f64> {
    let p = Potential::new(&base.tilt(theta, t)?);
    Ok(probes.iter().filter_map(|x| p.hessian(x)).map(|h| lambda_min(&h) - t).fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_drift_and_covariance() {
        let base = SlBase::Measure(M::std_gaussian(1));
        let e = Engine::new(&base).unwrap();
        for &(t, th) in &[(0.0, 0.0), (0.5, 1.2), (3.0, -2.0)] {
            assert_relative_eq!(e.mean(t, &[th]).unwrap()[0], th / (1.0 + t), epsilon = 1e-14);
            let s = e.state(t, &[th]).unwrap();
            assert_relative_eq!(s.cov[(0, 0)], 1.0 / (1.0 + t), epsilon = 1e-14);
        }
    }

    #[test]
    fn two_point_formulas() {
        let atoms = Engine::new(&SlBase::two_point()).unwrap();
        let prod = Engine::new(&SlBase::TwoPointProduct { dim: 1 }).unwrap();
        for &(t, th) in &[(0.0, 0.0), (0.7, 0.4), (2.0, -1.5)] {
            let a = atoms.state(t, &[th]).unwrap();
            let b = prod.state(t, &[th]).unwrap();
            assert_relative_eq!(a.mean[0], th.tanh(), epsilon = 1e-14);
            assert_relative_eq!(a.cov[(0, 0)], 1.0 - th.tanh().powi(2), epsilon = 1e-14);
            assert_relative_eq!(a.third.unwrap()[0][(0, 0)], b.third.unwrap()[0][(0, 0)], epsilon = 1e-14);
        }
    }

    #[test]
    fn path_starts_at_base_moments() {
        let base = SlBase::Measure(M::exp_product(3));
        let p = simulate_path(&base, 0.1, 0.01, 1, StepScheme::Euler).unwrap();
        assert_eq!(p.time_grid.len(), 11);
        for k in 0..3 {
            assert!(p.barycenter[0][k].abs() < 1e-12);
            assert_relative_eq!(p.cov[0][k][k], 1.0, epsilon = 1e-10);
        }
        // A_t ≼ (1/t) Id along the path
        for (t, c) in p.time_grid.iter().zip(&p.cov).skip(1) {
            assert!(lambda_max(&from_rows(c)) <= 1.0 / t + 1e-10);
        }
    }

    #[test]
    fn exact_scheme_matches_linear_sde() {
        // θ_t = (1 + t)∫ dW/(1 + s) has variance t² + t
        let base = SlBase::Measure(M::std_gaussian(1));
        let v: Vec<f64> = theta_samples(&base, &[2.0], 0.5, 40_000, 3, StepScheme::ExactGaussian)
            .unwrap()
            .iter()
            .map(|p| p[0][0] * p[0][0])
            .collect();
        assert!(stats::batch_means(&v).within(6.0, 4.0));
    }

    #[test]
    fn gaussian_covariance_structure() {
        let (e, target) = gaussian_theta_covariance(0.5, 1.5, 40_000, 0.01, 4).unwrap();
        assert!(e.within(target, 4.0), "{e:?} {target}");
    }

    #[test]
    fn tilt_law_gaussian_and_trivial() {
        let r = tilt_law_check(&M::std_gaussian(1), 1.0, 20_000, 0.01, 5).unwrap();
        assert!(r.passes, "{r:?}");
        let r = tilt_law_check(&M::std_gaussian(1), 0.0, 1000, 0.01, 5).unwrap();
        assert_eq!(r.ks, 0.0);
    }

    #[test]
    fn tilt_law_exponential() {
        let r = tilt_law_check(&M::ShiftedExponential, 1.0, 20_000, 2e-3, 6).unwrap();
        assert!(r.passes, "{r:?}");
    }

    #[test]
    fn gaussian_covariance_residuals_vanish_fast() {
        let base = SlBase::Measure(M::std_gaussian(1));
        let st = covariance_residual_study(&base, 1.0, &[1e-2, 5e-3, 2.5e-3], 4, 7).unwrap();
        assert!(st.slope_barycenter >= 0.8 && st.slope_cov >= 0.8, "{st:?}");
        assert!(st.rows[0].rms_cov < 1e-3);
    }

    #[test]
    fn exponential_covariance_residual_order() {
        let base = SlBase::Measure(M::exp_product(2));
        let st = covariance_residual_study(&base, 1.0, &[1e-2, 5e-3, 2.5e-3], 32, 8).unwrap();
        assert!(st.slope_barycenter >= 0.8 && st.slope_cov >= 0.8, "{st:?}");
    }

    #[test]
    fn symmetric_two_point_has_no_diffusion_at_origin() {
        let e = Engine::new(&SlBase::two_point()).unwrap();
        assert_eq!(e.state(0.3, &[0.0]).unwrap().third.unwrap()[0][(0, 0)], 0.0);
    }

    #[test]
    fn martingales() {
        let r = martingale_checks(&SlBase::two_point(), &|x| if x[0] > 0.0 { 1.0 } else { 0.0 }, 1.0, 0.01, 20_000, 9).unwrap();
        assert_relative_eq!(r.target, 0.5, epsilon = 1e-15);
        assert!(r.passes(4.0), "{r:?}");
        let g = SlBase::Measure(M::std_gaussian(1));
        let r = martingale_checks(&g, &|x| x[0], 1.0, 0.01, 4000, 10).unwrap();
        assert!(r.passes(4.0), "{r:?}");
        let r = martingale_checks(&g, &|_| 1.0, 1.0, 0.05, 64, 11).unwrap();
        assert!((r.mean_end.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn freedman_brownian_oracle() {
        let ens = brownian_ensemble(20_000, 1.0, 0.01, 12).unwrap();
        let r = freedman_tail(&ens, 2.0, 1.0);
        let oracle = 2.0 * norm_sf(2.0);
        assert!(r.frequency.within(oracle, 4.0), "{r:?}");
        assert!(r.grid_frequency <= r.frequency.value + 1e-12);
        assert!(r.holds);
        assert_relative_eq!(r.bound, (-2.0f64).exp());
        assert!(freedman_tail(&ens, 0.0, 1.0).holds);
    }

    #[test]
    fn freedman_two_point() {
        let ens = two_point_ensemble(10_000, 4.0, 0.01, 13).unwrap();
        let mut q: Vec<f64> = ens.qv.iter().map(|v| *v.last().unwrap()).collect();
        q.sort_by(f64::total_cmp);
        let sigma2 = stats::quantile_sorted(&q, 0.5);
        let r = freedman_tail(&ens, 0.4, sigma2);
        assert!(r.holds, "{r:?}");
        assert!(ens.qv.iter().all(|v| v.windows(2).all(|w| w[1] >= w[0])));
    }

    #[test]
    fn excursions() {
        let ts = [0.002, 0.01, 0.05, 0.2];
        let g = opnorm_excursion(&SlBase::Measure(M::std_gaussian(4)), &ts, 0.01, 200, 14).unwrap();
        assert!(g.probability.iter().all(|p| p.value == 0.0));
        let tp = opnorm_excursion(&SlBase::TwoPointProduct { dim: 16 }, &ts, 0.01, 200, 14).unwrap();
        assert!(tp.probability.iter().all(|p| p.value == 0.0));
        let ex = opnorm_excursion(&SlBase::Measure(M::exp_product(16)), &ts, 0.005, 400, 15).unwrap();
        assert!(ex.nondecreasing);
        assert!(ex.probability[0].value < 0.05, "{ex:?}");
    }

    #[test]
    fn concentration_split() {
        let rows = concentration_experiment(&M::std_gaussian(4), &[0.0, 1.0, 2.0], 1.0, 20_000, 16).unwrap();
        assert_relative_eq!(rows[0].direct_log_alpha.exp(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(rows[1].direct_log_alpha.exp(), gaussian_alpha(1.0), epsilon = 1e-12);
        assert!(rows.iter().all(|r| r.split_ok));
        let n = 256.0f64;
        let r = 4.0 * n.ln().powi(2);
        let rows = concentration_experiment(&M::exp_product(256), &[0.0, r], 1.0, 4000, 17).unwrap();
        assert_relative_eq!(rows[0].direct_log_alpha.exp(), 0.5, epsilon = 1e-9);
        let ratio = rows[1].direct_log_alpha / r;
        assert!((-2.0..=-0.05).contains(&ratio), "{ratio}");
        assert!(rows.iter().all(|r| r.split_ok));
    }

    #[test]
    fn tilted_density_form_and_uniform_convexity() {
        let probes = vec![vec![0.3, -0.2], vec![1.5, 0.1], vec![-0.5, 2.0]];
        for base in [M::std_gaussian(2), M::exp_product(2)] {
            let res = log_ratio_residual(&base, 0.8, &[0.4, -0.3], &probes).unwrap();
            assert!(res < 1e-10, "{res}");
            assert!(uniform_log_concavity_margin(&base, 0.8, &[0.4, -0.3], &probes).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn total_mass_is_one() {
        let base = SlBase::Measure(M::exp_product(2));
        let e = Engine::new(&base).unwrap();
        let m = e.integrate(&base, &|_| 1.0, 0.7, &[0.5, -1.0]).unwrap();
        assert!((m - 1.0).abs() < 1e-8);
    }

    #[test]
    fn quadrature_failure_reports_location() {
        let base = SlBase::Measure(M::ShiftedExponential);
        let e = Engine::new(&base).unwrap();
        assert!(matches!(e.mean(0.0, &[2.0]), Err(LcError::QuadratureFailure { .. })));
    }
}
