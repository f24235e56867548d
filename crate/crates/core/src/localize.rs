//! Gaussian localization at a fixed scale s: the local densities
//! ρ_{s,y} ∝ ρ(x)·γ_s(x − y), the conditional expectation Q_s, the law of
//! total variance and the conditional covariance A_s = Cov(ρ_{s,Y_s}).
//!
//! ρ_{s,y} is the base tilted by e^{⟨x, y/s⟩ − |x|²/(2s)}, so products
//! localize block by block.

use crate::cubature::Cubature;
use crate::error::{LcError, Result};
use crate::linalg::lambda_max;
use crate::measures::{block_moments, block_tilt, Block, ConvexBody, LogConcaveMeasure as M, Potential};
use crate::mc::{self, Method, SampleBatch};
use crate::rng::{self, CHUNK};
use crate::special::truncated_gaussian_variance;
use crate::stats::{self, Estimate};
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Prior samples used for self-normalized importance sampling.
const PRIOR_SAMPLES: usize = 1 << 16;
/// Effective sample size below which importance-sampling errors are widened.
pub const MIN_ESS: f64 = 50.0;
/// Gauss–Hermite order for Gaussian blocks in local quadrature.
const LOCAL_ORDER: usize = 40;
/// Body quadrature is used for the local law while √s ≥ diameter / this.
const BODY_RESOLUTION: f64 = 8.0;

/// The local density ρ_{s,y}.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalDensity {
    pub base: M,
    pub s: f64,
    pub y: Vec<f64>,
    /// ln (ρ * γ_s)(y).
    pub log_normalizer: f64,
}

impl LocalDensity {
    pub fn new(base: &M, s: f64, y: &[f64]) -> Result<Self> {
        check_scale(s)?;
        if y.len() != base.dim() {
            return Err(LcError::InvalidArgument("point dimension".into()));
        }
        let theta: Vec<f64> = y.iter().map(|v| v / s).collect();
        let lam = base.log_laplace_tilt(&theta, 1.0 / s)?;
        let n = y.len() as f64;
        let y2: f64 = y.iter().map(|v| v * v).sum();
        Ok(LocalDensity {
            base: base.clone(),
            s,
            y: y.to_vec(),
            log_normalizer: lam - 0.5 * y2 / s - 0.5 * n * (2.0 * PI * s).ln(),
        })
    }

    /// The local law as a catalog measure.
    pub fn measure(&self) -> Result<M> {
        local_measure(&self.base, self.s, &self.y)
    }

    /// ln ρ_{s,y}(x) given the normalized potential of the base.
    pub fn log_density(&self, pot: &Potential, x: &[f64]) -> f64 {
        let n = x.len() as f64;
        let d2: f64 = x.iter().zip(&self.y).map(|(a, b)| (a - b) * (a - b)).sum();
        -pot.eval(x) - 0.5 * d2 / self.s - 0.5 * n * (2.0 * PI * self.s).ln() - self.log_normalizer
    }
}

fn check_scale(s: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(LcError::InvalidArgument("s must be positive".into()));
    }
    Ok(())
}

pub fn local_measure(base: &M, s: f64, y: &[f64]) -> Result<M> {
    let theta: Vec<f64> = y.iter().map(|v| v / s).collect();
    base.tilt(&theta, 1.0 / s)
}

/// Self-normalized weights e^{⟨x, y⟩/s − |x|²/(2s)} on a prior batch, with
/// the effective sample size.
fn prior_weights(prior: &SampleBatch, s: f64, y: &[f64]) -> (Vec<f64>, f64) {
    let logs: Vec<f64> = prior
        .rows()
        .map(|x| x.iter().zip(y).map(|(a, b)| a * b / s - 0.5 * a * a / s).sum())
        .collect();
    let mx = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = logs.iter().map(|l| (l - mx).exp()).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    let ess = 1.0 / w.iter().map(|v| v * v).sum::<f64>();
    (w, ess)
}

fn prior_batch(base: &M) -> Result<SampleBatch> {
    mc::sample(base, PRIOR_SAMPLES, rng::label("localize-prior"), Method::Direct)
}

/// A weighted point set for ρ_{s,y}.
enum LocalRule<'a> {
    Quadrature(Cubature),
    Weighted { prior: &'a SampleBatch, w: Vec<f64> },
}

impl LocalRule<'_> {
    fn expect(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        match self {
            LocalRule::Quadrature(c) => c.expect(f),
            LocalRule::Weighted { prior, w, .. } => prior.rows().zip(w).map(|(x, wi)| wi * f(x)).sum(),
        }
    }
}

/// Tensor quadrature of the local law when it splits into
/// quadrature-friendly blocks and has dim ≤ 3.
fn local_quadrature(base: &M, s: f64, y: &[f64]) -> Result<Option<Cubature>> {
    if base.dim() > 3 {
        return Ok(None);
    }
    if let Some(mut c) = body_rule(base, s) {
        reweight(&mut c, s, y);
        return Ok(Some(c));
    }
    let local = local_measure(base, s, y)?;
    Ok(Cubature::for_measure(&local, LOCAL_ORDER).ok())
}

/// The uniform rule of a disk, interval-like ball or triangle, when the
/// Gaussian factor of width √s is wide enough for it to resolve.
fn body_rule(base: &M, s: f64) -> Option<Cubature> {
    let M::UniformBody { body } = base else { return None };
    if matches!(body, ConvexBody::Cube { .. }) || body.dim() > 2 || s.sqrt() < body.diameter() / BODY_RESOLUTION {
        return None;
    }
    Cubature::for_body(body, LOCAL_ORDER).ok()
}

/// Multiplies the weights by e^{−|x − y|²/(2s)} and renormalizes.
fn reweight(c: &mut Cubature, s: f64, y: &[f64]) {
    let logs: Vec<f64> = c
        .points
        .chunks(c.dim)
        .map(|x| -0.5 * x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / s)
        .collect();
    let mx = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    c.weights.iter_mut().zip(&logs).for_each(|(w, l)| *w *= (l - mx).exp());
    let total: f64 = c.weights.iter().sum();
    c.weights.iter_mut().for_each(|w| *w /= total);
}

/// Quadrature when available, otherwise importance weights on `prior`.
fn local_rule<'a>(base: &M, s: f64, y: &[f64], prior: Option<&'a SampleBatch>) -> Result<LocalRule<'a>> {
    if let Some(c) = local_quadrature(base, s, y)? {
        return Ok(LocalRule::Quadrature(c));
    }
    let prior = prior.ok_or_else(|| LcError::Unsupported("no prior batch".into()))?;
    let (w, _) = prior_weights(prior, s, y);
    Ok(LocalRule::Weighted { prior, w })
}

/// ∫ f ρ_{s,y} with its quadrature or importance-sampling error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalExpectation {
    pub value: f64,
    pub se: f64,
    pub ess: f64,
    /// Set when the effective sample size fell below `MIN_ESS`; `se` is then doubled.
    pub widened: bool,
}

/// Q_s f(y) = ∫ f ρ_{s,y}.
pub fn q_s(f: &(dyn Fn(&[f64]) -> f64 + Sync), base: &M, s: f64, y: &[f64]) -> Result<LocalExpectation> {
    check_scale(s)?;
    if let Some(c) = local_quadrature(base, s, y)? {
        let value = c.expect(f);
        if !value.is_finite() {
            return Err(LcError::DivergentIntegrand);
        }
        return Ok(LocalExpectation { value, se: 0.0, ess: f64::INFINITY, widened: false });
    }
    let prior = prior_batch(base)?;
    let (w, ess) = prior_weights(&prior, s, y);
    let vals: Vec<f64> = prior.rows().map(f).collect();
    let value: f64 = vals.iter().zip(&w).map(|(v, wi)| v * wi).sum();
    if !value.is_finite() {
        return Err(LcError::DivergentIntegrand);
    }
    let var: f64 = vals.iter().zip(&w).map(|(v, wi)| wi * wi * (v - value) * (v - value)).sum();
    let widened = ess < MIN_ESS;
    let se = var.sqrt() * if widened { 2.0 } else { 1.0 };
    Ok(LocalExpectation { value, se, ess, widened })
}

/// Draws Y_s = X + √s Z for X from the base.
pub fn sample_observations(base: &M, s: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    let mut b = mc::sample(base, n, rng::derive(seed, rng::label("localize-x")), Method::Direct)?;
    let dim = b.dim;
    let sq = s.sqrt();
    b.data.par_chunks_mut(CHUNK * dim.max(1)).enumerate().for_each(|(c, chunk)| {
        let mut r = rng::stream(seed, rng::label("localize-noise") ^ c as u64);
        for v in chunk.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut r);
            *v += sq * z;
        }
    });
    Ok(b)
}

// ------------------------------------------------------- mixture identity

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub x: Vec<f64>,
    pub density: f64,
    pub mixture: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureReport {
    pub s: f64,
    pub probes: Vec<ProbeResult>,
    /// max over probes of |ρ(x) − mixture| / se.
    pub max_z: f64,
}

impl MixtureReport {
    pub fn passes(&self, k: f64) -> bool {
        self.probes.iter().all(|p| p.mixture.within(p.density, k))
    }
}

/// Compares ρ(x) with the average of ρ_{s,Y_s}(x) over sampled Y_s at 20
/// probe points drawn from the base.
pub fn mixture_identity_check(base: &M, s: f64, n_outer: usize, seed: u64) -> Result<MixtureReport> {
    check_scale(s)?;
    if base.dim() > 3 {
        return Err(LcError::Unsupported("mixture check needs dim ≤ 3".into()));
    }
    let pot = Potential::normalized(base)?;
    let probes = mc::sample(base, 20, rng::derive(seed, rng::label("probes")), Method::Direct)?;
    let ys = sample_observations(base, s, n_outer, seed)?;
    let lam: Vec<f64> = ys
        .rows()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|y| {
            let theta: Vec<f64> = y.iter().map(|v| v / s).collect();
            base.log_laplace_tilt(&theta, 1.0 / s)
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut max_z = 0.0f64;
    for x in probes.rows() {
        let lr = -pot.eval(x);
        let x2: f64 = x.iter().map(|v| v * v).sum();
        let vals: Vec<f64> = ys
            .rows()
            .zip(&lam)
            .map(|(y, l)| {
                let xy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                (lr + xy / s - 0.5 * x2 / s - l).exp()
            })
            .collect();
        let est = stats::batch_means(&vals);
        let density = lr.exp();
        max_z = max_z.max((est.value - density).abs() / est.se.max(1e-300));
        out.push(ProbeResult { x: x.to_vec(), density, mixture: est });
    }
    Ok(MixtureReport { s, probes: out, max_z })
}

// ------------------------------------------------- variance decomposition

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceDecomposition {
    pub s: f64,
    pub total: Estimate,
    pub expected_local: Estimate,
    pub variance_of_means: Estimate,
    /// (total − expected_local − variance_of_means) / combined se.
    pub balance_z: f64,
    pub cp: Option<f64>,
    /// E Var_{ρ_s} f ≤ Var f.
    pub lower_ok: bool,
    /// Var f ≤ (2 + C_P/s) E Var_{ρ_s} f.
    pub upper_ok: bool,
    /// Var f ≤ (1 + C_P/s) E Var_{ρ_s} f.
    pub sharp_upper_ok: bool,
}

/// Law of total variance for f(X) against the σ-field of Y_s, with the
/// sandwich between Var f and E Var_{ρ_s} f when C_P is known.
pub fn variance_decomposition(
    base: &M,
    s: f64,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    n: usize,
    seed: u64,
) -> Result<VarianceDecomposition> {
    check_scale(s)?;
    let mut xs = mc::sample(base, n, rng::derive(seed, rng::label("localize-x")), Method::Direct)?;
    let fx: Vec<f64> = xs.rows().map(f).collect();
    let sq = s.sqrt();
    let dim = xs.dim;
    xs.data.par_chunks_mut(CHUNK * dim.max(1)).enumerate().for_each(|(c, chunk)| {
        let mut r = rng::stream(seed, rng::label("localize-noise") ^ c as u64);
        for v in chunk.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut r);
            *v += sq * z;
        }
    });
    let quadrature = base.dim() <= 3 && (body_rule(base, s).is_some() || Cubature::for_measure(base, LOCAL_ORDER).is_ok());
    let prior = match !quadrature {
        true => Some(prior_batch(base)?),
        false => None,
    };
    let rows: Vec<&[f64]> = xs.rows().collect();
    let local: Vec<(f64, f64)> = rows
        .par_iter()
        .map(|y| {
            let rule = local_rule(base, s, y, prior.as_ref())?;
            let m1 = rule.expect(f);
            let m2 = rule.expect(|x| {
                let v = f(x) - m1;
                v * v
            });
            Ok((m1, m2))
        })
        .collect::<Result<_>>()?;
    let means: Vec<f64> = local.iter().map(|p| p.0).collect();
    let vars: Vec<f64> = local.iter().map(|p| p.1).collect();
    let total = stats::batch_statistic(n, |r| stats::variance(&fx[r]));
    let expected_local = stats::batch_means(&vars);
    let variance_of_means = stats::batch_statistic(n, |r| stats::variance(&means[r]));
    // the residual is a single statistic of the joint draws, so its error
    // comes from the same batches
    let resid = stats::batch_statistic(n, |r| {
        stats::variance(&fx[r.clone()]) - stats::mean(&vars[r.clone()]) - stats::variance(&means[r])
    });
    let balance_z = resid.value / resid.se.max(1e-300);
    let cp = base.exact_moments().ok().and_then(|e| e.cp);
    let slack = |a: &Estimate, b: &Estimate| 4.0 * (a.se * a.se + b.se * b.se).sqrt();
    let el = expected_local;
    let lower_ok = el.value <= total.value + slack(&el, &total);
    let (upper_ok, sharp_upper_ok) = match cp {
        Some(c) => {
            let up = |k: f64| total.value <= k * el.value + 4.0 * (total.se.powi(2) + (k * el.se).powi(2)).sqrt();
            (up(2.0 + c / s), up(1.0 + c / s))
        }
        None => (true, true),
    };
    Ok(VarianceDecomposition { s, total, expected_local, variance_of_means, balance_z, cp, lower_ok, upper_ok, sharp_upper_ok })
}

/// Gaussian closed forms for f = x₁ under N(0, I): (E Var_{ρ_s}, Var Q_s f).
pub fn gaussian_decomposition(s: f64) -> (f64, f64) {
    (s / (1.0 + s), 1.0 / (1.0 + s))
}

// -------------------------------------------- conditional covariance norm

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalCovarianceReport {
    pub s: f64,
    pub dim: usize,
    pub mean_op_norm: f64,
    pub se: f64,
    pub q50: f64,
    pub q90: f64,
    pub q99: f64,
    /// Largest sampled ‖A_s‖_op / s; at most 1 for a log-concave base.
    pub max_ratio_to_s: f64,
    /// Smallest effective sample size when importance sampling was used.
    pub min_ess: Option<f64>,
}

impl ConditionalCovarianceReport {
    pub const CSV_HEADER: [&'static str; 7] = ["s", "dim", "mean_op_norm", "se", "q50", "q90", "q99"];

    pub fn csv_row(&self) -> [String; 7] {
        [
            self.s.to_string(),
            self.dim.to_string(),
            self.mean_op_norm.to_string(),
            self.se.to_string(),
            self.q50.to_string(),
            self.q90.to_string(),
            self.q99.to_string(),
        ]
    }

    fn from_values(s: f64, dim: usize, vals: Vec<f64>, min_ess: Option<f64>) -> Self {
        let est = stats::batch_means(&vals);
        let mut sorted = vals.clone();
        sorted.sort_by(f64::total_cmp);
        ConditionalCovarianceReport {
            s,
            dim,
            mean_op_norm: est.value,
            se: est.se,
            q50: stats::quantile_sorted(&sorted, 0.5),
            q90: stats::quantile_sorted(&sorted, 0.9),
            q99: stats::quantile_sorted(&sorted, 0.99),
            max_ratio_to_s: sorted.last().copied().unwrap_or(0.0) / s,
            min_ess,
        }
    }
}

fn block_op_norm(b: &Block) -> Result<f64> {
    match b {
        Block::One(c) => Ok(c.moments().1),
        _ => Ok(lambda_max(&block_moments(b)?.1)),
    }
}

/// ‖Cov(ρ_{s,y})‖_op; block-diagonal for products.
fn local_op_norm(blocks: &[Block], s: f64, y: &[f64]) -> Result<f64> {
    let mut off = 0;
    let mut best = 0.0f64;
    for b in blocks {
        let d = b.dim();
        let theta: Vec<f64> = y[off..off + d].iter().map(|v| v / s).collect();
        let (tb, _) = block_tilt(b, &theta, 1.0 / s)?;
        best = best.max(block_op_norm(&tb)?);
        off += d;
    }
    Ok(best)
}

fn weighted_op_norm(prior: &SampleBatch, w: &[f64]) -> f64 {
    let d = prior.dim;
    let mut mean = vec![0.0; d];
    for (x, wi) in prior.rows().zip(w) {
        for k in 0..d {
            mean[k] += wi * x[k];
        }
    }
    let mut cov = nalgebra::DMatrix::zeros(d, d);
    for (x, wi) in prior.rows().zip(w) {
        for a in 0..d {
            for b in 0..d {
                cov[(a, b)] += wi * (x[a] - mean[a]) * (x[b] - mean[b]);
            }
        }
    }
    lambda_max(&cov)
}

/// Mean of ‖A_s‖_op over sampled Y_s. Products of blocks with tilt
/// formulas are localized block by block; other bases of dim ≤ 3 use
/// importance weights on a prior batch.
pub fn conditional_cov_opnorm(base: &M, s: f64, n_outer: usize, seed: u64) -> Result<ConditionalCovarianceReport> {
    check_scale(s)?;
    let dim = base.dim();
    let blocks = base.blocks()?;
    let ys = sample_observations(base, s, n_outer, seed)?;
    let rows: Vec<&[f64]> = ys.rows().collect();
    if blocks.iter().all(|b| !matches!(b, Block::Other(_))) {
        let vals = rows.par_iter().map(|y| local_op_norm(&blocks, s, y)).collect::<Result<Vec<_>>>()?;
        return Ok(ConditionalCovarianceReport::from_values(s, dim, vals, None));
    }
    if dim > 3 {
        return Err(LcError::Unsupported("conditional covariance needs a product base or dim ≤ 3".into()));
    }
    let prior = prior_batch(base)?;
    let out: Vec<(f64, f64)> = rows
        .par_iter()
        .map(|y| {
            let (w, ess) = prior_weights(&prior, s, y);
            (weighted_op_norm(&prior, &w), ess)
        })
        .collect();
    let min_ess = out.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok(ConditionalCovarianceReport::from_values(s, dim, out.into_iter().map(|p| p.0).collect(), Some(min_ess)))
}

// ------------------------------------------------ exponential obstruction

/// Var(X₁ | X₁ + √s G₁) for X₁ = Y₁ − 1, Y₁ ~ Exp(1): s·v(√s − Y₁/√s − G₁),
/// v(x) = Var(g | g ≥ x).
pub fn expo_conditional_variance(s: f64, y1: f64, g1: f64) -> f64 {
    let r = s.sqrt();
    s * truncated_gaussian_variance(r - y1 / r - g1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpoOracleSummary {
    pub s: f64,
    pub mean: Estimate,
    pub q50: f64,
    pub q90: f64,
    pub q99: f64,
    /// Frequency of {Y₁ ≥ s, G₁ ≥ 0}.
    pub event_freq: f64,
    /// Smallest value / s on that event.
    pub event_min_ratio: f64,
}

fn expo_draws(n: usize, seed: u64, label: u64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    let chunks = n.div_ceil(CHUNK);
    for c in 0..chunks {
        let mut r = rng::stream(seed, label ^ c as u64);
        for _ in c * CHUNK..((c + 1) * CHUNK).min(n) {
            let y: f64 = Exp1.sample(&mut r);
            let g: f64 = StandardNormal.sample(&mut r);
            out.push((y, g));
        }
    }
    out
}

/// Distribution of the one-coordinate conditional variance.
pub fn expo_conditional_variance_oracle(s: f64, n_draws: usize, seed: u64) -> Result<ExpoOracleSummary> {
    check_scale(s)?;
    let draws = expo_draws(n_draws, seed, rng::label("expo-oracle"));
    let vals: Vec<f64> = draws.iter().map(|&(y, g)| expo_conditional_variance(s, y, g)).collect();
    let on_event: Vec<f64> =
        draws.iter().zip(&vals).filter(|((y, g), _)| *y >= s && *g >= 0.0).map(|(_, v)| v / s).collect();
    let mut sorted = vals.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(ExpoOracleSummary {
        s,
        mean: stats::batch_means(&vals),
        q50: stats::quantile_sorted(&sorted, 0.5),
        q90: stats::quantile_sorted(&sorted, 0.9),
        q99: stats::quantile_sorted(&sorted, 0.99),
        event_freq: on_event.len() as f64 / n_draws as f64,
        event_min_ratio: on_event.iter().cloned().fold(f64::INFINITY, f64::min),
    })
}

/// ‖Cov(X | X + √s G)‖_op for the product of `dim` copies of Exp(1) − 1,
/// as the max of `dim` independent one-coordinate draws per outer sample.
pub fn expo_max_oracle(s: f64, dim: usize, n_outer: usize, seed: u64) -> Result<ConditionalCovarianceReport> {
    check_scale(s)?;
    let vals: Vec<f64> = (0..n_outer)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed, rng::label("expo-max") ^ k as u64);
            let sq = s.sqrt();
            (0..dim)
                .map(|_| {
                    let y: f64 = Exp1.sample(&mut r);
                    let g: f64 = StandardNormal.sample(&mut r);
                    s * truncated_gaussian_variance(sq - y / sq - g)
                })
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(ConditionalCovarianceReport::from_values(s, dim, vals, None))
}

/// (1 + C_P/s)·√(s·E‖A_s‖_op): up to a universal factor, an upper bound for C_P.
pub fn localization_poincare_bound(cp: f64, s: f64, mean_op_norm: f64) -> f64 {
    (1.0 + cp / s) * (s * mean_op_norm).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::Rule1D;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_conditional_mean() {
        let g = M::std_gaussian(1);
        for &(s, y) in &[(0.5, 1.3), (2.0, -0.7), (10.0, 4.0)] {
            let q = q_s(&|x| x[0], &g, s, &[y]).unwrap();
            assert_relative_eq!(q.value, y / (1.0 + s), epsilon = 1e-12);
            let one = q_s(&|_| 1.0, &g, s, &[y]).unwrap();
            assert_relative_eq!(one.value, 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn large_s_forgets_the_observation() {
        let g = M::interval(0.0, 1.0);
        let q = q_s(&|x| (3.0 * x[0]).sin(), &g, 1e6, &[2.0]).unwrap();
        // E sin(3U) = (1 − cos 3)/3
        assert_relative_eq!(q.value, (1.0 - 3f64.cos()) / 3.0, epsilon = 1e-5);
    }

    #[test]
    fn local_density_integrates_to_one() {
        for base in [M::ShiftedExponential, M::interval(-1.0, 2.0), M::std_gaussian(1)] {
            let ld = LocalDensity::new(&base, 0.7, &[0.4]).unwrap();
            let pot = Potential::normalized(&base).unwrap();
            let (lo, hi) = match base {
                M::Gaussian { .. } => (-15.0, 15.0),
                M::ShiftedExponential => (-1.0, 15.0),
                _ => (-1.0, 2.0),
            };
            let mass = Rule1D::composite(lo, hi, 200, 20).integrate(|x| ld.log_density(&pot, &[x]).exp());
            assert_relative_eq!(mass, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn importance_sampling_path_agrees() {
        // a narrow tilt of a disk is out of reach of the body rule, so q_s
        // uses prior weights
        let base = M::ball(2, 1.0);
        let s = 0.02;
        let q = q_s(&|x| x[0], &base, s, &[0.3, 0.3]).unwrap();
        assert!(q.se > 0.0 && q.ess > 1000.0);
        let exact = disk_local_mean(s, [0.3, 0.3]);
        assert!((q.value - exact).abs() < 4.0 * q.se, "{} vs {exact}", q.value);
    }

    /// E x₁ under the unit-disk law tilted by e^{−|x − y|²/(2s)}, by
    /// composite polar quadrature.
    fn disk_local_mean(s: f64, y: [f64; 2]) -> f64 {
        let rr = Rule1D::composite(0.0, 1.0, 40, 20);
        let ra = Rule1D::composite(0.0, 2.0 * PI, 80, 20);
        let w = |x: f64, z: f64| (-((x - y[0]).powi(2) + (z - y[1]).powi(2)) / (2.0 * s)).exp();
        let num = rr.integrate(|r| ra.integrate(|a| r * r * a.cos() * w(r * a.cos(), r * a.sin())));
        let den = rr.integrate(|r| ra.integrate(|a| r * w(r * a.cos(), r * a.sin())));
        num / den
    }

    #[test]
    fn body_quadrature_path_is_exact() {
        let base = M::ball(2, 1.0);
        // the narrowest scale still handled by the body rule
        let s = (2.0 / BODY_RESOLUTION).powi(2);
        for (s, y) in [(1.0, [0.3, 0.3]), (s, [0.9, -0.2]), (s, [1.3, 0.4])] {
            let q = q_s(&|x| x[0], &base, s, &y).unwrap();
            assert_eq!(q.se, 0.0);
            assert_relative_eq!(q.value, disk_local_mean(s, y), max_relative = 1e-9);
        }
        // triangle: the tilt of the first coordinate against a fine Duffy rule
        let tri = M::simplex(2);
        let fine = Cubature::for_body(&ConvexBody::Simplex { dim: 2 }, 200).unwrap();
        let s = 0.04;
        let y = [0.2, 0.9];
        let mut c = fine.clone();
        reweight(&mut c, s, &y);
        let q = q_s(&|x| x[0], &tri, s, &y).unwrap();
        assert_eq!(q.se, 0.0);
        assert_relative_eq!(q.value, c.expect(|x| x[0]), max_relative = 1e-9);
    }

    #[test]
    fn mixture_identity_gaussian_and_interval() {
        let r = mixture_identity_check(&M::std_gaussian(1), 1.5, 20_000, 3).unwrap();
        assert!(r.passes(4.0), "{}", r.max_z);
        let r = mixture_identity_check(&M::interval(0.0, 1.0), 1.0, 20_000, 4).unwrap();
        assert!(r.passes(4.0), "{}", r.max_z);
        let r = mixture_identity_check(&M::std_gaussian(1), 1e-4, 100_000, 5).unwrap();
        assert!(r.passes(4.0), "{}", r.max_z);
    }

    #[test]
    fn gaussian_variance_decomposition() {
        let s = 0.8;
        let d = variance_decomposition(&M::std_gaussian(2), s, &|x| x[0], 40_000, 7).unwrap();
        let (el, vm) = gaussian_decomposition(s);
        assert_relative_eq!(d.expected_local.value, el, epsilon = 1e-10);
        assert!(d.variance_of_means.within(vm, 4.0));
        assert!(d.total.within(1.0, 4.0));
        assert!(d.balance_z.abs() < 4.0);
        assert!(d.lower_ok && d.upper_ok && d.sharp_upper_ok);
    }

    #[test]
    fn interval_decomposition_matches_quadrature() {
        let l = std::f64::consts::PI;
        let base = M::interval(0.0, l);
        let s = 1.0; // C_P of Uniform(0, π)
        let d = variance_decomposition(&base, s, &|x| x[0].cos(), 20_000, 11).unwrap();
        // outer integral over y of the local variance, weighted by (ρ * γ_s)(y)
        let rx = Rule1D::composite(0.0, l, 20, 20);
        let ry = Rule1D::composite(-8.0, l + 8.0, 60, 20);
        let gs = |u: f64| (-u * u / (2.0 * s)).exp() / (2.0 * PI * s).sqrt();
        let local = |y: f64| {
            let z = rx.integrate(|x| gs(x - y));
            let m1 = rx.integrate(|x| x.cos() * gs(x - y)) / z;
            let m2 = rx.integrate(|x| x.cos().powi(2) * gs(x - y)) / z;
            (z / l, m1, m2 - m1 * m1)
        };
        let el = ry.integrate(|y| {
            let (p, _, v) = local(y);
            p * v
        });
        let em = ry.integrate(|y| local(y).0 * local(y).1);
        let vm = ry.integrate(|y| local(y).0 * local(y).1.powi(2)) - em * em;
        assert!(d.total.within(0.5, 4.0));
        assert!(d.expected_local.within(el, 4.0));
        assert!(d.variance_of_means.within(vm, 4.0));
        assert_relative_eq!(el + vm, 0.5, epsilon = 1e-9);
        assert!(d.lower_ok && d.upper_ok && d.sharp_upper_ok);
    }

    #[test]
    fn gaussian_conditional_covariance() {
        let r = conditional_cov_opnorm(&M::std_gaussian(5), 3.0, 200, 1).unwrap();
        assert_relative_eq!(r.mean_op_norm, 0.75, epsilon = 1e-12);
        assert!(r.se < 1e-12);
        let rows = r.csv_row();
        assert_eq!(rows[1], "5");
    }

    #[test]
    fn local_covariance_bounded_by_s() {
        for &s in &[0.1, 1.0, 5.0] {
            let r = conditional_cov_opnorm(&M::exp_product(8), s, 400, 2).unwrap();
            assert!(r.max_ratio_to_s <= 1.0 + 1e-10, "{s}: {}", r.max_ratio_to_s);
            let r = conditional_cov_opnorm(&M::simplex(2), s, 200, 2).unwrap();
            assert!(r.max_ratio_to_s <= 1.0 + 1e-10);
            assert!(r.min_ess.unwrap() > MIN_ESS);
        }
    }

    #[test]
    fn nested_route_matches_one_dimensional_oracle() {
        for &(dim, s) in &[(16usize, 2.0), (64, 3.0)] {
            let a = conditional_cov_opnorm(&M::exp_product(dim), s, 4000, 8).unwrap();
            let b = expo_max_oracle(s, dim, 4000, 9).unwrap();
            let se = (a.se * a.se + b.se * b.se).sqrt();
            assert!((a.mean_op_norm - b.mean_op_norm).abs() < 4.0 * se, "{a:?} {b:?}");
        }
    }

    #[test]
    fn oracle_event_and_asymptotics() {
        let s = 2.0;
        let o = expo_conditional_variance_oracle(s, 400_000, 3).unwrap();
        let p = 0.5 * (-s as f64).exp();
        assert!((o.event_freq - p).abs() < 4.0 * (p * (1.0 - p) / 400_000.0).sqrt());
        assert!(o.event_min_ratio >= 1.0 - 2.0 / PI - 1e-12);
        // v(x) ~ x⁻² gives s·v(√s) → 1
        assert_relative_eq!(expo_conditional_variance(400.0, 0.0, 0.0), 1.0, epsilon = 0.02);
    }

    #[test]
    fn localization_bound_on_catalog() {
        for (m, s) in [(M::std_gaussian(3), 1.0), (M::exp_product(4), 4.0), (M::cube(3, 12f64.sqrt()), 2.0)] {
            let cp = m.exact_moments().unwrap().cp.unwrap();
            let r = conditional_cov_opnorm(&m, s, 500, 4).unwrap();
            assert!(cp <= 3.0 * localization_poincare_bound(cp, s, r.mean_op_norm));
        }
    }
}
