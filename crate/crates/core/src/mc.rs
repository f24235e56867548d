//! Sampling engine and Monte Carlo estimators.

use crate::error::{LcError, Result};
use crate::linalg::{dot, from_rows, helmert, op_norm, to_rows};
use crate::measures::{Block, Canon1D, ConvexBody, LogConcaveMeasure as M, Potential, Prim1};
use crate::rng::{self, LabRng, CHUNK};
use crate::special::norm_cdf;
use crate::stats::{self, Estimate};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::{Read, Write};
use std::path::Path;

/// How a batch was produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Method {
    Direct,
    Ula { step: f64, burn_in: usize },
    Mala { step: f64, burn_in: usize },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Ula { .. } => "ula",
            Method::Mala { .. } => "mala",
        }
    }
}

/// Seeded matrix of samples, one row per draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub measure_id: String,
    pub dim: usize,
    pub n: usize,
    pub seed: u64,
    pub method: Method,
    /// Row-major, n × dim.
    pub data: Vec<f64>,
}

impl SampleBatch {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim.max(1))
    }

    pub fn step_size(&self) -> Option<f64> {
        match self.method {
            Method::Ula { step, .. } | Method::Mala { step, .. } => Some(step),
            Method::Direct => None,
        }
    }

    pub fn burn_in(&self) -> Option<usize> {
        match self.method {
            Method::Ula { burn_in, .. } | Method::Mala { burn_in, .. } => Some(burn_in),
            Method::Direct => None,
        }
    }

    /// SHA-256 over the binary encoding, hex.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.encode());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Binary layout: "LCL1", dim, n, seed (u64 LE), then f64 LE data.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(28 + 8 * self.data.len());
        out.extend_from_slice(b"LCL1");
        out.extend_from_slice(&(self.dim as u64).to_le_bytes());
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn write_binary(&self, path: &Path) -> std::io::Result<()> {
        std::fs::File::create(path)?.write_all(&self.encode())
    }

    /// Reads a binary batch; provenance beyond the header is not stored.
    pub fn read_binary(path: &Path) -> std::io::Result<SampleBatch> {
        let mut buf = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut buf)?;
        let bad = || std::io::Error::new(std::io::ErrorKind::InvalidData, "not an LCL1 batch");
        if buf.len() < 28 || &buf[..4] != b"LCL1" {
            return Err(bad());
        }
        let word = |i: usize| u64::from_le_bytes(buf[i..i + 8].try_into().unwrap());
        let (dim, n, seed) = (word(4) as usize, word(12) as usize, word(20));
        if buf.len() != 28 + 8 * dim * n {
            return Err(bad());
        }
        let data = buf[28..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(SampleBatch { measure_id: String::new(), dim, n, seed, method: Method::Direct, data })
    }
}

/// Short identifier of a measure: first 16 hex digits of its JSON hash.
pub fn measure_id(m: &M) -> String {
    let d = Sha256::digest(m.to_json().as_bytes());
    d.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

// ---------------------------------------------------------------- direct

fn normal(rng: &mut LabRng) -> f64 {
    StandardNormal.sample(rng)
}

/// Exact draw from N(0,1) restricted to [lo, hi].
pub fn truncated_std_normal(lo: f64, hi: f64, rng: &mut LabRng) -> f64 {
    if lo > 0.0 || hi < 0.0 {
        let (a, b, sign) = if lo > 0.0 { (lo, hi, 1.0) } else { (-hi, -lo, -1.0) };
        // one-sided region [a, b] with a > 0
        if b - a < 1.0 / a.max(1e-300) && b.is_finite() {
            loop {
                let z = a + (b - a) * rng.random::<f64>();
                if rng.random::<f64>().ln() <= 0.5 * (a * a - z * z) {
                    return sign * z;
                }
            }
        }
        let lam = 0.5 * (a + (a * a + 4.0).sqrt());
        loop {
            let e: f64 = Exp1.sample(rng);
            let z = a + e / lam;
            if z > b {
                continue;
            }
            if rng.random::<f64>().ln() <= -0.5 * (z - lam) * (z - lam) {
                return sign * z;
            }
        }
    }
    if hi - lo >= 2.5 {
        loop {
            let z = normal(rng);
            if z >= lo && z <= hi {
                return z;
            }
        }
    }
    loop {
        let z = lo + (hi - lo) * rng.random::<f64>();
        if rng.random::<f64>().ln() <= -0.5 * z * z {
            return z;
        }
    }
}

fn sample_canon(c: &Canon1D, rng: &mut LabRng) -> f64 {
    let x = match c.prim {
        Prim1::Normal { .. } => {
            let (m, v, _) = canon_x_moments(c);
            m + v.sqrt() * normal(rng)
        }
        Prim1::ShiftedExp => {
            if c.t == 0.0 {
                let e: f64 = Exp1.sample(rng);
                -1.0 + e / (1.0 - c.theta)
            } else {
                let s = 1.0 / c.t.sqrt();
                let mu = (c.theta - 1.0) / c.t;
                mu + s * truncated_std_normal((-1.0 - mu) / s, f64::INFINITY, rng)
            }
        }
        Prim1::Uniform { a, b } => {
            if c.t == 0.0 {
                let u: f64 = rng.random();
                let z = c.theta * (b - a);
                if z.abs() < 1e-12 {
                    a + u * (b - a)
                } else if z > 0.0 {
                    b + (u + (1.0 - u) * (-z).exp()).ln() / c.theta
                } else {
                    a + (1.0 - u + u * z.exp()).ln() / c.theta
                }
            } else {
                let s = 1.0 / c.t.sqrt();
                let mu = c.theta / c.t;
                mu + s * truncated_std_normal((a - mu) / s, (b - mu) / s, rng)
            }
        }
    };
    c.scale * x + c.shift
}

fn canon_x_moments(c: &Canon1D) -> (f64, f64, f64) {
    let m = crate::measures::canon::prim_tilt(&c.prim, c.theta, c.t).expect("integrable");
    (m.mean, m.var, m.third)
}

#[derive(Debug, Clone)]
enum Sampler {
    One(Canon1D),
    Gauss { mean: DVector<f64>, chol: DMatrix<f64> },
    Ball { dim: usize, radius: f64 },
    Simplex { dim: usize, h: DMatrix<f64> },
    BoxReject { body: ConvexBody, lo: Vec<f64>, hi: Vec<f64> },
    Pair { theta: [f64; 2], t: f64 },
    Blocks(Vec<(usize, Sampler)>),
    TiltReject { base: Box<Sampler>, theta: Vec<f64>, t: f64 },
    Affine { base: Box<Sampler>, a: DMatrix<f64>, shift: DVector<f64> },
}

fn compile(m: &M) -> Result<Sampler> {
    if let Some(c) = m.as_canon1d()? {
        return Ok(Sampler::One(c));
    }
    Ok(match m {
        M::Gaussian { mean, cov } => Sampler::Gauss {
            mean: DVector::from_vec(mean.clone()),
            chol: from_rows(cov).cholesky().ok_or(LcError::NotPsd)?.l(),
        },
        M::UniformBody { body } => match body {
            ConvexBody::Cube { dim, side } => {
                Sampler::Blocks(vec![(1, Sampler::One(Canon1D::new(Prim1::Uniform { a: 0.0, b: *side }))); *dim])
            }
            ConvexBody::Ball { dim, radius } => Sampler::Ball { dim: *dim, radius: *radius },
            ConvexBody::Simplex { dim } => Sampler::Simplex { dim: *dim, h: helmert(*dim) },
            ConvexBody::HalfspaceIntersection { .. } => {
                let (lo, hi) = body.bounding_box();
                Sampler::BoxReject { body: body.clone(), lo, hi }
            }
        },
        M::ComplexExponential { n } => Sampler::Blocks(vec![(2, Sampler::Pair { theta: [0.0; 2], t: 0.0 }); *n]),
        M::Product { factors } => {
            Sampler::Blocks(factors.iter().map(|f| Ok((f.dim(), compile(f)?))).collect::<Result<_>>()?)
        }
        M::GaussianTilt { base, theta, t } => {
            let blocks = m.blocks()?;
            if blocks.iter().all(|b| !matches!(b, Block::Other(_))) {
                Sampler::Blocks(blocks.iter().map(|b| Ok((b.dim(), compile_block(b)?))).collect::<Result<_>>()?)
            } else if *t > 0.0 {
                Sampler::TiltReject { base: Box::new(compile(base)?), theta: theta.clone(), t: *t }
            } else {
                return Err(LcError::Unsupported("direct sampling of this tilt".into()));
            }
        }
        M::Affine { base, matrix, shift } => Sampler::Affine {
            base: Box::new(compile(base)?),
            a: from_rows(matrix),
            shift: DVector::from_vec(shift.clone()),
        },
        M::Interval { .. } | M::ShiftedExponential => unreachable!("one-dimensional kinds are canonical"),
    })
}

fn compile_block(b: &Block) -> Result<Sampler> {
    Ok(match b {
        Block::One(c) => Sampler::One(*c),
        Block::Pair { theta, t } => Sampler::Pair { theta: *theta, t: *t },
        Block::Gauss { mean, cov } => {
            Sampler::Gauss { mean: mean.clone(), chol: cov.clone().cholesky().ok_or(LcError::NotPsd)?.l() }
        }
        Block::Other(m) => compile(m)?,
    })
}

const MAX_REJECT: usize = 10_000_000;

fn draw(s: &Sampler, rng: &mut LabRng, out: &mut [f64]) {
    match s {
        Sampler::One(c) => out[0] = sample_canon(c, rng),
        Sampler::Gauss { mean, chol } => {
            let z = DVector::from_iterator(mean.len(), (0..mean.len()).map(|_| normal(rng)));
            let x = mean + chol * z;
            out.copy_from_slice(x.as_slice());
        }
        Sampler::Ball { dim, radius } => {
            let mut r2 = 0.0;
            for v in out.iter_mut() {
                *v = normal(rng);
                r2 += *v * *v;
            }
            let u: f64 = rng.random();
            let scale = radius * u.powf(1.0 / *dim as f64) / r2.sqrt();
            out.iter_mut().for_each(|v| *v *= scale);
        }
        Sampler::Simplex { dim, h } => {
            let e: Vec<f64> = (0..=*dim).map(|_| Exp1.sample(rng)).collect();
            let s: f64 = e.iter().sum();
            let c = 1.0 / (*dim as f64 + 1.0);
            for j in 0..*dim {
                out[j] = (0..=*dim).map(|i| h[(i, j)] * (e[i] / s - c)).sum();
            }
        }
        Sampler::BoxReject { body, lo, hi } => {
            for _ in 0..MAX_REJECT {
                for i in 0..out.len() {
                    out[i] = lo[i] + (hi[i] - lo[i]) * rng.random::<f64>();
                }
                if body.contains(out) {
                    return;
                }
            }
            panic!("rejection sampler exhausted");
        }
        Sampler::Pair { theta, t } => draw_pair(*theta, *t, rng, out),
        Sampler::Blocks(parts) => {
            let mut off = 0;
            for (d, p) in parts {
                draw(p, rng, &mut out[off..off + d]);
                off += d;
            }
        }
        Sampler::TiltReject { base, theta, t } => {
            let shift = dot(theta, theta) / (2.0 * t);
            for _ in 0..MAX_REJECT {
                draw(base, rng, out);
                let la = dot(out, theta) - 0.5 * t * dot(out, out) - shift;
                if rng.random::<f64>().ln() <= la {
                    return;
                }
            }
            panic!("rejection sampler exhausted");
        }
        Sampler::Affine { base, a, shift } => {
            let mut z = vec![0.0; a.ncols()];
            draw(base, rng, &mut z);
            let y = a * DVector::from_vec(z) + shift;
            out.copy_from_slice(y.as_slice());
        }
    }
}

/// e^{−|z| + θ·z − t|z|²/2} on ℝ²: proposal with radial rate 1 − |θ| when
/// |θ| < 1, otherwise the untilted pair with a Gaussian-tilt acceptance.
fn draw_pair(theta: [f64; 2], t: f64, rng: &mut LabRng, out: &mut [f64]) {
    let a = theta[0].hypot(theta[1]);
    let radial = Gamma::new(2.0, 1.0).unwrap();
    for _ in 0..MAX_REJECT {
        let r: f64 = radial.sample(rng);
        let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
        let (x, y, la) = if a < 1.0 {
            let r = r / (1.0 - a);
            let (x, y) = (r * phi.cos(), r * phi.sin());
            (x, y, theta[0] * x + theta[1] * y - a * r - 0.5 * t * r * r)
        } else {
            let (x, y) = (r * phi.cos(), r * phi.sin());
            (x, y, theta[0] * x + theta[1] * y - 0.5 * t * r * r - a * a / (2.0 * t))
        };
        if rng.random::<f64>().ln() <= la {
            out[0] = x;
            out[1] = y;
            return;
        }
    }
    panic!("rejection sampler exhausted");
}

/// Draws `n` samples. Direct sampling is exact; ULA/MALA run one chain per
/// block of `CHUNK` rows, started at the mean, and keep every post-burn-in step.
pub fn sample(m: &M, n: usize, seed: u64, method: Method) -> Result<SampleBatch> {
    let dim = m.dim();
    let mut data = vec![0.0; n * dim];
    match method {
        Method::Direct => {
            let s = compile(m)?;
            data.par_chunks_mut(CHUNK * dim.max(1)).enumerate().for_each(|(c, chunk)| {
                let mut r = rng::stream(seed, c as u64);
                for row in chunk.chunks_exact_mut(dim) {
                    draw(&s, &mut r, row);
                }
            });
        }
        Method::Ula { step, burn_in } | Method::Mala { step, burn_in } => {
            if has_boundary(m) {
                return Err(LcError::UseDirectSampler);
            }
            let pot = Potential::new(m);
            let start = m.moments().map(|(mu, _)| mu).unwrap_or_else(|_| vec![0.0; dim]);
            let mala = matches!(method, Method::Mala { .. });
            data.par_chunks_mut(CHUNK * dim.max(1)).enumerate().for_each(|(c, chunk)| {
                let mut r = rng::stream(seed, c as u64);
                let mut x = start.clone();
                let mut lp = pot.eval(&x);
                let mut g = pot.grad(&x).unwrap_or_else(|| vec![0.0; dim]);
                let rows = chunk.len() / dim;
                for k in 0..burn_in + rows {
                    let y: Vec<f64> = (0..dim)
                        .map(|i| x[i] - step * g[i] + (2.0 * step).sqrt() * normal(&mut r))
                        .collect();
                    let gy = pot.grad(&y);
                    let accept = match (&gy, mala) {
                        (None, _) => false,
                        (Some(_), false) => true,
                        (Some(gy), true) => {
                            let ly = pot.eval(&y);
                            let fwd: f64 = (0..dim).map(|i| (y[i] - x[i] + step * g[i]).powi(2)).sum();
                            let bwd: f64 = (0..dim).map(|i| (x[i] - y[i] + step * gy[i]).powi(2)).sum();
                            let log_a = lp - ly + (fwd - bwd) / (4.0 * step);
                            r.random::<f64>().ln() < log_a
                        }
                    };
                    if accept {
                        lp = pot.eval(&y);
                        x = y;
                        g = gy.unwrap();
                    }
                    if k >= burn_in {
                        let row = k - burn_in;
                        chunk[row * dim..(row + 1) * dim].copy_from_slice(&x);
                    }
                }
            });
        }
    }
    Ok(SampleBatch { measure_id: measure_id(m), dim, n, seed, method, data })
}

fn has_boundary(m: &M) -> bool {
    match m {
        M::Interval { .. } | M::ShiftedExponential | M::UniformBody { .. } => true,
        M::Gaussian { .. } | M::ComplexExponential { .. } => false,
        M::Product { factors } => factors.iter().any(has_boundary),
        M::GaussianTilt { base, .. } | M::Affine { base, .. } => has_boundary(base),
    }
}

// ------------------------------------------------------------- summaries

/// Moment summary of a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSummary {
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
    pub op_norm: f64,
    pub trace: f64,
    /// Var(|X|²)/dim.
    pub thin_shell: f64,
    pub se_mean: Vec<f64>,
    pub se_cov: Vec<Vec<f64>>,
    pub se_op_norm: f64,
    pub se_thin_shell: f64,
}

#[derive(Clone)]
struct Acc {
    n: f64,
    s: DVector<f64>,
    ss: DMatrix<f64>,
    q: f64,
    qq: f64,
}

impl Acc {
    fn new(d: usize) -> Self {
        Acc { n: 0.0, s: DVector::zeros(d), ss: DMatrix::zeros(d, d), q: 0.0, qq: 0.0 }
    }

    fn merge(mut self, o: &Acc) -> Acc {
        self.n += o.n;
        self.s += &o.s;
        self.ss += &o.ss;
        self.q += o.q;
        self.qq += o.qq;
        self
    }

    fn finish(&self) -> (DVector<f64>, DMatrix<f64>, f64) {
        let mean = &self.s / self.n;
        let cov = (&self.ss - &mean * mean.transpose() * self.n) / (self.n - 1.0);
        let mq = self.q / self.n;
        let vq = (self.qq - self.n * mq * mq) / (self.n - 1.0);
        (mean, cov, vq)
    }
}

/// Unbiased covariance, thin-shell statistic, and batch-means standard errors.
pub fn covariance_summary(b: &SampleBatch) -> CovarianceSummary {
    let d = b.dim;
    let nb = stats::BATCHES.min(b.n / 2).max(2);
    let size = b.n / nb;
    let accs: Vec<Acc> = (0..nb)
        .into_par_iter()
        .map(|k| {
            let mut a = Acc::new(d);
            let hi = if k + 1 == nb { b.n } else { (k + 1) * size };
            // rank-one updates via a row buffer for speed
            let rows = hi - k * size;
            let block = DMatrix::from_row_slice(rows, d, &b.data[k * size * d..hi * d]);
            a.n = rows as f64;
            a.s = block.row_sum().transpose();
            a.ss = block.transpose() * &block;
            for x in block.row_iter() {
                let q = x.norm_squared();
                a.q += q;
                a.qq += q * q;
            }
            a
        })
        .collect();
    let total = accs.iter().fold(Acc::new(d), |a, o| a.merge(o));
    let (mean, cov, vq) = total.finish();
    let per: Vec<(DVector<f64>, DMatrix<f64>, f64)> = accs.iter().map(|a| a.finish()).collect();
    let sd = |vals: Vec<f64>| (stats::variance(&vals) / vals.len() as f64).sqrt();
    let se_mean = (0..d).map(|i| sd(per.iter().map(|p| p.0[i]).collect())).collect();
    let se_cov = (0..d).map(|i| (0..d).map(|j| sd(per.iter().map(|p| p.1[(i, j)]).collect())).collect()).collect();
    let se_op = sd(per.iter().map(|p| op_norm(&p.1)).collect());
    let se_ts = sd(per.iter().map(|p| p.2 / d as f64).collect());
    CovarianceSummary {
        mean: mean.iter().copied().collect(),
        op_norm: op_norm(&cov),
        trace: cov.trace(),
        cov: to_rows(&cov),
        thin_shell: vq / d as f64,
        se_mean,
        se_cov,
        se_op_norm: se_op,
        se_thin_shell: se_ts,
    }
}

/// Variance of a 1-Lipschitz functional, with a spot check of the Lipschitz
/// property on 100 random pairs of rows.
pub fn lipschitz_variance(b: &SampleBatch, f: &(dyn Fn(&[f64]) -> f64 + Sync), seed: u64) -> Result<Estimate> {
    let mut r = rng::stream(seed, rng::label("lipschitz"));
    for _ in 0..100 {
        let (i, j) = (r.random_range(0..b.n), r.random_range(0..b.n));
        let (x, y) = (b.row(i), b.row(j));
        let dist = x.iter().zip(y).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt();
        let df = (f(x) - f(y)).abs();
        if df > dist * (1.0 + 1e-9) + 1e-12 {
            return Err(LcError::NotLipschitz(df / dist));
        }
    }
    let vals: Vec<f64> = b.rows().map(f).collect();
    Ok(stats::batch_statistic(vals.len(), |rg| stats::variance(&vals[rg])))
}

// -------------------------------------------------------------- couplings

/// Distance trajectory of two Euler chains sharing their noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingTrace {
    pub times: Vec<f64>,
    pub distance: Vec<f64>,
    /// max_t |X^x_t − X^y_t| − |x − y|.
    pub max_excess: f64,
}

pub type Drift<'a> = &'a (dyn Fn(&[f64]) -> Option<Vec<f64>> + Sync);

/// Gradient of a measure's potential as a drift function.
pub fn potential_drift(m: &M) -> impl Fn(&[f64]) -> Option<Vec<f64>> + Sync {
    let p = Potential::new(m);
    move |x: &[f64]| p.grad(x)
}

pub fn parallel_coupling(grad: Drift, x: &[f64], y: &[f64], t_end: f64, step: f64, seed: u64) -> Result<CouplingTrace> {
    let mut r = rng::stream(seed, rng::label("parallel"));
    let (mut a, mut b) = (x.to_vec(), y.to_vec());
    let d0 = dist(&a, &b);
    let steps = (t_end / step).round() as usize;
    let mut times = vec![0.0];
    let mut distance = vec![d0];
    for k in 0..steps {
        let ga = grad(&a).ok_or(LcError::UseDirectSampler)?;
        let gb = grad(&b).ok_or(LcError::UseDirectSampler)?;
        for i in 0..a.len() {
            let xi = (2.0 * step).sqrt() * normal(&mut r);
            a[i] += -step * ga[i] + xi;
            b[i] += -step * gb[i] + xi;
        }
        times.push((k + 1) as f64 * step);
        distance.push(dist(&a, &b));
    }
    let max_excess = distance.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)) - d0;
    Ok(CouplingTrace { times, distance, max_excess })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// Ψ(r) = P(|g| ≤ r).
pub fn psi(r: f64) -> f64 {
    2.0 * norm_cdf(r) - 1.0
}

/// Non-meeting probability estimate for the mirror coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeetingEstimate {
    pub p_not_met: f64,
    pub se: f64,
    pub wilson: (f64, f64),
    pub bound: f64,
}

impl MeetingEstimate {
    pub fn within_bound(&self) -> bool {
        self.p_not_met <= self.bound + 3.0 * self.se
    }
}

/// Mirror coupling with Euler steps; the chains are declared to meet once the
/// difference projected on the previous direction changes sign.
pub fn mirror_coupling_meeting(
    grad: Drift,
    x: &[f64],
    y: &[f64],
    t_end: f64,
    step: f64,
    trials: usize,
    seed: u64,
) -> Result<MeetingEstimate> {
    let steps = (t_end / step).round() as usize;
    let d = x.len();
    let outcomes: Vec<Option<bool>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed, k as u64);
            let (mut a, mut b) = (x.to_vec(), y.to_vec());
            if dist(&a, &b) == 0.0 {
                return Some(true);
            }
            for _ in 0..steps {
                let diff: Vec<f64> = (0..d).map(|i| a[i] - b[i]).collect();
                let nd = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
                let v: Vec<f64> = diff.iter().map(|u| u / nd).collect();
                let xi: Vec<f64> = (0..d).map(|_| normal(&mut r)).collect();
                let proj = dot(&v, &xi);
                let ga = grad(&a)?;
                let gb = grad(&b)?;
                let s = (2.0 * step).sqrt();
                for i in 0..d {
                    a[i] += -step * ga[i] + s * xi[i];
                    b[i] += -step * gb[i] + s * (xi[i] - 2.0 * proj * v[i]);
                }
                let along: f64 = (0..d).map(|i| (a[i] - b[i]) * v[i]).sum();
                if along <= 0.0 {
                    return Some(true);
                }
            }
            Some(false)
        })
        .collect();
    if outcomes.iter().any(|o| o.is_none()) {
        return Err(LcError::UseDirectSampler);
    }
    let not_met = outcomes.iter().filter(|o| **o == Some(false)).count();
    let p = not_met as f64 / trials as f64;
    Ok(MeetingEstimate {
        p_not_met: p,
        se: (p * (1.0 - p) / trials as f64).sqrt().max(1.0 / trials as f64),
        wilson: stats::wilson(not_met, trials, 1.96),
        bound: psi(dist(x, y) / (2.0 * (2.0 * t_end).sqrt())),
    })
}

// ----------------------------------------------------------- concentration

/// Fixed net of 50 unit directions, used with both signs.
pub fn direction_net(dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng::stream(seed, rng::label("direction-net"));
    let mut out = Vec::with_capacity(100);
    if dim == 1 {
        return vec![vec![1.0], vec![-1.0]];
    }
    for k in 0..50 {
        let mut u: Vec<f64> = (0..dim).map(|_| normal(&mut r)).collect();
        if k < dim.min(50) {
            u = (0..dim).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
        }
        let nu = dot(&u, &u).sqrt();
        u.iter_mut().for_each(|v| *v /= nu);
        out.push(u.iter().map(|v| -v).collect());
        out.push(u);
    }
    out
}

/// Half-space lower estimate of α(r) = sup{1 − μ(S_r) : μ(S) ≥ 1/2}.
pub fn concentration_function(m: &M, radii: &[f64], n: usize, seed: u64) -> Result<Vec<Estimate>> {
    let batch = sample(m, n, seed, Method::Direct)?;
    let net = direction_net(m.dim(), seed);
    let per_dir: Vec<Vec<f64>> = net
        .par_iter()
        .map(|u| {
            let mut p: Vec<f64> = batch.rows().map(|x| dot(x, u)).collect();
            p.sort_by(f64::total_cmp);
            let med = stats::quantile_sorted(&p, 0.5);
            radii
                .iter()
                .map(|r| {
                    let thr = med + r;
                    let idx = p.partition_point(|v| *v <= thr);
                    (p.len() - idx) as f64 / p.len() as f64
                })
                .collect()
        })
        .collect();
    Ok((0..radii.len())
        .map(|k| {
            let v = per_dir.iter().map(|d| d[k]).fold(0.0, f64::max);
            Estimate::new(v, (v * (1.0 - v) / n as f64).sqrt())
        })
        .collect())
}

/// Empirical P(|X| ≥ r).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub r: f64,
    pub p: f64,
    pub count: usize,
    pub upper: f64,
    /// Fewer than 30 exceedances: only the Wilson upper bound is informative.
    pub widened: bool,
}

pub fn paouris_tail(m: &M, r_values: &[f64], n: usize, seed: u64) -> Result<Vec<TailEstimate>> {
    let batch = sample(m, n, seed, Method::Direct)?;
    let norms: Vec<f64> = batch.rows().map(|x| dot(x, x).sqrt()).collect();
    Ok(r_values
        .iter()
        .map(|&r| {
            let count = norms.iter().filter(|v| **v >= r).count();
            TailEstimate {
                r,
                p: count as f64 / n as f64,
                count,
                upper: stats::wilson(count, n, 3.0).1,
                widened: count < 30,
            }
        })
        .collect())
}
