//! Trace inequalities, the matrix-exponential Hessian bound, the soft-max
//! eigenvalue proxy and third-moment tensor bounds.

use crate::error::{LcError, Result};
use crate::linalg::{lambda_max, op_norm, sym_apply, sym_eigen, to_rows};
use crate::mc::SampleBatch;
use crate::rng::LabRng;
use crate::stats::{self, Estimate};
use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

fn gaussian_matrix(n: usize, rng: &mut LabRng) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng))
}

/// K = G Gᵀ / n.
pub fn wishart(n: usize, rng: &mut LabRng) -> DMatrix<f64> {
    let g = gaussian_matrix(n, rng);
    &g * g.transpose() / n as f64
}

/// H = (G + Gᵀ)/2.
pub fn sym_gaussian(n: usize, rng: &mut LabRng) -> DMatrix<f64> {
    let g = gaussian_matrix(n, rng);
    (&g + g.transpose()) * 0.5
}

/// Tr(K^{α+β}H²) − Tr(K^α H K^β H).
pub fn trace_inequality_check(k: &DMatrix<f64>, h: &DMatrix<f64>, alpha: f64, beta: f64) -> Result<f64> {
    let (vals, _) = sym_eigen(k);
    let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if vals[0] < -1e-12 * scale.max(1.0) {
        return Err(LcError::NotPsd);
    }
    let pow = |p: f64| sym_apply(k, |v| v.max(0.0).powf(p));
    let (ka, kb, kab) = (pow(alpha), pow(beta), pow(alpha + beta));
    let lhs = (&ka * h * &kb * h).trace();
    let rhs = (&kab * h * h).trace();
    Ok(rhs - lhs)
}

/// Relative slack of a trace-inequality draw: slack / max(|RHS|, tiny).
pub fn trace_inequality_relative(k: &DMatrix<f64>, h: &DMatrix<f64>, alpha: f64, beta: f64) -> Result<f64> {
    let s = trace_inequality_check(k, h, alpha, beta)?;
    let kab = sym_apply(k, |v| v.max(0.0).powf(alpha + beta));
    Ok(s / (&kab * h * h).trace().abs().max(1e-300))
}

fn tr_exp(a: &DMatrix<f64>) -> f64 {
    sym_eigen(a).0.iter().map(|v| v.exp()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpHessianReport {
    /// ∇²φ(A)(H, H) by Richardson-extrapolated central differences.
    pub form: f64,
    /// Tr(e^A H²).
    pub bound: f64,
    /// (bound − form)/bound.
    pub slack_rel: f64,
}

/// Checks ∇²φ(A)(H,H) ≤ Tr(e^A H²) for φ(A) = Tr e^A.
pub fn exp_trace_hessian_check(a: &DMatrix<f64>, h: &DMatrix<f64>) -> ExpHessianReport {
    // shift by λ_max: both sides scale by the same factor
    let c = lambda_max(a);
    let a0 = a - DMatrix::identity(a.nrows(), a.ncols()) * c;
    let second = |s: f64| (tr_exp(&(&a0 + h * s)) - 2.0 * tr_exp(&a0) + tr_exp(&(&a0 - h * s))) / (s * s);
    // ‖sH‖_op = 1e-3 balances Richardson truncation (s⁴) against rounding (ε/s²)
    let step = 1e-3 / op_norm(h).max(1e-300);
    let d1 = second(step);
    let d2 = second(step / 2.0);
    let form0 = (4.0 * d2 - d1) / 3.0;
    let bound0 = (sym_apply(&a0, f64::exp) * h * h).trace();
    let f = c.exp();
    ExpHessianReport { form: form0 * f, bound: bound0 * f, slack_rel: (bound0 - form0) / bound0.abs().max(1e-300) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftmaxReport {
    pub h: f64,
    pub lambda_max: f64,
    /// λ_max + ln n / β.
    pub upper: f64,
    pub holds: bool,
}

/// h_β(M) = (1/β) ln Tr e^{βM}, evaluated with a shift by λ_max.
pub fn softmax_proxy(m: &DMatrix<f64>, beta: f64) -> Result<SoftmaxReport> {
    if beta <= 0.0 {
        return Err(LcError::InvalidArgument("beta must be positive".into()));
    }
    let (vals, _) = sym_eigen(m);
    let top = *vals.last().unwrap();
    let s: f64 = vals.iter().map(|v| (beta * (v - top)).exp()).sum();
    let h = top + s.ln() / beta;
    let upper = top + (vals.len() as f64).ln() / beta;
    Ok(SoftmaxReport { h, lambda_max: top, upper, holds: top <= h && h <= upper })
}

/// H_i = E X_i X⊗X for the centred rows of a batch.
pub fn third_moment_tensor(rows: &[&[f64]]) -> Vec<DMatrix<f64>> {
    let d = rows[0].len();
    let n = rows.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let mut h = vec![DMatrix::zeros(d, d); d];
    for r in rows {
        let x = DVector::from_iterator(d, r.iter().zip(&mean).map(|(a, m)| a - m));
        let outer = &x * x.transpose();
        for i in 0..d {
            h[i] += &outer * (x[i] / n);
        }
    }
    h
}

/// ‖Σ_i H_i²‖_op.
pub fn kappa(h: &[DMatrix<f64>]) -> f64 {
    let d = h[0].nrows();
    op_norm(&h.iter().fold(DMatrix::zeros(d, d), |acc, m| acc + m * m))
}

/// max over a direction net of ‖Σ u_i H_i‖_op.
pub fn kappa2(h: &[DMatrix<f64>], seed: u64) -> f64 {
    let d = h[0].nrows();
    crate::mc::direction_net(d, seed)
        .iter()
        .map(|u| op_norm(&h.iter().zip(u).fold(DMatrix::zeros(d, d), |acc, (m, ui)| acc + m * *ui)))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThirdTensorReport {
    pub kappa: Estimate,
    pub kappa2: f64,
    pub cov_op: f64,
    /// kappa2 / ‖Cov‖^{3/2}; reported only.
    pub kappa2_ratio: f64,
    /// 4·C_P·‖Cov‖², when C_P is known.
    pub bound: Option<f64>,
    pub holds: Option<bool>,
}

pub fn third_tensor_bounds(b: &SampleBatch, cp: Option<f64>, seed: u64) -> ThirdTensorReport {
    let rows: Vec<&[f64]> = b.rows().collect();
    let h = third_moment_tensor(&rows);
    let k = stats::batch_statistic(rows.len(), |r| kappa(&third_moment_tensor(&rows[r])));
    let cov_op = crate::mc::covariance_summary(b).op_norm;
    let k2 = kappa2(&h, seed);
    let bound = cp.map(|c| 4.0 * c * cov_op * cov_op);
    ThirdTensorReport {
        kappa: Estimate::new(kappa(&h), k.se),
        kappa2: k2,
        cov_op,
        kappa2_ratio: k2 / cov_op.powf(1.5),
        bound,
        holds: bound.map(|bd| kappa(&h) <= bd + 4.0 * k.se),
    }
}

/// JSON record of a failing matrix pair, for replay.
pub fn dump_case(k: &DMatrix<f64>, h: &DMatrix<f64>) -> String {
    serde_json::json!({ "k": to_rows(k), "h": to_rows(h) }).to_string()
}
