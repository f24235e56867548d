//! Normal distribution helpers and truncated-normal moments with stable tails.

use statrs::function::erf::{erfc, erfc_inv};
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Threshold above which tail quantities use the continued fraction.
const CF_SWITCH: f64 = 1.0;
const CF_DEPTH: usize = 500;

pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail 1 - Φ(x).
pub fn norm_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// ln(1 - Φ(x)), accurate for large x.
pub fn log_norm_sf(x: f64) -> f64 {
    if x < CF_SWITCH {
        norm_sf(x).ln()
    } else {
        -0.5 * x * x - LN_SQRT_2PI - hazard(x).ln()
    }
}

pub fn norm_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let mut x = -SQRT_2 * erfc_inv(2.0 * p);
    for _ in 0..2 {
        let d = norm_pdf(x);
        if d < 1e-300 {
            break;
        }
        x -= (norm_cdf(x) - p) / d;
    }
    x
}

/// Laplace continued fraction a₁/(x + a₂/(x + ...)) with a_n = n + shift,
/// evaluated forward (modified Lentz) until the update is below rounding.
fn laplace_cf(x: f64, shift: usize) -> f64 {
    const TINY: f64 = 1e-300;
    let (mut f, mut c, mut d) = (TINY, TINY, 0.0);
    for n in 1..=CF_DEPTH {
        let an = (n + shift) as f64;
        d = x + an * d;
        if d == 0.0 {
            d = TINY;
        }
        c = x + an / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    f
}

/// Continued-fraction tail terms at `a`: K = T_1 and T_2 with
/// T_n = n / (a + T_{n+1}); the hazard is a + K.
fn tail_cf(a: f64) -> (f64, f64) {
    (laplace_cf(a, 0), laplace_cf(a, 1))
}

/// Hazard function φ(x) / (1 - Φ(x)).
pub fn hazard(x: f64) -> f64 {
    if x < CF_SWITCH {
        norm_pdf(x) / norm_sf(x)
    } else {
        x + tail_cf(x).0
    }
}

/// Var(g | g ≥ x) for a standard Gaussian g.
pub fn truncated_gaussian_variance(x: f64) -> f64 {
    if x < CF_SWITCH {
        let h = hazard(x);
        (1.0 + x * h - h * h).max(0.0)
    } else {
        let (k, t2) = tail_cf(x);
        k * (t2 - k)
    }
}

/// Third central moment of g given g ≥ x.
pub fn truncated_gaussian_third(x: f64) -> f64 {
    if x < CF_SWITCH {
        let h = hazard(x);
        h * (2.0 * h * h - 3.0 * x * h + x * x - 1.0)
    } else {
        let (k, t2) = tail_cf(x);
        (x + k) * k * (2.0 * k - t2)
    }
}

/// Mean, variance and third central moment of N(mu, sigma²) restricted to [lo, ∞).
pub fn lower_truncated_normal(mu: f64, sigma: f64, lo: f64) -> (f64, f64, f64) {
    let a = (lo - mu) / sigma;
    (
        lower_truncated_normal_mean(mu, sigma, lo),
        sigma * sigma * truncated_gaussian_variance(a),
        sigma.powi(3) * truncated_gaussian_third(a),
    )
}

/// Mean of N(mu, sigma²) restricted to [lo, ∞).
pub fn lower_truncated_normal_mean(mu: f64, sigma: f64, lo: f64) -> f64 {
    let a = (lo - mu) / sigma;
    if a < CF_SWITCH {
        mu + sigma * hazard(a)
    } else {
        lo + sigma * laplace_cf(a, 0)
    }
}

/// ln ∫_lo^∞ exp(-(x - mu)² / (2 sigma²)) dx.
pub fn log_lower_truncated_mass(mu: f64, sigma: f64, lo: f64) -> f64 {
    sigma.ln() + LN_SQRT_2PI + log_norm_sf((lo - mu) / sigma)
}

pub fn ln_unit_ball_volume(n: usize) -> f64 {
    let n = n as f64;
    0.5 * n * PI.ln() - statrs::function::gamma::ln_gamma(0.5 * n + 1.0)
}
