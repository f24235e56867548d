//! Small statistics toolkit: batch-means errors, Wilson intervals, KS distance.

use serde::{Deserialize, Serialize};

pub const BATCHES: usize = 32;

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    pub fn new(value: f64, se: f64) -> Self {
        Estimate { value, se }
    }

    /// |value - target| ≤ k·se (with a floor for zero-variance cases).
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.se + 1e-12 * (1.0 + target.abs())
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Mean with a standard error from `BATCHES` contiguous batch means.
pub fn batch_means(xs: &[f64]) -> Estimate {
    batch_statistic(xs.len(), |r| mean(&xs[r]))
}

/// Evaluates `stat` on the full range and on contiguous batches; the
/// spread of batch values gives the standard error of the full value.
pub fn batch_statistic(n: usize, stat: impl Fn(std::ops::Range<usize>) -> f64) -> Estimate {
    let value = stat(0..n);
    let nb = BATCHES.min(n / 2).max(1);
    if nb < 2 {
        return Estimate::new(value, f64::INFINITY);
    }
    let size = n / nb;
    let vals: Vec<f64> = (0..nb).map(|b| stat(b * size..(b + 1) * size)).collect();
    Estimate::new(value, (variance(&vals) / nb as f64).sqrt())
}

/// Wilson score interval for k successes in n trials.
pub fn wilson(k: usize, n: usize, z: f64) -> (f64, f64) {
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic 1% critical value of the two-sample KS statistic.
pub fn ks_critical_1pct(n: usize, m: usize) -> f64 {
    1.628 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Linear-interpolated quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let f = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - f) + sorted[i + 1] * f
    } else {
        sorted[i]
    }
}

/// Least-squares slope of y against x.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_identical_and_disjoint() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(ks_two_sample(&a, &a), 0.0);
        let b: Vec<f64> = (0..100).map(|i| 1000.0 + i as f64).collect();
        assert_eq!(ks_two_sample(&a, &b), 1.0);
    }

    #[test]
    fn wilson_contains_proportion() {
        let (lo, hi) = wilson(30, 100, 1.96);
        assert!(lo < 0.3 && 0.3 < hi);
        let (lo, _) = wilson(0, 50, 1.96);
        assert_eq!(lo, 0.0);
    }

    #[test]
    fn batch_means_of_constant() {
        let e = batch_means(&vec![2.5; 1000]);
        assert_eq!(e.value, 2.5);
        assert!(e.se < 1e-12);
    }
}
