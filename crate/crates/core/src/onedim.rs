//! One-dimensional log-concave laws: cdf and quantiles, moments, the
//! isoperimetric profile, Cheeger constants and the finite-difference
//! spectral gap.

use crate::error::{LcError, Result};
use crate::measures::{Canon1D, LogConcaveMeasure};
use crate::quad::{concave_window, gauss_legendre, gl_integrate};
use crate::spectral::{BoundKind, SpectralEstimate};
use serde::{Deserialize, Serialize};

pub use crate::special::truncated_gaussian_variance;

/// Log-density drop defining the numerical support window; the mass
/// outside is below e^{-190}.
pub const WINDOW_DROP: f64 = 200.0;
const PANELS: usize = 400;

/// A 1D law with a cached cdf grid.
#[derive(Debug, Clone)]
pub struct Law1D {
    pub canon: Canon1D,
    lo: f64,
    hi: f64,
    edges: Vec<f64>,
    cum: Vec<f64>,
    total: f64,
}

impl Law1D {
    pub fn new(canon: Canon1D) -> Self {
        let (slo, shi) = canon.support();
        let g = |x: f64| canon.log_density(x);
        let win = concave_window(&g, slo, shi, WINDOW_DROP);
        let (lo, hi) = (win.left, win.right);
        let mut edges = Vec::with_capacity(PANELS + 2);
        if win.mode > lo && win.mode < hi {
            let nl = ((PANELS as f64 * (win.mode - lo) / (hi - lo)).round() as usize).clamp(1, PANELS - 1);
            for k in 0..nl {
                edges.push(lo + (win.mode - lo) * k as f64 / nl as f64);
            }
            let nr = PANELS - nl;
            for k in 0..=nr {
                edges.push(win.mode + (hi - win.mode) * k as f64 / nr as f64);
            }
        } else {
            for k in 0..=PANELS {
                edges.push(lo + (hi - lo) * k as f64 / PANELS as f64);
            }
        }
        let (z, w) = gauss_legendre(20);
        let mut cum = vec![0.0];
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let s: f64 = z
                .iter()
                .zip(&w)
                .map(|(zi, wi)| 0.5 * (b - a) * wi * g(0.5 * (a + b) + 0.5 * (b - a) * zi).exp())
                .sum();
            cum.push(cum.last().unwrap() + s);
        }
        let total = *cum.last().unwrap();
        Law1D { canon, lo, hi, edges, cum, total }
    }

    /// The law of a one-dimensional catalog measure.
    pub fn from_measure(m: &LogConcaveMeasure) -> Result<Self> {
        match m.as_canon1d()? {
            Some(c) => Ok(Law1D::new(c)),
            None => Err(LcError::InvalidArgument(format!("{} is not one-dimensional", m.kind_name()))),
        }
    }

    /// The affine image with mean 0 and variance 1.
    pub fn isotropic(&self) -> Self {
        let (m, v, _) = self.canon.moments();
        let s = 1.0 / v.sqrt();
        Law1D::new(self.canon.affine(s, -m * s))
    }

    pub fn log_density(&self, x: f64) -> f64 {
        self.canon.log_density(x)
    }

    pub fn density(&self, x: f64) -> f64 {
        self.log_density(x).exp()
    }

    /// True support interval.
    pub fn support(&self) -> (f64, f64) {
        self.canon.support()
    }

    /// Numerical window carrying all but e^{-190} of the mass.
    pub fn window(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Quadrature mass of the window; 1 up to rounding.
    pub fn total_mass(&self) -> f64 {
        self.total
    }

    pub fn mean_var(&self) -> (f64, f64) {
        let (m, v, _) = self.canon.moments();
        (m, v)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return 1.0;
        }
        let k = self.edges.partition_point(|e| *e <= x).saturating_sub(1).min(self.edges.len() - 2);
        let part = gl_integrate(|y| self.density(y), self.edges[k], x, 20);
        ((self.cum[k] + part) / self.total).clamp(0.0, 1.0)
    }

    /// Inverse cdf by bisection.
    pub fn quantile(&self, p: f64) -> f64 {
        let (mut a, mut b) = (self.lo, self.hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if self.cdf(m) < p {
                a = m;
            } else {
                b = m;
            }
            if b - a <= 1e-13 * (1.0 + a.abs().max(b.abs())) {
                break;
            }
        }
        0.5 * (a + b)
    }

    /// ∫ f ρ over the window, with a panel break at `cut` when it is interior.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        let (z, w) = gauss_legendre(20);
        let mut s = 0.0;
        for pair in self.edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            for (zi, wi) in z.iter().zip(&w) {
                let x = 0.5 * (a + b) + 0.5 * (b - a) * zi;
                s += 0.5 * (b - a) * wi * f(x) * self.density(x);
            }
        }
        s / self.total
    }
}

/// Integral of |x|^p ρ (or ln|x| ρ when `log` is set) over [0, b] or [b, 0],
/// with x = b·v^k removing the singularity at the origin.
fn side_moment(law: &Law1D, b: f64, p: f64, log: bool) -> f64 {
    if b == 0.0 {
        return 0.0;
    }
    let k = if log { 8.0 } else if p < 0.0 { 1.0 / (p + 1.0) } else { 1.0 };
    let (z, w) = gauss_legendre(20);
    let panels = 200;
    let mut s = 0.0;
    for j in 0..panels {
        let (va, vb) = (j as f64 / panels as f64, (j + 1) as f64 / panels as f64);
        for (zi, wi) in z.iter().zip(&w) {
            let v = 0.5 * (va + vb) + 0.5 * (vb - va) * zi;
            let x = b * v.powf(k);
            let jac = b.abs() * k * v.powf(k - 1.0);
            let f = if log { x.abs().ln() } else { x.abs().powf(p) };
            s += 0.5 * (vb - va) * wi * f * jac * law.density(x);
        }
    }
    s
}

/// (E|X|^p)^{1/p}, with p = 0 read as exp(E ln|X|).
pub fn moment_norm(law: &Law1D, p: f64) -> Result<f64> {
    if p <= -1.0 {
        return Err(LcError::MomentDiverges);
    }
    let (lo, hi) = law.window();
    let (l, r) = (lo.min(0.0), hi.max(0.0));
    let log = p == 0.0;
    let v = (side_moment(law, l, p, log) + side_moment(law, r, p, log)) / law.total_mass();
    Ok(if log { v.exp() } else { v.powf(1.0 / p) })
}

/// Constants of the two-sided density envelope c'·1{|x| ≤ c''} ≤ ρ ≤ C e^{−c|x|}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub c_lower: f64,
    pub c_radius: f64,
    pub c_rate: f64,
    pub c_upper: f64,
}

fn check_isotropic(law: &Law1D) -> Result<()> {
    let (m, v) = law.mean_var();
    if m.abs() > 1e-6 || (v - 1.0).abs() > 1e-6 {
        return Err(LcError::NotIsotropic(format!("mean {m}, variance {v}")));
    }
    Ok(())
}

/// The radius c'' is the largest r with ρ ≥ ρ(0)/e on [−r, r]; the rate c
/// is the least-squares slope of ln ρ against |x| on 1 < |x| ≤ 6, and C is
/// then the smallest constant making the envelope valid on the grid.
pub fn density_envelope(law: &Law1D) -> Result<Envelope> {
    check_isotropic(law)?;
    let (slo, shi) = law.support();
    let floor = law.log_density(0.0) - 1.0;
    let ok = |x: f64| law.log_density(x) >= floor;
    let mut r = 0.0;
    let step = 1e-3;
    while ok(-(r + step)) && ok(r + step) && r < 50.0 {
        r += step;
    }
    // refine at the side that fails first
    let (mut a, mut b) = (r, r + step);
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if ok(-m) && ok(m) {
            a = m;
        } else {
            b = m;
        }
    }
    let c_radius = a.min(-slo).min(shi);
    let c_lower = law.density(-c_radius).min(law.density(c_radius)).min(law.density(0.0));

    let grid: Vec<f64> = (0..=3200)
        .map(|i| -8.0 + 16.0 * i as f64 / 3200.0)
        .chain([slo, shi])
        .filter(|x| x.is_finite() && *x >= slo && *x <= shi)
        .collect();
    let tail: Vec<(f64, f64)> = grid
        .iter()
        .filter(|x| x.abs() > 1.0 && x.abs() <= 6.0)
        .map(|x| (x.abs(), law.log_density(*x)))
        .collect();
    let c_rate = if tail.len() >= 2 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = tail.into_iter().unzip();
        (-crate::stats::slope(&xs, &ys)).max(0.0)
    } else {
        0.0
    };
    let ln_c = grid.iter().map(|x| law.log_density(*x) + c_rate * x.abs()).fold(f64::NEG_INFINITY, f64::max);
    Ok(Envelope { c_lower, c_radius, c_rate, c_upper: ln_c.exp() })
}

/// Isoperimetric profile of half-lines, optionally with ε-neighbourhood gains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile1D {
    pub grid: Vec<f64>,
    pub i: Vec<f64>,
    pub i_eps: Option<(f64, Vec<f64>)>,
    /// Largest violation of concavity of p ↦ ρ(Φ^{-1}(p)) on the grid.
    pub concavity_defect: f64,
}

pub fn isoperimetric_profile(law: &Law1D, grid: &[f64], eps: Option<f64>) -> Result<Profile1D> {
    if grid.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
        return Err(LcError::InvalidArgument("profile grid must lie in (0, 1)".into()));
    }
    let left: Vec<f64> = grid.iter().map(|p| law.quantile(*p)).collect();
    let right: Vec<f64> = grid.iter().map(|p| law.quantile(1.0 - p)).collect();
    let i = left.iter().zip(&right).map(|(a, b)| law.density(*a).min(law.density(*b))).collect();
    let i_eps = eps.map(|e| {
        let gains = grid
            .iter()
            .zip(left.iter().zip(&right))
            .map(|(p, (a, b))| (law.cdf(a + e) - p).min(1.0 - law.cdf(b - e) - p))
            .collect();
        (e, gains)
    });
    let f: Vec<f64> = left.iter().map(|x| law.density(*x)).collect();
    let concavity_defect = concavity_defect(grid, &f);
    Ok(Profile1D { grid: grid.to_vec(), i, i_eps, concavity_defect })
}

/// max over interior nodes of (chord − value); ≤ 0 for a concave sequence.
pub fn concavity_defect(x: &[f64], f: &[f64]) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for k in 1..x.len().saturating_sub(1) {
        let t = (x[k] - x[k - 1]) / (x[k + 1] - x[k - 1]);
        let chord = (1.0 - t) * f[k - 1] + t * f[k + 1];
        worst = worst.max(chord - f[k]);
    }
    worst
}

/// Grid on (0, 1): uniform in the bulk, geometric toward both ends.
pub fn default_p_grid(n: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (1..n).map(|i| i as f64 / n as f64).collect();
    for k in 1..=12 {
        let p = 10f64.powi(-(k as i32) / 2 - 3) * if k % 2 == 0 { 1.0 } else { 3.0 };
        g.push(p);
        g.push(1.0 - p);
    }
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// ψ = sup_p min(p, 1−p)/I(p) over half-lines.
pub fn cheeger_1d(law: &Law1D) -> Result<SpectralEstimate> {
    let grid = default_p_grid(2000);
    let prof = isoperimetric_profile(law, &grid, None)?;
    let mut best = 0.0f64;
    for (p, i) in grid.iter().zip(&prof.i) {
        if *i <= 0.0 {
            return Err(LcError::DisconnectedSupport);
        }
        best = best.max(p.min(1.0 - p) / i);
    }
    Ok(SpectralEstimate::new(best, BoundKind::TwoSided, "half-line profile", 0.0))
}

/// Cheeger ratio maximized over unions of at most two intervals whose
/// endpoints lie on the quantile grid q(k/m); support ends carry no boundary.
pub fn cheeger_brute_force(law: &Law1D, m: usize) -> f64 {
    let x: Vec<f64> = (0..=m).map(|k| law.quantile(k as f64 / m as f64)).collect();
    let mass: Vec<f64> = (0..=m).map(|k| k as f64 / m as f64).collect();
    let bd: Vec<f64> = (0..=m).map(|k| if k == 0 || k == m { 0.0 } else { law.density(x[k]) }).collect();
    let ratio = |mu: f64, b: f64| if b > 0.0 { mu.min(1.0 - mu) / b } else { 0.0 };
    let mut best = 0.0f64;
    for a in 0..m {
        for b in a + 1..=m {
            let mu1 = mass[b] - mass[a];
            let b1 = bd[a] + bd[b];
            best = best.max(ratio(mu1, b1));
            for c in b + 1..m {
                for d in c + 1..=m {
                    best = best.max(ratio(mu1 + mass[d] - mass[c], b1 + bd[c] + bd[d]));
                }
            }
        }
    }
    best
}

/// (1/π)ψ² ≤ C_P ≤ 4ψ², each side allowed a relative slack `tol`.
pub fn cheeger_sandwich(psi: f64, cp: f64, tol: f64) -> bool {
    psi * psi / std::f64::consts::PI <= cp * (1.0 + tol) && cp <= 4.0 * psi * psi * (1.0 + tol)
}

/// Symmetric tridiagonal form of the Neumann operator −(ρu′)′/ρ on `n`
/// cells of the window, built from log densities to avoid underflow.
fn neumann_tridiagonal(law: &Law1D, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = law.window();
    let h = (b - a) / n as f64;
    let lc: Vec<f64> = (0..n).map(|i| law.log_density(a + (i as f64 + 0.5) * h)).collect();
    let lm: Vec<f64> = (1..n).map(|i| law.log_density(a + i as f64 * h)).collect();
    let h2 = h * h;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n - 1];
    for i in 0..n - 1 {
        off[i] = -(lm[i] - 0.5 * (lc[i] + lc[i + 1])).exp() / h2;
        diag[i] += (lm[i] - lc[i]).exp() / h2;
        diag[i + 1] += (lm[i] - lc[i + 1]).exp() / h2;
    }
    (diag, off)
}

/// Number of eigenvalues below x (Sturm sequence).
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let denom = if q == 0.0 { f64::EPSILON * (diag[i - 1].abs() + 1.0) } else { q };
        q = diag[i] - x - off[i - 1] * off[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// k-th smallest eigenvalue (0-based) by bisection.
pub fn tridiagonal_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> f64 {
    let mut hi = 0.0f64;
    for i in 0..diag.len() {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i < off.len() { off[i].abs() } else { 0.0 };
        hi = hi.max(diag[i] + r);
    }
    let mut lo = diag.iter().zip(0..).map(|(d, i)| {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i < off.len() { off[i].abs() } else { 0.0 };
        d - r
    }).fold(f64::INFINITY, f64::min);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// First nonzero Neumann eigenvalue on `n` cells.
pub fn fd_lambda1(law: &Law1D, n: usize) -> f64 {
    let (d, o) = neumann_tridiagonal(law, n);
    tridiagonal_eigenvalue(&d, &o, 1)
}

/// Poincaré constant 1/λ₁ from a cell-centred Neumann discretization,
/// Richardson-extrapolated over grids n and 2n.
pub fn spectral_gap_fd(law: &Law1D, grid_size: usize) -> Result<SpectralEstimate> {
    if grid_size < 100 {
        return Err(LcError::InvalidArgument("grid_size must be at least 100".into()));
    }
    let l1 = fd_lambda1(law, grid_size);
    let l2 = fd_lambda1(law, 2 * grid_size);
    let lr = (4.0 * l2 - l1) / 3.0;
    let cp = 1.0 / lr;
    let mut est = SpectralEstimate::new(cp, BoundKind::TwoSided, "fd-neumann", (cp - 1.0 / l2).abs());
    if ((lr - l2) / lr).abs() > 0.01 {
        est.warning = Some("grid too coarse: extrapolation moved the eigenvalue by more than 1%".into());
    }
    Ok(est)
}

/// Observed convergence order of λ₁ from grids n, 2n, 4n.
pub fn fd_observed_order(law: &Law1D, n: usize) -> f64 {
    let (a, b, c) = (fd_lambda1(law, n), fd_lambda1(law, 2 * n), fd_lambda1(law, 4 * n));
    ((a - b) / (b - c)).abs().log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::LogConcaveMeasure as M;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn gauss() -> Law1D {
        Law1D::from_measure(&M::std_gaussian(1)).unwrap()
    }

    fn expo() -> Law1D {
        Law1D::from_measure(&M::ShiftedExponential).unwrap()
    }

    #[test]
    fn cdf_and_quantile() {
        for law in [gauss(), expo(), Law1D::from_measure(&M::interval(0.0, 2.0)).unwrap()] {
            assert_relative_eq!(law.total_mass(), 1.0, epsilon = 1e-12);
            for p in [1e-6, 0.1, 0.5, 0.9, 0.999] {
                assert!((law.cdf(law.quantile(p)) - p).abs() < 1e-10);
            }
        }
        let g = gauss();
        // Φ(1) to 18 digits
        assert_relative_eq!(g.cdf(1.0), 0.841_344_746_068_542_95, epsilon = 1e-14);
        assert_relative_eq!(expo().cdf(0.0), 1.0 - (-1f64).exp(), epsilon = 1e-13);
    }

    #[test]
    fn gaussian_moment_norms() {
        let g = gauss();
        assert_relative_eq!(moment_norm(&g, 2.0).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(moment_norm(&g, 4.0).unwrap(), 3f64.powf(0.25), epsilon = 1e-12);
        // E ln|g| = −(γ + ln 2)/2
        let euler = 0.577_215_664_901_532_9;
        assert_relative_eq!(moment_norm(&g, 0.0).unwrap(), (-(euler + 2f64.ln()) / 2.0).exp(), epsilon = 1e-9);
        // E|g|^{-1/2} = 2^{-1/4} Γ(1/4)/√π
        let gm = statrs::function::gamma::gamma(0.25);
        let want = (2f64.powf(-0.25) * gm / PI.sqrt()).powf(-2.0);
        assert_relative_eq!(moment_norm(&g, -0.5).unwrap(), want, max_relative = 1e-8);
        assert_eq!(moment_norm(&g, -1.0).unwrap_err(), LcError::MomentDiverges);
    }

    #[test]
    fn exponential_third_moment() {
        let want = (12.0 / std::f64::consts::E - 2.0).powf(1.0 / 3.0);
        assert_relative_eq!(moment_norm(&expo(), 3.0).unwrap(), want, epsilon = 1e-10);
    }

    #[test]
    fn envelopes() {
        let u = Law1D::from_measure(&M::interval(-3f64.sqrt(), 3f64.sqrt())).unwrap();
        let e = density_envelope(&u).unwrap();
        assert_relative_eq!(e.c_radius, 3f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(e.c_lower, 1.0 / (2.0 * 3f64.sqrt()), epsilon = 1e-12);
        let e = density_envelope(&expo()).unwrap();
        assert_relative_eq!(e.c_rate, 1.0, epsilon = 1e-9);
        assert_relative_eq!(e.c_upper, std::f64::consts::E, epsilon = 1e-8);
        let e = density_envelope(&gauss()).unwrap();
        assert!(e.c_upper >= 1.0 / (2.0 * PI).sqrt());
        assert!(density_envelope(&Law1D::from_measure(&M::interval(0.0, 1.0)).unwrap()).is_err());
    }

    #[test]
    fn profile_values() {
        let u = Law1D::from_measure(&M::interval(0.0, 1.0)).unwrap();
        let p = isoperimetric_profile(&u, &[0.5], None).unwrap();
        assert_relative_eq!(p.i[0], 1.0, epsilon = 1e-12);
        let p = isoperimetric_profile(&gauss(), &[0.5], None).unwrap();
        assert_relative_eq!(p.i[0], 1.0 / (2.0 * PI).sqrt(), epsilon = 1e-10);
        let e1 = Law1D::new(expo().canon.affine(1.0, 1.0));
        let p = isoperimetric_profile(&e1, &[0.5], None).unwrap();
        assert_relative_eq!(p.i[0], 0.5, epsilon = 1e-10);
        assert!(isoperimetric_profile(&u, &[0.0], None).is_err());
    }

    #[test]
    fn cheeger_values() {
        let u = Law1D::from_measure(&M::interval(0.0, 1.0)).unwrap();
        assert_relative_eq!(cheeger_1d(&u).unwrap().value, 0.5, epsilon = 1e-12);
        assert_relative_eq!(cheeger_1d(&gauss()).unwrap().value, (2.0 * PI).sqrt() / 2.0, epsilon = 1e-9);
        assert_relative_eq!(cheeger_1d(&expo()).unwrap().value, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn fd_gap_closed_forms() {
        let u = Law1D::from_measure(&M::interval(0.0, 2.0)).unwrap();
        assert_relative_eq!(spectral_gap_fd(&u, 2000).unwrap().value, 4.0 / (PI * PI), max_relative = 1e-6);
        assert_relative_eq!(spectral_gap_fd(&gauss(), 4000).unwrap().value, 1.0, max_relative = 1e-5);
        let e = spectral_gap_fd(&expo(), 10_000).unwrap().value;
        assert!((e - 4.0).abs() < 0.01, "{e}");
    }

    #[test]
    fn second_order_convergence() {
        assert!(fd_observed_order(&gauss(), 200) >= 1.8);
    }

    #[test]
    fn sturm_bisection_matches_dense() {
        let d = vec![2.0, 3.0, 1.0, 4.0];
        let o = vec![0.5, -1.0, 0.25];
        let mut m = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.clone()));
        for i in 0..3 {
            m[(i, i + 1)] = o[i];
            m[(i + 1, i)] = o[i];
        }
        let (ev, _) = crate::linalg::sym_eigen(&m);
        for k in 0..4 {
            assert_relative_eq!(tridiagonal_eigenvalue(&d, &o, k), ev[k], epsilon = 1e-12);
        }
    }
}
