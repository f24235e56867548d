//! Quadrature rules: Gauss-Legendre, probabilists' Gauss-Hermite, adaptive
//! bisection, and composite rules fitted to log-concave densities.

use nalgebra::{DMatrix, SymmetricEigen};
use std::sync::OnceLock;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn gl_cached(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static GL16: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static GL20: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    match n {
        16 => GL16.get_or_init(|| gauss_legendre(16)),
        _ => GL20.get_or_init(|| gauss_legendre(20)),
    }
}

/// Probabilists' Gauss-Hermite rule: weights sum to one and integrate
/// polynomials of degree ≤ 2n - 1 exactly against N(0, 1).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64).sqrt();
        j[(k - 1, k)] = b;
        j[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // symmetrize to remove eigensolver noise
    for i in 0..n / 2 {
        let (a, b) = (pairs[i], pairs[n - 1 - i]);
        let x = 0.5 * (b.0 - a.0);
        let w = 0.5 * (a.1 + b.1);
        pairs[i] = (-x, w);
        pairs[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    pairs.into_iter().map(|(x, w)| (x, w / total)).unzip()
}

/// Integrates f over [a, b] with a fixed Gauss-Legendre rule.
pub fn gl_integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = if n == 16 || n == 20 { gl_cached(n).clone() } else { gauss_legendre(n) };
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    x.iter().zip(&w).map(|(z, wi)| wi * f(c + h * z)).sum::<f64>() * h
}

/// Adaptive bisection with a 20-point rule; stops when halves agree to `tol`.
pub fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let l = gl_integrate(f, a, m, 20);
        let r = gl_integrate(f, m, b, 20);
        if (l + r - whole).abs() <= tol || depth >= 48 {
            l + r
        } else {
            rec(f, a, m, l, 0.5 * tol, depth + 1) + rec(f, m, b, r, 0.5 * tol, depth + 1)
        }
    }
    let whole = gl_integrate(f, a, b, 20);
    rec(f, a, b, whole, tol, 0)
}

/// A weighted point set on the line.
#[derive(Debug, Clone)]
pub struct Rule1D {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

impl Rule1D {
    /// Composite Gauss-Legendre rule with `panels` equal panels on [a, b].
    pub fn composite(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (z, wz) = gauss_legendre(order);
        let mut x = Vec::with_capacity(panels * order);
        let mut w = Vec::with_capacity(panels * order);
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let c = a + (p as f64 + 0.5) * h;
            for (zi, wi) in z.iter().zip(&wz) {
                x.push(c + 0.5 * h * zi);
                w.push(0.5 * h * wi);
            }
        }
        Rule1D { x, w }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.x.iter().zip(&self.w).map(|(x, w)| w * f(*x)).sum()
    }
}

/// Location of the maximum of a concave function and the window where it
/// stays within `drop` of its maximum, clipped to [lo, hi].
#[derive(Debug, Clone, Copy)]
pub struct Window {
    pub mode: f64,
    pub max: f64,
    pub left: f64,
    pub right: f64,
}

fn golden_max(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    0.5 * (a + b)
}

/// Finds the mode and the `drop`-window of a concave log-density on (lo, hi).
pub fn concave_window(g: &impl Fn(f64) -> f64, lo: f64, hi: f64, drop: f64) -> Window {
    let clamp = |x: f64| x.max(lo).min(hi);
    let eval = |x: f64| {
        let v = g(x);
        if v.is_nan() { f64::NEG_INFINITY } else { v }
    };
    let mut c = if lo.is_finite() && hi.is_finite() {
        0.5 * (lo + hi)
    } else if lo.is_finite() {
        lo + 1.0
    } else if hi.is_finite() {
        hi - 1.0
    } else {
        0.0
    };
    let mut step = 1.0;
    let (l, r);
    loop {
        let gc = eval(c);
        let lp = clamp(c - step);
        let rp = clamp(c + step);
        let (gl, gr) = (eval(lp), eval(rp));
        if gl > gc && lp > lo {
            c = lp;
            step *= 2.0;
        } else if gr > gc && rp < hi {
            c = rp;
            step *= 2.0;
        } else {
            l = lp;
            r = rp;
            break;
        }
        if step > 1e12 {
            l = lp;
            r = rp;
            break;
        }
    }
    let mut mode = golden_max(&eval, l, r);
    for end in [l, r] {
        if eval(end) > eval(mode) {
            mode = end;
        }
    }
    let mode = clamp(mode);
    let gmax = eval(mode);
    let target = gmax - drop;
    let edge = |dir: f64, bound: f64| -> f64 {
        if mode == bound {
            return bound;
        }
        let mut d = 1e-3 * (1.0 + mode.abs());
        let mut inside = mode;
        loop {
            let x = mode + dir * d;
            if (dir > 0.0 && x >= hi) || (dir < 0.0 && x <= lo) {
                if eval(bound) >= target || bound.is_finite() {
                    return bound;
                }
            }
            let x = clamp(x);
            if eval(x) < target {
                let (mut a, mut b) = (inside, x);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if eval(m) < target { b = m } else { a = m }
                }
                return b;
            }
            inside = x;
            d *= 2.0;
            if d > 1e15 {
                return x;
            }
        }
    };
    Window { mode, max: gmax, left: edge(-1.0, lo), right: edge(1.0, hi) }
}

/// Composite rule covering the `drop`-window of a concave log-density.
/// Weights integrate against Lebesgue measure; the density is not folded in.
pub fn log_concave_rule(
    g: &impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    drop: f64,
    panels: usize,
    order: usize,
) -> (Window, Rule1D) {
    let win = concave_window(g, lo, hi, drop);
    if win.mode > win.left && win.mode < win.right {
        // split at the mode so that a kink there stays on a panel edge
        let frac = (win.mode - win.left) / (win.right - win.left);
        let nl = ((panels as f64 * frac).round() as usize).clamp(1, panels.saturating_sub(1).max(1));
        let nr = panels.saturating_sub(nl).max(1);
        let mut x = Vec::new();
        let mut w = Vec::new();
        for (a, b, n) in [(win.left, win.mode, nl), (win.mode, win.right, nr)] {
            let r = Rule1D::composite(a, b, n, order);
            x.extend(r.x);
            w.extend(r.w);
        }
        return (win, Rule1D { x, w });
    }
    (win, Rule1D::composite(win.left, win.right, panels, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert_relative_eq!(s, 2.0 / 13.0, epsilon = 1e-14);
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn hermite_moments_exact() {
        let (x, w) = gauss_hermite(6);
        let m = |k: i32| -> f64 { x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum() };
        assert_relative_eq!(m(0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(m(2), 1.0, epsilon = 1e-13);
        assert_relative_eq!(m(4), 3.0, epsilon = 1e-12);
        assert_relative_eq!(m(10), 945.0, max_relative = 1e-11);
        assert!(m(3).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_kinks() {
        let v = adaptive(&|x: f64| x.abs().sqrt(), -1.0, 2.0, 1e-12);
        assert_relative_eq!(v, 2.0 / 3.0 * (1.0 + 2f64.powf(1.5)), max_relative = 1e-9);
    }

    #[test]
    fn window_of_gaussian_and_exponential() {
        let w = concave_window(&|x: f64| -0.5 * x * x, f64::NEG_INFINITY, f64::INFINITY, 50.0);
        assert!(w.mode.abs() < 1e-8);
        assert_relative_eq!(w.right, 10.0, max_relative = 1e-8);
        let w = concave_window(&|x: f64| -(x + 1.0), -1.0, f64::INFINITY, 50.0);
        assert_eq!(w.mode, -1.0);
        assert_relative_eq!(w.right, 49.0, max_relative = 1e-8);
        let (_, r) = log_concave_rule(&|x: f64| -(x + 1.0), -1.0, f64::INFINITY, 60.0, 100, 16);
        assert_relative_eq!(r.integrate(|x| (-(x + 1.0)).exp()), 1.0, epsilon = 1e-12);
    }
}
