//! One-dimensional laws in canonical form: Y = scale·X + shift where X has
//! density ∝ prim(x)·exp(θx − t x²/2) for a primitive law prim.

use crate::error::{LcError, Result};
use crate::quad::{concave_window, Rule1D};
use crate::special::{log_lower_truncated_mass, lower_truncated_normal, lower_truncated_normal_mean, LN_SQRT_2PI};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Prim1 {
    /// Uniform on [a, b].
    Uniform { a: f64, b: f64 },
    /// Exp(1) − 1.
    ShiftedExp,
    /// N(m, s²).
    Normal { m: f64, s: f64 },
}

impl Prim1 {
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Prim1::Uniform { a, b } => (a, b),
            Prim1::ShiftedExp => (-1.0, f64::INFINITY),
            Prim1::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Normalized log density.
    pub fn log_density(&self, x: f64) -> f64 {
        match *self {
            Prim1::Uniform { a, b } => {
                if (a..=b).contains(&x) {
                    -(b - a).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            Prim1::ShiftedExp => {
                if x >= -1.0 {
                    -(x + 1.0)
                } else {
                    f64::NEG_INFINITY
                }
            }
            Prim1::Normal { m, s } => {
                let z = (x - m) / s;
                -0.5 * z * z - s.ln() - LN_SQRT_2PI
            }
        }
    }
}

/// ln Z, mean, variance and third central moment of a tilted law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltMoments {
    pub log_z: f64,
    pub mean: f64,
    pub var: f64,
    pub third: f64,
}

/// Langevin-type moments of U uniform on [−1, 1] tilted by e^{wU}:
/// (ln E e^{wU}, mean, variance, third cumulant).
pub fn uniform_unit_tilt(w: f64) -> (f64, f64, f64, f64) {
    let aw = w.abs();
    if aw < 0.1 {
        let w2 = w * w;
        let ln = w2 / 6.0 - w2 * w2 / 180.0 + w2 * w2 * w2 / 2835.0;
        let mean = w * (1.0 / 3.0 - w2 / 45.0 + 2.0 * w2 * w2 / 945.0 - w2 * w2 * w2 / 4725.0);
        let var = 1.0 / 3.0 - w2 / 15.0 + 2.0 * w2 * w2 / 189.0 - w2 * w2 * w2 / 675.0;
        let third = w * (-2.0 / 15.0 + 8.0 * w2 / 189.0 - 2.0 * w2 * w2 / 225.0);
        return (ln, mean, var, third);
    }
    let e = (-2.0 * aw).exp();
    let ln = aw + (-e).ln_1p() - std::f64::consts::LN_2 - aw.ln();
    let coth = (1.0 + e) / (1.0 - e);
    let csch2 = 4.0 * e / ((1.0 - e) * (1.0 - e));
    let mean = w.signum() * (coth - 1.0 / aw);
    let var = 1.0 / (aw * aw) - csch2;
    let third = w.signum() * (2.0 * coth * csch2 - 2.0 / (aw * aw * aw));
    (ln, mean, var, third)
}

/// Tilted moments of a primitive law: density ∝ prim(x) e^{θx − t x²/2}.
pub fn prim_tilt(p: &Prim1, theta: f64, t: f64) -> Result<TiltMoments> {
    if t < 0.0 {
        return Err(LcError::TiltNotIntegrable);
    }
    match *p {
        Prim1::Normal { m, s } => {
            let prec = 1.0 / (s * s) + t;
            let mu = (m / (s * s) + theta) / prec;
            let log_z = -0.5 * (1.0 + t * s * s).ln() + 0.5 * prec * mu * mu - 0.5 * m * m / (s * s);
            Ok(TiltMoments { log_z, mean: mu, var: 1.0 / prec, third: 0.0 })
        }
        Prim1::ShiftedExp => {
            if t == 0.0 {
                if theta >= 1.0 {
                    return Err(LcError::TiltNotIntegrable);
                }
                let r = 1.0 - theta;
                Ok(TiltMoments {
                    log_z: -theta - r.ln(),
                    mean: -1.0 + 1.0 / r,
                    var: 1.0 / (r * r),
                    third: 2.0 / (r * r * r),
                })
            } else {
                let mu = (theta - 1.0) / t;
                let sigma = 1.0 / t.sqrt();
                let log_z = -1.0 + 0.5 * t * mu * mu + log_lower_truncated_mass(mu, sigma, -1.0);
                let (mean, var, third) = lower_truncated_normal(mu, sigma, -1.0);
                Ok(TiltMoments { log_z, mean, var, third })
            }
        }
        Prim1::Uniform { a, b } => {
            if t == 0.0 {
                let c = 0.5 * (a + b);
                let h = 0.5 * (b - a);
                let (ln, m, v, k3) = uniform_unit_tilt(theta * h);
                Ok(TiltMoments { log_z: theta * c + ln, mean: c + h * m, var: h * h * v, third: h * h * h * k3 })
            } else {
                Ok(quadrature_tilt(p, theta, t, 48, 20))
            }
        }
    }
}

/// Mean of the tilted primitive law, skipping the higher moments.
pub fn prim_tilt_mean(p: &Prim1, theta: f64, t: f64) -> Result<f64> {
    match *p {
        Prim1::Normal { m, s } => Ok((m / (s * s) + theta) / (1.0 / (s * s) + t)),
        Prim1::ShiftedExp if t > 0.0 => Ok(lower_truncated_normal_mean((theta - 1.0) / t, 1.0 / t.sqrt(), -1.0)),
        _ => Ok(prim_tilt(p, theta, t)?.mean),
    }
}

/// Generic tilted moments by a composite rule on the 60-nat window.
pub fn quadrature_tilt(p: &Prim1, theta: f64, t: f64, panels: usize, order: usize) -> TiltMoments {
    let (lo, hi) = p.support();
    let g = |x: f64| p.log_density(x) + theta * x - 0.5 * t * x * x;
    let win = concave_window(&g, lo, hi, 60.0);
    let rule = Rule1D::composite(win.left, win.right, panels, order);
    let ws: Vec<f64> = rule.x.iter().zip(&rule.w).map(|(x, w)| w * (g(*x) - win.max).exp()).collect();
    let z: f64 = ws.iter().sum();
    let mean = rule.x.iter().zip(&ws).map(|(x, w)| x * w).sum::<f64>() / z;
    let (mut v, mut k) = (0.0, 0.0);
    for (x, w) in rule.x.iter().zip(&ws) {
        let d = x - mean;
        v += w * d * d;
        k += w * d * d * d;
    }
    TiltMoments { log_z: z.ln() + win.max, mean, var: v / z, third: k / z }
}

/// A one-dimensional law Y = scale·X + shift, X ∝ prim·e^{θx − t x²/2}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Canon1D {
    pub prim: Prim1,
    pub theta: f64,
    pub t: f64,
    pub scale: f64,
    pub shift: f64,
    /// ln of the prim-tilt normalizer.
    pub log_z: f64,
}

impl Canon1D {
    pub fn new(prim: Prim1) -> Self {
        Canon1D { prim, theta: 0.0, t: 0.0, scale: 1.0, shift: 0.0, log_z: 0.0 }
    }

    pub fn affine(&self, scale: f64, shift: f64) -> Self {
        Canon1D { scale: self.scale * scale, shift: self.shift * scale + shift, ..*self }
    }

    /// Applies the tilt y ↦ e^{θ'y − t'y²/2}; returns the law and
    /// ln E[e^{θ'Y − t'Y²/2}].
    pub fn tilt(&self, theta: f64, t: f64) -> Result<(Canon1D, f64)> {
        let (c, b) = (self.scale, self.shift);
        let nt = self.t + t * c * c;
        let nth = self.theta + theta * c - t * c * b;
        let m = prim_tilt(&self.prim, nth, nt)?;
        let rel = m.log_z - self.log_z + theta * b - 0.5 * t * b * b;
        Ok((Canon1D { theta: nth, t: nt, log_z: m.log_z, ..*self }, rel))
    }

    /// Mean of Y after the tilt y ↦ e^{θ'y − t'y²/2}.
    pub fn tilted_mean(&self, theta: f64, t: f64) -> Result<f64> {
        let (c, b) = (self.scale, self.shift);
        let nt = self.t + t * c * c;
        let nth = self.theta + theta * c - t * c * b;
        Ok(c * prim_tilt_mean(&self.prim, nth, nt)? + b)
    }

    fn x_moments(&self) -> TiltMoments {
        prim_tilt(&self.prim, self.theta, self.t).expect("canonical law is integrable")
    }

    /// (mean, variance, third central moment) of Y.
    pub fn moments(&self) -> (f64, f64, f64) {
        let m = self.x_moments();
        (self.scale * m.mean + self.shift, self.scale * self.scale * m.var, self.scale.powi(3) * m.third)
    }

    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.prim.support();
        let (a, b) = (self.scale * lo + self.shift, self.scale * hi + self.shift);
        if a <= b { (a, b) } else { (b, a) }
    }

    /// Normalized log density of Y.
    pub fn log_density(&self, y: f64) -> f64 {
        let x = (y - self.shift) / self.scale;
        self.prim.log_density(x) + self.theta * x - 0.5 * self.t * x * x - self.log_z - self.scale.abs().ln()
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.prim, Prim1::Normal { .. })
    }
}

/// Polar quadrature for the law ∝ e^{−|x| + θ·x − t|x|²/2} on ℝ²:
/// returns (ln E e^{θ·X − t|X|²/2} under e^{−|x|}/2π, mean, covariance).
pub fn pair_tilt(theta: [f64; 2], t: f64) -> Result<(f64, [f64; 2], [[f64; 2]; 2])> {
    let a = (theta[0] * theta[0] + theta[1] * theta[1]).sqrt();
    if t < 0.0 || (t == 0.0 && a >= 1.0) {
        return Err(LcError::TiltNotIntegrable);
    }
    let g = |r: f64| if r > 0.0 { r.ln() - r + a * r - 0.5 * t * r * r } else { f64::NEG_INFINITY };
    let win = concave_window(&g, 0.0, f64::INFINITY, 60.0);
    let rule = Rule1D::composite(0.0, win.right, 96, 20);
    let nphi = 128;
    let (ux, uy) = if a > 0.0 { (theta[0] / a, theta[1] / a) } else { (1.0, 0.0) };
    let (mut z, mut m1, mut s11, mut s22) = (0.0, 0.0, 0.0, 0.0);
    for (r, w) in rule.x.iter().zip(&rule.w) {
        let base = (r.ln() - r - 0.5 * t * r * r - win.max).exp() * w;
        for k in 0..nphi {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / nphi as f64;
            let (c, s) = (phi.cos(), phi.sin());
            let wt = base * (a * r * c).exp() / nphi as f64;
            z += wt;
            m1 += wt * r * c;
            s11 += wt * r * r * c * c;
            s22 += wt * r * r * s * s;
        }
    }
    let (m1, s11, s22) = (m1 / z, s11 / z - (m1 / z).powi(2), s22 / z);
    // rotate from the θ-aligned frame back
    let mean = [m1 * ux, m1 * uy];
    let cov = [
        [s11 * ux * ux + s22 * uy * uy, (s11 - s22) * ux * uy],
        [(s11 - s22) * ux * uy, s11 * uy * uy + s22 * ux * ux],
    ];
    Ok((z.ln() + win.max, mean, cov))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_forms_match_quadrature() {
        for (p, th, t) in [
            (Prim1::ShiftedExp, 0.3, 0.0),
            (Prim1::ShiftedExp, -2.0, 0.7),
            (Prim1::ShiftedExp, 5.0, 0.01),
            (Prim1::Normal { m: 0.4, s: 1.7 }, 0.5, 2.0),
            (Prim1::Uniform { a: -1.0, b: 2.0 }, 3.0, 0.0),
            (Prim1::Uniform { a: -1.0, b: 2.0 }, 0.05, 0.0),
        ] {
            let c = prim_tilt(&p, th, t).unwrap();
            let q = quadrature_tilt(&p, th, t, 400, 20);
            assert_relative_eq!(c.log_z, q.log_z, epsilon = 1e-9);
            assert_relative_eq!(c.mean, q.mean, epsilon = 1e-9);
            assert_relative_eq!(c.var, q.var, max_relative = 1e-8);
            assert_relative_eq!(c.third, q.third, epsilon = 1e-8);
        }
    }

    #[test]
    fn exponential_not_integrable_at_theta_one() {
        assert_eq!(prim_tilt(&Prim1::ShiftedExp, 1.0, 0.0), Err(LcError::TiltNotIntegrable));
    }

    #[test]
    fn canonical_tilt_composes() {
        let c = Canon1D::new(Prim1::ShiftedExp).affine(2.0, 0.5);
        let (a, ra) = c.tilt(0.1, 0.2).unwrap();
        let (b, rb) = a.tilt(-0.05, 0.3).unwrap();
        let (d, rd) = c.tilt(0.05, 0.5).unwrap();
        assert_relative_eq!(ra + rb, rd, epsilon = 1e-12);
        for y in [0.0, 1.0, 3.3] {
            assert_relative_eq!(b.log_density(y), d.log_density(y), epsilon = 1e-12);
        }
    }

    #[test]
    fn pair_untilted_is_isotropic_with_variance_three() {
        let (lz, m, c) = pair_tilt([0.0, 0.0], 0.0).unwrap();
        assert!(lz.abs() < 1e-9);
        assert!(m[0].abs() < 1e-12);
        assert_relative_eq!(c[0][0], 3.0, max_relative = 1e-9);
        assert_relative_eq!(c[1][1], 3.0, max_relative = 1e-9);
        let (lz, _, _) = pair_tilt([0.3, -0.4], 0.0).unwrap();
        assert_relative_eq!(lz, -1.5 * (1.0 - 0.25f64).ln(), epsilon = 1e-9);
    }
}
