//! Catalog of log-concave measures, exact-moment oracles and Gaussian tilts.

pub mod body;
pub mod canon;
mod potential;

pub use body::{ConvexBody, Halfspace};
pub use canon::{Canon1D, Prim1, TiltMoments};
pub use potential::{Potential, Regularity};

use crate::error::{LcError, Result};
use crate::linalg::{from_rows, lambda_max, sym_eigen, sym_inv_sqrt, to_rows};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};

/// A probability measure with log-concave density.
///
/// JSON form: `{"kind": "...", "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum LogConcaveMeasure {
    /// Uniform on [a, b].
    Interval { a: f64, b: f64 },
    /// Law of Exp(1) − 1.
    ShiftedExponential,
    Gaussian { mean: Vec<f64>, cov: Vec<Vec<f64>> },
    UniformBody { body: ConvexBody },
    /// Density ∏ e^{−|z_j|}/2π on ℝ^{2n}.
    ComplexExponential { n: usize },
    Product { factors: Vec<LogConcaveMeasure> },
    /// Density ∝ base(x)·exp(x·θ − t|x|²/2).
    GaussianTilt { base: Box<LogConcaveMeasure>, theta: Vec<f64>, t: f64 },
    /// Law of M X + shift with X ~ base.
    Affine { base: Box<LogConcaveMeasure>, matrix: Vec<Vec<f64>>, shift: Vec<f64> },
}

use LogConcaveMeasure as M;

/// Closed-form moments of a catalog measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactMoments {
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
    pub cp: Option<f64>,
    pub entropy: Option<f64>,
}

/// An independent block of coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    One(Canon1D),
    /// Tilted complex-exponential pair: ∝ e^{−|z| + θ·z − t|z|²/2} on ℝ².
    Pair { theta: [f64; 2], t: f64 },
    Gauss { mean: DVector<f64>, cov: DMatrix<f64> },
    Other(LogConcaveMeasure),
}

impl Block {
    pub fn dim(&self) -> usize {
        match self {
            Block::One(_) => 1,
            Block::Pair { .. } => 2,
            Block::Gauss { mean, .. } => mean.len(),
            Block::Other(m) => m.dim(),
        }
    }
}

impl LogConcaveMeasure {
    pub fn interval(a: f64, b: f64) -> Self {
        M::Interval { a, b }
    }

    pub fn std_gaussian(n: usize) -> Self {
        M::Gaussian { mean: vec![0.0; n], cov: to_rows(&DMatrix::identity(n, n)) }
    }

    pub fn gaussian(mean: Vec<f64>, cov: DMatrix<f64>) -> Self {
        M::Gaussian { mean, cov: to_rows(&cov) }
    }

    pub fn cube(dim: usize, side: f64) -> Self {
        M::UniformBody { body: ConvexBody::Cube { dim, side } }
    }

    pub fn ball(dim: usize, radius: f64) -> Self {
        M::UniformBody { body: ConvexBody::Ball { dim, radius } }
    }

    pub fn simplex(dim: usize) -> Self {
        M::UniformBody { body: ConvexBody::Simplex { dim } }
    }

    /// Product of `n` copies of Exp(1) − 1.
    pub fn exp_product(n: usize) -> Self {
        M::Product { factors: vec![M::ShiftedExponential; n] }
    }

    pub fn dim(&self) -> usize {
        match self {
            M::Interval { .. } | M::ShiftedExponential => 1,
            M::Gaussian { mean, .. } => mean.len(),
            M::UniformBody { body } => body.dim(),
            M::ComplexExponential { n } => 2 * n,
            M::Product { factors } => factors.iter().map(|f| f.dim()).sum(),
            M::GaussianTilt { base, .. } => base.dim(),
            M::Affine { shift, .. } => shift.len(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            M::Interval { .. } => "Interval",
            M::ShiftedExponential => "ShiftedExponential",
            M::Gaussian { .. } => "Gaussian",
            M::UniformBody { .. } => "UniformBody",
            M::ComplexExponential { .. } => "ComplexExponential",
            M::Product { .. } => "Product",
            M::GaussianTilt { .. } => "GaussianTilt",
            M::Affine { .. } => "Affine",
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            M::Interval { .. } | M::UniformBody { .. } => true,
            M::Product { factors } => factors.iter().all(|f| f.is_bounded()),
            M::GaussianTilt { base, .. } | M::Affine { base, .. } => base.is_bounded(),
            _ => false,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serializes")
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Canonical one-dimensional form, for measures on the line.
    pub fn as_canon1d(&self) -> Result<Option<Canon1D>> {
        if self.dim() != 1 {
            return Ok(None);
        }
        Ok(match self {
            M::Interval { a, b } => Some(Canon1D::new(Prim1::Uniform { a: *a, b: *b })),
            M::ShiftedExponential => Some(Canon1D::new(Prim1::ShiftedExp)),
            M::Gaussian { mean, cov } => Some(Canon1D::new(Prim1::Normal { m: mean[0], s: cov[0][0].sqrt() })),
            M::UniformBody { body } => {
                let (lo, hi) = body.bounding_box();
                Some(Canon1D::new(Prim1::Uniform { a: lo[0], b: hi[0] }))
            }
            M::Product { factors } => match factors.iter().find(|f| f.dim() == 1) {
                Some(f) => f.as_canon1d()?,
                None => None,
            },
            M::GaussianTilt { base, theta, t } => match base.as_canon1d()? {
                Some(c) => Some(c.tilt(theta[0], *t)?.0),
                None => None,
            },
            M::Affine { base, matrix, shift } => base.as_canon1d()?.map(|c| c.affine(matrix[0][0], shift[0])),
            M::ComplexExponential { .. } => None,
        })
    }

    /// Splits the measure into independent coordinate blocks, in order.
    pub fn blocks(&self) -> Result<Vec<Block>> {
        if let Some(c) = self.as_canon1d()? {
            return Ok(vec![Block::One(c)]);
        }
        Ok(match self {
            M::Gaussian { mean, cov } => {
                let n = mean.len();
                let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || cov[i][j] == 0.0));
                if diagonal {
                    (0..n)
                        .map(|i| Block::One(Canon1D::new(Prim1::Normal { m: mean[i], s: cov[i][i].sqrt() })))
                        .collect()
                } else {
                    vec![Block::Gauss { mean: DVector::from_vec(mean.clone()), cov: from_rows(cov) }]
                }
            }
            M::UniformBody { body: ConvexBody::Cube { dim, side } } => {
                vec![Block::One(Canon1D::new(Prim1::Uniform { a: 0.0, b: *side })); *dim]
            }
            M::ComplexExponential { n } => vec![Block::Pair { theta: [0.0, 0.0], t: 0.0 }; *n],
            M::Product { factors } => {
                let mut out = Vec::new();
                for f in factors {
                    out.extend(f.blocks()?);
                }
                out
            }
            M::GaussianTilt { base, theta, t } => {
                let mut out = Vec::new();
                let mut off = 0;
                for b in base.blocks()? {
                    let d = b.dim();
                    out.push(block_tilt(&b, &theta[off..off + d], *t)?.0);
                    off += d;
                }
                out
            }
            _ => vec![Block::Other(self.clone())],
        })
    }

    /// Closed-form mean, covariance, Poincaré constant and entropy.
    pub fn exact_moments(&self) -> Result<ExactMoments> {
        let n = self.dim();
        let iso = |v: f64| to_rows(&(DMatrix::identity(n, n) * v));
        match self {
            M::Interval { a, b } => {
                let l = b - a;
                Ok(ExactMoments {
                    mean: vec![0.5 * (a + b)],
                    cov: vec![vec![l * l / 12.0]],
                    cp: Some(l * l / (PI * PI)),
                    entropy: Some(l.ln()),
                })
            }
            M::ShiftedExponential => {
                Ok(ExactMoments { mean: vec![0.0], cov: vec![vec![1.0]], cp: Some(4.0), entropy: Some(1.0) })
            }
            M::Gaussian { mean, cov } => {
                let c = from_rows(cov);
                let (vals, _) = sym_eigen(&c);
                let ln_det: f64 = vals.iter().map(|v| v.ln()).sum();
                Ok(ExactMoments {
                    mean: mean.clone(),
                    cov: cov.clone(),
                    cp: Some(*vals.last().unwrap()),
                    entropy: Some(0.5 * (n as f64 * (2.0 * PI * E).ln() + ln_det)),
                })
            }
            M::UniformBody { body } => {
                let (mean, cov) = body.moments().ok_or(LcError::NoExactOracle)?;
                let cp = match body {
                    ConvexBody::Cube { side, .. } => Some(side * side / (PI * PI)),
                    ConvexBody::Ball { dim: 1, radius } => Some(4.0 * radius * radius / (PI * PI)),
                    ConvexBody::Simplex { dim: 1 } => Some(2.0 / (PI * PI)),
                    _ => None,
                };
                Ok(ExactMoments { mean, cov: to_rows(&cov), cp, entropy: body.ln_volume() })
            }
            M::ComplexExponential { n } => Ok(ExactMoments {
                mean: vec![0.0; 2 * n],
                cov: iso(3.0),
                cp: None,
                entropy: Some(*n as f64 * (2.0 + (2.0 * PI).ln())),
            }),
            M::Product { factors } => {
                let parts: Vec<ExactMoments> = factors.iter().map(|f| f.exact_moments()).collect::<Result<_>>()?;
                let mut cov = DMatrix::zeros(n, n);
                let mut mean = Vec::with_capacity(n);
                let mut off = 0;
                for p in &parts {
                    let d = p.mean.len();
                    for i in 0..d {
                        for j in 0..d {
                            cov[(off + i, off + j)] = p.cov[i][j];
                        }
                    }
                    mean.extend(&p.mean);
                    off += d;
                }
                let cp = parts.iter().map(|p| p.cp).try_fold(0.0f64, |acc, c| c.map(|c| acc.max(c)));
                let entropy = parts.iter().map(|p| p.entropy).try_fold(0.0, |acc, e| e.map(|e| acc + e));
                Ok(ExactMoments { mean, cov: to_rows(&cov), cp, entropy })
            }
            M::GaussianTilt { base, theta, t } => match base.as_ref() {
                M::Gaussian { mean, cov } => {
                    let (m, c, _) = gaussian_tilt(mean, &from_rows(cov), theta, *t);
                    M::gaussian(m, c).exact_moments()
                }
                _ => Err(LcError::NoExactOracle),
            },
            M::Affine { base, matrix, shift } => {
                let e = base.exact_moments()?;
                let a = from_rows(matrix);
                let mean = &a * DVector::from_vec(e.mean) + DVector::from_vec(shift.clone());
                let cov = &a * from_rows(&e.cov) * a.transpose();
                let ata = a.transpose() * &a;
                let c2 = ata.trace() / a.ncols() as f64;
                let conformal = (ata - DMatrix::identity(a.ncols(), a.ncols()) * c2).norm() <= 1e-12 * c2.max(1.0)
                    && a.nrows() == a.ncols();
                let ln_det = a.clone().determinant().abs().ln();
                Ok(ExactMoments {
                    mean: mean.iter().copied().collect(),
                    cov: to_rows(&cov),
                    cp: if conformal { e.cp.map(|c| c * c2) } else { None },
                    entropy: e.entropy.map(|h| h + ln_det),
                })
            }
        }
    }

    /// Mean and covariance: closed form when available, otherwise assembled
    /// from block quadratures.
    pub fn moments(&self) -> Result<(Vec<f64>, DMatrix<f64>)> {
        if let Ok(e) = self.exact_moments() {
            return Ok((e.mean, from_rows(&e.cov)));
        }
        let n = self.dim();
        let mut mean = Vec::with_capacity(n);
        let mut cov = DMatrix::zeros(n, n);
        let mut off = 0;
        for b in self.blocks()? {
            let d = b.dim();
            let (m, c) = block_moments(&b)?;
            for i in 0..d {
                for j in 0..d {
                    cov[(off + i, off + j)] = c[(i, j)];
                }
            }
            mean.extend(m);
            off += d;
        }
        Ok((mean, cov))
    }

    /// Applies the Gaussian tilt exp(x·θ − t|x|²/2).
    pub fn tilt(&self, theta: &[f64], t: f64) -> Result<LogConcaveMeasure> {
        if theta.len() != self.dim() || t < 0.0 || !t.is_finite() {
            return Err(LcError::InvalidArgument("tilt dimension or sign".into()));
        }
        if t == 0.0 && theta.iter().all(|&v| v == 0.0) {
            return Ok(self.clone());
        }
        let out = match self {
            M::Gaussian { mean, cov } => {
                let (m, c, _) = gaussian_tilt(mean, &from_rows(cov), theta, t);
                return Ok(M::gaussian(m, c));
            }
            M::GaussianTilt { base, theta: th0, t: t0 } => {
                let th: Vec<f64> = th0.iter().zip(theta).map(|(a, b)| a + b).collect();
                return base.tilt(&th, t0 + t);
            }
            _ => M::GaussianTilt { base: Box::new(self.clone()), theta: theta.to_vec(), t },
        };
        if !tilt_integrable(self, theta, t)? {
            return Err(LcError::TiltNotIntegrable);
        }
        out.blocks()?;
        Ok(out)
    }

    /// ln E exp(X·θ − t|X|²/2) under this measure.
    pub fn log_laplace_tilt(&self, theta: &[f64], t: f64) -> Result<f64> {
        if !tilt_integrable(self, theta, t)? {
            return Err(LcError::TiltNotIntegrable);
        }
        let mut total = 0.0;
        let mut off = 0;
        for b in self.blocks()? {
            let d = b.dim();
            total += block_tilt(&b, &theta[off..off + d], t)?.1;
            off += d;
        }
        Ok(total)
    }

    /// Normalizer of a GaussianTilt relative to its base; 0 for other kinds.
    pub fn tilt_log_normalizer(&self) -> Result<f64> {
        match self {
            M::GaussianTilt { base, theta, t } => base.log_laplace_tilt(theta, *t),
            _ => Ok(0.0),
        }
    }
}

/// Closed-form Gaussian tilt: (mean, cov, ln E e^{θ·X − t|X|²/2}).
pub fn gaussian_tilt(mean: &[f64], cov: &DMatrix<f64>, theta: &[f64], t: f64) -> (Vec<f64>, DMatrix<f64>, f64) {
    let n = mean.len();
    let cinv = cov.clone().try_inverse().expect("nonsingular covariance");
    let prec = &cinv + DMatrix::identity(n, n) * t;
    let new_cov = prec.clone().try_inverse().expect("positive definite precision");
    let m = DVector::from_column_slice(mean);
    let h = &cinv * &m + DVector::from_column_slice(theta);
    let new_mean = &new_cov * &h;
    let ln_det = (DMatrix::identity(n, n) + cov * t).determinant().ln();
    let log_z = -0.5 * ln_det + 0.5 * h.dot(&new_mean) - 0.5 * m.dot(&(&cinv * &m));
    (new_mean.iter().copied().collect(), new_cov, log_z)
}

fn tilt_integrable(m: &LogConcaveMeasure, theta: &[f64], t: f64) -> Result<bool> {
    if t > 0.0 {
        return Ok(true);
    }
    Ok(match m {
        M::Interval { .. } | M::UniformBody { .. } | M::Gaussian { .. } => true,
        M::ShiftedExponential => theta[0] < 1.0,
        M::ComplexExponential { n } => {
            (0..*n).all(|j| theta[2 * j] * theta[2 * j] + theta[2 * j + 1] * theta[2 * j + 1] < 1.0)
        }
        M::Product { factors } => {
            let mut off = 0;
            let mut ok = true;
            for f in factors {
                let d = f.dim();
                ok &= tilt_integrable(f, &theta[off..off + d], t)?;
                off += d;
            }
            ok
        }
        M::GaussianTilt { base, theta: th0, t: t0 } => {
            let th: Vec<f64> = th0.iter().zip(theta).map(|(a, b)| a + b).collect();
            tilt_integrable(base, &th, *t0)?
        }
        M::Affine { base, matrix, .. } => {
            let a = from_rows(matrix);
            let pulled = a.transpose() * DVector::from_column_slice(theta);
            tilt_integrable(base, pulled.as_slice(), 0.0)?
        }
    })
}

/// Tilts one block; returns the tilted block and ln E e^{θ·X − t|X|²/2}.
pub fn block_tilt(b: &Block, theta: &[f64], t: f64) -> Result<(Block, f64)> {
    match b {
        Block::One(c) => {
            let (c2, rel) = c.tilt(theta[0], t)?;
            Ok((Block::One(c2), rel))
        }
        Block::Pair { theta: th0, t: t0 } => {
            let nth = [th0[0] + theta[0], th0[1] + theta[1]];
            let old = canon::pair_tilt(*th0, *t0)?.0;
            let new = canon::pair_tilt(nth, t0 + t)?.0;
            Ok((Block::Pair { theta: nth, t: t0 + t }, new - old))
        }
        Block::Gauss { mean, cov } => {
            let (m, c, lz) = gaussian_tilt(mean.as_slice(), cov, theta, t);
            Ok((Block::Gauss { mean: DVector::from_vec(m), cov: c }, lz))
        }
        Block::Other(m) => {
            if theta.iter().all(|&v| v == 0.0) && t == 0.0 {
                return Ok((b.clone(), 0.0));
            }
            if !tilt_integrable(m, theta, t)? {
                return Err(LcError::TiltNotIntegrable);
            }
            let rel = other_log_laplace_tilt(m, theta, t)?;
            let tilted = match m {
                M::GaussianTilt { base, theta: th0, t: t0 } => {
                    let th: Vec<f64> = th0.iter().zip(theta).map(|(a, b)| a + b).collect();
                    M::GaussianTilt { base: base.clone(), theta: th, t: t0 + t }
                }
                _ => M::GaussianTilt { base: Box::new(m.clone()), theta: theta.to_vec(), t },
            };
            Ok((Block::Other(tilted), rel))
        }
    }
}

/// Importance-sampling size for normalizers without a closed form.
const IS_SAMPLES: usize = 1 << 17;

fn other_log_laplace_tilt(m: &LogConcaveMeasure, theta: &[f64], t: f64) -> Result<f64> {
    if let M::Affine { base, matrix, shift } = m {
        if t == 0.0 {
            let a = from_rows(matrix);
            let pulled = a.transpose() * DVector::from_column_slice(theta);
            let b: f64 = shift.iter().zip(theta).map(|(s, th)| s * th).sum();
            return Ok(b + base.log_laplace_tilt(pulled.as_slice(), 0.0)?);
        }
    }
    if let M::GaussianTilt { base, theta: th0, t: t0 } = m {
        let th: Vec<f64> = th0.iter().zip(theta).map(|(a, b)| a + b).collect();
        return Ok(base.log_laplace_tilt(&th, t0 + t)? - base.log_laplace_tilt(th0, *t0)?);
    }
    let batch = crate::mc::sample(m, IS_SAMPLES, crate::rng::label("tilt-normalizer"), crate::mc::Method::Direct)?;
    let vals: Vec<f64> = batch
        .rows()
        .map(|x| {
            let d: f64 = x.iter().zip(theta).map(|(a, b)| a * b).sum();
            d - 0.5 * t * x.iter().map(|v| v * v).sum::<f64>()
        })
        .collect();
    let mx = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = vals.iter().map(|v| (v - mx).exp()).sum();
    Ok(mx + (s / vals.len() as f64).ln())
}

/// Mean and covariance of a block.
pub fn block_moments(b: &Block) -> Result<(Vec<f64>, DMatrix<f64>)> {
    match b {
        Block::One(c) => {
            let (m, v, _) = c.moments();
            Ok((vec![m], DMatrix::from_element(1, 1, v)))
        }
        Block::Pair { theta, t } => {
            let (_, m, c) = canon::pair_tilt(*theta, *t)?;
            Ok((m.to_vec(), DMatrix::from_fn(2, 2, |i, j| c[i][j])))
        }
        Block::Gauss { mean, cov } => Ok((mean.iter().copied().collect(), cov.clone())),
        Block::Other(m) => {
            let e = m.exact_moments()?;
            Ok((e.mean, from_rows(&e.cov)))
        }
    }
}

/// Affine image of `m` with mean 0 and identity covariance.
///
/// Exact moments are used when the catalog has them; otherwise the batch's
/// empirical moments, and failing that, block quadrature.
pub fn make_isotropic(m: &LogConcaveMeasure, samples: Option<&crate::mc::SampleBatch>) -> Result<LogConcaveMeasure> {
    let (mean, cov) = match m.exact_moments() {
        Ok(e) => (e.mean, from_rows(&e.cov)),
        Err(_) => match samples {
            Some(b) => {
                let s = crate::mc::covariance_summary(b);
                (s.mean, from_rows(&s.cov))
            }
            None => m.moments()?,
        },
    };
    let n = mean.len();
    let centered = mean.iter().all(|v| v.abs() <= 1e-14);
    if centered && (&cov - DMatrix::identity(n, n)).amax() <= 1e-14 {
        return Ok(m.clone());
    }
    let a = sym_inv_sqrt(&cov)?;
    let shift = -(&a * DVector::from_vec(mean));
    Ok(M::Affine { base: Box::new(m.clone()), matrix: to_rows(&a), shift: shift.iter().copied().collect() })
}

/// ‖Cov‖_op of the exact covariance.
pub fn exact_op_norm(m: &LogConcaveMeasure) -> Result<f64> {
    Ok(lambda_max(&from_rows(&m.exact_moments()?.cov)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn json_round_trip() {
        let m = M::Product {
            factors: vec![
                M::interval(0.0, 2.0),
                M::ShiftedExponential,
                M::ball(3, 1.5),
                M::GaussianTilt { base: Box::new(M::ComplexExponential { n: 1 }), theta: vec![0.1, 0.2], t: 1.0 },
            ],
        };
        let s = m.to_json();
        assert_eq!(M::from_json(&s).unwrap(), m);
        let parsed = M::from_json(r#"{"kind":"Interval","params":{"a":0,"b":3.14159265}}"#).unwrap();
        assert_eq!(parsed, M::interval(0.0, 3.14159265));
        assert_eq!(M::from_json(r#"{"kind":"ShiftedExponential"}"#).unwrap(), M::ShiftedExponential);
    }

    #[test]
    fn cube_and_complex_exponential_oracles() {
        let e = M::cube(3, 1.0).exact_moments().unwrap();
        assert_relative_eq!(e.cov[1][1], 1.0 / 12.0);
        assert_relative_eq!(e.cp.unwrap(), 1.0 / (PI * PI));
        let e = M::ComplexExponential { n: 2 }.exact_moments().unwrap();
        assert_eq!(e.cov[3][3], 3.0);
        let e = M::gaussian(vec![0.0, 0.0], from_rows(&[vec![4.0, 0.0], vec![0.0, 1.0]])).exact_moments().unwrap();
        assert_relative_eq!(e.cp.unwrap(), 4.0);
    }

    #[test]
    fn tilt_examples() {
        let g = M::std_gaussian(1);
        let a = g.tilt(&[0.0], 1.0).unwrap();
        let e = a.exact_moments().unwrap();
        assert_relative_eq!(e.cov[0][0], 0.5, epsilon = 1e-15);
        let b = g.tilt(&[0.7], 0.0).unwrap();
        let e = b.exact_moments().unwrap();
        assert_relative_eq!(e.mean[0], 0.7, epsilon = 1e-15);
        assert_relative_eq!(e.cov[0][0], 1.0, epsilon = 1e-15);
        let x = M::ball(2, 1.0);
        assert_eq!(x.tilt(&[0.0, 0.0], 0.0).unwrap(), x);
    }

    #[test]
    fn tilt_not_integrable() {
        assert_eq!(M::ShiftedExponential.tilt(&[1.5], 0.0), Err(LcError::TiltNotIntegrable));
        assert_eq!(M::ComplexExponential { n: 1 }.tilt(&[0.8, 0.8], 0.0), Err(LcError::TiltNotIntegrable));
        assert!(M::ShiftedExponential.tilt(&[1.5], 0.1).is_ok());
    }

    #[test]
    fn no_exact_oracle_for_tilted_exponential() {
        let m = M::ShiftedExponential.tilt(&[0.2], 1.0).unwrap();
        assert_eq!(m.exact_moments(), Err(LcError::NoExactOracle));
        let (mean, cov) = m.moments().unwrap();
        assert!(mean[0].is_finite() && cov[(0, 0)] > 0.0);
    }

    #[test]
    fn make_isotropic_examples() {
        let m = make_isotropic(&M::interval(0.0, 5.0), None).unwrap();
        let e = m.exact_moments().unwrap();
        assert_relative_eq!(e.cov[0][0], 1.0, epsilon = 1e-14);
        assert!(e.mean[0].abs() < 1e-14);
        let c = m.as_canon1d().unwrap().unwrap();
        let (lo, hi) = c.support();
        assert_relative_eq!(lo, -3f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(hi, 3f64.sqrt(), epsilon = 1e-14);

        let g = M::std_gaussian(3);
        assert_eq!(make_isotropic(&g, None).unwrap(), g);

        let n = 5;
        let nf = n as f64;
        let b = make_isotropic(&M::ball(n, nf.sqrt()), None).unwrap();
        if let M::Affine { matrix, .. } = &b {
            assert_relative_eq!(matrix[0][0], ((nf + 2.0) / nf).sqrt(), epsilon = 1e-12);
            assert!(matrix[0][1].abs() < 1e-14);
        } else {
            panic!("expected affine image");
        }
    }

    #[test]
    fn product_cp_is_max() {
        let p = M::Product { factors: vec![M::interval(0.0, PI), M::ShiftedExponential, M::std_gaussian(2)] };
        assert_relative_eq!(p.exact_moments().unwrap().cp.unwrap(), 4.0);
    }
}
