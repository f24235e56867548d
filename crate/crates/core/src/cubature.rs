//! Weighted point sets representing a measure: tensor quadrature for
//! products of one-dimensional and Gaussian blocks, or a sample batch.

use crate::error::{LcError, Result};
use crate::measures::body::simplex_vertices;
use crate::measures::{Block, Canon1D, ConvexBody, LogConcaveMeasure as M, Prim1};
use crate::mc::SampleBatch;
use crate::quad::{gauss_hermite, gauss_legendre, log_concave_rule, Rule1D};
use nalgebra::DVector;

const MAX_NODES: usize = 4_000_000;

#[derive(Debug, Clone)]
pub struct Cubature {
    pub dim: usize,
    /// Row-major nodes.
    pub points: Vec<f64>,
    /// Probability weights summing to 1.
    pub weights: Vec<f64>,
    /// True when built from i.i.d. samples.
    pub monte_carlo: bool,
}

/// Quadrature nodes and probability weights of a one-dimensional law.
pub fn canon_rule(c: &Canon1D, order: usize) -> (Vec<f64>, Vec<f64>) {
    match c.prim {
        Prim1::Normal { .. } => {
            let (x, w) = gauss_hermite(order);
            let (m, v, _) = c.moments();
            (x.iter().map(|z| m + v.sqrt() * z).collect(), w)
        }
        Prim1::Uniform { .. } if c.t == 0.0 && c.theta == 0.0 => {
            let (a, b) = c.support();
            let r = Rule1D::composite(a, b, 4, order.max(20));
            let w = r.w.iter().map(|w| w / (b - a)).collect();
            (r.x, w)
        }
        _ => {
            let (lo, hi) = c.support();
            let g = |y: f64| c.log_density(y);
            // A tilted uniform is a truncated Gaussian: smooth on its window,
            // so a few high-order panels suffice.
            let (panels, per) = match c.prim {
                Prim1::Uniform { .. } => (4, order.max(20)),
                _ => (60, 20),
            };
            let (_, r) = log_concave_rule(&g, lo, hi, 200.0, panels, per);
            let mut w: Vec<f64> = r.x.iter().zip(&r.w).map(|(x, w)| w * g(*x).exp()).collect();
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= s);
            (r.x, w)
        }
    }
}

fn block_rule(b: &Block, order: usize) -> Result<(usize, Vec<f64>, Vec<f64>)> {
    match b {
        Block::One(c) => {
            let (x, w) = canon_rule(c, order);
            Ok((1, x, w))
        }
        Block::Gauss { mean, cov } => {
            let d = mean.len();
            let l = cov.clone().cholesky().ok_or(LcError::NotPsd)?.l();
            let (x1, w1) = gauss_hermite(order);
            let count = order.pow(d as u32);
            if count > MAX_NODES {
                return Err(LcError::Unsupported("Gaussian block too large for tensor quadrature".into()));
            }
            let mut pts = Vec::with_capacity(count * d);
            let mut wts = Vec::with_capacity(count);
            let mut idx = vec![0usize; d];
            for _ in 0..count {
                let z = DVector::from_iterator(d, idx.iter().map(|&i| x1[i]));
                let y = mean + &l * z;
                pts.extend(y.iter());
                wts.push(idx.iter().map(|&i| w1[i]).product());
                for k in 0..d {
                    idx[k] += 1;
                    if idx[k] < order {
                        break;
                    }
                    idx[k] = 0;
                }
            }
            Ok((d, pts, wts))
        }
        _ => Err(LcError::Unsupported("no tensor quadrature for this block; use a sample batch".into())),
    }
}

impl Cubature {
    /// Tensor quadrature; `order` is the Gauss–Hermite order of Gaussian blocks.
    pub fn for_measure(m: &M, order: usize) -> Result<Self> {
        let blocks = m.blocks()?;
        let mut cur = Cubature { dim: 0, points: vec![], weights: vec![1.0], monte_carlo: false };
        for b in &blocks {
            let (d, x, w) = block_rule(b, order)?;
            let n_new = cur.weights.len() * w.len();
            if n_new > MAX_NODES {
                return Err(LcError::Unsupported("tensor quadrature too large; use a sample batch".into()));
            }
            let nd = cur.dim + d;
            let mut pts = Vec::with_capacity(n_new * nd);
            let mut wts = Vec::with_capacity(n_new);
            for i in 0..cur.weights.len() {
                for j in 0..w.len() {
                    pts.extend_from_slice(&cur.points[i * cur.dim..(i + 1) * cur.dim]);
                    pts.extend_from_slice(&x[j * d..(j + 1) * d]);
                    wts.push(cur.weights[i] * w[j]);
                }
            }
            cur = Cubature { dim: nd, points: pts, weights: wts, monte_carlo: false };
        }
        Ok(cur)
    }

    /// Quadrature for the uniform law on a body. Balls use polar
    /// coordinates (dim ≤ 3) and simplices the collapsed-cube map.
    pub fn for_body(body: &ConvexBody, order: usize) -> Result<Self> {
        let n = body.dim();
        let (x1, w1) = gauss_legendre(order);
        let unit = |z: f64| 0.5 * (z + 1.0);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        match body {
            ConvexBody::Cube { .. } => return Cubature::for_measure(&M::UniformBody { body: body.clone() }, order),
            ConvexBody::Ball { radius, .. } if n <= 3 => {
                let n_phi = 2 * order;
                for (zr, wr) in x1.iter().zip(&w1) {
                    let r = radius * unit(*zr);
                    let wr = wr * r.powi(n as i32 - 1);
                    match n {
                        1 => {
                            points.extend([r, -r]);
                            weights.extend([wr, wr]);
                        }
                        2 => {
                            for k in 0..n_phi {
                                let phi = 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64;
                                points.extend([r * phi.cos(), r * phi.sin()]);
                                weights.push(wr);
                            }
                        }
                        _ => {
                            for (zc, wc) in x1.iter().zip(&w1) {
                                let sin = (1.0 - zc * zc).sqrt();
                                for k in 0..n_phi {
                                    let phi = 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64;
                                    points.extend([r * sin * phi.cos(), r * sin * phi.sin(), r * zc]);
                                    weights.push(wr * wc);
                                }
                            }
                        }
                    }
                }
            }
            ConvexBody::Simplex { .. } => {
                let count = order.pow(n as u32);
                if count > MAX_NODES {
                    return Err(LcError::Unsupported("simplex too large for tensor quadrature".into()));
                }
                let verts = simplex_vertices(n);
                let mut idx = vec![0usize; n];
                for _ in 0..count {
                    let mut rest = 1.0;
                    let mut jac = 1.0;
                    let mut x = vec![0.0; n];
                    for (j, &i) in idx.iter().enumerate() {
                        let u = unit(x1[i]);
                        let wj = rest * u;
                        jac *= w1[i] * rest;
                        rest -= wj;
                        x.iter_mut().zip(&verts[j + 1]).for_each(|(a, v)| *a += wj * v);
                    }
                    x.iter_mut().zip(&verts[0]).for_each(|(a, v)| *a += rest * v);
                    points.extend(x);
                    weights.push(jac);
                    for k in 0..n {
                        idx[k] += 1;
                        if idx[k] < order {
                            break;
                        }
                        idx[k] = 0;
                    }
                }
            }
            _ => return Err(LcError::Unsupported("no quadrature for this body".into())),
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Cubature { dim: n, points, weights, monte_carlo: false })
    }

    pub fn from_batch(b: &SampleBatch) -> Self {
        Cubature { dim: b.dim, points: b.data.clone(), weights: vec![1.0 / b.n as f64; b.n], monte_carlo: true }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn expect(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        (0..self.len()).map(|i| self.weights[i] * f(self.point(i))).sum()
    }

    /// Sub-cubature of nodes in `range`, reweighted to a probability.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        let w: f64 = self.weights[range.clone()].iter().sum();
        Cubature {
            dim: self.dim,
            points: self.points[range.start * self.dim..range.end * self.dim].to_vec(),
            weights: self.weights[range].iter().map(|v| v / w).collect(),
            monte_carlo: self.monte_carlo,
        }
    }
}
