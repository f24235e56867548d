use super::{ConvexBody, LogConcaveMeasure as M};
use crate::error::Result;
use crate::linalg::{from_rows, sym_eigen};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Regularity flags of a potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regularity {
    pub smooth: bool,
    /// t with ∇²ψ ≥ t·Id.
    pub strongly_convex: Option<f64>,
    /// Upper bound on ∇²ψ.
    pub bounded_hessian: Option<f64>,
}

#[derive(Debug, Clone)]
enum Node {
    Interval { a: f64, b: f64 },
    ShiftedExp,
    Gauss { mean: DVector<f64>, prec: DMatrix<f64>, c: f64 },
    Body { body: ConvexBody, c: f64 },
    Ce { n: usize },
    Product(Vec<(usize, Node)>),
    Tilt { base: Box<Node>, theta: Vec<f64>, t: f64, c: f64 },
    Affine { base: Box<Node>, minv: DMatrix<f64>, shift: DVector<f64>, c: f64 },
}

/// ψ = −log density, compiled once for repeated evaluation.
///
/// Values are +∞ off the support. Gradients and Hessians are `None` where
/// they do not exist (outside the support, on a boundary, at a kink).
#[derive(Debug, Clone)]
pub struct Potential {
    pub dim: usize,
    node: Node,
    regularity: Regularity,
}

impl Potential {
    /// Potential with all normalizers except those of Gaussian tilts.
    pub fn new(m: &M) -> Self {
        Potential { dim: m.dim(), node: compile(m, false).expect("unnormalized compile"), regularity: regularity(m) }
    }

    /// Potential of the normalized density.
    pub fn normalized(m: &M) -> Result<Self> {
        Ok(Potential { dim: m.dim(), node: compile(m, true)?, regularity: regularity(m) })
    }

    pub fn regularity(&self) -> Regularity {
        self.regularity
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        eval(&self.node, x)
    }

    pub fn grad(&self, x: &[f64]) -> Option<Vec<f64>> {
        let mut g = vec![0.0; x.len()];
        grad(&self.node, x, &mut g)?;
        Some(g)
    }

    pub fn hessian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        hess(&self.node, x)
    }
}

fn compile(m: &M, normalized: bool) -> Result<Node> {
    Ok(match m {
        M::Interval { a, b } => Node::Interval { a: *a, b: *b },
        M::ShiftedExponential => Node::ShiftedExp,
        M::Gaussian { mean, cov } => {
            let c = from_rows(cov);
            let (vals, _) = sym_eigen(&c);
            let ln_det: f64 = vals.iter().map(|v| v.ln()).sum();
            Node::Gauss {
                mean: DVector::from_vec(mean.clone()),
                prec: c.try_inverse().expect("nonsingular covariance"),
                c: 0.5 * (mean.len() as f64 * (2.0 * PI).ln() + ln_det),
            }
        }
        M::UniformBody { body } => Node::Body { body: body.clone(), c: body.ln_volume().unwrap_or(0.0) },
        M::ComplexExponential { n } => Node::Ce { n: *n },
        M::Product { factors } => Node::Product(
            factors.iter().map(|f| Ok((f.dim(), compile(f, normalized)?))).collect::<Result<_>>()?,
        ),
        M::GaussianTilt { base, theta, t } => Node::Tilt {
            base: Box::new(compile(base, normalized)?),
            theta: theta.clone(),
            t: *t,
            c: if normalized { base.log_laplace_tilt(theta, *t)? } else { 0.0 },
        },
        M::Affine { base, matrix, shift } => {
            let a = from_rows(matrix);
            let c = a.clone().determinant().abs().ln();
            Node::Affine {
                base: Box::new(compile(base, normalized)?),
                minv: a.try_inverse().expect("invertible affine map"),
                shift: DVector::from_vec(shift.clone()),
                c,
            }
        }
    })
}

fn eval(node: &Node, x: &[f64]) -> f64 {
    match node {
        Node::Interval { a, b } => {
            if (*a..=*b).contains(&x[0]) {
                (b - a).ln()
            } else {
                f64::INFINITY
            }
        }
        Node::ShiftedExp => {
            if x[0] >= -1.0 {
                x[0] + 1.0
            } else {
                f64::INFINITY
            }
        }
        Node::Gauss { mean, prec, c } => {
            let d = DVector::from_column_slice(x) - mean;
            0.5 * d.dot(&(prec * &d)) + c
        }
        Node::Body { body, c } => {
            if body.contains(x) {
                *c
            } else {
                f64::INFINITY
            }
        }
        Node::Ce { n } => (0..*n).map(|j| x[2 * j].hypot(x[2 * j + 1])).sum::<f64>() + *n as f64 * (2.0 * PI).ln(),
        Node::Product(parts) => {
            let mut off = 0;
            let mut s = 0.0;
            for (d, p) in parts {
                s += eval(p, &x[off..off + d]);
                off += d;
            }
            s
        }
        Node::Tilt { base, theta, t, c } => {
            let lin: f64 = x.iter().zip(theta).map(|(a, b)| a * b).sum();
            let sq: f64 = x.iter().map(|v| v * v).sum();
            eval(base, x) - lin + 0.5 * t * sq + c
        }
        Node::Affine { base, minv, shift, c } => {
            let z = minv * (DVector::from_column_slice(x) - shift);
            eval(base, z.as_slice()) + c
        }
    }
}

fn grad(node: &Node, x: &[f64], g: &mut [f64]) -> Option<()> {
    match node {
        Node::Interval { a, b } => {
            if x[0] > *a && x[0] < *b {
                g[0] = 0.0;
                Some(())
            } else {
                None
            }
        }
        Node::ShiftedExp => {
            if x[0] > -1.0 {
                g[0] = 1.0;
                Some(())
            } else {
                None
            }
        }
        Node::Gauss { mean, prec, .. } => {
            let d = prec * (DVector::from_column_slice(x) - mean);
            g.copy_from_slice(d.as_slice());
            Some(())
        }
        Node::Body { body, .. } => {
            if body.interior(x) {
                g.iter_mut().for_each(|v| *v = 0.0);
                Some(())
            } else {
                None
            }
        }
        Node::Ce { n } => {
            for j in 0..*n {
                let r = x[2 * j].hypot(x[2 * j + 1]);
                if r == 0.0 {
                    return None;
                }
                g[2 * j] = x[2 * j] / r;
                g[2 * j + 1] = x[2 * j + 1] / r;
            }
            Some(())
        }
        Node::Product(parts) => {
            let mut off = 0;
            for (d, p) in parts {
                grad(p, &x[off..off + d], &mut g[off..off + d])?;
                off += d;
            }
            Some(())
        }
        Node::Tilt { base, theta, t, .. } => {
            grad(base, x, g)?;
            for i in 0..x.len() {
                g[i] += t * x[i] - theta[i];
            }
            Some(())
        }
        Node::Affine { base, minv, shift, .. } => {
            let z = minv * (DVector::from_column_slice(x) - shift);
            let mut gz = vec![0.0; z.len()];
            grad(base, z.as_slice(), &mut gz)?;
            let out = minv.transpose() * DVector::from_vec(gz);
            g.copy_from_slice(out.as_slice());
            Some(())
        }
    }
}

fn hess(node: &Node, x: &[f64]) -> Option<DMatrix<f64>> {
    let n = x.len();
    match node {
        Node::Interval { .. } | Node::ShiftedExp | Node::Body { .. } => {
            let mut g = vec![0.0; n];
            grad(node, x, &mut g)?;
            Some(DMatrix::zeros(n, n))
        }
        Node::Gauss { prec, .. } => Some(prec.clone()),
        Node::Ce { n: pairs } => {
            let mut h = DMatrix::zeros(n, n);
            for j in 0..*pairs {
                let (u, v) = (x[2 * j], x[2 * j + 1]);
                let r = u.hypot(v);
                if r == 0.0 {
                    return None;
                }
                let r3 = r * r * r;
                h[(2 * j, 2 * j)] = v * v / r3;
                h[(2 * j + 1, 2 * j + 1)] = u * u / r3;
                h[(2 * j, 2 * j + 1)] = -u * v / r3;
                h[(2 * j + 1, 2 * j)] = -u * v / r3;
            }
            Some(h)
        }
        Node::Product(parts) => {
            let mut h = DMatrix::zeros(n, n);
            let mut off = 0;
            for (d, p) in parts {
                let hp = hess(p, &x[off..off + d])?;
                h.view_mut((off, off), (*d, *d)).copy_from(&hp);
                off += d;
            }
            Some(h)
        }
        Node::Tilt { base, t, .. } => Some(hess(base, x)? + DMatrix::identity(n, n) * *t),
        Node::Affine { base, minv, shift, .. } => {
            let z = minv * (DVector::from_column_slice(x) - shift);
            let hz = hess(base, z.as_slice())?;
            Some(minv.transpose() * hz * minv)
        }
    }
}

fn regularity(m: &M) -> Regularity {
    let rough = Regularity { smooth: false, strongly_convex: None, bounded_hessian: None };
    match m {
        M::Interval { .. } | M::ShiftedExponential | M::UniformBody { .. } | M::ComplexExponential { .. } => rough,
        M::Gaussian { cov, .. } => {
            let (vals, _) = sym_eigen(&from_rows(cov));
            Regularity {
                smooth: true,
                strongly_convex: Some(1.0 / vals.last().unwrap()),
                bounded_hessian: Some(1.0 / vals[0]),
            }
        }
        M::Product { factors } => {
            let rs: Vec<Regularity> = factors.iter().map(regularity).collect();
            Regularity {
                smooth: rs.iter().all(|r| r.smooth),
                strongly_convex: rs.iter().map(|r| r.strongly_convex).try_fold(f64::INFINITY, |a, v| v.map(|v| a.min(v))),
                bounded_hessian: rs.iter().map(|r| r.bounded_hessian).try_fold(0.0f64, |a, v| v.map(|v| a.max(v))),
            }
        }
        M::GaussianTilt { base, t, .. } => {
            let r = regularity(base);
            let sc = r.strongly_convex.unwrap_or(0.0) + t;
            Regularity {
                smooth: r.smooth,
                strongly_convex: if sc > 0.0 { Some(sc) } else { None },
                bounded_hessian: r.bounded_hessian.map(|b| b + t),
            }
        }
        M::Affine { base, matrix, .. } => {
            let r = regularity(base);
            let a = from_rows(matrix);
            let (vals, _) = sym_eigen(&(a.transpose() * &a));
            let (smin, smax) = (vals[0], *vals.last().unwrap());
            Regularity {
                smooth: r.smooth,
                strongly_convex: r.strongly_convex.map(|s| s / smax),
                bounded_hessian: r.bounded_hessian.map(|b| b / smin),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_potential_is_normalized() {
        let p = Potential::new(&M::std_gaussian(2));
        assert_relative_eq!(p.eval(&[0.0, 0.0]), (2.0 * PI).ln(), epsilon = 1e-14);
        assert_eq!(p.regularity().strongly_convex, Some(1.0));
    }

    #[test]
    fn boundary_gradient_is_signalled() {
        let p = Potential::new(&M::interval(0.0, 1.0));
        assert!(p.grad(&[0.0]).is_none());
        assert_eq!(p.grad(&[0.5]), Some(vec![0.0]));
        assert_eq!(p.eval(&[2.0]), f64::INFINITY);
        let c = Potential::new(&M::ComplexExponential { n: 1 });
        assert!(c.grad(&[0.0, 0.0]).is_none());
    }

    #[test]
    fn tilt_adds_strong_convexity() {
        let m = M::exp_product(3).tilt(&[0.1, 0.0, -0.2], 1.5).unwrap();
        let p = Potential::normalized(&m).unwrap();
        assert_eq!(p.regularity().strongly_convex, Some(1.5));
        let h = p.hessian(&[0.3, 0.2, 1.0]).unwrap();
        assert_relative_eq!(h[(1, 1)], 1.5);
    }
}
