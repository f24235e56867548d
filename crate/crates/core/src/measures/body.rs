use crate::linalg::{dot, helmert};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// A closed half-space {x : normal·x ≤ offset}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Convex bodies with uniform measures in the catalog.
///
/// `Cube` is [0, side]^dim, `Ball` is centered at the origin, and `Simplex`
/// is the regular simplex with vertices e_1, ..., e_{n+1} written in an
/// orthonormal basis of its affine hull, centered at its barycenter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum ConvexBody {
    Cube { dim: usize, side: f64 },
    Ball { dim: usize, radius: f64 },
    Simplex { dim: usize },
    HalfspaceIntersection { dim: usize, halfspaces: Vec<Halfspace> },
}

impl ConvexBody {
    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Cube { dim, .. }
            | ConvexBody::Ball { dim, .. }
            | ConvexBody::Simplex { dim }
            | ConvexBody::HalfspaceIntersection { dim, .. } => *dim,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        const TOL: f64 = 1e-12;
        match self {
            ConvexBody::Cube { side, .. } => x.iter().all(|&v| (-TOL..=side + TOL).contains(&v)),
            ConvexBody::Ball { radius, .. } => dot(x, x) <= radius * radius * (1.0 + TOL),
            ConvexBody::Simplex { dim } => simplex_barycentric(*dim, x).iter().all(|&l| l >= -TOL),
            ConvexBody::HalfspaceIntersection { halfspaces, .. } => {
                halfspaces.iter().all(|h| dot(&h.normal, x) <= h.offset + TOL)
            }
        }
    }

    /// Strict interior test; boundary points return false.
    pub fn interior(&self, x: &[f64]) -> bool {
        match self {
            ConvexBody::Cube { side, .. } => x.iter().all(|&v| v > 0.0 && v < *side),
            ConvexBody::Ball { radius, .. } => dot(x, x) < radius * radius,
            ConvexBody::Simplex { dim } => simplex_barycentric(*dim, x).iter().all(|&l| l > 0.0),
            ConvexBody::HalfspaceIntersection { halfspaces, .. } => {
                halfspaces.iter().all(|h| dot(&h.normal, x) < h.offset)
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            ConvexBody::Cube { dim, side } => side * (*dim as f64).sqrt(),
            ConvexBody::Ball { radius, .. } => 2.0 * radius,
            ConvexBody::Simplex { dim } => {
                if *dim == 0 {
                    0.0
                } else {
                    std::f64::consts::SQRT_2
                }
            }
            ConvexBody::HalfspaceIntersection { .. } => {
                let v = self.vertices();
                let mut d: f64 = 0.0;
                for i in 0..v.len() {
                    for j in i + 1..v.len() {
                        let s: f64 = v[i].iter().zip(&v[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                        d = d.max(s.sqrt());
                    }
                }
                d
            }
        }
    }

    /// Exact volume when the kind has a closed form.
    pub fn volume(&self) -> Option<f64> {
        self.ln_volume().map(f64::exp)
    }

    pub fn ln_volume(&self) -> Option<f64> {
        use statrs::function::gamma::ln_gamma;
        match self {
            ConvexBody::Cube { dim, side } => Some(*dim as f64 * side.ln()),
            ConvexBody::Ball { dim, radius } => {
                Some(crate::special::ln_unit_ball_volume(*dim) + *dim as f64 * radius.ln())
            }
            ConvexBody::Simplex { dim } => {
                let n = *dim as f64;
                Some(0.5 * (n + 1.0).ln() - ln_gamma(n + 1.0))
            }
            ConvexBody::HalfspaceIntersection { .. } => None,
        }
    }

    /// Vertices of polytopes; empty for the ball.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        match self {
            ConvexBody::Cube { dim, side } => (0..1usize << dim)
                .map(|mask| (0..*dim).map(|i| if mask >> i & 1 == 1 { *side } else { 0.0 }).collect())
                .collect(),
            ConvexBody::Ball { .. } => Vec::new(),
            ConvexBody::Simplex { dim } => simplex_vertices(*dim),
            ConvexBody::HalfspaceIntersection { dim, halfspaces } => enumerate_vertices(*dim, halfspaces),
        }
    }

    /// Support function h_K(u) = sup_{x ∈ K} x·u.
    pub fn support_function(&self, u: &[f64]) -> f64 {
        match self {
            ConvexBody::Ball { radius, .. } => radius * dot(u, u).sqrt(),
            _ => self.vertices().iter().map(|v| dot(v, u)).fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Barycenter and covariance of the uniform measure, when known in closed form.
    pub fn moments(&self) -> Option<(Vec<f64>, DMatrix<f64>)> {
        match self {
            ConvexBody::Cube { dim, side } => Some((
                vec![0.5 * side; *dim],
                DMatrix::identity(*dim, *dim) * (side * side / 12.0),
            )),
            ConvexBody::Ball { dim, radius } => Some((
                vec![0.0; *dim],
                DMatrix::identity(*dim, *dim) * (radius * radius / (*dim as f64 + 2.0)),
            )),
            ConvexBody::Simplex { dim } => {
                let n = *dim as f64;
                Some((vec![0.0; *dim], DMatrix::identity(*dim, *dim) / ((n + 1.0) * (n + 2.0))))
            }
            ConvexBody::HalfspaceIntersection { .. } => None,
        }
    }

    /// Axis-aligned bounding box.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        match self {
            ConvexBody::Ball { radius, .. } => (vec![-radius; d], vec![*radius; d]),
            _ => {
                let v = self.vertices();
                let lo = (0..d).map(|i| v.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min)).collect();
                let hi = (0..d).map(|i| v.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
                (lo, hi)
            }
        }
    }
}

/// Barycentric coordinates of x ∈ ℝⁿ with respect to the regular simplex.
pub fn simplex_barycentric(n: usize, x: &[f64]) -> Vec<f64> {
    let h = helmert(n);
    let c = 1.0 / (n as f64 + 1.0);
    let xv = DVector::from_column_slice(x);
    let lifted = h * xv;
    lifted.iter().map(|v| v + c).collect()
}

pub fn simplex_vertices(n: usize) -> Vec<Vec<f64>> {
    let h = helmert(n);
    (0..=n).map(|i| h.row(i).iter().copied().collect()).collect()
}

fn enumerate_vertices(dim: usize, hs: &[Halfspace]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    let m = hs.len();
    let mut idx: Vec<usize> = (0..dim).collect();
    if m < dim {
        return out;
    }
    loop {
        let a = DMatrix::from_fn(dim, dim, |i, j| hs[idx[i]].normal[j]);
        let b = DVector::from_iterator(dim, idx.iter().map(|&i| hs[i].offset));
        if let Some(x) = a.lu().solve(&b) {
            let p: Vec<f64> = x.iter().copied().collect();
            let feasible = hs.iter().all(|h| dot(&h.normal, &p) <= h.offset + 1e-9);
            if feasible && !out.iter().any(|q| q.iter().zip(&p).all(|(u, v)| (u - v).abs() < 1e-9)) {
                out.push(p);
            }
        }
        // next combination
        let mut k = dim;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] < m - dim + k {
                idx[k] += 1;
                for j in k + 1..dim {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}
