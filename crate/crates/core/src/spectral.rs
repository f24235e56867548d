//! Poincaré-constant estimation and the spectral identities around it.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Lower,
    Upper,
    TwoSided,
}

/// A Poincaré or Cheeger value with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimate {
    pub value: f64,
    pub bound_kind: BoundKind,
    pub method: String,
    pub se: f64,
    pub warning: Option<String>,
}

impl SpectralEstimate {
    pub fn new(value: f64, bound_kind: BoundKind, method: &str, se: f64) -> Self {
        SpectralEstimate { value, bound_kind, method: method.to_string(), se, warning: None }
    }
}

use crate::cubature::Cubature;
use crate::error::{LcError, Result};
use crate::linalg::sym_eigen;
use crate::mc::SampleBatch;
use crate::measures::{LogConcaveMeasure as M, Potential};
use crate::onedim::Law1D;
use crate::poly::{hermite, multi_indices, Poly};
use crate::stats::{self, Estimate};
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

/// A test function with its gradient.
#[derive(Debug, Clone)]
pub enum BasisFn {
    Poly { p: Poly, grad: Vec<Poly> },
    /// cos(freq·(x[coord] − origin)).
    Cos { coord: usize, freq: f64, origin: f64 },
}

impl BasisFn {
    pub fn poly(p: Poly) -> Self {
        BasisFn::Poly { grad: p.gradient(), p }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            BasisFn::Poly { p, .. } => p.eval(x),
            BasisFn::Cos { coord, freq, origin } => (freq * (x[*coord] - origin)).cos(),
        }
    }

    pub fn grad(&self, x: &[f64], out: &mut [f64]) {
        match self {
            BasisFn::Poly { grad, .. } => {
                for (o, g) in out.iter_mut().zip(grad) {
                    *o = g.eval(x);
                }
            }
            BasisFn::Cos { coord, freq, origin } => {
                out.iter_mut().for_each(|v| *v = 0.0);
                out[*coord] = -freq * (freq * (x[*coord] - origin)).sin();
            }
        }
    }

    fn shifted(&self, dim: usize, offset: usize) -> Self {
        match self {
            BasisFn::Poly { p, .. } => BasisFn::poly(p.embed(dim, offset)),
            BasisFn::Cos { coord, freq, origin } => BasisFn::Cos { coord: coord + offset, freq: *freq, origin: *origin },
        }
    }
}

#[derive(Debug, Clone)]
pub struct FunctionBasis {
    pub dim: usize,
    pub functions: Vec<BasisFn>,
    pub description: String,
}

impl FunctionBasis {
    /// Products of Hermite polynomials with total degree 1..=d.
    pub fn hermite(dim: usize, d: u32) -> Self {
        let functions = multi_indices(dim, 1, d)
            .into_iter()
            .map(|e| {
                let mut p = Poly::constant(dim, 1.0);
                for (i, k) in e.iter().enumerate() {
                    p = p.mul(&hermite(*k as usize).embed(dim, i));
                }
                BasisFn::poly(p)
            })
            .collect();
        FunctionBasis { dim, functions, description: format!("hermite({d})") }
    }

    /// Monomials of total degree 1..=d.
    pub fn poly(dim: usize, d: u32) -> Self {
        let functions = multi_indices(dim, 1, d).into_iter().map(|e| BasisFn::poly(Poly::monomial(dim, &e, 1.0))).collect();
        FunctionBasis { dim, functions, description: format!("poly({d})") }
    }

    pub fn linear(dim: usize) -> Self {
        FunctionBasis { description: "linear".into(), ..FunctionBasis::poly(dim, 1) }
    }

    /// Neumann cosines cos(jπ(x − a)/(b − a)), j = 1..=k, in coordinate `coord`.
    pub fn trig(dim: usize, coord: usize, k: usize, a: f64, b: f64) -> Self {
        let functions = (1..=k)
            .map(|j| BasisFn::Cos { coord, freq: j as f64 * std::f64::consts::PI / (b - a), origin: a })
            .collect();
        FunctionBasis { dim, functions, description: format!("trig({k})") }
    }

    /// Functions of the first block of coordinates together with functions
    /// of the second, on the product space.
    pub fn product(a: &FunctionBasis, b: &FunctionBasis) -> Self {
        let dim = a.dim + b.dim;
        let mut functions: Vec<BasisFn> = a.functions.iter().map(|f| f.shifted(dim, 0)).collect();
        functions.extend(b.functions.iter().map(|f| f.shifted(dim, a.dim)));
        FunctionBasis { dim, functions, description: format!("{}⊕{}", a.description, b.description) }
    }

    pub fn extend(&self, other: &FunctionBasis) -> Self {
        let mut functions = self.functions.clone();
        functions.extend(other.functions.iter().cloned());
        FunctionBasis { dim: self.dim, functions, description: format!("{}+{}", self.description, other.description) }
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }
}

struct Gram {
    mean: DVector<f64>,
    second: DMatrix<f64>,
    energy: DMatrix<f64>,
    grad_mean: DMatrix<f64>,
}

fn gram(cub: &Cubature, basis: &FunctionBasis) -> Gram {
    let k = basis.len();
    let d = cub.dim;
    let zero = || Gram {
        mean: DVector::zeros(k),
        second: DMatrix::zeros(k, k),
        energy: DMatrix::zeros(k, k),
        grad_mean: DMatrix::zeros(k, d),
    };
    (0..cub.len())
        .into_par_iter()
        .fold(zero, |mut acc, i| {
            let x = cub.point(i);
            let w = cub.weights[i];
            let v = DVector::from_iterator(k, basis.functions.iter().map(|f| f.eval(x)));
            let mut g = DMatrix::zeros(k, d);
            let mut buf = vec![0.0; d];
            for (r, f) in basis.functions.iter().enumerate() {
                f.grad(x, &mut buf);
                for c in 0..d {
                    g[(r, c)] = buf[c];
                }
            }
            acc.mean.axpy(w, &v, 1.0);
            acc.second.ger(w, &v, &v, 1.0);
            acc.energy.gemm(w, &g, &g.transpose(), 1.0);
            acc.grad_mean += &g * w;
            acc
        })
        .reduce(zero, |mut a, b| {
            a.mean += b.mean;
            a.second += b.second;
            a.energy += b.energy;
            a.grad_mean += b.grad_mean;
            a
        })
}

/// Top generalized eigenpair of (A, B) after whitening B.
fn top_pair(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    let (bv, bq) = sym_eigen(b);
    let (bmin, bmax) = (bv[0], *bv.last().unwrap());
    if bmax <= 0.0 || bmin <= bmax * 1e-10 {
        return Err(LcError::ReduceBasis);
    }
    let w = &bq * DMatrix::from_diagonal(&DVector::from_iterator(bv.len(), bv.iter().map(|v| 1.0 / v.sqrt())));
    let c = w.transpose() * a * &w;
    let (cv, cq) = sym_eigen(&crate::linalg::symmetrize(&c));
    let top = cv.len() - 1;
    Ok((cv[top], &w * cq.column(top)))
}

/// Rayleigh–Ritz details: the quotient and the maximizing combination.
#[derive(Debug, Clone)]
pub struct RitzResult {
    pub estimate: SpectralEstimate,
    pub coefficients: Vec<f64>,
    /// |E ∇f|² / E|∇f|² for the maximizer f, a diagnostic of a preferred direction.
    pub direction_share: f64,
}

fn ritz_value(cub: &Cubature, basis: &FunctionBasis) -> Result<(f64, DVector<f64>, Gram)> {
    let g = gram(cub, basis);
    let cov = &g.second - &g.mean * g.mean.transpose();
    let (lam, v) = top_pair(&crate::linalg::symmetrize(&cov), &crate::linalg::symmetrize(&g.energy))?;
    Ok((lam.max(0.0), v, g))
}

/// Largest ratio Var(f)/E|∇f|² over the span: a lower bound on C_P.
pub fn rayleigh_ritz(cub: &Cubature, basis: &FunctionBasis) -> Result<RitzResult> {
    let (value, v, g) = ritz_value(cub, basis)?;
    let se = if cub.monte_carlo {
        let nb = stats::BATCHES;
        let size = cub.len() / nb;
        let vals: Vec<f64> = (0..nb)
            .into_par_iter()
            .map(|b| ritz_value(&cub.slice(b * size..(b + 1) * size), basis).map(|r| r.0).unwrap_or(f64::NAN))
            .collect();
        (stats::variance(&vals) / nb as f64).sqrt()
    } else {
        0.0
    };
    let method = if cub.monte_carlo { "rayleigh-ritz-mc" } else { "rayleigh-ritz-quadrature" };
    let gm = g.grad_mean.transpose() * &v;
    let energy = (v.transpose() * &g.energy * &v)[(0, 0)];
    Ok(RitzResult {
        estimate: SpectralEstimate::new(value, BoundKind::Lower, method, se),
        coefficients: v.iter().copied().collect(),
        direction_share: gm.norm_squared() / energy,
    })
}

pub fn rayleigh_ritz_cp(cub: &Cubature, basis: &FunctionBasis) -> Result<SpectralEstimate> {
    Ok(rayleigh_ritz(cub, basis)?.estimate)
}

/// Both sides of ∫(Lu)² = ∫∇²ψ∇u·∇u + ∫‖∇²u‖²_HS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BochnerResult {
    pub lhs: f64,
    pub rhs: f64,
    /// |lhs − rhs| / |lhs|.
    pub residual: f64,
    /// Standard error of (lhs − rhs)/|lhs|; zero under quadrature.
    pub se: f64,
}

impl BochnerResult {
    pub fn passes(&self, tol: f64, k: f64) -> bool {
        if self.se > 0.0 { self.residual <= k * self.se } else { self.residual <= tol }
    }
}

pub fn bochner_check(m: &M, u: &Poly, cub: &Cubature) -> Result<BochnerResult> {
    let pot = Potential::new(m);
    let grad_u = u.gradient();
    let hess_u = u.hessian();
    let d = cub.dim;
    let terms: Vec<Option<(f64, f64)>> = (0..cub.len())
        .into_par_iter()
        .map(|i| {
            let x = cub.point(i);
            let gp = pot.grad(x)?;
            let hp = pot.hessian(x)?;
            let gu: Vec<f64> = grad_u.iter().map(|p| p.eval(x)).collect();
            let hu: Vec<Vec<f64>> = hess_u.iter().map(|r| r.iter().map(|p| p.eval(x)).collect()).collect();
            let lap: f64 = (0..d).map(|j| hu[j][j]).sum();
            let lu = lap - gp.iter().zip(&gu).map(|(a, b)| a * b).sum::<f64>();
            let mut quad = 0.0;
            let mut hs = 0.0;
            for a in 0..d {
                for b in 0..d {
                    quad += hp[(a, b)] * gu[a] * gu[b];
                    hs += hu[a][b] * hu[a][b];
                }
            }
            Some((lu * lu, quad + hs))
        })
        .collect();
    if terms.iter().any(|t| t.is_none()) {
        return Err(LcError::SingularHessian);
    }
    let terms: Vec<(f64, f64)> = terms.into_iter().map(Option::unwrap).collect();
    let lhs: f64 = terms.iter().zip(&cub.weights).map(|(t, w)| w * t.0).sum();
    let rhs: f64 = terms.iter().zip(&cub.weights).map(|(t, w)| w * t.1).sum();
    if lhs == 0.0 && rhs == 0.0 {
        return Ok(BochnerResult { lhs, rhs, residual: 0.0, se: 0.0 });
    }
    let se = if cub.monte_carlo {
        let diffs: Vec<f64> = terms.iter().map(|t| t.0 - t.1).collect();
        stats::batch_means(&diffs).se / lhs.abs()
    } else {
        0.0
    };
    Ok(BochnerResult { lhs, rhs, residual: (lhs - rhs).abs() / lhs.abs(), se })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LichnerowiczReport {
    pub t: f64,
    pub op_norm: f64,
    /// 1/t.
    pub plain: f64,
    /// √(‖Cov‖_op / t).
    pub improved: f64,
    pub rayleigh_ritz: SpectralEstimate,
    /// rayleigh_ritz ≤ improved ≤ plain.
    pub ordered: bool,
}

pub fn lichnerowicz_bounds(m: &M, cub: &Cubature, basis: &FunctionBasis) -> Result<LichnerowiczReport> {
    let t = Potential::new(m).regularity().strongly_convex.ok_or(LcError::NotStronglyConvex)?;
    let (_, cov) = m.moments()?;
    let op_norm = crate::linalg::op_norm(&cov);
    let plain = 1.0 / t;
    let improved = (op_norm / t).sqrt();
    let rr = rayleigh_ritz_cp(cub, basis)?;
    let ordered = rr.value <= improved * (1.0 + 1e-9) + 3.0 * rr.se && improved <= plain * (1.0 + 1e-12);
    Ok(LichnerowiczReport { t, op_norm, plain, improved, rayleigh_ritz: rr, ordered })
}

/// ∫(∇²ψ)^{-1}∇f·∇f − Var f.
pub fn brascamp_lieb_check(m: &M, f: &(dyn Fn(&[f64]) -> (f64, Vec<f64>) + Sync), cub: &Cubature) -> Result<Estimate> {
    let pot = Potential::new(m);
    let rows: Vec<Option<(f64, f64)>> = (0..cub.len())
        .into_par_iter()
        .map(|i| {
            let x = cub.point(i);
            let h = pot.hessian(x)?;
            let (v, g) = f(x);
            let g = DVector::from_vec(g);
            let sol = h.cholesky()?.solve(&g);
            Some((v, sol.dot(&g)))
        })
        .collect();
    if rows.iter().any(|r| r.is_none()) {
        return Err(LcError::SingularHessian);
    }
    let rows: Vec<(f64, f64)> = rows.into_iter().map(Option::unwrap).collect();
    let slack = |w: &[f64], r: &[(f64, f64)]| {
        let tot: f64 = w.iter().sum();
        let m1: f64 = r.iter().zip(w).map(|(r, w)| w * r.0).sum::<f64>() / tot;
        let var: f64 = r.iter().zip(w).map(|(r, w)| w * (r.0 - m1).powi(2)).sum::<f64>() / tot;
        let rhs: f64 = r.iter().zip(w).map(|(r, w)| w * r.1).sum::<f64>() / tot;
        rhs - var
    };
    if cub.monte_carlo {
        Ok(stats::batch_statistic(rows.len(), |rg| slack(&cub.weights[rg.clone()], &rows[rg])))
    } else {
        Ok(Estimate::new(slack(&cub.weights, &rows), 0.0))
    }
}

/// Var(|X|²) / (16 Σ E X_i⁴) for a centred unconditional batch.
pub fn unconditional_thinshell_ratio(b: &SampleBatch) -> Estimate {
    let q: Vec<f64> = b.rows().map(|x| x.iter().map(|v| v * v).sum()).collect();
    let p4: Vec<f64> = b.rows().map(|x| x.iter().map(|v| v.powi(4)).sum()).collect();
    stats::batch_statistic(b.n, |r| stats::variance(&q[r.clone()]) / (16.0 * stats::mean(&p4[r])))
}

/// (Var f, 4∫x²f′²) for a one-dimensional law.
pub fn unconditional_sides_1d(law: &Law1D, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> (f64, f64) {
    let m = law.expect(&f);
    let var = law.expect(|x| (f(x) - m).powi(2));
    (var, 4.0 * law.expect(|x| x * x * df(x) * df(x)))
}

/// Polynomial of degree ≤ d with standard normal coefficients.
pub fn random_poly(dim: usize, d: u32, seed: u64) -> Poly {
    use rand_distr::{Distribution, StandardNormal};
    let mut r = crate::rng::stream(seed, crate::rng::label("random-poly"));
    let mut p = Poly::zero(dim);
    for e in multi_indices(dim, 0, d) {
        let c: f64 = StandardNormal.sample(&mut r);
        p.add_term(e, c);
    }
    p
}

/// d·Var f − E|∇f|² under the standard Gaussian, by exact Gauss–Hermite quadrature.
pub fn hermite_degree_slack(p: &Poly, d: u32) -> Result<f64> {
    let cub = Cubature::for_measure(&M::std_gaussian(p.dim), d as usize + 2)?;
    let g = p.gradient();
    let m = cub.expect(|x| p.eval(x));
    let var = cub.expect(|x| (p.eval(x) - m).powi(2));
    let energy = cub.expect(|x| g.iter().map(|gi| gi.eval(x).powi(2)).sum());
    Ok(d as f64 * var - energy)
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::from(1u32), |acc, k| acc * BigInt::from(k))
}

/// E|∇f|²/‖f‖² for f(z) = z^k under ∏ e^{−|z|}/2π, with |∇f|² = 2|f′|².
pub fn complex_monomial_quotient(k: u64) -> Result<BigRational> {
    if k == 0 {
        return Err(LcError::InvalidArgument("k must be positive".into()));
    }
    let num = BigInt::from(2u32) * BigInt::from(k) * BigInt::from(k) * factorial(2 * k - 1);
    Ok(BigRational::new(num, factorial(2 * k + 1)))
}

/// ‖f‖²/‖f′‖² for f(z) = z^k.
pub fn complex_monomial_norm_ratio(k: u64) -> Result<BigRational> {
    if k == 0 {
        return Err(LcError::InvalidArgument("k must be positive".into()));
    }
    Ok(BigRational::new(factorial(2 * k + 1), BigInt::from(k) * BigInt::from(k) * factorial(2 * k - 1)))
}

pub fn poincare_proof_integrand(n: u32, t: f64) -> f64 {
    let n = n as i32;
    let a = t.powi(-n) + (1.0 - t).powi(-n);
    let b = (1.0 - 2.0 * t).abs().powi(-n);
    a.min(b)
}

/// (1/2)∫₀¹ min{t^{-n} + (1−t)^{-n}, |1−2t|^{-n}} dt, folded onto [0, 1/2]
/// and split where the two branches cross.
pub fn poincare_proof_constant(n: u32) -> Result<f64> {
    poincare_proof_constant_tol(n, 1e-13)
}

pub fn poincare_proof_constant_tol(n: u32, rel_tol: f64) -> Result<f64> {
    if n == 0 {
        return Err(LcError::InvalidArgument("n must be positive".into()));
    }
    if n > 30 {
        return Err(LcError::OverflowRegime);
    }
    let ni = n as i32;
    let gap = |t: f64| t.powi(-ni) + (1.0 - t).powi(-ni) - (1.0 - 2.0 * t).powi(-ni);
    let (mut a, mut b) = (1e-12, 0.5 - 1e-12);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if gap(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let cross = 0.5 * (a + b);
    let tol = rel_tol * 3f64.powi(ni);
    let left = crate::quad::adaptive(&|t: f64| (1.0 - 2.0 * t).powi(-ni), 0.0, cross, tol);
    let right = crate::quad::adaptive(&|t: f64| t.powi(-ni) + (1.0 - t).powi(-ni), cross, 0.5, tol);
    Ok(left + right)
}

/// Ĉ = max_{n ≤ nmax} value(n)·n/3ⁿ.
pub fn proof_constant_fit(nmax: u32) -> Result<f64> {
    (1..=nmax).map(|n| Ok(poincare_proof_constant(n)? * n as f64 / 3f64.powi(n as i32))).try_fold(0.0f64, |a, v: Result<f64>| Ok(a.max(v?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_traits::{One, ToPrimitive};
    use std::f64::consts::PI;

    #[test]
    fn gaussian_hermite_ritz_is_one() {
        let cub = Cubature::for_measure(&M::std_gaussian(2), 10).unwrap();
        let r = rayleigh_ritz_cp(&cub, &FunctionBasis::hermite(2, 3)).unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn interval_cosine_quotient() {
        let cub = Cubature::for_measure(&M::interval(0.0, PI), 10).unwrap();
        let r = rayleigh_ritz_cp(&cub, &FunctionBasis::trig(1, 0, 1, 0.0, PI)).unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ritz_monotone_in_basis() {
        let m = M::ShiftedExponential;
        let cub = Cubature::for_measure(&m, 10).unwrap();
        let mut last = 0.0;
        for d in 1..=5 {
            let v = rayleigh_ritz_cp(&cub, &FunctionBasis::poly(1, d)).unwrap().value;
            assert!(v >= last - 1e-10);
            assert!(v <= 4.0 + 1e-9);
            last = v;
        }
    }

    #[test]
    fn basis_gradients_match_differences() {
        let b = FunctionBasis::hermite(2, 3).extend(&FunctionBasis::trig(2, 1, 2, 0.0, 1.0));
        let x = [0.3, -0.7];
        let mut g = [0.0; 2];
        for f in &b.functions {
            f.grad(&x, &mut g);
            for i in 0..2 {
                let h = 1e-6;
                let mut xp = x;
                let mut xm = x;
                xp[i] += h;
                xm[i] -= h;
                let fd = (f.eval(&xp) - f.eval(&xm)) / (2.0 * h);
                assert!((fd - g[i]).abs() <= 1e-5 * (1.0 + g[i].abs()));
            }
        }
    }

    #[test]
    fn bochner_gaussian_square() {
        let cub = Cubature::for_measure(&M::std_gaussian(1), 10).unwrap();
        let u = Poly::monomial(1, &[2], 1.0);
        let r = bochner_check(&M::std_gaussian(1), &u, &cub).unwrap();
        assert_relative_eq!(r.lhs, 8.0, epsilon = 1e-12);
        assert_relative_eq!(r.rhs, 8.0, epsilon = 1e-12);
    }

    #[test]
    fn lichnerowicz_gaussian_equality() {
        let m = M::gaussian(vec![0.0, 0.0], DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0])));
        let cub = Cubature::for_measure(&m, 8).unwrap();
        let r = lichnerowicz_bounds(&m, &cub, &FunctionBasis::hermite(2, 2)).unwrap();
        assert_relative_eq!(r.improved, 4.0, epsilon = 1e-12);
        assert_relative_eq!(r.rayleigh_ritz.value, 4.0, epsilon = 1e-10);
        assert!(r.ordered);
        assert!(lichnerowicz_bounds(&M::cube(1, 1.0), &cub, &FunctionBasis::linear(2)).is_err());
    }

    #[test]
    fn brascamp_lieb_gaussian() {
        let m = M::std_gaussian(1);
        let cub = Cubature::for_measure(&m, 10).unwrap();
        let s = brascamp_lieb_check(&m, &|x: &[f64]| (x[0] * x[0], vec![2.0 * x[0]]), &cub).unwrap();
        assert_relative_eq!(s.value, 2.0, epsilon = 1e-12);
        let s = brascamp_lieb_check(&m, &|x: &[f64]| (3.0 * x[0], vec![3.0]), &cub).unwrap();
        assert!(s.value.abs() < 1e-12);
        let c = Cubature::for_measure(&M::interval(0.0, 1.0), 10).unwrap();
        assert_eq!(brascamp_lieb_check(&M::interval(0.0, 1.0), &|x: &[f64]| (x[0], vec![1.0]), &c).unwrap_err(), LcError::SingularHessian);
    }

    #[test]
    fn hermite_degree() {
        for d in 1..=5u32 {
            let h = BasisFn::poly(hermite(d as usize));
            let BasisFn::Poly { p, .. } = h else { unreachable!() };
            assert!(hermite_degree_slack(&p, d).unwrap().abs() < 1e-8);
        }
        let p = random_poly(3, 3, 5);
        assert!(hermite_degree_slack(&p, 3).unwrap() >= -1e-8);
    }

    #[test]
    fn complex_monomials() {
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert_eq!(complex_monomial_quotient(1).unwrap(), third);
        for k in 1..=60u64 {
            let q = complex_monomial_quotient(k).unwrap();
            assert_eq!(q, BigRational::new(BigInt::from(k), BigInt::from(2 * k + 1)));
            let r = complex_monomial_norm_ratio(k).unwrap();
            assert_eq!(r, BigRational::new(BigInt::from(4 * k + 2), BigInt::from(k)));
        }
        assert!(complex_monomial_quotient(0).is_err());
        let _ = BigRational::one();
        // ‖z^k‖² = ∫ r^{2k+1} e^{−r} dr by radial quadrature
        for k in 1..=4i32 {
            let v = crate::quad::adaptive(&|r: f64| r.powi(2 * k + 1) * (-r).exp(), 0.0, 200.0, 1e-10);
            let f = complex_monomial_quotient(k as u64).unwrap();
            let want = 2.0 * (k * k) as f64 * statrs::function::gamma::gamma(2.0 * k as f64) / v;
            assert_relative_eq!(f.to_f64().unwrap(), want, max_relative = 1e-9);
        }
    }

    #[test]
    fn proof_constant() {
        // n = 1 in closed form: crossing at (3 − √5)/2
        let c = (3.0 - 5f64.sqrt()) / 2.0;
        let want = -0.5 * (1.0 - 2.0 * c).ln() - (c / (1.0 - c)).ln();
        assert_relative_eq!(poincare_proof_constant(1).unwrap(), want, epsilon = 1e-11);
        assert_relative_eq!(poincare_proof_integrand(2, 0.25), 4.0, epsilon = 1e-14);
        let a = poincare_proof_constant_tol(10, 1e-8).unwrap();
        let b = poincare_proof_constant_tol(10, 1e-13).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-7);
        let fit = proof_constant_fit(20).unwrap();
        assert!(b <= fit * 3f64.powi(10) / 10.0);
        assert_eq!(poincare_proof_constant(31).unwrap_err(), LcError::OverflowRegime);
    }
}
