//! The acceptance criteria, one function each. Every criterion draws its
//! randomness from `rng::derive(seed, id)`, so a fixed seed reproduces the
//! whole table.

use anyhow::Result;
use lclab_core::cubature::Cubature;
use lclab_core::eldansl::{
    brownian_ensemble, concentration_experiment, freedman_tail, gaussian_theta_covariance, tilt_law_check,
    two_point_ensemble,
};
use lclab_core::linalg::{identity, to_rows};
use lclab_core::localize::{conditional_cov_opnorm, expo_max_oracle, q_s, variance_decomposition};
use lclab_core::matrixineq::{exp_trace_hessian_check, softmax_proxy, sym_gaussian, trace_inequality_relative, wishart};
use lclab_core::mc::{covariance_summary, sample, Method};
use lclab_core::monge::{brute_force_matching, duality_report, matching_segments, noncrossing_check, solve_primal, TransportInstance};
use lclab_core::onedim::{cheeger_1d, cheeger_sandwich, spectral_gap_fd, Law1D};
use lclab_core::slicing::{
    entropy_sandwich_check, gaussian_l, hessian_metric_ball_check, isotropic_constant, simplex_l, slicing_estimates_check,
    LMethod,
};
use lclab_core::spectral::{
    bochner_check, complex_monomial_norm_ratio, complex_monomial_quotient, lichnerowicz_bounds, random_poly,
    rayleigh_ritz_cp, FunctionBasis,
};
use lclab_core::special::norm_sf;
use lclab_core::{rng, stats, LogConcaveMeasure as M};
use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::time::Instant;

use crate::report::{pass_word, render_grid, Assertion};

pub const DEFAULT_SEED: u64 = 20_240_601;

pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    /// Part of the `--quick` subset.
    pub quick: bool,
    run: fn(u64) -> Result<Vec<Assertion>>,
}

pub static CRITERIA: [Criterion; 18] = [
    Criterion { id: 1, title: "interval spectral gap", quick: true, run: c01 },
    Criterion { id: 2, title: "gaussian spectral gap", quick: true, run: c02 },
    Criterion { id: 3, title: "tensorization", quick: true, run: c03 },
    Criterion { id: 4, title: "ball covariance", quick: false, run: c04 },
    Criterion { id: 5, title: "gaussian thin shell", quick: false, run: c05 },
    Criterion { id: 6, title: "complex monomials", quick: true, run: c06 },
    Criterion { id: 7, title: "cheeger sandwich", quick: true, run: c07 },
    Criterion { id: 8, title: "improved lichnerowicz equality", quick: true, run: c08 },
    Criterion { id: 9, title: "bochner identity", quick: false, run: c09 },
    Criterion { id: 10, title: "gaussian localization", quick: false, run: c10 },
    Criterion { id: 11, title: "exponential obstruction", quick: false, run: c11 },
    Criterion { id: 12, title: "eldan sde laws", quick: false, run: c12 },
    Criterion { id: 13, title: "freedman", quick: false, run: c13 },
    Criterion { id: 14, title: "matrix inequalities", quick: true, run: c14 },
    Criterion { id: 15, title: "monge duality", quick: true, run: c15 },
    Criterion { id: 16, title: "isotropic constants", quick: false, run: c16 },
    Criterion { id: 17, title: "hessian-metric ball", quick: true, run: c17 },
    Criterion { id: 18, title: "property acceptance", quick: false, run: c18 },
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: u32,
    pub title: String,
    pub checks: Vec<Assertion>,
    pub error: Option<String>,
    pub seconds: f64,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(|a| a.pass)
    }

    /// The first failing check, or the first check when all pass.
    pub fn headline(&self) -> Option<&Assertion> {
        self.checks.iter().find(|a| !a.pass).or(self.checks.first())
    }

    pub fn line(&self) -> String {
        let detail = match (&self.error, self.headline()) {
            (Some(e), _) => format!("error: {e}"),
            (None, Some(a)) => format!("{}: observed {} expected {} ({})", a.name, a.observed, a.expected, a.tolerance),
            (None, None) => "no checks".into(),
        };
        let ok = self.checks.iter().filter(|a| a.pass).count();
        format!(
            "criterion {:>2} {} {} [{ok}/{} checks, {:.1}s] {detail}",
            self.id,
            if self.pass() { "PASS" } else { "FAIL" },
            self.title,
            self.checks.len(),
            self.seconds
        )
    }
}

pub fn run_criterion(c: &Criterion, seed: u64) -> Outcome {
    let start = Instant::now();
    let res = std::panic::catch_unwind(|| (c.run)(rng::derive(seed, c.id as u64)));
    let (checks, error) = match res {
        Ok(Ok(v)) => (v, None),
        Ok(Err(e)) => (vec![], Some(format!("{e:#}"))),
        Err(_) => (vec![], Some("panicked".into())),
    };
    Outcome { id: c.id, title: c.title.to_string(), checks, error, seconds: start.elapsed().as_secs_f64() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub seed: u64,
    pub quick: bool,
    pub outcomes: Vec<Outcome>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(Outcome::pass)
    }

    pub fn first_failure(&self) -> Option<&Outcome> {
        self.outcomes.iter().find(|o| !o.pass())
    }

    /// (criterion, expected, observed, tolerance, pass), one row per check.
    /// Timings are left out so that equal seeds give equal tables.
    pub fn rows(&self) -> Vec<Vec<String>> {
        let mut rows = vec![];
        for o in &self.outcomes {
            if let Some(e) = &o.error {
                rows.push(vec![format!("{} {}", o.id, o.title), "-".into(), format!("error: {e}"), "-".into(), "FAIL".into()]);
            }
            for a in &o.checks {
                rows.push(vec![
                    format!("{} {}: {}", o.id, o.title, a.name),
                    a.expected.clone(),
                    a.observed.clone(),
                    a.tolerance.clone(),
                    pass_word(a.pass).into(),
                ]);
            }
        }
        rows
    }

    pub fn columns() -> Vec<String> {
        ["criterion", "expected", "observed", "tolerance", "pass"].map(String::from).to_vec()
    }

    pub fn render(&self) -> String {
        render_grid(&Self::columns(), &self.rows())
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record(Self::columns()).expect("in-memory write");
        for r in self.rows() {
            w.write_record(&r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

/// Runs the suite. Criteria are independent and scheduled on the rayon pool.
pub fn verify_all(seed: u64, quick: bool) -> Summary {
    let outcomes = CRITERIA.par_iter().filter(|c| c.quick || !quick).map(|c| run_criterion(c, seed)).collect();
    Summary { seed, quick, outcomes }
}

pub fn criterion(id: u32) -> Option<&'static Criterion> {
    CRITERIA.iter().find(|c| c.id == id)
}

/// Wall-clock limit. The observed cell names the time only on failure so
/// that passing tables stay identical across runs.
fn runtime(name: &str, start: Instant, limit_s: f64) -> Assertion {
    let s = start.elapsed().as_secs_f64();
    let observed = if s < limit_s { "within limit".to_string() } else { format!("{s:.3} s") };
    Assertion::new(name, format!("< {limit_s} s"), observed, "0", s < limit_s)
}

fn centered_cube(n: usize) -> M {
    M::Affine { base: Box::new(M::cube(n, 1.0)), matrix: to_rows(&identity(n)), shift: vec![-0.5; n] }
}

fn max_abs(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, |a, x| a.max(x.abs()))
}

// ------------------------------------------------------------ criteria

fn c01(_: u64) -> Result<Vec<Assertion>> {
    let start = Instant::now();
    let law = Law1D::from_measure(&M::interval(0.0, PI))?;
    let e = spectral_gap_fd(&law, 10_000)?;
    Ok(vec![Assertion::relative("C_P of Uniform(0, pi)", 1.0, e.value, 1e-3), runtime("runtime", start, 1.0)])
}

fn c02(_: u64) -> Result<Vec<Assertion>> {
    let start = Instant::now();
    let mut out = vec![];
    for d in 1..=3 {
        let cub = Cubature::for_measure(&M::std_gaussian(d), 8)?;
        let v = rayleigh_ritz_cp(&cub, &FunctionBasis::hermite(d, 3))?.value;
        out.push(Assertion::absolute(&format!("hermite(3) quotient, dim {d}"), 1.0, v, 1e-12));
    }
    out.push(runtime("runtime", start, 1.0));
    Ok(out)
}

fn c03(_: u64) -> Result<Vec<Assertion>> {
    let (u, g) = (M::interval(0.0, PI), M::std_gaussian(1));
    let bu = FunctionBasis::trig(1, 0, 3, 0.0, PI).extend(&FunctionBasis::poly(1, 3));
    let bg = FunctionBasis::hermite(1, 3);
    let ritz = |m: &M, b: &FunctionBasis| -> Result<f64> { Ok(rayleigh_ritz_cp(&Cubature::for_measure(m, 24)?, b)?.value) };
    let (ru, rg) = (ritz(&u, &bu)?, ritz(&g, &bg)?);
    let rp = ritz(&M::Product { factors: vec![u, g] }, &FunctionBasis::product(&bu, &bg))?;
    Ok(vec![
        Assertion::absolute("product quotient vs 1", 1.0, rp, 1e-8),
        Assertion::absolute("product quotient vs max of factors", ru.max(rg), rp, 1e-8),
    ])
}

fn c04(seed: u64) -> Result<Vec<Assertion>> {
    let n = 10;
    let b = sample(&M::ball(n, (n as f64).sqrt()), 1_000_000, seed, Method::Direct)?;
    let s = covariance_summary(&b);
    let target = n as f64 / (n as f64 + 2.0);
    let mut worst = (0.0, 0, 0);
    for i in 0..n {
        for j in 0..n {
            let t = if i == j { target } else { 0.0 };
            let z = (s.cov[i][j] - t).abs() / s.se_cov[i][j];
            if z > worst.0 {
                worst = (z, i, j);
            }
        }
    }
    let (z, i, j) = worst;
    let t = if i == j { target } else { 0.0 };
    Ok(vec![
        Assertion::within_se(&format!("worst entry cov[{i}][{j}]"), t, s.cov[i][j], s.se_cov[i][j], 4.0),
        Assertion::at_most("max |z| over entries", 4.0, z),
    ])
}

fn c05(seed: u64) -> Result<Vec<Assertion>> {
    let (dim, chunks, per) = (64, 10, 100_000);
    let mut sq = Vec::with_capacity(chunks * per);
    for c in 0..chunks {
        let b = sample(&M::std_gaussian(dim), per, rng::derive(seed, c as u64), Method::Direct)?;
        sq.extend(b.rows().map(|x| x.iter().map(|v| v * v).sum::<f64>()));
    }
    let e = stats::batch_statistic(sq.len(), |r| stats::variance(&sq[r]) / dim as f64);
    Ok(vec![Assertion::within_se("Var(|X|^2)/n at dim 64", 2.0, e.value, e.se, 4.0)])
}

fn c06(_: u64) -> Result<Vec<Assertion>> {
    let third = BigRational::new(1.into(), 3.into());
    let half = BigRational::new(1.into(), 2.into());
    let q1 = complex_monomial_quotient(1)?;
    let mut increasing = true;
    let mut below_half = true;
    let mut ratio_ok = true;
    let mut prev = q1.clone();
    for k in 1..=100u64 {
        let q = complex_monomial_quotient(k)?;
        if k > 1 && q <= prev {
            increasing = false;
        }
        below_half &= q < half;
        let r = complex_monomial_norm_ratio(k)?;
        let expect = BigRational::new((4 * k + 2).into(), k.into());
        ratio_ok &= r == expect && r > BigRational::from_integer(4.into()) && r <= BigRational::from_integer(6.into());
        prev = q;
    }
    let q100 = prev.to_f64().unwrap_or(f64::NAN);
    Ok(vec![
        Assertion::new("quotient at k = 1", "1/3", &q1, "exact", q1 == third),
        Assertion::new("strictly increasing, k <= 100", true, increasing, "exact", increasing),
        Assertion::new("below 1/2, k <= 100", "< 0.5", q100, "exact", below_half),
        Assertion::new("norm ratio = 4 + 2/k in (4, 6]", true, ratio_ok, "exact", ratio_ok),
    ])
}

fn c07(_: u64) -> Result<Vec<Assertion>> {
    let s3 = 3f64.sqrt();
    let cases = [
        ("uniform", M::interval(-s3, s3), s3, 12.0 / (PI * PI)),
        ("gaussian", M::std_gaussian(1), (2.0 * PI).sqrt() / 2.0, 1.0),
        ("exp-1", M::ShiftedExponential, 1.0, 4.0),
    ];
    let mut out = vec![];
    for (name, m, psi_exact, cp_exact) in cases {
        let law = Law1D::from_measure(&m)?.isotropic();
        let psi = cheeger_1d(&law)?.value;
        let cp = spectral_gap_fd(&law, 10_000)?.value;
        out.push(Assertion::relative(&format!("{name} psi"), psi_exact, psi, 1e-2));
        out.push(Assertion::relative(&format!("{name} C_P"), cp_exact, cp, 1e-2));
        let ok = cheeger_sandwich(psi, cp, 1e-2);
        out.push(Assertion::new(
            &format!("{name} psi^2/pi <= C_P <= 4 psi^2"),
            format!("[{:.5}, {:.5}]", psi * psi / PI, 4.0 * psi * psi),
            cp,
            "rel 1e-2",
            ok,
        ));
    }
    Ok(out)
}

fn c08(_: u64) -> Result<Vec<Assertion>> {
    let m = M::gaussian(vec![0.0, 0.0], DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![4.0, 1.0])));
    let rep = lichnerowicz_bounds(&m, &Cubature::for_measure(&m, 8)?, &FunctionBasis::hermite(2, 2))?;
    Ok(vec![
        Assertion::absolute("strong convexity t", 0.25, rep.t, 1e-12),
        Assertion::absolute("improved bound", 4.0, rep.improved, 1e-12),
        Assertion::absolute("rayleigh-ritz C_P vs bound", rep.improved, rep.rayleigh_ritz.value, 1e-8),
        Assertion::new("ritz <= improved <= plain", true, rep.ordered, "1e-9", rep.ordered),
    ])
}

fn c09(seed: u64) -> Result<Vec<Assertion>> {
    let mut worst: f64 = 0.0;
    let mut k = 0;
    for n in 1..=3usize {
        let a = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.3 + 0.1 * (i + j) as f64 });
        let cov = &a * a.transpose();
        for m in [M::std_gaussian(n), M::gaussian(vec![0.5; n], cov)] {
            let cub = Cubature::for_measure(&m, 8)?;
            for d in 1..=4 {
                for _ in 0..3 {
                    k += 1;
                    let u = random_poly(n, d, rng::derive(seed, k));
                    worst = worst.max(bochner_check(&m, &u, &cub)?.residual);
                }
            }
        }
    }
    let mut out = vec![Assertion::at_most("max exact-quadrature residual, degree <= 4", 1e-8, worst)];
    let tilted = [
        M::GaussianTilt { base: Box::new(M::ComplexExponential { n: 1 }), theta: vec![0.3, -0.2], t: 1.0 },
        M::GaussianTilt { base: Box::new(M::ComplexExponential { n: 1 }), theta: vec![0.0, 0.0], t: 0.5 },
        M::GaussianTilt { base: Box::new(M::std_gaussian(2)), theta: vec![0.5, 0.0], t: 0.5 },
    ];
    for (i, m) in tilted.iter().enumerate() {
        let b = sample(m, 200_000, rng::derive(seed, 1000 + i as u64), Method::Direct)?;
        let cub = Cubature::from_batch(&b);
        for d in 2..=3 {
            let u = random_poly(2, d, rng::derive(seed, 2000 + 10 * i as u64 + d as u64));
            let r = bochner_check(m, &u, &cub)?;
            out.push(Assertion::new(
                &format!("MC residual, tilt {i}, degree {d}"),
                format!("<= 4 se ({:.3e})", 4.0 * r.se),
                r.residual,
                "4 se",
                r.passes(1e-8, 4.0),
            ));
        }
    }
    Ok(out)
}

fn c10(seed: u64) -> Result<Vec<Assertion>> {
    let mut out = vec![];
    let g1 = M::std_gaussian(1);
    let x0 = |x: &[f64]| x[0];
    let mut mean_err: f64 = 0.0;
    let mut cov_err: f64 = 0.0;
    let mut ident_err: f64 = 0.0;
    for &s in &[0.5, 2.0] {
        for &y in &[-2.0, 0.3, 1.7] {
            mean_err = mean_err.max((q_s(&x0, &g1, s, &[y])?.value - y / (1.0 + s)).abs());
        }
        let r = conditional_cov_opnorm(&M::std_gaussian(3), s, 50, rng::derive(seed, 1))?;
        cov_err = cov_err.max((r.mean_op_norm - s / (1.0 + s)).abs());
        let d = variance_decomposition(&M::std_gaussian(2), s, &x0, 20_000, rng::derive(seed, 2))?;
        // Q_s x₁ is linear in y with Var Y₁ = 1 + s
        let slope = q_s(&x0, &g1, s, &[1.0])?.value - q_s(&x0, &g1, s, &[0.0])?.value;
        ident_err = ident_err.max((d.expected_local.value + slope * slope * (1.0 + s) - 1.0).abs());
        ident_err = ident_err.max((d.expected_local.value - s / (1.0 + s)).abs());
        out.push(Assertion::within_se(
            &format!("variance of conditional means, s = {s}"),
            1.0 / (1.0 + s),
            d.variance_of_means.value,
            d.variance_of_means.se,
            4.0,
        ));
    }
    out.insert(0, Assertion::absolute("conditional mean y/(1+s)", 0.0, mean_err, 1e-10));
    out.insert(1, Assertion::absolute("conditional covariance s/(1+s)", 0.0, cov_err, 1e-10));
    out.insert(2, Assertion::absolute("variance decomposition identity", 0.0, ident_err, 1e-10));

    type F = fn(&[f64]) -> f64;
    let general: [(&str, M, f64, F); 4] = [
        ("uniform(0, pi), cos", M::interval(0.0, PI), 1.0, |x| x[0].cos()),
        ("exp-1, x", M::ShiftedExponential, 2.0, |x| x[0]),
        ("cube, x1 x2", M::cube(2, 1.0), 0.5, |x| x[0] * x[1]),
        ("simplex, x1", M::simplex(2), 1.0, |x| x[0]),
    ];
    for (i, (name, m, s, f)) in general.into_iter().enumerate() {
        let d = variance_decomposition(&m, s, &f, 20_000, rng::derive(seed, 10 + i as u64))?;
        out.push(Assertion::at_most(&format!("{name}: |balance z|"), 4.0, d.balance_z.abs()));
        let ok = d.lower_ok && d.upper_ok;
        out.push(Assertion::new(&format!("{name}: sandwich with factor 2 + C_P/s"), true, ok, "4 se", ok));
    }
    Ok(out)
}

fn c11(seed: u64) -> Result<Vec<Assertion>> {
    let start = Instant::now();
    let dim = 10_000usize;
    let ln = (dim as f64).ln();
    let (lo, hi) = (0.5 * ln, 20.0 * ln);
    let a = expo_max_oracle(lo, dim, 1000, rng::derive(seed, 1))?;
    let b = expo_max_oracle(hi, dim, 1000, rng::derive(seed, 2))?;
    Ok(vec![
        Assertion::at_least(&format!("E max var at s = {lo:.3}, vs 0.1 s"), 0.1 * lo, a.mean_op_norm),
        Assertion::at_most(&format!("E max var at s = {hi:.2}"), 5.0, b.mean_op_norm),
        runtime("runtime", start, 60.0),
    ])
}

fn c12(seed: u64) -> Result<Vec<Assertion>> {
    let mut out = vec![];
    for (i, &(s, t)) in [(0.5, 1.5), (1.0, 1.0), (2.0, 0.3)].iter().enumerate() {
        let (e, target) = gaussian_theta_covariance(s, t, 100_000, 0.01, rng::derive(seed, i as u64))?;
        out.push(Assertion::within_se(&format!("E theta_s theta_t, (s, t) = ({s}, {t})"), target, e.value, e.se, 4.0));
    }
    let r = tilt_law_check(&M::ShiftedExponential, 1.0, 20_000, 1e-3, rng::derive(seed, 9))?;
    out.push(Assertion::new("KS tilt law, exp-1 base", format!("<= {:.5}", r.critical), r.ks, "1% critical", r.passes));
    Ok(out)
}

fn c13(seed: u64) -> Result<Vec<Assertion>> {
    let ens = brownian_ensemble(100_000, 1.0, 0.01, seed)?;
    let r = freedman_tail(&ens, 2.0, 1.0);
    let oracle = 2.0 * norm_sf(2.0);
    Ok(vec![
        Assertion::within_se("P(sup M >= 2, <M> <= 1)", oracle, r.frequency.value, r.frequency.se, 4.0),
        Assertion::at_most("below exp(-2)", (-2.0f64).exp(), r.frequency.value),
    ])
}

fn c14(seed: u64) -> Result<Vec<Assertion>> {
    let mut r = rng::stream(seed, rng::label("matrix-draws"));
    let mut trace_min = f64::INFINITY;
    let mut trace_bad = 0;
    for _ in 0..10_000 {
        let n = r.random_range(1..=8);
        let k = wishart(n, &mut r);
        let h = sym_gaussian(n, &mut r);
        let (a, b) = (r.random_range(0.01..3.0), r.random_range(0.01..3.0));
        let s = trace_inequality_relative(&k, &h, a, b)?;
        trace_min = trace_min.min(s);
        trace_bad += (s < -1e-10) as usize;
    }
    let mut soft_bad = 0;
    for _ in 0..10_000 {
        let n = r.random_range(1..=8);
        let m = sym_gaussian(n, &mut r);
        let beta = r.random_range(0.05..20.0);
        let rep = softmax_proxy(&m, beta)?;
        let tol = 1e-10 * rep.h.abs().max(1.0);
        soft_bad += (rep.lambda_max > rep.h + tol || rep.h > rep.upper + tol) as usize;
    }
    let mut hess_min = f64::INFINITY;
    for _ in 0..1000 {
        let n = r.random_range(2..=6);
        let a = sym_gaussian(n, &mut r);
        let h = sym_gaussian(n, &mut r);
        hess_min = hess_min.min(exp_trace_hessian_check(&a, &h).slack_rel);
    }
    Ok(vec![
        Assertion::new("trace inequality violations", 0, trace_bad, "rel 1e-10", trace_bad == 0),
        Assertion::new("soft-max sandwich violations", 0, soft_bad, "rel 1e-10", soft_bad == 0),
        Assertion::at_least("min trace slack", -1e-10, trace_min),
        Assertion::at_least("min exp-trace Hessian slack", -1e-6, hess_min),
    ])
}

fn c15(seed: u64) -> Result<Vec<Assertion>> {
    let rows: Vec<(f64, f64, f64, usize)> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let n = 2 + (i % 7) as usize;
            let inst = TransportInstance::random_uniform(n, n, 2, rng::derive(seed, i));
            let rep = duality_report(&inst, rng::derive(seed, 1000 + i))?;
            let (g, cost) = solve_primal(&inst)?;
            let (_, bf) = brute_force_matching(&inst)?;
            Ok((rep.gap, (cost - bf).abs(), rep.cm_violation, noncrossing_check(&matching_segments(&inst, &g))))
        })
        .collect::<Result<_>>()?;
    let crossings: usize = rows.iter().map(|r| r.3).sum();
    Ok(vec![
        Assertion::at_most("max primal - dual gap", 1e-9, max_abs(rows.iter().map(|r| r.0))),
        Assertion::at_most("max |primal - brute force|", 1e-9, max_abs(rows.iter().map(|r| r.1))),
        Assertion::at_most("max cyclical-monotonicity violation", 1e-9, max_abs(rows.iter().map(|r| r.2))),
        Assertion::new("crossings in planar matchings", 0, crossings, "exact", crossings == 0),
    ])
}

fn closed_l(m: &M) -> Result<f64> {
    Ok(isotropic_constant(m, LMethod::ClosedForm)?.l)
}

fn c16(seed: u64) -> Result<Vec<Assertion>> {
    let mut out = vec![];
    let cube_err = max_abs((1..=6).map(|n| closed_l(&M::cube(n, 2.0)).map(|l| l - 12f64.sqrt().recip())).collect::<Result<Vec<_>>>()?);
    out.push(Assertion::absolute("L_cube - 1/sqrt(12), n <= 6", 0.0, cube_err, 1e-12));
    let corr = M::gaussian(vec![1.0, -1.0, 0.0], DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.0, 0.0, 0.1, 0.0, 0.5]));
    for (name, m) in [("standard", M::std_gaussian(4)), ("correlated", corr)] {
        out.push(Assertion::absolute(&format!("L_gaussian {name}"), 1.0 / (2.0 * PI * std::f64::consts::E).sqrt(), closed_l(&m)?, 1e-12));
    }
    let ls = closed_l(&M::simplex(2))?;
    out.push(Assertion::absolute("L_simplex(2) closed form vs formula", simplex_l(2), ls, 1e-12));
    out.push(Assertion::absolute("L_simplex(2)", 0.31020, ls, 5e-6));
    let mc = isotropic_constant(&M::cube(4, 1.0), LMethod::McEntropy { n_samples: 100_000, seed })?.l;
    out.push(Assertion::relative("mc-entropy L_cube at dim 4", 12f64.sqrt().recip(), mc, 2e-2));
    let catalog = [
        M::interval(0.0, 1.0),
        M::ShiftedExponential,
        M::std_gaussian(2),
        M::cube(5, 1.0),
        M::ball(2, 1.0),
        M::ball(9, 2.0),
        M::simplex(1),
        M::simplex(3),
        M::simplex(7),
        M::ComplexExponential { n: 3 },
        M::exp_product(4),
        M::Product { factors: vec![M::ball(3, 1.0), M::ShiftedExponential, M::simplex(2)] },
    ];
    let min_l = catalog.iter().map(closed_l).collect::<Result<Vec<_>>>()?.into_iter().fold(f64::INFINITY, f64::min);
    out.push(Assertion::at_least("min L over catalog", gaussian_l() * (1.0 - 1e-12), min_l));
    Ok(out)
}

fn c17(seed: u64) -> Result<Vec<Assertion>> {
    let cases = [
        ("gaussian dim 3", M::std_gaussian(3), 2.0),
        ("exp-1", M::ShiftedExponential, 1.0),
        ("exp product dim 2", M::exp_product(2), 1.0),
        ("cube dim 3", centered_cube(3), 0.5),
    ];
    let mut out = vec![];
    for (i, (name, m, r)) in cases.into_iter().enumerate() {
        let rep = hessian_metric_ball_check(&m, r, 50, rng::derive(seed, i as u64))?;
        let ok = rep.all_contained();
        out.push(Assertion::new(
            &format!("{name}: contained with refinement, {} directions", rep.rows.len()),
            format!("length <= {:.4}", r.sqrt()),
            format!("max length/sqrt(r) = {:.6}", rep.max_length_ratio()),
            "1e-9",
            ok,
        ));
    }
    Ok(out)
}

fn c18(seed: u64) -> Result<Vec<Assertion>> {
    let mut out = vec![];
    for &s in &[0.5, 2.0] {
        let r = conditional_cov_opnorm(&M::exp_product(8), s, 400, rng::derive(seed, 1))?;
        out.push(Assertion::at_most(&format!("max ||A_s||/s, exp product dim 8, s = {s}"), 1.0 + 1e-10, r.max_ratio_to_s));
    }
    let tilt = M::GaussianTilt { base: Box::new(M::exp_product(2)), theta: vec![0.0, 0.0], t: 1.0 };
    let rep = lichnerowicz_bounds(&tilt, &Cubature::for_measure(&tilt, 20)?, &FunctionBasis::poly(2, 2))?;
    out.push(Assertion::new("lichnerowicz ordering, tilted exp product", true, rep.ordered, "1e-9", rep.ordered));

    let ens = two_point_ensemble(10_000, 4.0, 0.01, rng::derive(seed, 2))?;
    let mut q: Vec<f64> = ens.qv.iter().map(|v| *v.last().unwrap()).collect();
    q.sort_by(f64::total_cmp);
    let fr = freedman_tail(&ens, 0.4, stats::quantile_sorted(&q, 0.5));
    out.push(Assertion::new("freedman bound, two-point martingale", format!("<= {:.5}", fr.bound), fr.frequency.value, "3 se", fr.holds));

    let n = 64.0f64;
    let rows = concentration_experiment(&M::exp_product(64), &[0.0, 1.0, 4.0 * n.ln().powi(2)], 1.0, 4000, rng::derive(seed, 3))?;
    let split = rows.iter().all(|r| r.split_ok);
    out.push(Assertion::new("concentration split, exp product dim 64", true, split, "rel 1e-6", split));

    for m in [M::simplex(2), centered_cube(2)] {
        let e = slicing_estimates_check(&m, 1.0)?;
        let ok = e.containment_violations == 0 && e.vol_polar.is_some_and(|p| e.vol_sublevel >= p);
        out.push(Assertion::new(
            &format!("r K polar inside {{Lambda <= r}}, {}", m.kind_name()),
            "0 violations",
            format!("{} of {}", e.containment_violations, e.containment_probes),
            "exact",
            ok,
        ));
    }
    let catalog = [M::std_gaussian(3), M::cube(3, 1.0), M::simplex(2), M::exp_product(3), M::ball(2, 1.0), M::ComplexExponential { n: 2 }];
    let mut sandwich = true;
    for m in &catalog {
        sandwich &= entropy_sandwich_check(m)?.holds(1e-9);
    }
    out.push(Assertion::new("entropy sandwich on catalog", true, sandwich, "1e-9", sandwich));
    Ok(out)
}
