use anyhow::{bail, Result};
use lclab_core::cubature::Cubature;
use lclab_core::eldansl::{
    brownian_ensemble, concentration_experiment, freedman_tail, gaussian_theta_covariance, tilt_law_check,
    two_point_ensemble,
};
use lclab_core::localize::{conditional_cov_opnorm, expo_max_oracle, variance_decomposition};
use lclab_core::matrixineq::{exp_trace_hessian_check, softmax_proxy, sym_gaussian, trace_inequality_relative, wishart};
use lclab_core::mc::{covariance_summary, sample, Method};
use lclab_core::monge::{brute_force_matching, duality_report, matching_segments, noncrossing_check, solve_primal, TransportInstance};
use lclab_core::onedim::{cheeger_1d, cheeger_sandwich, spectral_gap_fd, Law1D};
use lclab_core::slicing::{gaussian_l, hessian_metric_ball_check, isotropic_constant, LMethod};
use lclab_core::spectral::{
    bochner_check, complex_monomial_norm_ratio, complex_monomial_quotient, lichnerowicz_bounds, random_poly,
    rayleigh_ritz_cp, FunctionBasis,
};
use lclab_core::{rng, LogConcaveMeasure as M};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::f64::consts::PI;

use crate::config::{ExperimentConfig, Params};
use crate::report::{Assertion, Table};
use crate::UsageError;

pub struct Experiment {
    pub name: &'static str,
    pub about: &'static str,
    pub params: &'static [&'static str],
    default_measure: Option<fn() -> M>,
    run: fn(&Ctx) -> Result<Table>,
}

struct Ctx<'a> {
    measure: Option<M>,
    p: Params<'a>,
    seed: u64,
}

impl Ctx<'_> {
    fn measure(&self) -> Result<&M> {
        match &self.measure {
            Some(m) => Ok(m),
            None => bail!(UsageError("this experiment needs a measure".into())),
        }
    }

    fn law(&self) -> Result<Law1D> {
        let m = self.measure()?;
        if m.dim() != 1 {
            bail!(UsageError(format!("this experiment needs a one-dimensional measure, got dim {}", m.dim())));
        }
        Ok(Law1D::from_measure(m)?)
    }
}

pub static EXPERIMENTS: &[Experiment] = &[
    Experiment {
        name: "spectral_gap_fd",
        about: "Poincaré constant of a 1D measure by finite differences",
        params: &["grid", "tol"],
        default_measure: Some(|| M::interval(0.0, PI)),
        run: spectral_gap_fd_exp,
    },
    Experiment {
        name: "cheeger",
        about: "Cheeger constant of a 1D measure and the sandwich with C_P",
        params: &["grid"],
        default_measure: Some(|| M::ShiftedExponential),
        run: cheeger_exp,
    },
    Experiment {
        name: "rayleigh_ritz",
        about: "Rayleigh-Ritz lower bound on C_P over a polynomial basis",
        params: &["basis", "degree", "order", "samples"],
        default_measure: Some(|| M::std_gaussian(2)),
        run: rayleigh_ritz_exp,
    },
    Experiment {
        name: "lichnerowicz",
        about: "plain and improved Lichnerowicz bounds against Rayleigh-Ritz",
        params: &["degree", "order"],
        default_measure: Some(|| M::gaussian(vec![0.0, 0.0], DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0])))),
        run: lichnerowicz_exp,
    },
    Experiment {
        name: "bochner",
        about: "integrated Bochner identity for random polynomials",
        params: &["degree", "polys", "order", "samples"],
        default_measure: Some(|| M::std_gaussian(2)),
        run: bochner_exp,
    },
    Experiment {
        name: "complex_monomials",
        about: "exact Rayleigh quotients of z^k under the complex exponential law",
        params: &["kmax"],
        default_measure: None,
        run: complex_monomials_exp,
    },
    Experiment {
        name: "covariance",
        about: "sampled mean, covariance and thin-shell statistic",
        params: &["samples", "method", "step", "burn_in"],
        default_measure: Some(|| M::cube(3, 1.0)),
        run: covariance_exp,
    },
    Experiment {
        name: "localize",
        about: "variance decomposition under Gaussian localization, f = x1",
        params: &["s", "samples"],
        default_measure: Some(|| M::std_gaussian(2)),
        run: localize_exp,
    },
    Experiment {
        name: "conditional_covariance",
        about: "E ||Cov(X | X + sqrt(s) G)||_op against s",
        params: &["s", "outer"],
        default_measure: Some(|| M::exp_product(8)),
        run: conditional_covariance_exp,
    },
    Experiment {
        name: "expo_obstruction",
        about: "largest conditional variance for the exponential product",
        params: &["dim", "s", "outer"],
        default_measure: None,
        run: expo_obstruction_exp,
    },
    Experiment {
        name: "tilt_law_check",
        about: "KS test of theta_t against tX + W_t",
        params: &["t", "paths", "dt"],
        default_measure: Some(|| M::ShiftedExponential),
        run: tilt_law_exp,
    },
    Experiment {
        name: "eldan_covariance",
        about: "E theta_s theta_t for the 1D Gaussian base",
        params: &["s", "t", "paths", "dt"],
        default_measure: None,
        run: eldan_covariance_exp,
    },
    Experiment {
        name: "freedman",
        about: "Freedman tail frequency against exp(-u^2/2 sigma^2)",
        params: &["martingale", "u", "sigma2", "paths", "t_end", "dt"],
        default_measure: None,
        run: freedman_exp,
    },
    Experiment {
        name: "matrix_inequalities",
        about: "random draws of the trace, soft-max and exp-trace Hessian inequalities",
        params: &["draws", "max_dim"],
        default_measure: None,
        run: matrix_exp,
    },
    Experiment {
        name: "monge_duality",
        about: "Monge-cost transport: primal, dual, brute force and crossings",
        params: &["atoms", "instances", "dim"],
        default_measure: None,
        run: monge_exp,
    },
    Experiment {
        name: "isotropic_constant",
        about: "isotropic constant by closed form or k-NN entropy",
        params: &["method", "samples"],
        default_measure: Some(|| M::simplex(2)),
        run: isotropic_constant_exp,
    },
    Experiment {
        name: "hessian_ball",
        about: "half sublevel set of the log-Laplace transform inside the Hessian-metric ball",
        params: &["r", "directions"],
        default_measure: Some(|| M::exp_product(2)),
        run: hessian_ball_exp,
    },
    Experiment {
        name: "concentration",
        about: "concentration function split into local and escape terms",
        params: &["radii", "c_log", "samples"],
        default_measure: Some(|| M::exp_product(64)),
        run: concentration_exp,
    },
];

pub fn find(name: &str) -> Option<&'static Experiment> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}

/// Runs a registered experiment on `config`.
pub fn run_table(config: &ExperimentConfig) -> Result<Table> {
    let Some(e) = find(&config.experiment) else {
        bail!(UsageError(format!("unknown experiment '{}'", config.experiment)));
    };
    let p = config.params();
    p.restrict(e.params)?;
    if e.default_measure.is_none() && config.measure.is_some() {
        bail!(UsageError(format!("{} takes no measure", e.name)));
    }
    let measure = config.measure.clone().or_else(|| e.default_measure.map(|f| f()));
    (e.run)(&Ctx { measure, p, seed: config.seed })
}

fn f(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(f).unwrap_or_default()
}

fn basis(name: &str, dim: usize, degree: u32) -> Result<FunctionBasis> {
    Ok(match name {
        "hermite" => FunctionBasis::hermite(dim, degree),
        "poly" => FunctionBasis::poly(dim, degree),
        "linear" => FunctionBasis::linear(dim),
        other => bail!(UsageError(format!("unknown basis '{other}' (hermite, poly, linear)"))),
    })
}

fn cubature(m: &M, order: usize, samples: usize, seed: u64) -> Result<Cubature> {
    if samples > 0 {
        Ok(Cubature::from_batch(&sample(m, samples, seed, Method::Direct)?))
    } else {
        Ok(Cubature::for_measure(m, order)?)
    }
}

fn exact_cp(m: &M) -> Option<f64> {
    m.exact_moments().ok().and_then(|e| e.cp)
}

// ---------------------------------------------------------- experiments

fn spectral_gap_fd_exp(c: &Ctx) -> Result<Table> {
    let law = c.law()?;
    let grid = c.p.usize("grid", 10_000)?;
    let e = spectral_gap_fd(&law, grid)?;
    let mut t = Table::new(&["grid", "c_p", "se", "warning"]);
    t.row(vec![grid.to_string(), f(e.value), f(e.se), e.warning.clone().unwrap_or_default()]);
    if let Some(cp) = exact_cp(c.measure()?) {
        t.check(Assertion::relative("C_P vs closed form", cp, e.value, c.p.f64("tol", 1e-4)?));
    }
    Ok(t)
}

fn cheeger_exp(c: &Ctx) -> Result<Table> {
    let law = c.law()?;
    let psi = cheeger_1d(&law)?.value;
    let cp = spectral_gap_fd(&law, c.p.usize("grid", 10_000)?)?.value;
    let mut t = Table::new(&["psi", "c_p", "lower", "upper"]);
    t.row(vec![f(psi), f(cp), f(psi * psi / PI), f(4.0 * psi * psi)]);
    let ok = cheeger_sandwich(psi, cp, 1e-2);
    t.check(Assertion::new("psi^2/pi <= C_P <= 4 psi^2", "sandwich", cp, "rel 1e-2", ok));
    Ok(t)
}

fn rayleigh_ritz_exp(c: &Ctx) -> Result<Table> {
    let m = c.measure()?;
    let b = basis(c.p.str("basis", "hermite")?, m.dim(), c.p.usize("degree", 3)? as u32)?;
    let cub = cubature(m, c.p.usize("order", 8)?, c.p.usize("samples", 0)?, c.seed)?;
    let e = rayleigh_ritz_cp(&cub, &b)?;
    let mut t = Table::new(&["basis", "size", "method", "c_p_lower", "se", "exact_c_p"]);
    let cp = exact_cp(m);
    t.row(vec![b.description.clone(), b.len().to_string(), e.method.clone(), f(e.value), f(e.se), opt(cp)]);
    if let Some(cp) = cp {
        t.check(Assertion::at_most("lower bound below C_P", cp * (1.0 + 1e-9) + 3.0 * e.se, e.value));
    }
    Ok(t)
}

fn lichnerowicz_exp(c: &Ctx) -> Result<Table> {
    let m = c.measure()?;
    let cub = Cubature::for_measure(m, c.p.usize("order", 8)?)?;
    let rep = lichnerowicz_bounds(m, &cub, &FunctionBasis::poly(m.dim(), c.p.usize("degree", 2)? as u32))?;
    let mut t = Table::new(&["t", "op_norm", "plain", "improved", "rayleigh_ritz"]);
    t.row(vec![f(rep.t), f(rep.op_norm), f(rep.plain), f(rep.improved), f(rep.rayleigh_ritz.value)]);
    t.check(Assertion::new("ritz <= improved <= plain", true, rep.ordered, "1e-9", rep.ordered));
    Ok(t)
}

fn bochner_exp(c: &Ctx) -> Result<Table> {
    let m = c.measure()?;
    let cub = cubature(m, c.p.usize("order", 8)?, c.p.usize("samples", 0)?, c.seed)?;
    let degree = c.p.usize("degree", 4)? as u32;
    let mut t = Table::new(&["poly", "lhs", "rhs", "residual", "se"]);
    for k in 0..c.p.usize("polys", 5)? {
        let u = random_poly(m.dim(), degree, rng::derive(c.seed, k as u64));
        let r = bochner_check(m, &u, &cub)?;
        t.row(vec![k.to_string(), f(r.lhs), f(r.rhs), f(r.residual), f(r.se)]);
        let tol = if r.se > 0.0 { "4 se".to_string() } else { "1e-8".to_string() };
        t.check(Assertion::new(&format!("residual, poly {k}"), "0", r.residual, tol, r.passes(1e-8, 4.0)));
    }
    Ok(t)
}

fn complex_monomials_exp(c: &Ctx) -> Result<Table> {
    let kmax = c.p.usize("kmax", 20)? as u64;
    let mut t = Table::new(&["k", "quotient", "norm_ratio"]);
    let mut ok = true;
    let mut prev = None;
    for k in 1..=kmax {
        let q = complex_monomial_quotient(k)?;
        let r = complex_monomial_norm_ratio(k)?;
        ok &= prev.as_ref().is_none_or(|p| &q > p);
        t.row(vec![k.to_string(), q.to_string(), r.to_string()]);
        prev = Some(q);
    }
    t.check(Assertion::new("quotient strictly increasing", true, ok, "exact", ok));
    Ok(t)
}

fn covariance_exp(c: &Ctx) -> Result<Table> {
    let m = c.measure()?;
    let n = c.p.usize("samples", 100_000)?;
    let step = c.p.f64("step", 0.1)?;
    let burn_in = c.p.usize("burn_in", 1000)?;
    let method = match c.p.str("method", "direct")? {
        "direct" => Method::Direct,
        "ula" => Method::Ula { step, burn_in },
        "mala" => Method::Mala { step, burn_in },
        other => bail!(UsageError(format!("unknown method '{other}' (direct, ula, mala)"))),
    };
    let s = covariance_summary(&sample(m, n, c.seed, method)?);
    let mut t = Table::new(&["i", "j", "cov", "se"]);
    for i in 0..s.cov.len() {
        for j in 0..s.cov.len() {
            t.row(vec![i.to_string(), j.to_string(), f(s.cov[i][j]), f(s.se_cov[i][j])]);
        }
    }
    if let Ok((_, cov)) = m.moments() {
        let z = (0..cov.nrows())
            .flat_map(|i| (0..cov.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| (s.cov[i][j] - cov[(i, j)]).abs() / s.se_cov[i][j])
            .fold(0.0, f64::max);
        t.check(Assertion::at_most("max |z| of covariance entries", 4.0, z));
    }
    Ok(t)
}

fn localize_exp(c: &Ctx) -> Result<Table> {
    let m = c.measure()?;
    let s = c.p.f64("s", 1.0)?;
    let d = variance_decomposition(m, s, &|x| x[0], c.p.usize("samples", 20_000)?, c.seed)?;
    let mut t = Table::new(&["s", "total", "expected_local", "variance_of_means", "balance_z"]);
    t.row(vec![f(s), f(d.total.value), f(d.expected_local.value), f(d.variance_of_means.value), f(d.balance_z)]);
    t.check(Assertion::at_most("|balance z|", 4.0, d.balance_z.abs()));
    let ok = d.lower_ok && d.upper_ok;
    t.check(Assertion::new("sandwich with factor 2 + C_P/s", true, ok, "4 se", ok));
    Ok(t)
}

fn conditional_covariance_exp(c: &Ctx) -> Result<Table> {
    let m = c.measure()?;
    let mut t = Table::new(&["s", "mean_op_norm", "se", "max_ratio_to_s"]);
    for (k, s) in c.p.f64_list("s", &[0.5, 1.0, 2.0])?.into_iter().enumerate() {
        let r = conditional_cov_opnorm(m, s, c.p.usize("outer", 400)?, rng::derive(c.seed, k as u64))?;
        t.row(vec![f(s), f(r.mean_op_norm), f(r.se), f(r.max_ratio_to_s)]);
        t.check(Assertion::at_most(&format!("max ||A_s||/s at s = {s}"), 1.0 + 1e-10, r.max_ratio_to_s));
    }
    Ok(t)
}

fn expo_obstruction_exp(c: &Ctx) -> Result<Table> {
    let dim = c.p.usize("dim", 10_000)?;
    let ln = (dim as f64).ln();
    let grid: Vec<f64> = [0.5, 1.0, 2.0, 5.0, 20.0].iter().map(|k| k * ln).collect();
    let mut t = Table::new(&["s", "s_over_ln_dim", "mean_max_var", "se"]);
    for (k, s) in c.p.f64_list("s", &grid)?.into_iter().enumerate() {
        let r = expo_max_oracle(s, dim, c.p.usize("outer", 1000)?, rng::derive(c.seed, k as u64))?;
        t.row(vec![f(s), f(s / ln), f(r.mean_op_norm), f(r.se)]);
        t.check(Assertion::at_most(&format!("mean max var at s = {s:.3}"), s, r.mean_op_norm));
    }
    Ok(t)
}

fn tilt_law_exp(c: &Ctx) -> Result<Table> {
    let m = c.measure()?;
    let r = tilt_law_check(m, c.p.f64("t", 1.0)?, c.p.usize("paths", 20_000)?, c.p.f64("dt", 1e-3)?, c.seed)?;
    let mut t = Table::new(&["t", "ks", "critical"]);
    t.row(vec![f(r.t), f(r.ks), f(r.critical)]);
    t.check(Assertion::new("KS below 1% critical value", format!("<= {}", r.critical), r.ks, "1%", r.passes));
    Ok(t)
}

fn eldan_covariance_exp(c: &Ctx) -> Result<Table> {
    let (s, tt) = (c.p.f64("s", 0.5)?, c.p.f64("t", 1.5)?);
    let (e, target) = gaussian_theta_covariance(s, tt, c.p.usize("paths", 100_000)?, c.p.f64("dt", 0.01)?, c.seed)?;
    let mut t = Table::new(&["s", "t", "estimate", "se", "target"]);
    t.row(vec![f(s), f(tt), f(e.value), f(e.se), f(target)]);
    t.check(Assertion::within_se("E theta_s theta_t", target, e.value, e.se, 4.0));
    Ok(t)
}

fn freedman_exp(c: &Ctx) -> Result<Table> {
    let paths = c.p.usize("paths", 20_000)?;
    let (t_end, dt) = (c.p.f64("t_end", 1.0)?, c.p.f64("dt", 0.01)?);
    let ens = match c.p.str("martingale", "brownian")? {
        "brownian" => brownian_ensemble(paths, t_end, dt, c.seed)?,
        "two_point" => two_point_ensemble(paths, t_end, dt, c.seed)?,
        other => bail!(UsageError(format!("unknown martingale '{other}' (brownian, two_point)"))),
    };
    let r = freedman_tail(&ens, c.p.f64("u", 2.0)?, c.p.f64("sigma2", 1.0)?);
    let mut t = Table::new(&["u", "sigma2", "frequency", "se", "grid_frequency", "bound"]);
    t.row(vec![f(r.u), f(r.sigma2), f(r.frequency.value), f(r.frequency.se), f(r.grid_frequency), f(r.bound)]);
    t.check(Assertion::new("frequency below bound", format!("<= {}", r.bound), r.frequency.value, "3 se", r.holds));
    Ok(t)
}

fn matrix_exp(c: &Ctx) -> Result<Table> {
    let draws = c.p.usize("draws", 10_000)?;
    let max_dim = c.p.usize("max_dim", 8)?.max(1);
    let mut r = rng::stream(c.seed, rng::label("matrix-draws"));
    let (mut trace_min, mut soft_bad, mut hess_min) = (f64::INFINITY, 0usize, f64::INFINITY);
    for _ in 0..draws {
        let n = r.random_range(1..=max_dim);
        let k = wishart(n, &mut r);
        let h = sym_gaussian(n, &mut r);
        let (a, b) = (r.random_range(0.01..3.0), r.random_range(0.01..3.0));
        trace_min = trace_min.min(trace_inequality_relative(&k, &h, a, b)?);
        let rep = softmax_proxy(&h, r.random_range(0.05..20.0))?;
        let tol = 1e-10 * rep.h.abs().max(1.0);
        soft_bad += (rep.lambda_max > rep.h + tol || rep.h > rep.upper + tol) as usize;
        hess_min = hess_min.min(exp_trace_hessian_check(&sym_gaussian(n, &mut r), &h).slack_rel);
    }
    let mut t = Table::new(&["draws", "min_trace_slack", "softmax_violations", "min_exp_hessian_slack"]);
    t.row(vec![draws.to_string(), f(trace_min), soft_bad.to_string(), f(hess_min)]);
    t.check(Assertion::at_least("min trace slack", -1e-10, trace_min));
    t.check(Assertion::new("soft-max violations", 0, soft_bad, "rel 1e-10", soft_bad == 0));
    t.check(Assertion::at_least("min exp-trace Hessian slack", -1e-6, hess_min));
    Ok(t)
}

fn monge_exp(c: &Ctx) -> Result<Table> {
    let atoms = c.p.usize("atoms", 6)?;
    let dim = c.p.usize("dim", 2)?;
    if atoms == 0 || dim == 0 {
        bail!(UsageError("atoms and dim must be positive".into()));
    }
    let mut t = Table::new(&["instance", "cost", "dual", "gap", "brute_force", "cm_violation", "crossings"]);
    for i in 0..c.p.usize("instances", 1)? as u64 {
        let inst = TransportInstance::random_uniform(atoms, atoms, dim, rng::derive(c.seed, i));
        let rep = duality_report(&inst, rng::derive(c.seed, 1000 + i))?;
        let (g, cost) = solve_primal(&inst)?;
        let bf = if atoms <= 8 { Some(brute_force_matching(&inst)?.1) } else { None };
        let crossings = (dim == 2).then(|| noncrossing_check(&matching_segments(&inst, &g)));
        t.row(vec![
            i.to_string(),
            f(cost),
            f(rep.dual_value),
            f(rep.gap),
            opt(bf),
            f(rep.cm_violation),
            crossings.map(|k| k.to_string()).unwrap_or_default(),
        ]);
        t.check(Assertion::at_most(&format!("gap, instance {i}"), 1e-9, rep.gap.abs()));
        t.check(Assertion::at_most(&format!("cyclical monotonicity, instance {i}"), 1e-9, rep.cm_violation));
        if let Some(bf) = bf {
            t.check(Assertion::absolute(&format!("brute force, instance {i}"), bf, cost, 1e-9));
        }
        if let Some(k) = crossings {
            t.check(Assertion::new(&format!("crossings, instance {i}"), 0, k, "exact", k == 0));
        }
    }
    Ok(t)
}

fn isotropic_constant_exp(c: &Ctx) -> Result<Table> {
    let m = c.measure()?;
    let method = match c.p.str("method", "closed_form")? {
        "closed_form" => LMethod::ClosedForm,
        "mc_entropy" => LMethod::McEntropy { n_samples: c.p.usize("samples", 100_000)?, seed: c.seed },
        other => bail!(UsageError(format!("unknown method '{other}' (closed_form, mc_entropy)"))),
    };
    let is_mc = matches!(method, LMethod::McEntropy { .. });
    let r = isotropic_constant(m, method)?;
    let mut t = Table::new(&["body", "dim", "entropy", "cov_det", "L"]);
    t.row(vec![r.body.clone(), r.dim.to_string(), f(r.entropy), f(r.cov_det), f(r.l)]);
    t.check(Assertion::at_least("L above the Gaussian value", gaussian_l() * (1.0 - 1e-12), r.l));
    if is_mc {
        if let Ok(exact) = isotropic_constant(m, LMethod::ClosedForm) {
            t.check(Assertion::relative("mc-entropy vs closed form", exact.l, r.l, 2e-2));
        }
    }
    Ok(t)
}

fn hessian_ball_exp(c: &Ctx) -> Result<Table> {
    let m = c.measure()?;
    let r = c.p.f64("r", 1.0)?;
    let rep = hessian_metric_ball_check(m, r, c.p.usize("directions", 50)?, c.seed)?;
    let mut t = Table::new(&["direction", "length", "sqrt_r", "refined_bound", "contained", "refined_ok"]);
    for (k, row) in rep.rows.iter().enumerate() {
        t.row(vec![
            k.to_string(),
            f(row.length),
            f(r.sqrt()),
            f(row.refined_bound),
            row.contained.to_string(),
            row.refined_ok.to_string(),
        ]);
    }
    let ok = rep.all_contained();
    t.check(Assertion::new("contained in B_g(0, sqrt r)", true, ok, "1e-9", ok));
    Ok(t)
}

fn concentration_exp(c: &Ctx) -> Result<Table> {
    let m = c.measure()?;
    let n = m.dim() as f64;
    let radii = c.p.f64_list("radii", &[0.0, 1.0, (n + 1.0).ln().powi(2)])?;
    let rows = concentration_experiment(m, &radii, c.p.f64("c_log", 1.0)?, c.p.usize("samples", 4000)?, c.seed)?;
    let mut t = Table::new(&["r", "t", "log_alpha", "local", "escape", "mc", "mc_se"]);
    for r in &rows {
        t.row(vec![f(r.r), f(r.t), f(r.direct_log_alpha), f(r.term_local), f(r.term_escape), f(r.mc_direct.value), f(r.mc_direct.se)]);
        t.check(Assertion::new(&format!("split at r = {}", r.r), true, r.split_ok, "rel 1e-6", r.split_ok));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        for (i, a) in EXPERIMENTS.iter().enumerate() {
            assert!(EXPERIMENTS[i + 1..].iter().all(|b| b.name != a.name), "{}", a.name);
        }
    }

    #[test]
    fn unknown_param_is_usage_error() {
        let cfg = ExperimentConfig::new("spectral_gap_fd").with_param("grids", 100);
        let err = run_table(&cfg).unwrap_err();
        assert!(err.downcast_ref::<UsageError>().is_some());
    }

    #[test]
    fn measure_must_fit() {
        let cfg = ExperimentConfig::new("spectral_gap_fd").with_measure(M::std_gaussian(2));
        assert!(run_table(&cfg).unwrap_err().downcast_ref::<UsageError>().is_some());
        let cfg = ExperimentConfig::new("monge_duality").with_measure(M::std_gaussian(2));
        assert!(run_table(&cfg).unwrap_err().downcast_ref::<UsageError>().is_some());
    }

    #[test]
    fn monge_six_atoms() {
        let t = run_table(&ExperimentConfig::new("monge_duality").with_param("atoms", 6)).unwrap();
        assert!(t.assertions.iter().all(|a| a.pass));
    }
}
