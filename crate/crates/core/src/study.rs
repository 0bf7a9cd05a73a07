//! Experiment harness: convergence studies with log-log slope fits, a
//! direct-vs-FFT speed benchmark, and the three built-in advection-diffusion
//! cases (plus JSON-configured problems using the expression language).

use std::time::Instant;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr::{parse_expression, Expr, Var};
use crate::fast_convolution::{caputo_fast, ConvolutionPlan};
use crate::grid::build_time_grid;
use crate::pde::{solve_pde, BoundaryConditions, Domain, PdeProblem, PdeSolution};
use crate::quadrature::{caputo_linear, caputo_quadratic, caputo_quadratic_star};
use crate::specfun::{caputo_exp2_exact, caputo_monomial_exact, gamma_fn};

// ---------------------------------------------------------------------------
// Convergence studies
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Linear,
    Quadratic,
    Star,
    Fft,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Linear => "linear",
            Method::Quadratic => "quadratic",
            Method::Star => "star",
            Method::Fft => "fft",
        }
    }

    pub const ALL: [Method; 4] = [Method::Linear, Method::Quadratic, Method::Star, Method::Fft];
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "linear" => Method::Linear,
            "quadratic" => Method::Quadratic,
            "star" => Method::Star,
            "fft" => Method::Fft,
            other => {
                return Err(Error::Config(format!(
                    "unknown method {other:?} (expected linear, quadratic, star, or fft)"
                )))
            }
        })
    }
}

/// Test function of a study, together with its exact Caputo derivative.
pub enum TestFunction {
    /// `f(t) = e^{2t}`, with the closed-form derivative as reference.
    Exp2t,
    /// `f(t) = t^beta`, with the monomial closed form as reference.
    Monomial(f64),
    /// A custom profile; the exact derivative expression (in `t`, `alpha`)
    /// must be supplied, otherwise there is no reference to measure against.
    Expression { f: Expr, exact: Option<Expr> },
}

impl TestFunction {
    fn sample(&self, t: f64, alpha: f64) -> Result<f64> {
        match self {
            TestFunction::Exp2t => Ok((2.0 * t).exp()),
            TestFunction::Monomial(beta) => Ok(t.powf(*beta)),
            TestFunction::Expression { f, .. } => f.evaluate(t, f64::NAN, alpha),
        }
    }

    fn exact(&self, alpha: f64, t: f64) -> Result<f64> {
        match self {
            TestFunction::Exp2t => caputo_exp2_exact(alpha, t),
            TestFunction::Monomial(beta) => caputo_monomial_exact(*beta, alpha, t),
            TestFunction::Expression { exact, .. } => match exact {
                Some(e) => e.evaluate(t, f64::NAN, alpha),
                None => Err(Error::Config(
                    "expression test functions need an explicit exact derivative".into(),
                )),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct StudyRow {
    pub alpha: f64,
    pub n: usize,
    pub method: Method,
    pub max_error: f64,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub pearson: f64,
}

#[derive(Debug, Clone)]
pub struct AlphaFit {
    pub alpha: f64,
    pub method: Method,
    pub fit: SlopeFit,
}

#[derive(Debug, Clone)]
pub struct StudyResult {
    pub rows: Vec<StudyRow>,
    /// One least-squares fit of `log2(max_error)` against `log2(N)` per
    /// (alpha, method) pair with at least two rows.
    pub fits: Vec<AlphaFit>,
}

/// Ordinary least squares on `(x, y)` points, with the Pearson correlation.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "slope fit needs at least 2 points".into(),
        ));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "slope fit needs at least two distinct abscissae".into(),
        ));
    }
    let slope = sxy / sxx;
    let pearson = if syy == 0.0 {
        0.0
    } else {
        (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
    };
    Ok(SlopeFit {
        slope,
        intercept: my - slope * mx,
        pearson,
    })
}

fn max_error_vs_exact(
    out: &[f64],
    func: &TestFunction,
    alpha: f64,
    grid: &crate::grid::TimeGrid,
) -> Result<f64> {
    let mut max_err = 0.0_f64;
    for j in 1..=grid.n() {
        let exact = func.exact(alpha, grid.node(j))?;
        max_err = max_err.max((out[j] - exact).abs());
    }
    Ok(max_err)
}

pub fn run_caputo_study(
    alphas: &[f64],
    ns: &[usize],
    t_f: f64,
    func: &TestFunction,
    methods: &[Method],
) -> Result<StudyResult> {
    if alphas.is_empty() || methods.is_empty() {
        return Err(Error::InvalidArgument(
            "study needs at least one alpha and one method".into(),
        ));
    }
    let mut rows = Vec::new();
    for &alpha in alphas {
        for &n in ns {
            let grid = build_time_grid(t_f, n)?;
            let mut sample_err = None;
            let series = grid.sample(|t| match func.sample(t, alpha) {
                Ok(v) => v,
                Err(e) => {
                    sample_err.get_or_insert(e);
                    f64::NAN
                }
            });
            if let Some(e) = sample_err {
                return Err(e);
            }
            for &method in methods {
                let start = Instant::now();
                let out = match method {
                    Method::Linear => caputo_linear(&grid.nodes(), &series.values, alpha)?,
                    Method::Quadratic => caputo_quadratic(&series, alpha)?,
                    Method::Star => caputo_quadratic_star(&series, alpha)?,
                    Method::Fft => {
                        let plan = ConvolutionPlan::new(alpha, n)?;
                        caputo_fast(&series, alpha, &plan)?
                    }
                };
                let runtime_s = start.elapsed().as_secs_f64();
                let max_error = max_error_vs_exact(&out, func, alpha, &grid)?;
                rows.push(StudyRow {
                    alpha,
                    n,
                    method,
                    max_error,
                    runtime_s,
                });
            }
        }
    }
    rows.sort_by(|a, b| {
        a.alpha
            .total_cmp(&b.alpha)
            .then(a.n.cmp(&b.n))
            .then(a.method.cmp(&b.method))
    });
    let fits = fit_rows(&rows);
    Ok(StudyResult { rows, fits })
}

fn fit_rows(rows: &[StudyRow]) -> Vec<AlphaFit> {
    let mut keys: Vec<(f64, Method)> = rows.iter().map(|r| (r.alpha, r.method)).collect();
    keys.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keys.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
    let mut fits = Vec::new();
    for (alpha, method) in keys {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.alpha == alpha && r.method == method && r.max_error > 0.0)
            .map(|r| ((r.n as f64).log2(), r.max_error.log2()))
            .collect();
        if let Ok(fit) = fit_slope(&points) {
            fits.push(AlphaFit { alpha, method, fit });
        }
    }
    fits
}

/// Times the direct quadratic scheme against the FFT evaluator on `e^{2t}`
/// samples. The outputs must agree to `1e-10` scaled before timings are
/// reported; rows carry the max error against the closed-form reference.
pub fn run_speed_benchmark(alpha: f64, ns: &[usize], t_f: f64) -> Result<StudyResult> {
    let func = TestFunction::Exp2t;
    let mut rows = Vec::new();
    for &n in ns {
        let grid = build_time_grid(t_f, n)?;
        let series = grid.sample(|t| (2.0 * t).exp());

        let start = Instant::now();
        let direct = caputo_quadratic(&series, alpha)?;
        let direct_s = start.elapsed().as_secs_f64();

        let plan = ConvolutionPlan::new(alpha, n)?;
        let start = Instant::now();
        let fast = caputo_fast(&series, alpha, &plan)?;
        let fast_s = start.elapsed().as_secs_f64();

        let scale = direct
            .iter()
            .fold(f64::MIN_POSITIVE, |m, v| m.max(v.abs()));
        for j in 0..=n {
            let diff = (direct[j] - fast[j]).abs();
            if diff > 1e-10 * scale {
                return Err(Error::Consistency(format!(
                    "direct and fast evaluators disagree at N={n}, j={j}: {diff:e}"
                )));
            }
        }
        rows.push(StudyRow {
            alpha,
            n,
            method: Method::Quadratic,
            max_error: max_error_vs_exact(&direct, &func, alpha, &grid)?,
            runtime_s: direct_s,
        });
        rows.push(StudyRow {
            alpha,
            n,
            method: Method::Fft,
            max_error: max_error_vs_exact(&fast, &func, alpha, &grid)?,
            runtime_s: fast_s,
        });
    }
    rows.sort_by(|a, b| {
        a.alpha
            .total_cmp(&b.alpha)
            .then(a.n.cmp(&b.n))
            .then(a.method.cmp(&b.method))
    });
    let fits = fit_rows(&rows);
    Ok(StudyResult { rows, fits })
}

/// CSV with the pinned study schema.
pub fn study_csv(result: &StudyResult) -> String {
    let mut out = String::from("alpha,N,method,max_error,runtime_s\n");
    for r in &result.rows {
        out.push_str(&format!(
            "{},{},{},{:e},{:.6}\n",
            r.alpha,
            r.n,
            r.method.as_str(),
            r.max_error,
            r.runtime_s
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// PDE cases
// ---------------------------------------------------------------------------

/// Hermite stretch factor used by the built-in real-line case when the
/// caller does not override it; chosen by a coarse sweep so that 16 nodes
/// push the spatial error below the temporal one.
pub const EDP1_DEFAULT_SCALE: f64 = 0.7;

pub struct PdeCase {
    pub name: String,
    pub problem: PdeProblem,
    pub exact: Option<Box<dyn Fn(f64, f64) -> f64>>,
}

/// Real-line problem with exact solution `e^{2t - x^2}` on `t in [0, 1.2]`:
/// the spatial operator `u_xx + 2x u_x + 2u` annihilates the solution, so
/// the forcing is exactly the Caputo derivative of `e^{2t}` times the
/// Gaussian profile.
pub fn edp1(alpha: f64, n_t: usize, n_x: usize, hermite_scale: f64) -> Result<PdeCase> {
    let grid = build_time_grid(1.2, n_t)?;
    let problem = PdeProblem {
        alpha,
        grid,
        domain: Domain::RealLine {
            n_x,
            hermite_scale,
        },
        a1: Box::new(|_| 1.0),
        a2: Box::new(|x| 2.0 * x),
        a3: Box::new(|_| 2.0),
        a4: Box::new(move |t, x| {
            caputo_exp2_exact(alpha, t).unwrap_or(f64::NAN) * (-x * x).exp()
        }),
        u0: Box::new(|x| (-x * x).exp()),
        bc: None,
    };
    Ok(PdeCase {
        name: "edp1".into(),
        problem,
        exact: Some(Box::new(|t, x| (2.0 * t - x * x).exp())),
    })
}

/// Interval problem on `[-1.1, 1.3] x [0, 1.2]` with exact solution
/// `e^{2t + 1.5x}`, variable coefficients, and time-dependent Robin
/// boundary conditions. The spatial operator maps the solution to
/// `2^alpha u`, so the forcing is `(D_t^alpha e^{2t} - 2^alpha e^{2t})`
/// times the exponential profile.
pub fn edp2(alpha: f64, n_t: usize, n_x: usize) -> Result<PdeCase> {
    let grid = build_time_grid(1.2, n_t)?;
    let two_alpha = 2.0_f64.powf(alpha);
    let problem = PdeProblem {
        alpha,
        grid,
        domain: Domain::Interval {
            x_a: -1.1,
            x_b: 1.3,
            n_x,
        },
        a1: Box::new(move |x| two_alpha / 2.25 * (1.0 + x * x)),
        a2: Box::new(move |x| two_alpha / 1.5 * x * x),
        a3: Box::new(move |x| -2.0 * two_alpha * x * x),
        a4: Box::new(move |t, x| {
            let dt = caputo_exp2_exact(alpha, t).unwrap_or(f64::NAN);
            (dt - two_alpha * (2.0 * t).exp()) * (1.5 * x).exp()
        }),
        u0: Box::new(|x| (1.5 * x).exp()),
        bc: Some(BoundaryConditions {
            c_a: 1.0,
            d_a: 2.0,
            u_a: Box::new(|t| 4.0 * (2.0 * t - 1.65).exp()),
            c_b: 3.0,
            d_b: 4.0,
            u_b: Box::new(|t| 9.0 * (2.0 * t + 1.95).exp()),
        }),
    };
    Ok(PdeCase {
        name: "edp2".into(),
        problem,
        exact: Some(Box::new(|t, x| (2.0 * t + 1.5 * x).exp())),
    })
}

/// Dirichlet problem on `[0, 1]^2` with exact solution `e^x t^6` and zero
/// initial data.
pub fn edp3(alpha: f64, n_t: usize, n_x: usize) -> Result<PdeCase> {
    let grid = build_time_grid(1.0, n_t)?;
    let g7 = gamma_fn(7.0 - alpha)?;
    let problem = PdeProblem {
        alpha,
        grid,
        domain: Domain::Interval {
            x_a: 0.0,
            x_b: 1.0,
            n_x,
        },
        a1: Box::new(|_| 1.0),
        a2: Box::new(|_| -1.0),
        a3: Box::new(|_| 0.0),
        a4: Box::new(move |t, x| 720.0 * x.exp() * t.powf(6.0 - alpha) / g7),
        u0: Box::new(|_| 0.0),
        bc: Some(BoundaryConditions::dirichlet(
            Box::new(|t: f64| t.powi(6)),
            Box::new(|t: f64| std::f64::consts::E * t.powi(6)),
        )),
    };
    Ok(PdeCase {
        name: "edp3".into(),
        problem,
        exact: Some(Box::new(|t, x| x.exp() * t.powi(6))),
    })
}

pub struct PdeCaseResult {
    pub case_name: String,
    pub alpha: f64,
    pub n_t: usize,
    pub n_x: usize,
    /// Sup-norm error against the exact solution over every node of the
    /// space-time grid; NaN when no exact solution is known.
    pub sup_error: f64,
    pub sylvester_residual: f64,
    /// NaN on the real line.
    pub boundary_residual_a: f64,
    pub boundary_residual_b: f64,
    pub runtime_s: f64,
    pub solution: PdeSolution,
}

pub fn run_pde_case(case: &PdeCase) -> Result<PdeCaseResult> {
    let start = Instant::now();
    let solution = solve_pde(&case.problem)?;
    let runtime_s = start.elapsed().as_secs_f64();
    let sup_error = match &case.exact {
        None => f64::NAN,
        Some(exact) => {
            let mut err = 0.0_f64;
            for i in 0..=solution.grid.n() {
                let t = solution.grid.node(i);
                for (k, &x) in solution.disc.nodes.iter().enumerate() {
                    err = err.max((solution.u[(i, k)] - exact(t, x)).abs());
                }
            }
            err
        }
    };
    let (boundary_residual_a, boundary_residual_b) = solution
        .boundary_residuals
        .unwrap_or((f64::NAN, f64::NAN));
    let n_x = match case.problem.domain {
        Domain::RealLine { n_x, .. } => n_x,
        Domain::Interval { n_x, .. } => n_x,
    };
    Ok(PdeCaseResult {
        case_name: case.name.clone(),
        alpha: case.problem.alpha,
        n_t: case.problem.grid.n(),
        n_x,
        sup_error,
        sylvester_residual: solution.sylvester_residual,
        boundary_residual_a,
        boundary_residual_b,
        runtime_s,
        solution,
    })
}

/// CSV with the pinned PDE report schema.
pub fn pde_csv(results: &[PdeCaseResult]) -> String {
    let mut out = String::from(
        "case,alpha,nt,nx,sup_error,sylvester_residual,boundary_residual_a,boundary_residual_b,runtime_s\n",
    );
    for r in results {
        out.push_str(&format!(
            "{},{},{},{},{:e},{:e},{:e},{:e},{:.6}\n",
            r.case_name,
            r.alpha,
            r.n_t,
            r.n_x,
            r.sup_error,
            r.sylvester_residual,
            r.boundary_residual_a,
            r.boundary_residual_b,
            r.runtime_s
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// JSON problem configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub alpha: f64,
    pub tf: f64,
    pub nt: usize,
    pub domain: DomainConfig,
    pub a1: String,
    pub a2: String,
    pub a3: String,
    pub a4: String,
    pub u0: String,
    #[serde(default)]
    pub bc: Option<BcConfig>,
    #[serde(default)]
    pub exact: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub xa: Option<f64>,
    #[serde(default)]
    pub xb: Option<f64>,
    pub nx: usize,
    #[serde(default)]
    pub hermite_scale: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcConfig {
    pub ca: f64,
    pub da: f64,
    pub ua: String,
    pub cb: f64,
    pub db: f64,
    pub ub: String,
}

fn uses_var(e: &Expr, var: Var) -> bool {
    match e {
        Expr::Number(_) => false,
        Expr::Var(v) => *v == var,
        Expr::Neg(a) => uses_var(a, var),
        Expr::Bin(_, a, b) => uses_var(a, var) || uses_var(b, var),
        Expr::Call(_, args) => args.iter().any(|a| uses_var(a, var)),
    }
}

fn parse_field(name: &str, src: &str) -> Result<Expr> {
    parse_expression(src)
        .map_err(|e| Error::Config(format!("in field {name:?}: {e}")))
}

fn parse_space_field(name: &str, src: &str) -> Result<Expr> {
    let e = parse_field(name, src)?;
    if uses_var(&e, Var::T) {
        return Err(Error::Config(format!(
            "field {name:?} must not depend on t (the Sylvester reduction \
             needs time-independent coefficients)"
        )));
    }
    Ok(e)
}

fn parse_time_field(name: &str, src: &str) -> Result<Expr> {
    let e = parse_field(name, src)?;
    if uses_var(&e, Var::X) {
        return Err(Error::Config(format!(
            "field {name:?} must not depend on x"
        )));
    }
    Ok(e)
}

fn space_closure(e: Expr, alpha: f64) -> Box<dyn Fn(f64) -> f64> {
    Box::new(move |x| e.evaluate(f64::NAN, x, alpha).unwrap_or(f64::NAN))
}

fn time_closure(e: Expr, alpha: f64) -> Box<dyn Fn(f64) -> f64> {
    Box::new(move |t| e.evaluate(t, f64::NAN, alpha).unwrap_or(f64::NAN))
}

/// Builds a solvable case from a JSON configuration document.
pub fn case_from_config(src: &str, name: &str) -> Result<PdeCase> {
    let cfg: ProblemConfig =
        serde_json::from_str(src).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::Config(format!(
            "alpha must lie strictly in (0,1), got {}",
            cfg.alpha
        )));
    }
    let alpha = cfg.alpha;
    let grid = build_time_grid(cfg.tf, cfg.nt)?;
    let domain = match cfg.domain.kind.as_str() {
        "real_line" => Domain::RealLine {
            n_x: cfg.domain.nx,
            hermite_scale: cfg.domain.hermite_scale.unwrap_or(1.0),
        },
        "interval" => {
            let xa = cfg
                .domain
                .xa
                .ok_or_else(|| Error::Config("interval domains need xa".into()))?;
            let xb = cfg
                .domain
                .xb
                .ok_or_else(|| Error::Config("interval domains need xb".into()))?;
            Domain::Interval {
                x_a: xa,
                x_b: xb,
                n_x: cfg.domain.nx,
            }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown domain type {other:?} (expected real_line or interval)"
            )))
        }
    };
    let a1 = parse_space_field("a1", &cfg.a1)?;
    let a2 = parse_space_field("a2", &cfg.a2)?;
    let a3 = parse_space_field("a3", &cfg.a3)?;
    let a4 = parse_field("a4", &cfg.a4)?;
    let u0 = parse_space_field("u0", &cfg.u0)?;
    let bc = match (&domain, cfg.bc) {
        (Domain::Interval { .. }, None) => {
            return Err(Error::Config(
                "interval domains need a bc block".into(),
            ))
        }
        (Domain::Interval { .. }, Some(b)) => {
            let ua = parse_time_field("bc.ua", &b.ua)?;
            let ub = parse_time_field("bc.ub", &b.ub)?;
            Some(BoundaryConditions {
                c_a: b.ca,
                d_a: b.da,
                u_a: time_closure(ua, alpha),
                c_b: b.cb,
                d_b: b.db,
                u_b: time_closure(ub, alpha),
            })
        }
        (Domain::RealLine { .. }, _) => None,
    };
    let exact = match cfg.exact {
        None => None,
        Some(src) => {
            let e = parse_field("exact", &src)?;
            let f: Box<dyn Fn(f64, f64) -> f64> =
                Box::new(move |t, x| e.evaluate(t, x, alpha).unwrap_or(f64::NAN));
            Some(f)
        }
    };
    let a4_expr = a4;
    let problem = PdeProblem {
        alpha,
        grid,
        domain,
        a1: space_closure(a1, alpha),
        a2: space_closure(a2, alpha),
        a3: space_closure(a3, alpha),
        a4: Box::new(move |t, x| a4_expr.evaluate(t, x, alpha).unwrap_or(f64::NAN)),
        u0: space_closure(u0, alpha),
        bc,
    };
    Ok(PdeCase {
        name: name.to_owned(),
        problem,
        exact,
    })
}
