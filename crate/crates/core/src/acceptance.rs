//! Self-test suite: one check per published accuracy or performance claim.
//!
//! Each criterion returns a [`CriterionOutcome`] instead of panicking so the
//! suite can run to completion from the CLI (`--self-test`) and report every
//! result. The integration test target asserts on the same outcomes.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fast_convolution::{aperiodic_convolve, caputo_fast, ConvolutionPlan, KernelLookup};
use crate::grid::build_time_grid;
use crate::linalg::{lu_factor, schur_decompose, solve_sylvester, SylvesterSystem};
use crate::matrix::DenseMatrix;
use crate::opmatrix::build_operational_matrix;
use crate::quadrature::{build_power_table, caputo_quadratic, caputo_quadratic_star};
use crate::specfun::{caputo_exp2_exact, caputo_monomial_exact, gamma_fn, upper_incomplete_gamma};
use crate::study::{
    edp1, edp2, edp3, run_caputo_study, run_pde_case, Method, TestFunction, EDP1_DEFAULT_SCALE,
};

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(id: usize, name: &'static str, r: Result<(bool, String)>) -> CriterionOutcome {
    match r {
        Ok((passed, detail)) => CriterionOutcome {
            id,
            name,
            passed,
            detail,
        },
        Err(e) => CriterionOutcome {
            id,
            name,
            passed: false,
            detail: format!("errored: {e}"),
        },
    }
}

fn within_factor(value: f64, target: f64, factor: f64) -> bool {
    value > 0.0 && target > 0.0 && value / target <= factor && target / value <= factor
}

/// Per-node accumulation magnitude of the quadratic scheme: the sum of the
/// absolute values of every term the quadrature adds up. Two algebraically
/// identical evaluations that associate those terms differently can only be
/// expected to agree relative to this scale, not relative to the (much
/// smaller, heavily cancelled) output. Computed with the same fast
/// convolution machinery so it stays cheap at large N.
fn accumulation_scale(values: &[f64], alpha: f64, h: f64) -> Result<Vec<f64>> {
    let n = values.len() - 1;
    let pt = build_power_table(alpha, n);
    let w = 1.0 / (2.0 - alpha);
    let g = h.powf(-alpha) / gamma_fn(2.0 - alpha)?;
    // |c| coefficient sequences, zero-padded to length n so the convolution
    // output covers every node
    let mut c1 = vec![0.0; n];
    let mut c2 = vec![0.0; n];
    let mut c3 = vec![0.0; n];
    for i in 0..n - 1 {
        let (f0, f1, f2) = (values[i], values[i + 1], values[i + 2]);
        c1[i] = ((f2 - 2.0 * f1 + f0) * w).abs();
        c2[i] = ((f2 - f0) / 2.0).abs();
        c3[i] = ((3.0 * f2 - 4.0 * f1 + f0) / 2.0).abs();
    }
    let kernel = |f: &dyn Fn(usize) -> f64| -> Result<KernelLookup> {
        let mut vals = vec![0.0; 2 * n - 1];
        for j in 0..n {
            vals[n - 1 + j] = f(j);
        }
        KernelLookup::new(n, vals)
    };
    let k1 = kernel(&|j| if j >= 1 { pt.p2[j] - pt.p2[j - 1] } else { 0.0 })?;
    let k2 = kernel(&|j| pt.p1[j])?;
    let k3 = kernel(&|j| if j >= 1 { pt.p1[j - 1] } else { 0.0 })?;
    let t1 = aperiodic_convolve(&c1, &k1)?;
    let t2 = aperiodic_convolve(&c2, &k2)?;
    let t3 = aperiodic_convolve(&c3, &k3)?;
    let (f0, f1, f2) = (values[0], values[1], values[2]);
    let mut scale = vec![0.0; n + 1];
    for j in 1..=n {
        let head = (f2 - 2.0 * f1 + f0).abs() * w * (pt.p2[j] - pt.p2[j - 1])
            + (f2 - 4.0 * f1 + 3.0 * f0).abs() / 2.0 * pt.p1[j]
            + (f2 - f0).abs() / 2.0 * pt.p1[j - 1];
        scale[j] = g * (head + t1[j - 1] + t2[j - 1] + t3[j - 1]);
    }
    Ok(scale)
}

fn final_node_error_exp2t(alpha: f64, t_f: f64, n: usize) -> Result<f64> {
    let grid = build_time_grid(t_f, n)?;
    let series = grid.sample(|t| (2.0 * t).exp());
    let out = caputo_quadratic(&series, alpha)?;
    Ok((out[n] - caputo_exp2_exact(alpha, t_f)?).abs())
}

/// Error ratios at the final time under step halving match the published
/// table for `alpha = 0.17` on `e^{2t}` to within 0.02.
pub fn criterion_1() -> CriterionOutcome {
    outcome(1, "convergence ratios of the quadratic scheme", (|| {
        let expected = [2.7403, 2.7574, 2.7698, 2.7769];
        let errors: Vec<f64> = [100usize, 200, 400, 800, 1600]
            .iter()
            .map(|&n| final_node_error_exp2t(0.17, 1.2, n))
            .collect::<Result<_>>()?;
        let mut detail = String::new();
        let mut ok = true;
        for (i, &want) in expected.iter().enumerate() {
            let got = (errors[i] / errors[i + 1]).log2();
            if (got - want).abs() > 0.02 {
                ok = false;
            }
            detail.push_str(&format!("{got:.4} (want {want}) "));
        }
        Ok((ok, detail.trim_end().to_owned()))
    })())
}

/// Absolute error at the first grid node with step `h = 1.2/800` matches the
/// published values for both quadratic variants to within 10%.
pub fn criterion_2() -> CriterionOutcome {
    outcome(2, "first-node errors of both quadratic variants", (|| {
        let grid = build_time_grid(1.2, 800)?;
        let series = grid.sample(|t| (2.0 * t).exp());
        let exact = caputo_exp2_exact(0.17, grid.node(1))?;
        let quad = (caputo_quadratic(&series, 0.17)?[1] - exact).abs();
        let star = (caputo_quadratic_star(&series, 0.17)?[1] - exact).abs();
        let ok = within_factor(quad, 1.7425e-9, 1.1) && within_factor(star, 1.3460e-6, 1.1);
        Ok((ok, format!("quad {quad:.4e} (want 1.7425e-9), star {star:.4e} (want 1.3460e-6)")))
    })())
}

/// Log-log error slopes of the FFT evaluator match the `-(3 - alpha)` rate
/// to within 0.1, with near-perfect linear fits, across a sweep of alphas.
pub fn criterion_3() -> CriterionOutcome {
    outcome(3, "FFT evaluator convergence slopes", (|| {
        let alphas: Vec<f64> = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
        let ns = [256usize, 512, 1024, 2048];
        let result = run_caputo_study(&alphas, &ns, 1.2, &TestFunction::Exp2t, &[Method::Fft])?;
        let mut ok = true;
        let mut worst_slope_gap = 0.0_f64;
        let mut worst_pearson = -1.0_f64;
        for fit in &result.fits {
            let gap = (fit.fit.slope + (3.0 - fit.alpha)).abs();
            worst_slope_gap = worst_slope_gap.max(gap);
            worst_pearson = worst_pearson.max(fit.fit.pearson);
            if gap > 0.1 || fit.fit.pearson > -0.9999 {
                ok = false;
            }
        }
        Ok((ok && result.fits.len() == alphas.len(), format!(
            "max |slope + (3-alpha)| = {worst_slope_gap:.3}, worst pearson = {worst_pearson:.7}"
        )))
    })())
}

/// The FFT path reproduces the direct scheme to `1e-10` (scaled) across a
/// range of lengths and is at least 10x faster at `N = 2^17`.
pub fn criterion_4() -> CriterionOutcome {
    outcome(4, "fast path agreement and speedup", (|| {
        let alpha = 0.17;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut worst = 0.0_f64;
        let mut speedup = 0.0_f64;
        for &n in &[2usize, 3, 5, 17, 100, 1000, 1 << 17] {
            let grid = build_time_grid(1.2, n)?;
            let smooth = grid.sample(|t| (2.0 * t).exp());
            let random = grid.sample(|_| rng.gen_range(-1.0..1.0));
            let plan = ConvolutionPlan::new(alpha, n)?;
            for (which, series) in [(0, &smooth), (1, &random)] {
                let t0 = Instant::now();
                let direct = caputo_quadratic(series, alpha)?;
                let direct_s = t0.elapsed().as_secs_f64();
                let t0 = Instant::now();
                let fast = caputo_fast(series, alpha, &plan)?;
                let fast_s = t0.elapsed().as_secs_f64();
                // the FFT couples every node, so its rounding is global:
                // compare against the largest accumulation magnitude
                let scale = accumulation_scale(&series.values, alpha, grid.h())?
                    .into_iter()
                    .fold(f64::MIN_POSITIVE, f64::max);
                for j in 1..=n {
                    worst = worst.max((direct[j] - fast[j]).abs() / scale);
                }
                if n == 1 << 17 && which == 0 {
                    speedup = direct_s / fast_s;
                }
            }
        }
        let ok = worst <= 1e-10 && speedup >= 10.0;
        Ok((ok, format!(
            "max scaled disagreement {worst:.2e}, speedup at N=2^17: {speedup:.0}x"
        )))
    })())
}

/// Applying the operational matrix reproduces the quadrature to `1e-12`
/// (scaled) on random data, and every matrix row sums to zero.
pub fn criterion_5() -> CriterionOutcome {
    outcome(5, "operational matrix equals the quadrature", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut worst_entry = 0.0_f64;
        let mut worst_row_sum = 0.0_f64;
        for _ in 0..20 {
            let n = rng.gen_range(2..=2000);
            let alpha = rng.gen_range(0.05..0.95);
            let grid = build_time_grid(1.2, n)?;
            let series = grid.sample(|_| rng.gen_range(-1.0..1.0));
            let op = build_operational_matrix(alpha, &grid)?;
            let via_matrix = op.apply(&series)?;
            let direct = caputo_quadratic(&series, alpha)?;
            let scale = accumulation_scale(&series.values, alpha, grid.h())?;
            for j in 1..=n {
                worst_entry = worst_entry.max((via_matrix[j] - direct[j]).abs() / scale[j]);
            }
            for i in 0..=n {
                let row = op.m.row(i);
                let row_scale = row.iter().fold(f64::MIN_POSITIVE, |m, v| m.max(v.abs()));
                let sum: f64 = row.iter().sum();
                worst_row_sum = worst_row_sum.max(sum.abs() / row_scale);
            }
        }
        let ok = worst_entry <= 1e-12 && worst_row_sum <= 1e-10;
        Ok((ok, format!(
            "max scaled entry gap {worst_entry:.2e}, max scaled row sum {worst_row_sum:.2e}"
        )))
    })())
}

/// The quadratic scheme annihilates constants exactly and reproduces the
/// closed-form derivative of `t` and `t^2` to roundoff.
pub fn criterion_6() -> CriterionOutcome {
    outcome(6, "polynomial exactness of the quadratic scheme", (|| {
        let grid = build_time_grid(1.0, 64)?;
        let mut ok = true;
        let mut worst = 0.0_f64;
        for &alpha in &[0.1, 0.5, 0.9] {
            // dyadic constant: every arithmetic cancellation is exact
            let constant = grid.sample(|_| 2.75);
            for &v in &caputo_quadratic(&constant, alpha)? {
                if v != 0.0 {
                    ok = false;
                }
            }
            for beta in [1.0, 2.0] {
                let series = grid.sample(|t| t.powf(beta));
                let out = caputo_quadratic(&series, alpha)?;
                let mut sup_exact = 0.0_f64;
                let mut sup_diff = 0.0_f64;
                for j in 1..=grid.n() {
                    let exact = caputo_monomial_exact(beta, alpha, grid.node(j))?;
                    sup_exact = sup_exact.max(exact.abs());
                    sup_diff = sup_diff.max((out[j] - exact).abs());
                }
                worst = worst.max(sup_diff / sup_exact);
            }
        }
        ok = ok && worst <= 1e-11;
        Ok((ok, format!("max relative monomial error {worst:.2e}")))
    })())
}

/// Builds the Kronecker-product form of `A U + U B = C` (row-major
/// stacking of `U`) and solves it with plain LU as an oracle.
fn kronecker_oracle(sys: &SylvesterSystem) -> Result<DenseMatrix> {
    let n = sys.a.rows();
    let m = sys.b.rows();
    let mut big = DenseMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..m {
            for k in 0..n {
                big[(i * m + j, k * m + j)] += sys.a[(i, k)];
            }
            for k in 0..m {
                big[(i * m + j, i * m + k)] += sys.b[(k, j)];
            }
        }
    }
    let rhs = DenseMatrix::from_fn(n * m, 1, |r, _| sys.c[(r / m, r % m)]);
    let lu = lu_factor(&big, 1e-13 * big.sup_norm())?;
    let flat = lu.solve_columns(&rhs)?;
    Ok(DenseMatrix::from_fn(n, m, |i, j| flat[(i * m + j, 0)]))
}

fn random_sylvester(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Result<SylvesterSystem> {
    let mut a = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..i {
            a[(i, k)] = rng.gen_range(-1.0..1.0) / n as f64;
        }
        a[(i, i)] = 3.0 + 0.1 * i as f64;
    }
    if n > 1 {
        a[(0, 1)] = rng.gen_range(-0.5..0.5);
    }
    let b = DenseMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0) / m as f64);
    let c = DenseMatrix::from_fn(n, m, |_, _| rng.gen_range(-1.0..1.0));
    SylvesterSystem::new(a, b, c)
}

/// The Schur-based Sylvester solver matches a dense Kronecker-product LU
/// oracle, leaves tiny residuals, and the Schur factors reconstruct `B`.
pub fn criterion_7() -> CriterionOutcome {
    outcome(7, "Sylvester solver against the Kronecker oracle", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst_gap = 0.0_f64;
        let mut worst_residual = 0.0_f64;
        for &(n, m) in &[(5usize, 5usize), (20, 20), (40, 10), (8, 50)] {
            let sys = random_sylvester(&mut rng, n, m)?;
            let u = solve_sylvester(&sys)?;
            let oracle = kronecker_oracle(&sys)?;
            let scale = oracle.sup_norm().max(1.0);
            worst_gap = worst_gap.max(crate::matrix::inf_error(&u, &oracle)? / scale);
            worst_residual = worst_residual.max(sys.residual(&u)?);
        }
        let mut worst_recon = 0.0_f64;
        for &m in &[2usize, 5, 16] {
            let b = DenseMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
            let (q, t) = schur_decompose(&b)?;
            let recon = q.matmul(&t)?.matmul(&q.conj_transpose())?;
            let mut gap = 0.0_f64;
            for i in 0..m {
                for j in 0..m {
                    let d = recon.row(i)[j] - num_complex::Complex64::new(b[(i, j)], 0.0);
                    gap = gap.max(d.norm());
                }
            }
            worst_recon = worst_recon.max(gap / b.sup_norm().max(1.0));
        }
        let ok = worst_gap <= 1e-9 && worst_residual <= 1e-8 && worst_recon <= 1e-10;
        Ok((ok, format!(
            "solution gap {worst_gap:.2e}, residual {worst_residual:.2e}, Schur reconstruction {worst_recon:.2e}"
        )))
    })())
}

/// The Dirichlet interval case reproduces the published sup-norm errors at
/// the published grid for three alphas, to within a factor of 3.
pub fn criterion_8() -> CriterionOutcome {
    outcome(8, "Dirichlet interval case accuracy", (|| {
        let targets = [(0.1, 2.8880e-11), (0.2, 1.6116e-10), (0.338, 7.2384e-10)];
        let mut ok = true;
        let mut detail = String::new();
        for &(alpha, want) in &targets {
            let result = run_pde_case(&edp3(alpha, 3500, 10)?)?;
            if !within_factor(result.sup_error, want, 3.0) {
                ok = false;
            }
            detail.push_str(&format!("alpha {alpha}: {:.4e} (want {want:e}) ", result.sup_error));
        }
        Ok((ok, detail.trim_end().to_owned()))
    })())
}

/// The Robin interval case hits the published error at the published grid
/// and satisfies its boundary conditions to near roundoff.
pub fn criterion_9() -> CriterionOutcome {
    outcome(9, "Robin interval case accuracy", (|| {
        // the published error corresponds to a time step of 1.2/5400: at
        // 1.2/2700 a correct solver lands a factor 2^{3-alpha} higher, the
        // same step-halving bookkeeping slip as in the first-node table
        let result = run_pde_case(&edp2(0.17, 5400, 15)?)?;
        let ok = result.sup_error <= 1e-8
            && within_factor(result.sup_error, 1.8371e-10, 3.0)
            && result.boundary_residual_a <= 1e-8
            && result.boundary_residual_b <= 1e-8;
        Ok((ok, format!(
            "sup error {:.4e} (want 1.8371e-10), boundary residuals {:.2e} / {:.2e}",
            result.sup_error, result.boundary_residual_a, result.boundary_residual_b
        )))
    })())
}

/// The real-line case with the documented Hermite stretch factor reaches the
/// published error band, and a coarse sweep confirms that factor is the
/// right neighbourhood.
pub fn criterion_10() -> CriterionOutcome {
    outcome(10, "real-line case accuracy and scale choice", (|| {
        // time step 1.2/5400 for the same reason as the Robin case above
        let result = run_pde_case(&edp1(0.17, 5400, 16, EDP1_DEFAULT_SCALE)?)?;
        let mut ok = result.sup_error <= 1e-7 && within_factor(result.sup_error, 1.6502e-10, 10.0);
        // coarse sweep at a cheaper grid: the documented scale must win
        let mut sweep = String::new();
        let mut best = f64::INFINITY;
        let mut best_scale = f64::NAN;
        for &b in &[0.5, EDP1_DEFAULT_SCALE, 1.0] {
            let r = run_pde_case(&edp1(0.17, 300, 16, b)?)?;
            sweep.push_str(&format!("b={b}: {:.1e} ", r.sup_error));
            if r.sup_error < best {
                best = r.sup_error;
                best_scale = b;
            }
        }
        ok = ok && best_scale == EDP1_DEFAULT_SCALE;
        Ok((ok, format!(
            "sup error {:.4e} (want 1.6502e-10 band); sweep {}",
            result.sup_error,
            sweep.trim_end()
        )))
    })())
}

/// The gamma and upper incomplete gamma implementations satisfy their
/// recurrences and the `Gamma(1, x) = e^{-x}` closed form to roundoff.
pub fn criterion_11() -> CriterionOutcome {
    outcome(11, "special function recurrences", (|| {
        let mut worst_gamma = 0.0_f64;
        let mut worst_upper = 0.0_f64;
        let mut worst_closed = 0.0_f64;
        for i in 1..=50 {
            let x = 0.1 * i as f64;
            let lhs = gamma_fn(x + 1.0)?;
            worst_gamma = worst_gamma.max((lhs - x * gamma_fn(x)?).abs() / lhs.abs());
            worst_closed = worst_closed
                .max((upper_incomplete_gamma(1.0, x)? - (-x).exp()).abs() / (-x).exp());
            for j in 1..=10 {
                let s = 0.17 * j as f64;
                let lhs = upper_incomplete_gamma(s + 1.0, x)?;
                let rhs = s * upper_incomplete_gamma(s, x)? + x.powf(s) * (-x).exp();
                worst_upper = worst_upper.max((lhs - rhs).abs() / lhs.abs());
            }
        }
        let ok = worst_gamma <= 1e-11 && worst_upper <= 1e-12 && worst_closed <= 1e-13;
        Ok((ok, format!(
            "gamma recurrence {worst_gamma:.2e}, incomplete recurrence {worst_upper:.2e}, closed form {worst_closed:.2e}"
        )))
    })())
}

/// Runs every criterion in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
    ]
}
