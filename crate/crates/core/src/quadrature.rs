//! Direct quadrature evaluators for the Caputo derivative at all grid nodes:
//! the order `2 - alpha` piecewise-linear scheme (general partitions) and the
//! order `3 - alpha` piecewise-quadratic scheme with its starred variant.

use crate::error::{Error, Result};
use crate::grid::SampledSeries;
use crate::specfun::gamma_fn;

/// Precomputed `j^{1-alpha}` and `j^{2-alpha}` tables for `0 <= j <= N`.
#[derive(Debug, Clone)]
pub struct PowerTable {
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
}

pub fn build_power_table(alpha: f64, n: usize) -> PowerTable {
    let e1 = 1.0 - alpha;
    let e2 = 2.0 - alpha;
    let p1 = (0..=n).map(|j| (j as f64).powf(e1)).collect();
    let p2 = (0..=n).map(|j| (j as f64).powf(e2)).collect();
    PowerTable { p1, p2 }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "fractional order must lie strictly in (0,1), got {alpha}"
        )));
    }
    Ok(())
}

/// Piecewise-linear scheme on an arbitrary strictly increasing partition
/// starting at 0; order `2 - alpha` on uniform grids.
pub fn caputo_linear(nodes: &[f64], values: &[f64], alpha: f64) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    if nodes.len() != values.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} nodes vs {} values",
            nodes.len(),
            values.len()
        )));
    }
    if nodes.is_empty() || nodes[0] != 0.0 {
        return Err(Error::InvalidArgument(
            "partition must start at t = 0".into(),
        ));
    }
    if nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "partition must be strictly increasing".into(),
        ));
    }
    let inv_gamma = 1.0 / gamma_fn(2.0 - alpha)?;
    let e1 = 1.0 - alpha;
    let mut out = vec![0.0; nodes.len()];
    for j in 1..nodes.len() {
        let tj = nodes[j];
        let mut acc = 0.0;
        for l in 0..j {
            let left = (tj - nodes[l]).powf(e1);
            let right = if l + 1 == j {
                0.0
            } else {
                (tj - nodes[l + 1]).powf(e1)
            };
            acc += (values[l + 1] - values[l]) * (left - right) / (nodes[l + 1] - nodes[l]);
        }
        out[j] = inv_gamma * acc;
    }
    Ok(out)
}

/// Coefficient sequences shared by the quadratic scheme, its fast-convolution
/// evaluator, and the starred variant: second difference, centered difference,
/// and the trailing-weight combination, for `0 <= l <= N-2`.
pub(crate) fn quadratic_coefficients(values: &[f64], alpha: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let m = values.len() - 2;
    let mut c1 = Vec::with_capacity(m);
    let mut c2 = Vec::with_capacity(m);
    let mut c3 = Vec::with_capacity(m);
    for l in 0..m {
        let (f0, f1, f2) = (values[l], values[l + 1], values[l + 2]);
        c1.push((f2 - 2.0 * f1 + f0) / (2.0 - alpha));
        c2.push((f2 - f0) / 2.0);
        c3.push((3.0 * f2 - 4.0 * f1 + f0) / 2.0);
    }
    (c1, c2, c3)
}

fn check_quadratic_input(series: &SampledSeries, alpha: f64) -> Result<()> {
    check_alpha(alpha)?;
    if series.grid.n() < 2 {
        return Err(Error::InvalidArgument(
            "quadratic scheme needs at least N = 2 (samples f_0, f_1, f_2)".into(),
        ));
    }
    Ok(())
}

/// First-interval contribution of the quadratic interpolant, evaluated at node `j`.
fn quadratic_head(values: &[f64], alpha: f64, table: &PowerTable, j: usize) -> f64 {
    let (f0, f1, f2) = (values[0], values[1], values[2]);
    (f2 - 2.0 * f1 + f0) / (2.0 - alpha) * (table.p2[j] - table.p2[j - 1])
        - (f2 - 4.0 * f1 + 3.0 * f0) / 2.0 * table.p1[j]
        - (f2 - f0) / 2.0 * table.p1[j - 1]
}

/// Interior sum over `1 <= l <= j-1`, accumulated with `l` increasing.
fn quadratic_tail(
    c1: &[f64],
    c2: &[f64],
    c3: &[f64],
    table: &PowerTable,
    j: usize,
    compensated: bool,
) -> f64 {
    let p1 = &table.p1;
    let p2 = &table.p2;
    if compensated {
        // Kahan summation, opt-in for roundoff-floor studies.
        let mut sum = 0.0;
        let mut c = 0.0;
        for l in 1..j {
            let k = j - l;
            let term = c1[l - 1] * (p2[k] - p2[k - 1]) + c2[l - 1] * p1[k] - c3[l - 1] * p1[k - 1];
            let y = term - c;
            let t = sum + y;
            c = (t - sum) - y;
            sum = t;
        }
        sum
    } else {
        let mut sum = 0.0;
        for l in 1..j {
            let k = j - l;
            sum += c1[l - 1] * (p2[k] - p2[k - 1]) + c2[l - 1] * p1[k] - c3[l - 1] * p1[k - 1];
        }
        sum
    }
}

fn caputo_quadratic_impl(
    series: &SampledSeries,
    alpha: f64,
    compensated: bool,
) -> Result<Vec<f64>> {
    check_quadratic_input(series, alpha)?;
    let n = series.grid.n();
    let table = build_power_table(alpha, n);
    let scale = series.grid.h().powf(-alpha) / gamma_fn(2.0 - alpha)?;
    let (c1, c2, c3) = quadratic_coefficients(&series.values, alpha);
    let mut out = vec![0.0; n + 1];
    for j in 1..=n {
        let head = quadratic_head(&series.values, alpha, &table, j);
        let tail = quadratic_tail(&c1, &c2, &c3, &table, j, compensated);
        out[j] = scale * (head + tail);
    }
    Ok(out)
}

/// Order `3 - alpha` scheme: quadratic interpolation on every subinterval,
/// including the first.
pub fn caputo_quadratic(series: &SampledSeries, alpha: f64) -> Result<Vec<f64>> {
    caputo_quadratic_impl(series, alpha, false)
}

/// As [`caputo_quadratic`] but with compensated summation of the interior sum.
pub fn caputo_quadratic_compensated(series: &SampledSeries, alpha: f64) -> Result<Vec<f64>> {
    caputo_quadratic_impl(series, alpha, true)
}

/// Starred variant: linear interpolation on the first subinterval only,
/// which degrades accuracy near `t = 0`.
pub fn caputo_quadratic_star(series: &SampledSeries, alpha: f64) -> Result<Vec<f64>> {
    check_quadratic_input(series, alpha)?;
    let n = series.grid.n();
    let table = build_power_table(alpha, n);
    let scale = series.grid.h().powf(-alpha) / gamma_fn(2.0 - alpha)?;
    let (c1, c2, c3) = quadratic_coefficients(&series.values, alpha);
    let (f0, f1) = (series.values[0], series.values[1]);
    let mut out = vec![0.0; n + 1];
    for j in 1..=n {
        let head = (f1 - f0) * (table.p1[j] - table.p1[j - 1]);
        let tail = quadratic_tail(&c1, &c2, &c3, &table, j, false);
        out[j] = scale * (head + tail);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_time_grid;
    use crate::specfun::{caputo_exp2_exact, caputo_monomial_exact};

    #[test]
    fn power_table_values() {
        let t = build_power_table(0.5, 4);
        assert_eq!((t.p1[0], t.p2[0]), (0.0, 0.0));
        assert_eq!((t.p1[1], t.p2[1]), (1.0, 1.0));
        assert_eq!((t.p1[4], t.p2[4]), (2.0, 8.0));
        assert!(t.p1.windows(2).all(|w| w[1] > w[0]));
        assert!(t.p2.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn constants_annihilated_exactly() {
        let grid = build_time_grid(1.2, 50).unwrap();
        // dyadic constant: every finite difference is exactly zero
        let series = grid.sample(|_| 2.75);
        for out in [
            caputo_quadratic(&series, 0.3).unwrap(),
            caputo_quadratic_star(&series, 0.3).unwrap(),
            caputo_linear(&grid.nodes(), &series.values, 0.3).unwrap(),
        ] {
            assert!(out.iter().all(|&v| v == 0.0));
        }
        // non-dyadic constant: the 3 f_0 term rounds, leaving only noise at
        // the scale of the quadrature weights
        let series = grid.sample(|_| 3.7);
        let scale = 3.7 * grid.h().powf(-0.3);
        for out in [
            caputo_quadratic(&series, 0.3).unwrap(),
            caputo_quadratic_star(&series, 0.3).unwrap(),
        ] {
            assert!(out.iter().all(|&v| v.abs() <= 1e-13 * scale));
        }
    }

    #[test]
    fn linear_scheme_exact_on_lines() {
        let grid = build_time_grid(1.5, 64).unwrap();
        let alpha = 0.4;
        let out = caputo_linear(&grid.nodes(), &grid.sample(|t| t).values, alpha).unwrap();
        for j in 1..=64 {
            let exact = caputo_monomial_exact(1.0, alpha, grid.node(j)).unwrap();
            assert!((out[j] - exact).abs() < 1e-12 * exact.abs().max(1.0), "j={j}");
        }
    }

    #[test]
    fn linear_scheme_accepts_nonuniform_nodes() {
        let nodes = [0.0, 0.1, 0.25, 0.3, 0.9, 1.0];
        let values: Vec<f64> = nodes.iter().map(|&t| 2.0 * t + 1.0).collect();
        let alpha = 0.3;
        let out = caputo_linear(&nodes, &values, alpha).unwrap();
        for (j, &tj) in nodes.iter().enumerate().skip(1) {
            let exact = 2.0 * caputo_monomial_exact(1.0, alpha, tj).unwrap();
            assert!((out[j] - exact).abs() < 1e-12);
        }
        assert!(caputo_linear(&[0.0, 0.5, 0.5], &[0.0; 3], alpha).is_err());
        assert!(caputo_linear(&[0.1, 0.5, 0.9], &[0.0; 3], alpha).is_err());
    }

    #[test]
    fn quadratic_scheme_exact_on_quadratics() {
        for &n in &[2usize, 7, 100] {
            let grid = build_time_grid(1.0, n).unwrap();
            let alpha = 0.3;
            let out = caputo_quadratic(&grid.sample(|t| t * t), alpha).unwrap();
            assert_eq!(out[0], 0.0);
            for j in 1..=n {
                let exact = caputo_monomial_exact(2.0, alpha, grid.node(j)).unwrap();
                assert!(
                    (out[j] - exact).abs() <= 1e-12 * exact.abs(),
                    "n={n}, j={j}: {} vs {exact}",
                    out[j]
                );
            }
        }
    }

    #[test]
    fn first_node_errors_match_reference() {
        // f = e^{2t}, alpha = 0.17, t_f = 1.2, h = 1.2/800. The reference
        // first-node errors reproduce at this step size to all published
        // digits (checked against an arbitrary-precision oracle); halving h
        // shrinks them by exactly 2^{3-alpha} and 2^{2-alpha}.
        let alpha = 0.17;
        let grid = build_time_grid(1.2, 800).unwrap();
        let series = grid.sample(|t| (2.0 * t).exp());
        let exact1 = caputo_exp2_exact(alpha, grid.node(1)).unwrap();

        let quad = caputo_quadratic(&series, alpha).unwrap();
        let err_quad = (quad[1] - exact1).abs();
        assert!(
            (err_quad - 1.7425e-9).abs() < 0.1 * 1.7425e-9,
            "quadratic first-node error {err_quad:.4e}"
        );

        let star = caputo_quadratic_star(&series, alpha).unwrap();
        let err_star = (star[1] - exact1).abs();
        assert!(
            (err_star - 1.3460e-6).abs() < 0.1 * 1.3460e-6,
            "starred first-node error {err_star:.4e}"
        );
    }

    #[test]
    fn star_matches_quadratic_on_linear_data() {
        let grid = build_time_grid(2.0, 40).unwrap();
        let series = grid.sample(|t| 3.0 * t + 1.0);
        let a = caputo_quadratic(&series, 0.6).unwrap();
        let b = caputo_quadratic_star(&series, 0.6).unwrap();
        for j in 0..=40 {
            assert!((a[j] - b[j]).abs() < 1e-13 * a[j].abs().max(1.0));
        }
    }

    #[test]
    fn star_agrees_with_quadratic_near_final_time() {
        let alpha = 0.17;
        let grid = build_time_grid(1.2, 400).unwrap();
        let series = grid.sample(|t| (2.0 * t).exp());
        let quad = caputo_quadratic(&series, alpha).unwrap();
        let star = caputo_quadratic_star(&series, alpha).unwrap();
        let n = grid.n();
        let exact = caputo_exp2_exact(alpha, grid.node(n)).unwrap();
        let err = (quad[n] - exact).abs();
        assert!((quad[n] - star[n]).abs() < 0.05 * err);
    }

    #[test]
    fn schemes_are_linear_in_the_data() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let grid = build_time_grid(1.0, 20).unwrap();
        for _ in 0..20 {
            let f: Vec<f64> = (0..=20).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let g: Vec<f64> = (0..=20).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let combo: Vec<f64> = f.iter().zip(&g).map(|(&x, &y)| a * x + b * y).collect();
            let sf = SampledSeries::new(grid.clone(), f).unwrap();
            let sg = SampledSeries::new(grid.clone(), g).unwrap();
            let sc = SampledSeries::new(grid.clone(), combo).unwrap();
            let df = caputo_quadratic(&sf, 0.42).unwrap();
            let dg = caputo_quadratic(&sg, 0.42).unwrap();
            let dc = caputo_quadratic(&sc, 0.42).unwrap();
            let scale = dc.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for j in 0..=20 {
                assert!((dc[j] - (a * df[j] + b * dg[j])).abs() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn observed_convergence_ratios() {
        // log2 error ratios at t_f for N doubling from 100 to 1600.
        let alpha = 0.17;
        let expected = [2.7403, 2.7574, 2.7698, 2.7769];
        let mut errors = Vec::new();
        for k in 0..5 {
            let n = 100 << k;
            let grid = build_time_grid(1.2, n).unwrap();
            let out = caputo_quadratic(&grid.sample(|t| (2.0 * t).exp()), alpha).unwrap();
            let exact = caputo_exp2_exact(alpha, 1.2).unwrap();
            errors.push((out[n] - exact).abs());
        }
        for (i, &exp) in expected.iter().enumerate() {
            let ratio = (errors[i] / errors[i + 1]).log2();
            assert!((ratio - exp).abs() <= 0.02, "step {i}: {ratio:.4} vs {exp}");
        }
    }

    #[test]
    fn rejects_invalid_orders_and_sizes() {
        let grid = build_time_grid(1.0, 1).unwrap();
        let s = grid.sample(|t| t);
        assert!(caputo_quadratic(&s, 0.5).is_err());
        let grid = build_time_grid(1.0, 4).unwrap();
        let s = grid.sample(|t| t);
        assert!(caputo_quadratic(&s, 0.0).is_err());
        assert!(caputo_quadratic(&s, 1.0).is_err());
    }

    #[test]
    fn compensated_variant_agrees() {
        let grid = build_time_grid(1.2, 300).unwrap();
        let series = grid.sample(|t| (2.0 * t).exp());
        let a = caputo_quadratic(&series, 0.17).unwrap();
        let b = caputo_quadratic_compensated(&series, 0.17).unwrap();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for j in 0..=300 {
            assert!((a[j] - b[j]).abs() < 1e-13 * scale);
        }
    }
}
