//! The FFT fast path computes the same quadrature as the direct O(N^2)
//! scheme in O(N log N). This example checks agreement and reports the
//! speedup on a large grid.

use std::time::Instant;

use caputo_ade::{build_time_grid, caputo_fast, caputo_quadratic, ConvolutionPlan};

fn main() -> caputo_ade::Result<()> {
    let alpha = 0.17;
    let n = 1 << 15;
    let grid = build_time_grid(1.2, n)?;
    let series = grid.sample(|t| (2.0 * t).exp());

    let t0 = Instant::now();
    let direct = caputo_quadratic(&series, alpha)?;
    let direct_s = t0.elapsed().as_secs_f64();

    // the plan caches the kernel spectra; reuse it across evaluations with
    // the same (alpha, N)
    let plan = ConvolutionPlan::new(alpha, n)?;
    let t0 = Instant::now();
    let fast = caputo_fast(&series, alpha, &plan)?;
    let fast_s = t0.elapsed().as_secs_f64();

    let scale = direct.iter().fold(f64::MIN_POSITIVE, |m, v| m.max(v.abs()));
    let gap = direct
        .iter()
        .zip(&fast)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);

    println!("N = {n}");
    println!("direct: {direct_s:.3} s, fft: {fast_s:.3} s ({:.0}x)", direct_s / fast_s);
    println!("max scaled disagreement: {:.2e}", gap / scale);
    Ok(())
}
