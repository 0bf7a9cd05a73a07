//! Evaluate the Caputo fractional derivative of f(t) = e^{2t} on a uniform
//! grid with the order 3-alpha quadrature and compare against the closed
//! form 2^alpha e^{2t} P(1-alpha, 2t).

use caputo_ade::specfun::caputo_exp2_exact;
use caputo_ade::{build_time_grid, caputo_quadratic};

fn main() -> caputo_ade::Result<()> {
    let alpha = 0.4;
    let grid = build_time_grid(1.2, 40)?;
    let series = grid.sample(|t| (2.0 * t).exp());
    let out = caputo_quadratic(&series, alpha)?;

    println!("{:>8} {:>16} {:>16} {:>12}", "t", "computed", "exact", "error");
    for j in (0..=grid.n()).step_by(8) {
        let t = grid.node(j);
        let exact = if j == 0 { 0.0 } else { caputo_exp2_exact(alpha, t)? };
        println!(
            "{t:>8.3} {:>16.10} {exact:>16.10} {:>12.2e}",
            out[j],
            (out[j] - exact).abs()
        );
    }
    Ok(())
}
