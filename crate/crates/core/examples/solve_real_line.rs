//! Solve an advection-diffusion problem posed on the whole real line using
//! Hermite collocation (the built-in "edp1" case, manufactured solution
//! u = e^{2t - x^2}). The Hermite stretch factor b trades node coverage
//! against resolution; the sweep below shows its effect.

use caputo_ade::study::{edp1, run_pde_case, EDP1_DEFAULT_SCALE};

fn main() -> caputo_ade::Result<()> {
    println!("stretch factor sweep at 400 time steps, 16 Hermite nodes:");
    for b in [0.5, EDP1_DEFAULT_SCALE, 1.0, 1.4] {
        let result = run_pde_case(&edp1(0.17, 400, 16, b)?)?;
        println!("  b = {b:<4} sup error {:.4e}", result.sup_error);
    }
    println!("(b = {EDP1_DEFAULT_SCALE} is the library default for this case)");
    Ok(())
}
