//! Convergence study: max errors of the FFT evaluator on e^{2t} over a
//! range of grid sizes, with the fitted log-log slope per alpha. The slope
//! should track -(3 - alpha).

use caputo_ade::study::{run_caputo_study, study_csv, Method, TestFunction};

fn main() -> caputo_ade::Result<()> {
    let alphas = [0.15, 0.45, 0.85];
    let ns = [256, 512, 1024, 2048];
    let result = run_caputo_study(&alphas, &ns, 1.2, &TestFunction::Exp2t, &[Method::Fft])?;

    print!("{}", study_csv(&result));
    for f in &result.fits {
        println!(
            "alpha {}: slope {:.4} (theory {:.2}), pearson {:.7}",
            f.alpha,
            f.fit.slope,
            -(3.0 - f.alpha),
            f.fit.pearson
        );
    }
    Ok(())
}
