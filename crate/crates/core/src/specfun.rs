//! Gamma and incomplete-gamma functions, plus closed-form Caputo derivatives
//! used as exact references.

use crate::error::{Error, Result};
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(s: f64) -> bool {
    s <= 0.0 && s == s.floor()
}

/// Euler gamma function, Lanczos approximation with reflection for `s < 0.5`.
pub fn gamma_fn(s: f64) -> Result<f64> {
    if is_nonpositive_integer(s) {
        return Err(Error::Domain(format!("gamma pole at s = {s}")));
    }
    if s < 0.5 {
        // Reflection: Gamma(s) Gamma(1-s) = pi / sin(pi s).
        return Ok(PI / ((PI * s).sin() * gamma_fn(1.0 - s)?));
    }
    let z = s - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok((2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc)
}

/// Regularized lower incomplete gamma `P(s, x) = gamma(s, x) / Gamma(s)`,
/// by power series; intended for `x < s + 1`.
fn lower_regularized_series(s: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut term = 1.0 / s;
    let mut sum = term;
    for n in 1..300 {
        term *= x / (s + n as f64);
        sum += term;
        if term.abs() < sum.abs() * 1e-16 {
            let front = (s * x.ln() - x).exp() / gamma_fn(s)?;
            return Ok(front * sum);
        }
    }
    Err(Error::NonConvergence(format!(
        "lower incomplete gamma series for s={s}, x={x}"
    )))
}

/// Continued fraction (modified Lentz) for `Gamma(s, x)`, `x >= s + 1`.
fn upper_continued_fraction(s: f64, x: f64) -> Result<f64> {
    let tiny = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..300 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok((s * x.ln() - x).exp() * h);
        }
    }
    Err(Error::NonConvergence(format!(
        "upper incomplete gamma continued fraction for s={s}, x={x}"
    )))
}

/// Upper incomplete gamma `Gamma(s, x)`, `s > 0`, `x >= 0`.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("negative lower limit x = {x}")));
    }
    if s <= 0.0 {
        return Err(Error::Domain(format!("order must be positive, s = {s}")));
    }
    if x < s + 1.0 {
        Ok(gamma_fn(s)? * (1.0 - lower_regularized_series(s, x)?))
    } else {
        upper_continued_fraction(s, x)
    }
}

/// Regularized lower incomplete gamma `P(s, x)`, accurate also when small.
pub fn lower_regularized_gamma(s: f64, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("negative lower limit x = {x}")));
    }
    if s <= 0.0 {
        return Err(Error::Domain(format!("order must be positive, s = {s}")));
    }
    if x < s + 1.0 {
        lower_regularized_series(s, x)
    } else {
        Ok(1.0 - upper_continued_fraction(s, x)? / gamma_fn(s)?)
    }
}

/// Caputo derivative of `t^beta`:
/// `Gamma(beta+1) / Gamma(beta-alpha+1) * t^(beta-alpha)`.
/// The constant case `beta = 0` trivially differentiates to zero.
pub fn caputo_monomial_exact(beta: f64, alpha: f64, t: f64) -> Result<f64> {
    if beta == 0.0 {
        return Ok(0.0);
    }
    if beta < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "monomial exponent must be nonnegative, got {beta}"
        )));
    }
    if t == 0.0 {
        return Ok(if beta > alpha { 0.0 } else { f64::INFINITY });
    }
    Ok(gamma_fn(beta + 1.0)? / gamma_fn(beta - alpha + 1.0)? * t.powf(beta - alpha))
}

/// Caputo derivative of `e^{2t}`:
/// `2^alpha e^{2t} (Gamma(1-alpha) - Gamma(1-alpha, 2t)) / Gamma(1-alpha)`.
///
/// Evaluated through the regularized lower incomplete gamma so the
/// subtraction does not cancel for small `t`.
pub fn caputo_exp2_exact(alpha: f64, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Domain(format!("negative time t = {t}")));
    }
    Ok(2f64.powf(alpha) * (2.0 * t).exp() * lower_regularized_gamma(1.0 - alpha, 2.0 * t)?)
}
