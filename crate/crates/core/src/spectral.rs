//! Spatial collocation: Chebyshev differentiation matrices on an interval
//! and Gauss-Hermite-weighted differentiation matrices on the real line.
//!
//! Both first- and second-derivative matrices are stored **transposed**, so
//! that a row of samples (time index fixed, space varying) is differentiated
//! by right multiplication: `row * dx`.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralKind {
    /// Chebyshev extreme points mapped to `[x_a, x_b]`; nodes run from
    /// `x_b` down to `x_a`.
    Chebyshev { x_a: f64, x_b: f64 },
    /// Roots of the degree-`n` Hermite polynomial, stretched by `scale`;
    /// nodes ascend and are symmetric about the origin.
    Hermite { scale: f64 },
}

#[derive(Debug, Clone)]
pub struct SpectralDiscretization {
    pub kind: SpectralKind,
    pub nodes: Vec<f64>,
    /// Transpose of the first-derivative matrix.
    pub dx: DenseMatrix,
    /// Transpose of the second-derivative matrix.
    pub dx2: DenseMatrix,
}

/// Chebyshev collocation of degree `n_x` on `[x_a, x_b]`: `n_x + 1` nodes and
/// the classic differentiation matrix (off-diagonal weights with the
/// alternating end-point factors, diagonal set to the negated row sums, so
/// constants are annihilated exactly). The second-derivative matrix is the
/// square of the first.
pub fn chebyshev_discretization(n_x: usize, x_a: f64, x_b: f64) -> Result<SpectralDiscretization> {
    if n_x < 1 {
        return Err(Error::InvalidArgument("need n_x >= 1".into()));
    }
    if !(x_a.is_finite() && x_b.is_finite() && x_a < x_b) {
        return Err(Error::InvalidArgument(format!(
            "invalid interval [{x_a}, {x_b}]"
        )));
    }
    let n = n_x;
    let unit: Vec<f64> = (0..=n)
        .map(|j| (std::f64::consts::PI * j as f64 / n as f64).cos())
        .collect();
    let c: Vec<f64> = (0..=n)
        .map(|j| {
            let end = if j == 0 || j == n { 2.0 } else { 1.0 };
            end * if j % 2 == 0 { 1.0 } else { -1.0 }
        })
        .collect();
    let mut d = DenseMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        let mut row_sum = 0.0;
        for j in 0..=n {
            if i != j {
                let v = (c[i] / c[j]) / (unit[i] - unit[j]);
                d[(i, j)] = v;
                row_sum += v;
            }
        }
        d[(i, i)] = -row_sum;
    }
    let mid = 0.5 * (x_a + x_b);
    let half = 0.5 * (x_b - x_a);
    let nodes: Vec<f64> = unit.iter().map(|&x| mid + half * x).collect();
    let d_phys = d.scale(1.0 / half);
    let d2_phys = d_phys.matmul(&d_phys)?;
    Ok(SpectralDiscretization {
        kind: SpectralKind::Chebyshev { x_a, x_b },
        nodes,
        dx: d_phys.transpose(),
        dx2: d2_phys.transpose(),
    })
}

/// Roots of the physicists' Hermite polynomial of degree `n`, ascending.
/// Newton iteration on the orthonormal three-term recurrence with the usual
/// asymptotic initial guesses; the negative half is mirrored from the
/// positive half so the set is exactly symmetric.
fn hermite_roots(n: usize) -> Result<Vec<f64>> {
    let m = (n + 1) / 2;
    let nf = n as f64;
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut pos = vec![0.0_f64; m]; // descending positive roots
    for i in 0..m {
        let mut z = match i {
            0 => {
                let s = (2.0 * nf + 1.0).sqrt();
                s - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0)
            }
            1 => pos[0] - 1.14 * nf.powf(0.426) / pos[0],
            2 => 1.86 * pos[1] - 0.86 * pos[0],
            3 => 1.91 * pos[2] - 0.91 * pos[1],
            _ => 2.0 * pos[i - 1] - pos[i - 2],
        };
        let mut converged = false;
        for _ in 0..200 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            let pp = (2.0 * nf).sqrt() * p2;
            let step = p1 / pp;
            z -= step;
            if step.abs() <= 1e-15 * (1.0 + z.abs()) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence(format!(
                "Hermite root {i} of degree {n} did not converge"
            )));
        }
        pos[i] = z;
    }
    if n % 2 == 1 {
        pos[m - 1] = 0.0; // odd degree: middle root is exactly zero
    }
    let mut nodes = Vec::with_capacity(n);
    for &z in &pos {
        nodes.push(-z);
    }
    let skip = if n % 2 == 1 { 1 } else { 0 };
    for i in (0..m - skip).rev() {
        nodes.push(pos[i]);
    }
    Ok(nodes)
}

/// Hermite collocation on the real line with `n_x` nodes stretched by
/// `scale`. Differentiation matrices are built for interpolants of the form
/// `e^{-x^2/2} p(x)` (p polynomial), using logarithmic barycentric weights
/// for overflow safety; the stretch rescales nodes by `scale` and the
/// matrices by `1/scale` and `1/scale^2`.
pub fn hermite_discretization(n_x: usize, scale: f64) -> Result<SpectralDiscretization> {
    if n_x < 1 {
        return Err(Error::InvalidArgument("need n_x >= 1".into()));
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "scale must be positive and finite, got {scale}"
        )));
    }
    let n = n_x;
    let x = hermite_roots(n)?;
    // log |c_j| and sign of c_j, c_j = w(x_j) * prod_{k != j} (x_j - x_k)
    let mut logc = vec![0.0_f64; n];
    let mut sign = vec![1.0_f64; n];
    for j in 0..n {
        let mut acc = -0.5 * x[j] * x[j];
        let mut s = 1.0;
        for k in 0..n {
            if k != j {
                let d = x[j] - x[k];
                acc += d.abs().ln();
                if d < 0.0 {
                    s = -s;
                }
            }
        }
        logc[j] = acc;
        sign[j] = s;
    }
    let mut s1 = vec![0.0_f64; n];
    let mut s2 = vec![0.0_f64; n];
    for k in 0..n {
        for j in 0..n {
            if j != k {
                let inv = 1.0 / (x[k] - x[j]);
                s1[k] += inv;
                s2[k] += inv * inv;
            }
        }
    }
    let mut d1 = DenseMatrix::zeros(n, n);
    let mut d2 = DenseMatrix::zeros(n, n);
    for k in 0..n {
        d1[(k, k)] = -x[k] + s1[k];
        d2[(k, k)] = x[k] * x[k] - 1.0 - 2.0 * x[k] * s1[k] + s1[k] * s1[k] - s2[k];
    }
    for k in 0..n {
        for j in 0..n {
            if j != k {
                let ckj = sign[k] * sign[j] * (logc[k] - logc[j]).exp();
                let inv = 1.0 / (x[k] - x[j]);
                d1[(k, j)] = ckj * inv;
                d2[(k, j)] = 2.0 * inv * (ckj * d1[(k, k)] - d1[(k, j)]);
            }
        }
    }
    let nodes: Vec<f64> = x.iter().map(|&v| scale * v).collect();
    let d1 = d1.scale(1.0 / scale);
    let d2 = d2.scale(1.0 / (scale * scale));
    Ok(SpectralDiscretization {
        kind: SpectralKind::Hermite { scale },
        nodes,
        dx: d1.transpose(),
        dx2: d2.transpose(),
    })
}

impl SpectralDiscretization {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Row-vector derivative: `samples * dx`.
    pub fn differentiate(&self, samples: &[f64]) -> Result<Vec<f64>> {
        self.dx.transpose().matvec(samples)
    }
}
