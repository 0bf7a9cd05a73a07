//! Operational-matrix form of the quadratic Caputo scheme: a dense
//! `(N+1) x (N+1)` matrix whose product with the sample column vector
//! reproduces the quadrature at every node.

use crate::error::{Error, Result};
use crate::grid::{SampledSeries, TimeGrid};
use crate::matrix::DenseMatrix;
use crate::quadrature::build_power_table;
use crate::specfun::gamma_fn;

/// Refuse larger builds by default; the matrix costs O(N^2) memory and the
/// experiments never need more.
pub const DEFAULT_SIZE_LIMIT: usize = 32_768;

#[derive(Debug, Clone)]
pub struct OperationalMatrix {
    pub alpha: f64,
    pub grid: TimeGrid,
    pub m: DenseMatrix,
}

pub fn build_operational_matrix(alpha: f64, grid: &TimeGrid) -> Result<OperationalMatrix> {
    build_operational_matrix_with_limit(alpha, grid, DEFAULT_SIZE_LIMIT)
}

/// Entries are accumulated in the literal order of the two construction
/// loops (rows initialized from the first-interval weights, then the
/// staggered interior contributions), followed by the global scale
/// `h^{-alpha} / Gamma(2-alpha)`.
pub fn build_operational_matrix_with_limit(
    alpha: f64,
    grid: &TimeGrid,
    size_limit: usize,
) -> Result<OperationalMatrix> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "fractional order must lie strictly in (0,1), got {alpha}"
        )));
    }
    let n = grid.n();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "operational matrix needs N >= 2".into(),
        ));
    }
    if n > size_limit {
        return Err(Error::InvalidArgument(format!(
            "N = {n} exceeds the size limit {size_limit} ({} MB dense)",
            (n + 1) * (n + 1) * 8 / (1024 * 1024)
        )));
    }
    let table = build_power_table(alpha, n);
    let (p1, p2) = (&table.p1, &table.p2);
    let w = 1.0 / (2.0 - alpha);
    let mut m = DenseMatrix::zeros(n + 1, n + 1);

    // First-interval weights: row r (node t_r), columns 0..=2.
    for r in 1..=n {
        let dp2 = p2[r] - p2[r - 1];
        m[(r, 0)] = w * dp2 - 1.5 * p1[r] + 0.5 * p1[r - 1];
        m[(r, 1)] = -2.0 * w * dp2 + 2.0 * p1[r];
        m[(r, 2)] = w * dp2 - 0.5 * p1[r] - 0.5 * p1[r - 1];
    }
    // Interior contributions, staggered over three columns.
    for r in 2..=n {
        for l in 0..r - 1 {
            let k = r - l - 1;
            let dp2 = p2[k] - p2[k - 1];
            m[(r, l)] += w * dp2 - 0.5 * p1[k] - 0.5 * p1[k - 1];
            m[(r, l + 1)] += -2.0 * w * dp2 + 2.0 * p1[k - 1];
            m[(r, l + 2)] += w * dp2 + 0.5 * p1[k] - 1.5 * p1[k - 1];
        }
    }
    let scale = grid.h().powf(-alpha) / gamma_fn(2.0 - alpha)?;
    let m = m.scale(scale);
    Ok(OperationalMatrix {
        alpha,
        grid: grid.clone(),
        m,
    })
}

impl OperationalMatrix {
    /// Matrix-vector product with the sample column; `output[0] = 0` always.
    pub fn apply(&self, series: &SampledSeries) -> Result<Vec<f64>> {
        if series.grid != self.grid {
            return Err(Error::InvalidArgument(
                "series grid does not match the operational matrix grid".into(),
            ));
        }
        self.m.matvec(&series.values)
    }
}
