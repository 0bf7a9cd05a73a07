//! Uniform time grids and function samples on them.

use crate::error::{Error, Result};

/// Uniform partition of `[0, t_f]` into `N` steps, `t_j = j h` with `h = t_f / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t_f: f64,
    n: usize,
    h: f64,
}

impl TimeGrid {
    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    /// Step-count parameter; the grid has `n + 1` nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// `t_j = j h`, computed by multiplication so that large grids do not drift.
    pub fn node(&self, j: usize) -> f64 {
        if j == self.n {
            self.t_f
        } else {
            j as f64 * self.h
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|j| self.node(j)).collect()
    }

    /// Samples `f` at every node.
    pub fn sample(&self, f: impl FnMut(f64) -> f64) -> SampledSeries {
        let values = self.nodes().into_iter().map(f).collect();
        SampledSeries {
            grid: self.clone(),
            values,
        }
    }
}

pub fn build_time_grid(t_f: f64, n: usize) -> Result<TimeGrid> {
    if !(t_f > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "final time must be positive, got {t_f}"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    Ok(TimeGrid {
        t_f,
        n,
        h: t_f / n as f64,
    })
}

/// Function samples `f_0 .. f_N` on a [`TimeGrid`].
#[derive(Debug, Clone)]
pub struct SampledSeries {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

impl SampledSeries {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() + 1 {
            return Err(Error::ShapeMismatch(format!(
                "expected {} samples, got {}",
                grid.n() + 1,
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }
}
