//! Numerical machinery for Caputo-type advection-diffusion equations.
//!
//! The crate approximates Caputo fractional time derivatives of order
//! `alpha` in (0,1) with an order `3 - alpha` quadrature (plus an FFT
//! fast-convolution evaluator and an operational-matrix form), and solves
//! advection-diffusion problems `D_t^alpha u = a1 u_xx + a2 u_x + a3 u + a4`
//! on the real line (Hermite collocation) or on an interval (Chebyshev
//! collocation with Robin boundary conditions) by reduction to a Sylvester
//! matrix equation `A U + U B = C`.
//!
//! See the `examples/` directory for runnable entry points, and the
//! `caputo-ade` binary for the experiment harness.

pub mod acceptance;
pub mod error;
pub mod expr;
pub mod fast_convolution;
pub mod grid;
pub mod linalg;
pub mod matrix;
pub mod opmatrix;
pub mod pde;
pub mod quadrature;
pub mod specfun;
pub mod spectral;
pub mod study;

pub use error::{Error, Result};
pub use fast_convolution::{caputo_fast, ConvolutionPlan};
pub use grid::{build_time_grid, SampledSeries, TimeGrid};
pub use linalg::{right_pseudoinverse, schur_decompose, solve_sylvester, SylvesterSystem};
pub use matrix::{inf_error, ComplexMatrix, DenseMatrix};
pub use opmatrix::{build_operational_matrix, OperationalMatrix};
pub use pde::{BoundaryConditions, Domain, PdeProblem, PdeSolution};
pub use quadrature::{caputo_linear, caputo_quadratic, caputo_quadratic_star, PowerTable};
pub use spectral::{chebyshev_discretization, hermite_discretization, SpectralDiscretization};
