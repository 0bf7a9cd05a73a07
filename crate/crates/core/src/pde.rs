//! Reduction of the Caputo-type advection-diffusion equation
//! `D_t^alpha u = a1 u_xx + a2 u_x + a3 u + a4` to a Sylvester matrix
//! equation `A U + U B = C`, on the real line (Hermite collocation) or on an
//! interval (Chebyshev collocation with Robin boundary conditions).
//!
//! The unknown `U` collects the solution values row by row in time, column
//! by column in space, so the spatial operator acts by right multiplication
//! with the transposed differentiation matrices.

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::{lu_factor, solve_sylvester, LuFactors, SylvesterSystem};
use crate::matrix::DenseMatrix;
use crate::opmatrix::build_operational_matrix;
use crate::spectral::{
    chebyshev_discretization, hermite_discretization, SpectralDiscretization,
};

/// Spatial coefficient: a function of `x` only. The Sylvester reduction
/// requires `a1`, `a2`, `a3` to be time-independent.
pub type SpaceFn = Box<dyn Fn(f64) -> f64>;
/// Forcing term: a function of `(t, x)`.
pub type ForcingFn = Box<dyn Fn(f64, f64) -> f64>;
/// Boundary data: a function of `t`.
pub type TimeFn = Box<dyn Fn(f64) -> f64>;

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Whole real line, discretized at `n_x` Hermite nodes stretched by
    /// `hermite_scale`.
    RealLine { n_x: usize, hermite_scale: f64 },
    /// Interval `[x_a, x_b]` with `n_x + 1` Chebyshev nodes.
    Interval { x_a: f64, x_b: f64, n_x: usize },
}

/// Robin conditions `c_a u + d_a u_x = u_a(t)` at the left end and
/// `c_b u + d_b u_x = u_b(t)` at the right end.
pub struct BoundaryConditions {
    pub c_a: f64,
    pub d_a: f64,
    pub u_a: TimeFn,
    pub c_b: f64,
    pub d_b: f64,
    pub u_b: TimeFn,
}

impl BoundaryConditions {
    pub fn validate(&self) -> Result<()> {
        if self.c_a.abs() + self.d_a.abs() == 0.0 {
            return Err(Error::IllPosedBoundary(
                "left condition has c_a = d_a = 0".into(),
            ));
        }
        if self.c_b.abs() + self.d_b.abs() == 0.0 {
            return Err(Error::IllPosedBoundary(
                "right condition has c_b = d_b = 0".into(),
            ));
        }
        Ok(())
    }

    /// Homogeneous Dirichlet data at both ends.
    pub fn dirichlet(u_a: TimeFn, u_b: TimeFn) -> Self {
        Self {
            c_a: 1.0,
            d_a: 0.0,
            u_a,
            c_b: 1.0,
            d_b: 0.0,
            u_b,
        }
    }
}

pub struct PdeProblem {
    pub alpha: f64,
    pub grid: TimeGrid,
    pub domain: Domain,
    pub a1: SpaceFn,
    pub a2: SpaceFn,
    pub a3: SpaceFn,
    pub a4: ForcingFn,
    pub u0: SpaceFn,
    /// Required for `Domain::Interval`, ignored on the real line.
    pub bc: Option<BoundaryConditions>,
}

pub struct PdeSolution {
    /// `(n_t + 1) x n_nodes` solution values; row 0 is the initial data.
    pub u: DenseMatrix,
    pub disc: SpectralDiscretization,
    pub grid: TimeGrid,
    /// Scaled sup-norm residual of the Sylvester equation at the solution.
    pub sylvester_residual: f64,
    /// Max over interior times of the Robin condition residuals (left,
    /// right); `None` on the real line.
    pub boundary_residuals: Option<(f64, f64)>,
}

/// Extra data kept for bounded domains: the lifting `E_x` from inner to full
/// space values and the inhomogeneous rows `F_x` restricted to interior
/// times.
pub struct BoundedReduction {
    pub e_x: DenseMatrix,
    pub fxr: DenseMatrix,
}

pub struct AssembledReduction {
    pub system: SylvesterSystem,
    pub disc: SpectralDiscretization,
    pub grid: TimeGrid,
    /// Initial data sampled at every node.
    pub u0_row: Vec<f64>,
    pub bounded: Option<BoundedReduction>,
}

impl AssembledReduction {
    /// Selector `[0; I]` that embeds interior-time rows into the full grid.
    pub fn e_t_matrix(&self) -> DenseMatrix {
        let n_t = self.grid.n();
        DenseMatrix::from_fn(n_t + 1, n_t, |i, j| if i == j + 1 { 1.0 } else { 0.0 })
    }

    /// Known time-boundary part: row 0 carries the initial data, the rest is
    /// zero.
    pub fn f_t_matrix(&self) -> DenseMatrix {
        let cols = self.u0_row.len();
        let mut f = DenseMatrix::zeros(self.grid.n() + 1, cols);
        f.row_mut(0).copy_from_slice(&self.u0_row);
        f
    }
}

/// Transposed spatial operator `B_x = dx2 diag(a1) + dx diag(a2) + diag(a3)`,
/// so that a row of samples is mapped by right multiplication.
fn spatial_operator(disc: &SpectralDiscretization, problem: &PdeProblem) -> DenseMatrix {
    let n = disc.len();
    let mut b = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let x_j = disc.nodes[j];
            b[(i, j)] = disc.dx2[(i, j)] * (problem.a1)(x_j)
                + disc.dx[(i, j)] * (problem.a2)(x_j);
        }
        b[(i, i)] += (problem.a3)(disc.nodes[i]);
    }
    b
}

/// Rows `1..=n_t` of the forcing sampled on the grid.
fn forcing_rows(disc: &SpectralDiscretization, problem: &PdeProblem) -> DenseMatrix {
    DenseMatrix::from_fn(problem.grid.n(), disc.len(), |i, k| {
        (problem.a4)(problem.grid.node(i + 1), disc.nodes[k])
    })
}

/// Right-divides by the pseudoinverse of a full-row-rank `E`:
/// `M E^+ = (M E^T)(E E^T)^{-1}`, using the prefactored Gram matrix.
fn div_right_pinv(m: &DenseMatrix, e: &DenseMatrix, gram_lu: &LuFactors) -> Result<DenseMatrix> {
    let me = m.matmul(&e.transpose())?;
    Ok(gram_lu.solve_columns(&me.transpose())?.transpose())
}

pub fn assemble(problem: &PdeProblem) -> Result<AssembledReduction> {
    let n_t = problem.grid.n();
    if n_t < 2 {
        return Err(Error::InvalidArgument("need at least 2 time steps".into()));
    }
    let op = build_operational_matrix(problem.alpha, &problem.grid)?;
    let a = op.m.slice(1, n_t + 1, 1, n_t + 1);
    let d0: Vec<f64> = (1..=n_t).map(|i| op.m[(i, 0)]).collect();

    match problem.domain {
        Domain::RealLine { n_x, hermite_scale } => {
            if n_x < 2 {
                return Err(Error::InvalidArgument("need n_x >= 2".into()));
            }
            let disc = hermite_discretization(n_x, hermite_scale)?;
            let u0_row: Vec<f64> = disc.nodes.iter().map(|&x| (problem.u0)(x)).collect();
            let b_x = spatial_operator(&disc, problem);
            // C = a4 rows - d0 (x) u0
            let mut c = forcing_rows(&disc, problem);
            for i in 0..n_t {
                for k in 0..n_x {
                    c[(i, k)] -= d0[i] * u0_row[k];
                }
            }
            let system = SylvesterSystem::new(a, b_x.scale(-1.0), c)?;
            Ok(AssembledReduction {
                system,
                disc,
                grid: problem.grid.clone(),
                u0_row,
                bounded: None,
            })
        }
        Domain::Interval { x_a, x_b, n_x } => {
            if n_x < 2 {
                return Err(Error::InvalidArgument("need n_x >= 2".into()));
            }
            let bc = problem.bc.as_ref().ok_or_else(|| {
                Error::InvalidArgument("interval domains need boundary conditions".into())
            })?;
            bc.validate()?;
            let disc = chebyshev_discretization(n_x, x_a, x_b)?;
            let u0_row: Vec<f64> = disc.nodes.iter().map(|&x| (problem.u0)(x)).collect();
            let b_x = spatial_operator(&disc, problem);
            let dxt = &disc.dx; // dxt[(j, i)] = D1[i][j]

            // Solve the two Robin conditions for the end values in terms of
            // the interior ones. Node 0 sits at x_b, node n_x at x_a.
            let c11 = bc.d_a * dxt[(0, n_x)];
            let c12 = bc.c_a + bc.d_a * dxt[(n_x, n_x)];
            let c21 = bc.c_b + bc.d_b * dxt[(0, 0)];
            let c22 = bc.d_b * dxt[(n_x, 0)];
            let det = c11 * c22 - c12 * c21;
            let det_scale = c11
                .abs()
                .max(c12.abs())
                .max(c21.abs())
                .max(c22.abs())
                .powi(2);
            if det.abs() <= 1e-14 * det_scale.max(f64::MIN_POSITIVE) {
                return Err(Error::IllPosedBoundary(format!(
                    "boundary system determinant {det:e} vanishes"
                )));
            }

            // E_x: inner values (columns 1..n_x) to full values.
            let mut e_x = DenseMatrix::zeros(n_x - 1, n_x + 1);
            for j in 1..n_x {
                let r = j - 1;
                e_x[(r, j)] = 1.0;
                e_x[(r, 0)] =
                    (-bc.d_a * c22 * dxt[(j, n_x)] + bc.d_b * c12 * dxt[(j, 0)]) / det;
                e_x[(r, n_x)] =
                    (bc.d_a * c21 * dxt[(j, n_x)] - bc.d_b * c11 * dxt[(j, 0)]) / det;
            }
            // F_x restricted to interior times.
            let mut fxr = DenseMatrix::zeros(n_t, n_x + 1);
            for i in 0..n_t {
                let t = problem.grid.node(i + 1);
                let ua = (bc.u_a)(t);
                let ub = (bc.u_b)(t);
                fxr[(i, 0)] = (c22 * ua - c12 * ub) / det;
                fxr[(i, n_x)] = (-c21 * ua + c11 * ub) / det;
            }

            let gram = e_x.matmul(&e_x.transpose())?;
            let gram_lu = lu_factor(&gram, 1e-12 * gram.sup_norm()).map_err(|_| {
                Error::RankDeficient("boundary lifting E_x lost full row rank".into())
            })?;

            // B = -E_x B_x E_x^+
            let exbx = e_x.matmul(&b_x)?;
            let b = div_right_pinv(&exbx, &e_x, &gram_lu)?.scale(-1.0);

            // R = Fxr B_x - A Fxr - d0 (x) u0 + a4 rows;  C = R E_x^+
            let mut r = fxr.matmul(&b_x)?.sub(&a.matmul(&fxr)?)?;
            let forcing = forcing_rows(&disc, problem);
            for i in 0..n_t {
                for k in 0..=n_x {
                    r[(i, k)] += forcing[(i, k)] - d0[i] * u0_row[k];
                }
            }
            let c = div_right_pinv(&r, &e_x, &gram_lu)?;

            let system = SylvesterSystem::new(a, b, c)?;
            Ok(AssembledReduction {
                system,
                disc,
                grid: problem.grid.clone(),
                u0_row,
                bounded: Some(BoundedReduction { e_x, fxr }),
            })
        }
    }
}

pub fn solve_pde(problem: &PdeProblem) -> Result<PdeSolution> {
    let red = assemble(problem)?;
    let u_inner = solve_sylvester(&red.system)?;
    let sylvester_residual = red.system.residual(&u_inner)?;
    let n_t = red.grid.n();
    let n_nodes = red.disc.len();

    let mut u = DenseMatrix::zeros(n_t + 1, n_nodes);
    u.row_mut(0).copy_from_slice(&red.u0_row);
    let boundary_residuals = match &red.bounded {
        None => {
            for i in 0..n_t {
                u.row_mut(i + 1).copy_from_slice(u_inner.row(i));
            }
            None
        }
        Some(bd) => {
            let full = u_inner.matmul(&bd.e_x)?.add(&bd.fxr)?;
            for i in 0..n_t {
                u.row_mut(i + 1).copy_from_slice(full.row(i));
            }
            let bc = problem.bc.as_ref().expect("validated in assemble");
            let n_x = n_nodes - 1;
            let (mut res_a, mut res_b) = (0.0_f64, 0.0_f64);
            for i in 1..=n_t {
                let t = red.grid.node(i);
                let row = u.row(i).to_vec();
                let deriv = red.disc.differentiate(&row)?;
                let ra = bc.c_a * row[n_x] + bc.d_a * deriv[n_x] - (bc.u_a)(t);
                let rb = bc.c_b * row[0] + bc.d_b * deriv[0] - (bc.u_b)(t);
                res_a = res_a.max(ra.abs());
                res_b = res_b.max(rb.abs());
            }
            Some((res_a, res_b))
        }
    };
    Ok(PdeSolution {
        u,
        disc: red.disc,
        grid: red.grid,
        sylvester_residual,
        boundary_residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_time_grid;
    use crate::specfun::{caputo_exp2_exact, gamma_fn};

    fn max_abs(xs: &[f64]) -> f64 {
        xs.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let grid = build_time_grid(1.0, 12).unwrap();
        for domain in [
            Domain::RealLine {
                n_x: 8,
                hermite_scale: 1.0,
            },
            Domain::Interval {
                x_a: -1.0,
                x_b: 1.0,
                n_x: 7,
            },
        ] {
            let problem = PdeProblem {
                alpha: 0.4,
                grid: grid.clone(),
                domain: domain.clone(),
                a1: Box::new(|_| 1.0),
                a2: Box::new(|_| 0.5),
                a3: Box::new(|_| -1.0),
                a4: Box::new(|_, _| 0.0),
                u0: Box::new(|_| 0.0),
                bc: Some(BoundaryConditions::dirichlet(
                    Box::new(|_| 0.0),
                    Box::new(|_| 0.0),
                )),
            };
            let sol = solve_pde(&problem).unwrap();
            assert!(sol.u.sup_norm() < 1e-12, "{domain:?}");
        }
    }

    #[test]
    fn steady_state_is_reproduced() {
        // u(t, x) = x^2 for all t: the fractional derivative of a constant
        // in time vanishes, so a4 = -a1 u_xx = -2 keeps it stationary.
        let grid = build_time_grid(1.0, 10).unwrap();
        let problem = PdeProblem {
            alpha: 0.6,
            grid,
            domain: Domain::Interval {
                x_a: -1.0,
                x_b: 1.5,
                n_x: 8,
            },
            a1: Box::new(|_| 1.0),
            a2: Box::new(|_| 0.0),
            a3: Box::new(|_| 0.0),
            a4: Box::new(|_, _| -2.0),
            u0: Box::new(|x| x * x),
            bc: Some(BoundaryConditions::dirichlet(
                Box::new(|_| 1.0),
                Box::new(|_| 2.25),
            )),
        };
        let sol = solve_pde(&problem).unwrap();
        for i in 0..=10 {
            for (k, &x) in sol.disc.nodes.iter().enumerate() {
                assert!(
                    (sol.u[(i, k)] - x * x).abs() < 1e-8,
                    "i={i}, x={x}: {}",
                    sol.u[(i, k)]
                );
            }
        }
    }

    #[test]
    fn bounded_manufactured_solution_converges() {
        // exact u = e^x t^6 on [0, 1]; the advection and diffusion terms
        // cancel, so the forcing carries the whole fractional derivative.
        let alpha = 0.338;
        let grid = build_time_grid(1.0, 300).unwrap();
        let g7 = gamma_fn(7.0 - alpha).unwrap();
        let problem = PdeProblem {
            alpha,
            grid,
            domain: Domain::Interval {
                x_a: 0.0,
                x_b: 1.0,
                n_x: 10,
            },
            a1: Box::new(|_| 1.0),
            a2: Box::new(|_| -1.0),
            a3: Box::new(|_| 0.0),
            a4: Box::new(move |t, x| 720.0 * x.exp() * t.powf(6.0 - alpha) / g7),
            u0: Box::new(|_| 0.0),
            bc: Some(BoundaryConditions::dirichlet(
                Box::new(|t: f64| t.powi(6)),
                Box::new(|t: f64| std::f64::consts::E * t.powi(6)),
            )),
        };
        let sol = solve_pde(&problem).unwrap();
        let mut err = 0.0_f64;
        for i in 0..=300 {
            let t = sol.grid.node(i);
            for (k, &x) in sol.disc.nodes.iter().enumerate() {
                err = err.max((sol.u[(i, k)] - x.exp() * t.powi(6)).abs());
            }
        }
        assert!(err < 1e-5, "sup error {err:e}");
        assert!(sol.sylvester_residual < 1e-10);
        let (ra, rb) = sol.boundary_residuals.unwrap();
        assert!(ra < 1e-10 && rb < 1e-10);
    }

    #[test]
    fn unbounded_manufactured_solution_converges() {
        // exact u = e^{2t - x^2}; the spatial operator annihilates u, so the
        // forcing is the fractional derivative of e^{2t} times the profile.
        let alpha = 0.17;
        let grid = build_time_grid(1.2, 400).unwrap();
        let problem = PdeProblem {
            alpha,
            grid,
            domain: Domain::RealLine {
                n_x: 16,
                // stretch tuned so 16 nodes resolve the Gaussian profile
                hermite_scale: 0.7,
            },
            a1: Box::new(|_| 1.0),
            a2: Box::new(|x| 2.0 * x),
            a3: Box::new(|_| 2.0),
            a4: Box::new(move |t, x| {
                caputo_exp2_exact(alpha, t).unwrap() * (-x * x).exp()
            }),
            u0: Box::new(|x| (-x * x).exp()),
            bc: None,
        };
        let sol = solve_pde(&problem).unwrap();
        let mut err = 0.0_f64;
        for i in 0..=400 {
            let t = sol.grid.node(i);
            for (k, &x) in sol.disc.nodes.iter().enumerate() {
                err = err.max((sol.u[(i, k)] - (2.0 * t - x * x).exp()).abs());
            }
        }
        assert!(err < 1e-5, "sup error {err:e}");
    }

    #[test]
    fn lifting_matrices_satisfy_invariants() {
        let grid = build_time_grid(1.0, 6).unwrap();
        let problem = PdeProblem {
            alpha: 0.5,
            grid,
            domain: Domain::Interval {
                x_a: -1.1,
                x_b: 1.3,
                n_x: 9,
            },
            a1: Box::new(|_| 1.0),
            a2: Box::new(|_| 0.0),
            a3: Box::new(|_| 0.0),
            a4: Box::new(|_, _| 0.0),
            u0: Box::new(|x| x),
            bc: Some(BoundaryConditions {
                c_a: 1.0,
                d_a: 2.0,
                u_a: Box::new(|_| 0.3),
                c_b: 3.0,
                d_b: 4.0,
                u_b: Box::new(|_| 0.7),
            }),
        };
        let red = assemble(&problem).unwrap();
        let bd = red.bounded.as_ref().unwrap();
        // E_x E_x^+ = I
        let pinv = crate::linalg::right_pseudoinverse(&bd.e_x).unwrap();
        let prod = bd.e_x.matmul(&pinv).unwrap();
        assert!(
            crate::matrix::inf_error(&prod, &DenseMatrix::identity(8)).unwrap() < 1e-11
        );
        // lifted rows satisfy both Robin conditions for arbitrary inner data
        let inner: Vec<f64> = (0..8).map(|k| ((k * k) as f64).sin()).collect();
        let row = DenseMatrix::from_rows(&[inner]).unwrap();
        let full = row.matmul(&bd.e_x).unwrap().add(&bd.fxr.slice(0, 1, 0, 10)).unwrap();
        let deriv = red.disc.differentiate(full.row(0)).unwrap();
        let left = full[(0, 9)] + 2.0 * deriv[9];
        let right = 3.0 * full[(0, 0)] + 4.0 * deriv[0];
        assert!((left - 0.3).abs() < 1e-10, "left BC residual {left}");
        assert!((right - 0.7).abs() < 1e-10, "right BC residual {right}");
        // selector shapes
        assert_eq!(red.e_t_matrix().rows(), 7);
        assert_eq!(red.f_t_matrix().row(0), red.u0_row.as_slice());
    }

    #[test]
    fn dirichlet_lifting_reduces_to_data_rows() {
        let grid = build_time_grid(1.0, 4).unwrap();
        let problem = PdeProblem {
            alpha: 0.5,
            grid,
            domain: Domain::Interval {
                x_a: -1.0,
                x_b: 1.0,
                n_x: 5,
            },
            a1: Box::new(|_| 1.0),
            a2: Box::new(|_| 0.0),
            a3: Box::new(|_| 0.0),
            a4: Box::new(|_, _| 0.0),
            u0: Box::new(|_| 0.0),
            bc: Some(BoundaryConditions::dirichlet(
                Box::new(|t| 10.0 + t),
                Box::new(|t| 20.0 + t),
            )),
        };
        let red = assemble(&problem).unwrap();
        let bd = red.bounded.as_ref().unwrap();
        for r in 0..4 {
            assert_eq!(bd.e_x[(r, 0)], 0.0);
            assert_eq!(bd.e_x[(r, 5)], 0.0);
        }
        for i in 0..4 {
            let t = red.grid.node(i + 1);
            // node 0 is x_b, node 5 is x_a
            assert!((bd.fxr[(i, 0)] - (20.0 + t)).abs() < 1e-14);
            assert!((bd.fxr[(i, 5)] - (10.0 + t)).abs() < 1e-14);
        }
    }

    #[test]
    fn detects_ill_posed_boundary_combination() {
        let grid = build_time_grid(1.0, 4).unwrap();
        let disc = chebyshev_discretization(6, -1.0, 1.0).unwrap();
        // choose c_b so that the boundary 2x2 system is exactly singular
        let d1_00 = disc.dx[(0, 0)];
        let problem = PdeProblem {
            alpha: 0.5,
            grid,
            domain: Domain::Interval {
                x_a: -1.0,
                x_b: 1.0,
                n_x: 6,
            },
            a1: Box::new(|_| 1.0),
            a2: Box::new(|_| 0.0),
            a3: Box::new(|_| 0.0),
            a4: Box::new(|_, _| 0.0),
            u0: Box::new(|_| 0.0),
            bc: Some(BoundaryConditions {
                c_a: 1.0,
                d_a: 0.0,
                u_a: Box::new(|_| 0.0),
                c_b: -d1_00,
                d_b: 1.0,
                u_b: Box::new(|_| 0.0),
            }),
        };
        assert!(matches!(
            assemble(&problem),
            Err(Error::IllPosedBoundary(_))
        ));
        // degenerate single condition is rejected outright
        let bc = BoundaryConditions {
            c_a: 0.0,
            d_a: 0.0,
            u_a: Box::new(|_| 0.0),
            c_b: 1.0,
            d_b: 0.0,
            u_b: Box::new(|_| 0.0),
        };
        assert!(bc.validate().is_err());
    }
}
