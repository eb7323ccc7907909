//! Solver for the time-fractional telegraph equation
//!
//! ```text
//! D_t^γ u + γ₁ D_t^{γ-1} u + γ₂ u = γ₃ u_xx + f(x, t),   1 < γ < 2,
//! ```
//!
//! with Caputo time derivatives, on `[a, b] × [0, T]` with Dirichlet
//! boundaries. Space is discretised by collocation with cubic trigonometric
//! B-splines, time by L1-type differences that keep the full solution
//! history.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the CLI and the expression
//! language use.
//!
//! ```
//! use fractel::{march, mms_problem, Grid, Mesh};
//!
//! let mms = mms_problem(1.5, 1.0, 1.0, 1.0).unwrap();
//! let grid = Grid::new(0.0, 1.0, 16).unwrap();
//! let mesh = Mesh::new(1.0, 16).unwrap();
//! let sol = march(&mms.problem, &grid, &mesh).unwrap();
//! assert_eq!(sol.knot_values_per_level.len(), 17);
//! ```

// `!(x > y)` forms are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod caputo;
pub mod cli;
pub mod config;
pub mod error;
pub mod exprparse;
pub mod real;
pub mod solver;
pub mod special;
pub mod stability;
pub mod tridiag;
pub mod verify;

pub use basis::{
    collocation_constants, eval_basis, knot_values, KnotValues, SpaceGrid, SplineCoefficients,
    StencilConstants,
};
pub use caputo::{discrete_caputo_1, discrete_caputo_2, weights, FractionalWeights};
pub use error::{Error, Result};
pub use exprparse::{parse, Expression};
pub use real::Real;
pub use solver::{
    assemble_lhs, assemble_rhs, fit_coefficients, march, CoefficientHistory, Diagnostics,
    ProblemSpec, SolveResult, Stepper, TimeMesh,
};
pub use special::gamma;
pub use stability::{check_condition, compute_nu, simulate_growth, verify_bound, GrowthTrace};
pub use tridiag::{solve_banded, BandedMatrix, BandedSystem};
pub use verify::{
    caputo_quadrature, error_norms, exact_caputo_power, mms_problem, mms_velocity_problem,
    observed_order, ErrorReport, ManufacturedProblem,
};

pub type Grid = SpaceGrid<f64>;
pub type Mesh = TimeMesh<f64>;
pub type Stencil = StencilConstants<f64>;
pub type Coefficients = SplineCoefficients<f64>;
pub type Weights = FractionalWeights<f64>;
pub type Problem = ProblemSpec<f64>;
pub type Solution = SolveResult<f64>;
pub type Trace = GrowthTrace<f64>;
pub type System = BandedSystem<f64>;

pub type GridF32 = SpaceGrid<f32>;
pub type MeshF32 = TimeMesh<f32>;
pub type ProblemF32 = ProblemSpec<f32>;
pub type SolutionF32 = SolveResult<f32>;
