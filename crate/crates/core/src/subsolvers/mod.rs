//! Small dense numerical kernels used by the optimizer.

mod dense;
mod multistart;
mod poly;
mod simplex;

pub use dense::{cholesky_min_pivot, null_space, solve_linear, DenseMatrix};
pub use multistart::{
    box_multistart_minimize, projected_gradient, LocalRun, MultistartOptions, MultistartResult, SmoothObjective,
};
pub use poly::{maximize_abs_over_box, QuadPoly};
pub use simplex::{solve_descent_lp, LpProblem, LpSolution};
