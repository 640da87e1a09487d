//! Linear and quadratic programming back ends.

pub mod dense;
pub mod lp;
pub mod qp;

pub use dense::solve_linear;
pub use lp::{is_unique_optimum, lp_solve, lp_solve_traced, LinearProgram, LpOutcome, Row};
pub use qp::{feasible_point, frank_wolfe_gap, qp_solve, QpOptions, QpSolution};
