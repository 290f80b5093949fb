//! Equality-constrained quadratic programs
//!
//! ```text
//! minimize  J(x) = 1/2 x'Ax - b'x   subject to  Cx = d
//! ```
//!
//! with `A` symmetric positive definite and `C` of full row rank. Three solve
//! routes (block system, null-space reduction, Schur complement) return the
//! minimizer together with the multiplier `lambda` satisfying
//! `Ax - b = C' lambda`.

mod infsup;
pub mod io;
mod optimality;
mod problem;
pub mod properties;
pub mod random;
mod solve;

pub use infsup::{estimate_infsup, estimate_infsup_with, InfSupEstimate, InfSupForm};
pub use optimality::{
    check_optimality, constrained_gradient_split, recover_multiplier, OptimalityReport,
};
pub use problem::{gradient, objective, QpProblem};
pub use solve::{
    assemble_kkt, schur_complement_solve, solve, solve_kkt_direct, solve_nullspace, solve_schur,
    Method, SaddleSolution,
};

/// Default solve tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
