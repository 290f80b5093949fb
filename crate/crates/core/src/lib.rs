//! Equality-constrained quadratic minimization with explicit Lagrange
//! multipliers, plus a staggered-grid Stokes solver that checks the
//! pressure against the multiplier of the divergence constraint.
//!
//! The crate is split into four layers:
//!
//! * [`linalg`]: sparse operators, Krylov and banded direct solvers, dense
//!   factorizations, null-space bases and a generalized eigensolver.
//! * [`qp`]: the problem `min 1/2 x'Ax - b'x  s.t.  Cx = d`, three solve
//!   routes, optimality certificates, multiplier recovery and inf-sup
//!   estimation.
//! * [`stokes`]: MAC discretization of the stationary Stokes problem on the
//!   unit square.
//! * [`cli`]: the report-emitting commands behind the `lagrange` binary.

// `!(x > 0.0)` rejects NaN along with non-positive values; index loops
// mirror the textbook form of the factorizations.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod linalg;
pub mod qp;
pub mod stokes;

pub use error::{Error, Result};
