//! Stationary Stokes flow on the unit square, discretized on a uniform
//! marker-and-cell (MAC) grid with no-slip walls.
//!
//! The coupled saddle-point solve and the constrained-minimization solve
//! (energy minimized over discretely divergence-free velocities, pressure
//! recovered afterwards as the multiplier of the divergence constraint) are
//! both provided so their results can be compared.

mod cases;
mod fields;
mod grid;
pub mod io;
mod norms;
mod operators;
mod solve;

pub use cases::{manufactured_case, CaseId, ManufacturedCase};
pub use fields::{zero_mean_project, PressureField, VelocityField};
pub use grid::{build_grid, MacGrid};
pub use norms::{error_norms, observed_order, ErrorNorms};
pub use operators::{assemble_operators, StokesOperators};
pub use solve::{
    estimate_infsup_stokes, sample_forcing, solve_stokes_coupled, solve_stokes_minimization,
    StokesSolution,
};

/// Default relative tolerance for Stokes solves.
pub const DEFAULT_TOL: f64 = 1e-12;
