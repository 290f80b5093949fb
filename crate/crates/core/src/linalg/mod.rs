//! Linear-algebra kernel: everything the saddle-point and Stokes layers need,
//! kept deterministic and free of external numeric dependencies.

mod band;
mod cg;
pub mod dense;
mod eigen;
mod indefinite;
pub mod io;
mod nullspace;
mod operator;
mod ordering;
mod sparse;
pub mod vector;

pub use band::BandLu;
pub use cg::{conjugate_gradient, conjugate_gradient_with, CgOptions, SolverReport};
pub use eigen::{smallest_generalized_eigenpair, EigenOptions, GeneralizedEigenpair};
pub use indefinite::{symmetric_indefinite_solve, SymmetricFactorization};
pub use nullspace::{orthonormal_nullspace_basis, ConstraintFactorization};
pub use operator::{LinearOperator, Projector};
pub use ordering::reverse_cuthill_mckee;
pub use sparse::{SparseOperator, Symmetry};

/// Default relative tolerance for iterative solves.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Smallest admissible ratio sigma_min / sigma_max for full-rank checks.
pub const RANK_TOL: f64 = 1e-10;

/// Default iteration cap: ten times the system dimension.
pub fn default_max_iter(dim: usize) -> usize {
    10 * dim.max(1)
}
