use crate::linalg::{SparseOperator, Symmetry};
use crate::stokes::grid::MacGrid;

/// Discrete forms of the Stokes weak formulation.
///
/// * `a`: `u' A v ~ (grad u, grad v)`: 5-point Laplacian per velocity
///   component (unscaled stencil, since the `1/h^2` of the stencil cancels
///   the `h^2` cell measure). Walls normal to a component are Dirichlet
///   faces; walls tangential to it use ghost reflection.
/// * `b`: `q' B v ~ (q, div v)`: face differences times `h`.
/// * `mp`: pressure mass `h^2 I`.
#[derive(Clone, Debug)]
pub struct StokesOperators {
    pub a: SparseOperator,
    pub b: SparseOperator,
    pub mp: SparseOperator,
}

impl StokesOperators {
    /// Discrete gradient `G = -B'` applied to a pressure.
    pub fn gradient(&self, q: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.b.ncols()];
        self.b.mul_transpose_into(q, &mut g);
        g.iter_mut().for_each(|v| *v = -*v);
        g
    }
}

pub fn assemble_operators(grid: &MacGrid) -> StokesOperators {
    let n = grid.n();
    let h = grid.h();
    let mut a = Vec::with_capacity(5 * grid.num_velocity());

    // u-faces: x-neighbours at i = 0 or n are Dirichlet walls; y-neighbours
    // beyond the walls are ghosts equal to minus the face value
    for (i, j) in grid.u_faces() {
        let row = grid.u_index(i, j);
        let mut diag = 4.0;
        if i > 1 {
            a.push((row, grid.u_index(i - 1, j), -1.0));
        }
        if i + 1 < n {
            a.push((row, grid.u_index(i + 1, j), -1.0));
        }
        if j > 0 {
            a.push((row, grid.u_index(i, j - 1), -1.0));
        } else {
            diag += 1.0;
        }
        if j + 1 < n {
            a.push((row, grid.u_index(i, j + 1), -1.0));
        } else {
            diag += 1.0;
        }
        a.push((row, row, diag));
    }
    for (i, j) in grid.v_faces() {
        let row = grid.v_index(i, j);
        let mut diag = 4.0;
        if j > 1 {
            a.push((row, grid.v_index(i, j - 1), -1.0));
        }
        if j + 1 < n {
            a.push((row, grid.v_index(i, j + 1), -1.0));
        }
        if i > 0 {
            a.push((row, grid.v_index(i - 1, j), -1.0));
        } else {
            diag += 1.0;
        }
        if i + 1 < n {
            a.push((row, grid.v_index(i + 1, j), -1.0));
        } else {
            diag += 1.0;
        }
        a.push((row, row, diag));
    }
    let nu = grid.num_velocity();
    let a = SparseOperator::from_triplets(nu, nu, &a, Symmetry::Symmetric)
        .expect("stencil is symmetric");

    let mut b = Vec::with_capacity(4 * grid.num_pressure());
    for (i, j) in grid.cells() {
        let row = grid.p_index(i, j);
        if i + 1 < n {
            b.push((row, grid.u_index(i + 1, j), h));
        }
        if i > 0 {
            b.push((row, grid.u_index(i, j), -h));
        }
        if j + 1 < n {
            b.push((row, grid.v_index(i, j + 1), h));
        }
        if j > 0 {
            b.push((row, grid.v_index(i, j), -h));
        }
    }
    let b = SparseOperator::from_triplets(grid.num_pressure(), nu, &b, Symmetry::General)
        .expect("valid divergence stencil");
    let mp = SparseOperator::diagonal(&vec![h * h; grid.num_pressure()]);
    StokesOperators { a, b, mp }
}
