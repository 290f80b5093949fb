//! Seeded random instances for property suites.

use rand::Rng;

use crate::linalg::{SparseOperator, Symmetry};
use crate::qp::problem::QpProblem;

fn uniform(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Dense SPD `M'M + I`.
pub fn random_spd(rng: &mut impl Rng, n: usize) -> SparseOperator {
    let g = uniform(rng, n * n);
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = (0..n).map(|k| g[k * n + i] * g[k * n + j]).sum::<f64>()
                + if i == j { 1.0 } else { 0.0 };
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    SparseOperator::from_dense(n, n, &a, Symmetry::Symmetric).expect("symmetric by construction")
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> SparseOperator {
    SparseOperator::from_dense(rows, cols, &uniform(rng, rows * cols), Symmetry::General)
        .expect("finite entries")
}

pub fn random_vector(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    uniform(rng, len)
}

/// Random full-rank instance with `d = 0` (or a random `d` when
/// `inhomogeneous`).
pub fn random_problem(rng: &mut impl Rng, n: usize, m: usize, inhomogeneous: bool) -> QpProblem {
    loop {
        let a = random_spd(rng, n);
        let c = random_matrix(rng, m, n);
        let b = uniform(rng, n);
        let d = if inhomogeneous {
            uniform(rng, m)
        } else {
            vec![0.0; m]
        };
        // uniform entries are full rank with probability one; retry otherwise
        if let Ok(p) = QpProblem::new(a, b, c, d) {
            return p;
        }
    }
}

/// `(n, m)` with `2 <= n <= max_n` and `0 <= m < n`.
pub fn random_shape(rng: &mut impl Rng, max_n: usize) -> (usize, usize) {
    let n = rng.random_range(2..=max_n);
    let m = rng.random_range(0..n);
    (n, m)
}
