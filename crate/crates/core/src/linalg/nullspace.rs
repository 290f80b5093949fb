use crate::error::{Error, Result};
use crate::linalg::dense::{householder_qr_pivoted, singular_values, DenseMatrix};
use crate::linalg::sparse::SparseOperator;
use crate::linalg::vector::{check_len, norm2};
use crate::linalg::RANK_TOL;

/// Column-pivoted orthogonal factorization `C^T P = Q R` of an `m x n`
/// constraint operator with full row rank.
///
/// With `Q = [Q1 Q2]`, `Q1` spans `range(C^T)` and `Q2` spans `Ker C`.
#[derive(Clone, Debug)]
pub struct ConstraintFactorization {
    n: usize,
    m: usize,
    q: DenseMatrix,
    r: DenseMatrix,
    perm: Vec<usize>,
    sigma_max: f64,
    sigma_min: f64,
}

impl ConstraintFactorization {
    /// Factor and reject `C` whose singular values fall below
    /// `RANK_TOL * sigma_max`.
    pub fn new(c: &SparseOperator) -> Result<Self> {
        let (m, n) = (c.nrows(), c.ncols());
        if m > n {
            return Err(Error::InvalidProblem(format!(
                "constraint operator has more rows ({m}) than columns ({n})"
            )));
        }
        let ct = DenseMatrix::from_sparse(c).transpose();
        let qr = householder_qr_pivoted(&ct);
        let (sigma_max, sigma_min) = if m == 0 {
            (0.0, 0.0)
        } else {
            let sv = singular_values(&qr.r);
            (sv[0], sv[m - 1])
        };
        if m > 0 && !(sigma_min >= RANK_TOL * sigma_max && sigma_max > 0.0) {
            return Err(Error::RankDeficient {
                ratio: if sigma_max > 0.0 {
                    sigma_min / sigma_max
                } else {
                    0.0
                },
                tol: RANK_TOL,
            });
        }
        Ok(ConstraintFactorization {
            n,
            m,
            q: qr.q,
            r: qr.r,
            perm: qr.perm,
            sigma_max,
            sigma_min,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Extreme singular values of `C`.
    pub fn singular_value_range(&self) -> (f64, f64) {
        (self.sigma_min, self.sigma_max)
    }

    /// Orthonormal basis of `Ker C` as the columns of an `n x (n - m)` matrix.
    pub fn kernel_matrix(&self) -> DenseMatrix {
        let k = self.n - self.m;
        let mut z = DenseMatrix::zeros(self.n, k);
        for i in 0..self.n {
            for j in 0..k {
                z[(i, j)] = self.q[(i, self.m + j)];
            }
        }
        z
    }

    pub fn kernel_basis(&self) -> Vec<Vec<f64>> {
        (self.m..self.n).map(|j| self.q.column(j)).collect()
    }

    /// `Z^T g`: coordinates of `g` in the kernel basis.
    pub fn kernel_coordinates(&self, g: &[f64]) -> Vec<f64> {
        (self.m..self.n)
            .map(|j| (0..self.n).map(|i| self.q[(i, j)] * g[i]).sum())
            .collect()
    }

    /// `Z y`
    pub fn from_kernel_coordinates(&self, y: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                y.iter()
                    .enumerate()
                    .map(|(j, yj)| self.q[(i, self.m + j)] * yj)
                    .sum()
            })
            .collect()
    }

    /// Minimum-norm solution of `C x = d`.
    pub fn min_norm_solution(&self, d: &[f64]) -> Result<Vec<f64>> {
        check_len(d, self.m, "constraint rhs length")?;
        // R^T w = P^T d
        let mut w = vec![0.0; self.m];
        for i in 0..self.m {
            let mut s = d[self.perm[i]];
            for k in 0..i {
                s -= self.r[(k, i)] * w[k];
            }
            w[i] = s / self.r[(i, i)];
        }
        Ok((0..self.n)
            .map(|i| (0..self.m).map(|k| self.q[(i, k)] * w[k]).sum())
            .collect())
    }

    /// Least-squares solution of `C^T lambda = g`, with the norm of the part of
    /// `g` outside `range(C^T)`.
    pub fn least_squares_multiplier(&self, g: &[f64]) -> Result<(Vec<f64>, f64)> {
        check_len(g, self.n, "gradient length")?;
        let qt_g: Vec<f64> = (0..self.n)
            .map(|j| (0..self.n).map(|i| self.q[(i, j)] * g[i]).sum())
            .collect();
        let mut y = vec![0.0; self.m];
        for i in (0..self.m).rev() {
            let mut s = qt_g[i];
            for k in i + 1..self.m {
                s -= self.r[(i, k)] * y[k];
            }
            y[i] = s / self.r[(i, i)];
        }
        let mut lambda = vec![0.0; self.m];
        for (k, &p) in self.perm.iter().enumerate() {
            lambda[p] = y[k];
        }
        Ok((lambda, norm2(&qt_g[self.m..])))
    }
}

/// Orthonormal basis of `Ker C` for a full-row-rank `C`.
pub fn orthonormal_nullspace_basis(c: &SparseOperator) -> Result<Vec<Vec<f64>>> {
    Ok(ConstraintFactorization::new(c)?.kernel_basis())
}
