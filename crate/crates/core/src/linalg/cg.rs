use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::operator::{LinearOperator, Projector};
use crate::linalg::sparse::SparseOperator;
use crate::linalg::vector::{axpy, check_finite, check_len, dot, norm2};
use crate::linalg::{default_max_iter, DEFAULT_TOL};

/// Outcome of an iterative (or refined direct) solve.
///
/// `residual_norm` is relative: `|b - op x| / |b|`, or the absolute residual
/// when `b = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub iterations: usize,
    pub residual_norm: f64,
    pub converged: bool,
    pub breakdown_reason: Option<String>,
}

impl SolverReport {
    pub(crate) fn into_result(self, solver: &'static str) -> Result<SolverReport> {
        if let Some(reason) = self.breakdown_reason {
            return Err(Error::Breakdown { solver, reason });
        }
        if !self.converged {
            return Err(Error::NotConverged {
                solver,
                iterations: self.iterations,
                residual: self.residual_norm,
            });
        }
        Ok(self)
    }
}

#[derive(Clone, Copy)]
pub struct CgOptions<'a> {
    pub tol: f64,
    pub max_iter: usize,
    /// Applied to the right-hand side and every residual, so the iteration
    /// stays in the projected subspace. Used for consistent singular systems.
    pub projector: Option<Projector<'a>>,
}

impl Default for CgOptions<'_> {
    fn default() -> Self {
        CgOptions {
            tol: DEFAULT_TOL,
            max_iter: 0,
            projector: None,
        }
    }
}

/// Conjugate gradients on a symmetric positive definite sparse operator.
///
/// Non-convergence is not an error here: the report comes back with
/// `converged = false`. Negative curvature is reported as a breakdown.
pub fn conjugate_gradient(
    op: &SparseOperator,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolverReport)> {
    if !op.is_symmetric() {
        return Err(Error::InvalidArgument(
            "conjugate gradients needs an operator flagged symmetric".into(),
        ));
    }
    check_len(b, op.nrows(), "conjugate_gradient: rhs length")?;
    check_finite(b, "conjugate_gradient rhs")?;
    conjugate_gradient_with(
        op,
        b,
        &CgOptions {
            tol,
            max_iter,
            projector: None,
        },
    )
}

/// Matrix-free conjugate gradients.
pub fn conjugate_gradient_with(
    op: &dyn LinearOperator,
    b: &[f64],
    opts: &CgOptions<'_>,
) -> Result<(Vec<f64>, SolverReport)> {
    let n = op.nrows();
    check_len(b, n, "conjugate_gradient: rhs length")?;
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let max_iter = if opts.max_iter == 0 {
        default_max_iter(n)
    } else {
        opts.max_iter
    };
    let project = |v: &mut [f64]| {
        if let Some(p) = opts.projector {
            p(v)
        }
    };

    let mut rhs = b.to_vec();
    project(&mut rhs);
    let bnorm = norm2(&rhs);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((
            x,
            SolverReport {
                iterations: 0,
                residual_norm: 0.0,
                converged: true,
                breakdown_reason: None,
            },
        ));
    }
    let target = opts.tol * bnorm;

    let mut ap = vec![0.0; n];
    let mut iterations = 0;
    let true_residual = |x: &[f64], ap: &mut Vec<f64>| -> Vec<f64> {
        op.apply_into(x, ap);
        let mut r: Vec<f64> = rhs.iter().zip(ap.iter()).map(|(bi, ai)| bi - ai).collect();
        project(&mut r);
        r
    };

    let mut r = rhs.clone();
    // outer loop restarts from the true residual if the recursive one drifted
    loop {
        let mut p = r.clone();
        let mut rr = dot(&r, &r);
        while rr.sqrt() > target && iterations < max_iter {
            op.apply_into(&p, &mut ap);
            project(&mut ap);
            let curvature = dot(&p, &ap);
            if !(curvature > 0.0) {
                let res = norm2(&true_residual(&x, &mut ap)) / bnorm;
                return Ok((
                    x,
                    SolverReport {
                        iterations,
                        residual_norm: res,
                        converged: false,
                        breakdown_reason: Some(format!(
                            "non-positive curvature {curvature:e} at iteration {iterations}"
                        )),
                    },
                ));
            }
            let alpha = rr / curvature;
            axpy(alpha, &p, &mut x);
            axpy(-alpha, &ap, &mut r);
            let rr_new = dot(&r, &r);
            let beta = rr_new / rr;
            for (pi, ri) in p.iter_mut().zip(&r) {
                *pi = ri + beta * *pi;
            }
            rr = rr_new;
            iterations += 1;
        }
        r = true_residual(&x, &mut ap);
        let res = norm2(&r);
        if res <= target || iterations >= max_iter || rr.sqrt() > target {
            return Ok((
                x,
                SolverReport {
                    iterations,
                    residual_norm: res / bnorm,
                    converged: res <= target,
                    breakdown_reason: None,
                },
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sparse::Symmetry;

    #[test]
    fn identity_solve() {
        let (x, rep) =
            conjugate_gradient(&SparseOperator::identity(2), &[5.0, -2.0], 1e-12, 10).unwrap();
        assert!(rep.converged);
        assert_eq!(x, vec![5.0, -2.0]);
    }

    #[test]
    fn diagonal_solve() {
        let op = SparseOperator::diagonal(&[1.0, 2.0]);
        let (x, rep) = conjugate_gradient(&op, &[1.0, 2.0], 1e-12, 10).unwrap();
        assert!(rep.converged);
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn indefinite_operator_breaks_down() {
        let op = SparseOperator::diagonal(&[1.0, -1.0]);
        let (_, rep) = conjugate_gradient(&op, &[1.0, 1.0], 1e-12, 10).unwrap();
        assert!(!rep.converged);
        assert!(rep.breakdown_reason.is_some());
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let op = SparseOperator::diagonal(&[1.0, 2.0, 3.0, 4.0]);
        let (_, rep) = conjugate_gradient(&op, &[1.0; 4], 1e-14, 1).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 1);
        assert!(rep.breakdown_reason.is_none());
    }

    #[test]
    fn general_flag_rejected() {
        let op = SparseOperator::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]], Symmetry::General)
            .unwrap();
        assert!(conjugate_gradient(&op, &[1.0, 1.0], 1e-10, 10).is_err());
    }

    #[test]
    fn projected_singular_system() {
        // 1D Neumann Laplacian: kernel = constants
        let op = SparseOperator::from_rows(
            &[
                vec![1.0, -1.0, 0.0],
                vec![-1.0, 2.0, -1.0],
                vec![0.0, -1.0, 1.0],
            ],
            Symmetry::Symmetric,
        )
        .unwrap();
        let zero_mean = |v: &mut [f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter_mut().for_each(|x| *x -= m);
        };
        let (x, rep) = conjugate_gradient_with(
            &op,
            &[1.0, 0.0, -1.0],
            &CgOptions {
                tol: 1e-12,
                max_iter: 20,
                projector: Some(&zero_mean),
            },
        )
        .unwrap();
        assert!(rep.converged);
        let ax = op.apply(&x).unwrap();
        assert!((ax[0] - 1.0).abs() < 1e-12 && (ax[2] + 1.0).abs() < 1e-12);
    }
}
