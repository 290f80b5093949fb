use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::vector::{check_len, norm2, sub};
use crate::linalg::{
    conjugate_gradient_with, CgOptions, LinearOperator, Projector, SparseOperator,
};
use crate::qp::problem::{gradient, QpProblem};

/// First-order certificate: the gradient must annihilate the kernel of `C`
/// and the point must be feasible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    /// `|Z'(Ax - b)|` for an orthonormal kernel basis `Z`.
    pub projected_gradient_norm: f64,
    /// `|Cx - d|`
    pub feasibility_norm: f64,
    pub is_minimizer: bool,
}

impl OptimalityReport {
    fn new(projected_gradient_norm: f64, feasibility_norm: f64, tol: f64) -> Self {
        OptimalityReport {
            projected_gradient_norm,
            feasibility_norm,
            is_minimizer: projected_gradient_norm <= tol && feasibility_norm <= tol,
        }
    }
}

/// A feasible `x` minimizes the convex quadratic over the constraint set
/// exactly when `Ax - b` vanishes on `Ker C`.
pub fn check_optimality(problem: &QpProblem, x: &[f64], tol: f64) -> Result<OptimalityReport> {
    check_len(x, problem.n(), "check_optimality: x length")?;
    let f = problem.constraint_factorization()?;
    let g = gradient(problem, x)?;
    let pg = norm2(&f.kernel_coordinates(&g));
    let feas = norm2(&sub(&problem.c().apply(x)?, problem.d()));
    Ok(OptimalityReport::new(pg, feas, tol))
}

/// Unique `lambda` with `C' lambda = Ax - b`.
///
/// Fails with [`Error::Infeasible`] or [`Error::NotOptimal`] when `x` is not a
/// constrained minimizer at tolerance `tol * scale`, i.e. when the gradient has
/// a component outside `range(C')`.
pub fn recover_multiplier(problem: &QpProblem, x: &[f64], tol: f64) -> Result<Vec<f64>> {
    check_len(x, problem.n(), "recover_multiplier: x length")?;
    let bound = tol * problem.scale(x);
    let feas = norm2(&sub(&problem.c().apply(x)?, problem.d()));
    if feas > bound {
        return Err(Error::Infeasible {
            residual: feas,
            tol: bound,
        });
    }
    let g = gradient(problem, x)?;
    let (lambda, outside) = problem
        .constraint_factorization()?
        .least_squares_multiplier(&g)?;
    if outside > bound {
        return Err(Error::NotOptimal {
            residual: outside,
            tol: bound,
        });
    }
    Ok(lambda)
}

/// `lambda -> C C' lambda`
struct NormalOperator<'a> {
    c: &'a SparseOperator,
}

impl LinearOperator for NormalOperator<'_> {
    fn nrows(&self) -> usize {
        self.c.nrows()
    }

    fn ncols(&self) -> usize {
        self.c.nrows()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let mut t = vec![0.0; self.c.ncols()];
        self.c.mul_transpose_into(x, &mut t);
        self.c.mul_into(&t, y);
    }
}

/// Matrix-free split of the gradient `g = Ax - b` into `C' lambda` plus a part
/// in `Ker C`, by CG on `C C' lambda = C g`.
///
/// Returns `(lambda, |g - C' lambda|)`. The second value equals the projected
/// gradient norm `|Z'g|` without forming `Z`. For a constraint with a known
/// rank defect, `projector` removes `Ker C'` from the multiplier iterates.
pub fn constrained_gradient_split(
    a: &SparseOperator,
    b: &[f64],
    c: &SparseOperator,
    x: &[f64],
    tol: f64,
    projector: Option<Projector<'_>>,
) -> Result<(Vec<f64>, f64)> {
    check_len(x, a.ncols(), "gradient split: x length")?;
    check_len(b, a.nrows(), "gradient split: b length")?;
    let mut g = a.apply(x)?;
    g.iter_mut().zip(b).for_each(|(gi, bi)| *gi -= bi);
    let cg_rhs = c.apply_vec(&g);
    let (mut lambda, report) = conjugate_gradient_with(
        &NormalOperator { c },
        &cg_rhs,
        &CgOptions {
            tol,
            max_iter: 0,
            projector,
        },
    )?;
    report.into_result("multiplier normal equations")?;
    if let Some(p) = projector {
        p(&mut lambda);
    }
    let mut ct = vec![0.0; g.len()];
    c.mul_transpose_into(&lambda, &mut ct);
    Ok((lambda, norm2(&sub(&g, &ct))))
}
