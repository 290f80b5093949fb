use std::cell::{Cell, RefCell};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dense::{Cholesky, DenseMatrix};
use crate::linalg::vector::{norm2, sub};
use crate::linalg::{
    conjugate_gradient_with, CgOptions, LinearOperator, Projector, SparseOperator,
    SymmetricFactorization, Symmetry,
};
use crate::qp::optimality::recover_multiplier;
use crate::qp::problem::QpProblem;

/// Which route produced a [`SaddleSolution`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Nullspace,
    Schur,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Direct, Method::Nullspace, Method::Schur];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Nullspace => "nullspace",
            Method::Schur => "schur",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "nullspace" => Ok(Method::Nullspace),
            "schur" => Ok(Method::Schur),
            other => Err(Error::InvalidArgument(format!(
                "unknown method `{other}` (expected direct, nullspace or schur)"
            ))),
        }
    }
}

/// Minimizer, multiplier and residuals of
/// `Ax - b = C' lambda`, `Cx = d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaddleSolution {
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    /// `|Ax - b - C' lambda|`
    pub residual_stationarity: f64,
    /// `|Cx - d|`
    pub residual_feasibility: f64,
    pub method: Method,
    /// Refinement steps (direct), reduced-system steps (null-space) or outer
    /// CG iterations (Schur).
    pub iterations: usize,
    /// Total inner CG iterations on `A` (Schur route only).
    pub inner_iterations: usize,
}

fn residuals(
    a: &SparseOperator,
    b: &[f64],
    c: &SparseOperator,
    d: &[f64],
    x: &[f64],
    lambda: &[f64],
) -> (f64, f64) {
    let ax = a.apply_vec(x);
    let mut ctl = vec![0.0; x.len()];
    c.mul_transpose_into(lambda, &mut ctl);
    let stat: Vec<f64> = (0..x.len()).map(|i| ax[i] - b[i] - ctl[i]).collect();
    let cx = c.apply_vec(x);
    (norm2(&stat), norm2(&sub(&cx, d)))
}

fn check_contract(sol: SaddleSolution, scale: f64, tol: f64) -> Result<SaddleSolution> {
    let bound = tol * scale;
    let worst = sol.residual_stationarity.max(sol.residual_feasibility);
    if worst > bound {
        return Err(Error::NotConverged {
            solver: match sol.method {
                Method::Direct => "direct KKT solve",
                Method::Nullspace => "null-space solve",
                Method::Schur => "Schur complement solve",
            },
            iterations: sol.iterations,
            residual: worst / scale.max(f64::MIN_POSITIVE),
        });
    }
    Ok(sol)
}

fn validate_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

/// Symmetric block operator `[[A, C'], [C, 0]]`.
pub fn assemble_kkt(problem: &QpProblem) -> SparseOperator {
    let n = problem.n();
    let mut t: Vec<(usize, usize, f64)> = problem.a().iter().collect();
    for (r, c, v) in problem.c().iter() {
        t.push((n + r, c, v));
        t.push((c, n + r, v));
    }
    SparseOperator::from_triplets(n + problem.m(), n + problem.m(), &t, Symmetry::Symmetric)
        .expect("block assembly of valid blocks")
}

/// Solve the block system in one factorization. The symmetric system's
/// multiplier is negated so that `Ax - b = C' lambda`.
pub fn solve_kkt_direct(problem: &QpProblem, tol: f64) -> Result<SaddleSolution> {
    validate_tol(tol)?;
    let (n, m) = (problem.n(), problem.m());
    let kkt = assemble_kkt(problem);
    let factorization = match SymmetricFactorization::new(&kkt) {
        Ok(f) => f,
        Err(Error::Singular { pivot, magnitude }) => {
            return Err(diagnose_singular(problem, pivot, magnitude));
        }
        Err(e) => return Err(e),
    };
    let mut rhs = problem.b().to_vec();
    rhs.extend_from_slice(problem.d());
    let (z, report) = factorization.solve(&rhs)?;
    let x = z[..n].to_vec();
    let lambda: Vec<f64> = z[n..n + m].iter().map(|v| -v).collect();
    let (rs, rf) = residuals(
        problem.a(),
        problem.b(),
        problem.c(),
        problem.d(),
        &x,
        &lambda,
    );
    let scale = problem.scale(&x);
    check_contract(
        SaddleSolution {
            x,
            lambda,
            residual_stationarity: rs,
            residual_feasibility: rf,
            method: Method::Direct,
            iterations: report.iterations,
            inner_iterations: 0,
        },
        scale,
        tol,
    )
}

/// Name the hypothesis that failed when the block system is singular.
fn diagnose_singular(problem: &QpProblem, pivot: usize, magnitude: f64) -> Error {
    let where_ = if pivot < problem.n() {
        format!("primal unknown {pivot}")
    } else {
        format!("multiplier {}", pivot - problem.n())
    };
    if problem.n() <= 500 && Cholesky::factor(&DenseMatrix::from_sparse(problem.a())).is_err() {
        return Error::InvalidProblem(format!(
            "singular KKT system at {where_}: A is not positive definite"
        ));
    }
    if let Err(e) = crate::linalg::ConstraintFactorization::new(problem.c()) {
        return Error::InvalidProblem(format!(
            "singular KKT system at {where_}: C lacks full row rank ({e})"
        ));
    }
    Error::Singular { pivot, magnitude }
}

/// Minimize over `x0 + Ker C`: minimum-norm particular solution, orthonormal
/// kernel basis `Z`, dense Cholesky on `Z'AZ`, then multiplier recovery.
pub fn solve_nullspace(problem: &QpProblem, tol: f64) -> Result<SaddleSolution> {
    validate_tol(tol)?;
    let f = problem.constraint_factorization()?;
    let x0 = f.min_norm_solution(problem.d())?;
    let z = f.kernel_matrix();
    let k = z.cols();
    let a = problem.a();
    // A Z column by column
    let az_cols: Vec<Vec<f64>> = (0..k).map(|j| a.apply_vec(&z.column(j))).collect();
    let az = DenseMatrix::from_columns(problem.n(), &az_cols);
    let reduced = z.transpose().matmul(&az);
    let ax0 = a.apply_vec(&x0);
    let rhs = z.t_matvec(&sub(problem.b(), &ax0));
    let y = if k == 0 {
        Vec::new()
    } else {
        Cholesky::factor(&reduced)
            .map_err(|e| Error::InvalidProblem(format!("reduced Hessian Z'AZ: {e}")))?
            .solve(&rhs)
    };
    let zy = z.matvec(&y);
    let x: Vec<f64> = x0.iter().zip(&zy).map(|(a, b)| a + b).collect();
    let lambda = recover_multiplier(problem, &x, tol)?;
    let (rs, rf) = residuals(a, problem.b(), problem.c(), problem.d(), &x, &lambda);
    let scale = problem.scale(&x);
    check_contract(
        SaddleSolution {
            x,
            lambda,
            residual_stationarity: rs,
            residual_feasibility: rf,
            method: Method::Nullspace,
            iterations: 1,
            inner_iterations: 0,
        },
        scale,
        tol,
    )
}

/// `lambda -> C A^{-1} C' lambda` with inner CG solves on `A`.
struct SchurOperator<'a> {
    a: &'a SparseOperator,
    c: &'a SparseOperator,
    inner_tol: f64,
    inner_iterations: Cell<usize>,
    failure: RefCell<Option<Error>>,
}

impl SchurOperator<'_> {
    fn solve_a(&self, rhs: &[f64], tol: f64) -> Vec<f64> {
        match conjugate_gradient_with(
            self.a,
            rhs,
            &CgOptions {
                tol,
                max_iter: 0,
                projector: None,
            },
        ) {
            Ok((x, rep)) => {
                self.inner_iterations
                    .set(self.inner_iterations.get() + rep.iterations);
                if let Err(e) = rep.into_result("Schur inner CG on A") {
                    self.failure.borrow_mut().get_or_insert(e);
                }
                x
            }
            Err(e) => {
                self.failure.borrow_mut().get_or_insert(e);
                vec![0.0; rhs.len()]
            }
        }
    }

    fn take_failure(&self) -> Result<()> {
        match self.failure.borrow_mut().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

impl LinearOperator for SchurOperator<'_> {
    fn nrows(&self) -> usize {
        self.c.nrows()
    }

    fn ncols(&self) -> usize {
        self.c.nrows()
    }

    fn apply_into(&self, lambda: &[f64], y: &mut [f64]) {
        let mut ct = vec![0.0; self.c.ncols()];
        self.c.mul_transpose_into(lambda, &mut ct);
        let w = self.solve_a(&ct, self.inner_tol);
        self.c.mul_into(&w, y);
    }
}

/// Schur-complement (dual) route on raw blocks.
///
/// Solves `(C A^{-1} C') mu = C A^{-1} b - d` by CG with inner CG on `A`,
/// then `x = A^{-1}(b - C' mu)` and `lambda = -mu`. When `C` has a known
/// rank defect, `multiplier_projector` confines the outer iteration to the
/// complement of `Ker C'`.
pub fn schur_complement_solve(
    a: &SparseOperator,
    b: &[f64],
    c: &SparseOperator,
    d: &[f64],
    tol: f64,
    multiplier_projector: Option<Projector<'_>>,
) -> Result<SaddleSolution> {
    validate_tol(tol)?;
    let inner_tol = (tol * 1e-2).max(1e-14);
    let op = SchurOperator {
        a,
        c,
        inner_tol,
        inner_iterations: Cell::new(0),
        failure: RefCell::new(None),
    };
    let a_inv_b = op.solve_a(b, inner_tol);
    op.take_failure()?;
    let mut rhs = c.apply_vec(&a_inv_b);
    rhs.iter_mut().zip(d).for_each(|(r, di)| *r -= di);
    if let Some(p) = multiplier_projector {
        p(&mut rhs);
    }
    // tighten so that |Cx - d| <= tol |b| even when |rhs| exceeds |b|
    let rhs_norm = norm2(&rhs);
    let bnorm = norm2(b);
    let outer_tol = if rhs_norm > 0.0 && bnorm > 0.0 {
        (0.5 * tol * bnorm / rhs_norm).min(tol).max(1e-15)
    } else {
        tol
    };
    let (mu, outer) = conjugate_gradient_with(
        &op,
        &rhs,
        &CgOptions {
            tol: outer_tol,
            max_iter: 0,
            projector: multiplier_projector,
        },
    )?;
    op.take_failure()?;
    let outer = outer.into_result("Schur outer CG")?;

    let mut ct_mu = vec![0.0; a.nrows()];
    c.mul_transpose_into(&mu, &mut ct_mu);
    let x = op.solve_a(&sub(b, &ct_mu), inner_tol);
    op.take_failure()?;
    let lambda: Vec<f64> = mu.iter().map(|v| -v).collect();
    let (rs, rf) = residuals(a, b, c, d, &x, &lambda);
    let scale = a.frobenius_norm() * norm2(&x) + bnorm;
    check_contract(
        SaddleSolution {
            x,
            lambda,
            residual_stationarity: rs,
            residual_feasibility: rf,
            method: Method::Schur,
            iterations: outer.iterations,
            inner_iterations: op.inner_iterations.get(),
        },
        scale,
        tol,
    )
}

pub fn solve_schur(problem: &QpProblem, tol: f64) -> Result<SaddleSolution> {
    schur_complement_solve(
        problem.a(),
        problem.b(),
        problem.c(),
        problem.d(),
        tol,
        None,
    )
}

pub fn solve(problem: &QpProblem, method: Method, tol: f64) -> Result<SaddleSolution> {
    match method {
        Method::Direct => solve_kkt_direct(problem, tol),
        Method::Nullspace => solve_nullspace(problem, tol),
        Method::Schur => solve_schur(problem, tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hand_instance() -> QpProblem {
        let c = SparseOperator::from_rows(&[vec![1.0, 0.0]], Symmetry::General).unwrap();
        QpProblem::homogeneous(SparseOperator::identity(2), vec![1.0, 1.0], c).unwrap()
    }

    #[test]
    fn kkt_block_placement() {
        let kkt = assemble_kkt(&hand_instance());
        assert_eq!(
            kkt.to_dense(),
            vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0]
        );
        assert!(kkt.is_symmetric());
    }

    #[test]
    fn kkt_without_constraints_is_a() {
        let a = SparseOperator::diagonal(&[2.0, 3.0]);
        let p =
            QpProblem::homogeneous(a.clone(), vec![1.0, 1.0], SparseOperator::zeros(0, 2)).unwrap();
        assert_eq!(assemble_kkt(&p).to_dense(), a.to_dense());
    }

    #[test]
    fn hand_instance_all_methods() {
        let p = hand_instance();
        for m in Method::ALL {
            let s = solve(&p, m, 1e-12).unwrap();
            assert!(s.x[0].abs() <= 1e-12, "{m}: {:?}", s.x);
            assert!((s.x[1] - 1.0).abs() <= 1e-12, "{m}: {:?}", s.x);
            assert!((s.lambda[0] + 1.0).abs() <= 1e-12, "{m}: {:?}", s.lambda);
            assert_eq!(s.method, m);
        }
    }

    #[test]
    fn unconstrained_reduces_to_a_inverse_b() {
        let a = SparseOperator::diagonal(&[2.0, 4.0]);
        let p = QpProblem::homogeneous(a, vec![2.0, 2.0], SparseOperator::zeros(0, 2)).unwrap();
        for m in Method::ALL {
            let s = solve(&p, m, 1e-12).unwrap();
            assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] - 0.5).abs() < 1e-12);
            assert!(s.lambda.is_empty());
        }
    }

    #[test]
    fn orthonormal_rows_converge_in_one_outer_step() {
        // rows e1 and (e2 + e3)/sqrt 2 are orthonormal, so C C' = I
        let r = 0.5_f64.sqrt();
        let c = SparseOperator::from_rows(
            &[vec![1.0, 0.0, 0.0, 0.0], vec![0.0, r, r, 0.0]],
            Symmetry::General,
        )
        .unwrap();
        let cct = DenseMatrix::from_sparse(&c).matmul(&DenseMatrix::from_sparse(&c).transpose());
        assert!((cct[(0, 0)] - 1.0).abs() < 1e-15 && (cct[(1, 1)] - 1.0).abs() < 1e-15);
        assert!(cct[(0, 1)].abs() < 1e-15);
        let p = QpProblem::homogeneous(SparseOperator::identity(4), vec![1.0, 2.0, 3.0, 4.0], c)
            .unwrap();
        let s = solve_schur(&p, 1e-12).unwrap();
        assert_eq!(s.iterations, 1);
    }

    #[test]
    fn bad_tolerance_rejected() {
        assert!(solve_kkt_direct(&hand_instance(), 0.0).is_err());
        assert!(solve_schur(&hand_instance(), -1.0).is_err());
    }

    #[test]
    fn inhomogeneous_constraint() {
        // min 1/2|x|^2 s.t. x1 + x2 = 2  => x = (1, 1), lambda = (1)
        let c = SparseOperator::from_rows(&[vec![1.0, 1.0]], Symmetry::General).unwrap();
        let p = QpProblem::new(SparseOperator::identity(2), vec![0.0, 0.0], c, vec![2.0]).unwrap();
        for m in Method::ALL {
            let s = solve(&p, m, 1e-12).unwrap();
            assert!(
                (s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] - 1.0).abs() < 1e-12,
                "{m}"
            );
            assert!((s.lambda[0] - 1.0).abs() < 1e-12, "{m}");
        }
    }
}
