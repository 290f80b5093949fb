use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dense::{Cholesky, DenseMatrix};
use crate::linalg::vector::{axpy, dot, norm2, scale};
use crate::linalg::{
    smallest_generalized_eigenpair, ConstraintFactorization, EigenOptions, LinearOperator,
    Projector, SparseOperator, SymmetricFactorization,
};

/// Which side of the inf-sup condition is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfSupForm {
    /// `inf_q |C'q|_{H*} / |q|_M`: eigenproblem `(C A^{-1} C', Mq)` on the
    /// multiplier space.
    DualForm,
    /// `inf_v |Cv|_{M*} / |v|_H` over `v` A-orthogonal to `Ker C`: eigenproblem
    /// `(C' Mq^{-1} C, A)` on the primal space.
    PrimalForm,
}

impl fmt::Display for InfSupForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InfSupForm::DualForm => "dual_form",
            InfSupForm::PrimalForm => "primal_form",
        })
    }
}

/// Discrete inf-sup constant and the multiplier direction attaining it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InfSupEstimate {
    pub beta: f64,
    /// Smallest generalized eigenvalue; `beta = sqrt(eigenvalue)`.
    pub eigenvalue: f64,
    /// Attaining multiplier, normalized to `q' Mq q = 1`.
    pub attaining_q: Vec<f64>,
    pub form: InfSupForm,
    pub residual: f64,
    pub iterations: usize,
}

/// `x -> L R^{-1} L'` for a factored middle block.
struct Sandwich<'a> {
    outer: &'a SparseOperator,
    /// true: `outer' R^{-1} outer`, false: `outer R^{-1} outer'`
    transpose_outer: bool,
    inner: &'a SymmetricFactorization,
}

impl LinearOperator for Sandwich<'_> {
    fn nrows(&self) -> usize {
        if self.transpose_outer {
            self.outer.ncols()
        } else {
            self.outer.nrows()
        }
    }

    fn ncols(&self) -> usize {
        self.nrows()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        if self.transpose_outer {
            let t = self.outer.apply_vec(x);
            let (w, _) = self.inner.solve(&t).expect("finite operand");
            self.outer.mul_transpose_into(&w, y);
        } else {
            let mut t = vec![0.0; self.outer.ncols()];
            self.outer.mul_transpose_into(x, &mut t);
            let (w, _) = self.inner.solve(&t).expect("finite operand");
            self.outer.mul_into(&w, y);
        }
    }
}

fn check_spd(op: &SparseOperator, name: &str) -> Result<()> {
    if !op.is_symmetric() {
        return Err(Error::InvalidArgument(format!("{name} must be symmetric")));
    }
    if op.nrows() <= 1000 {
        Cholesky::factor(&DenseMatrix::from_sparse(op)).map_err(|e| {
            Error::InvalidArgument(format!("{name} must be positive definite: {e}"))
        })?;
    }
    Ok(())
}

/// Estimate the inf-sup constant of `C` with respect to the `A`-norm on the
/// primal space and the `Mq`-norm on the multiplier space.
pub fn estimate_infsup(
    c: &SparseOperator,
    a: &SparseOperator,
    mq: &SparseOperator,
    form: InfSupForm,
) -> Result<InfSupEstimate> {
    estimate_infsup_with(c, a, mq, form, None)
}

/// As [`estimate_infsup`]; `multiplier_projector` (dual form only) restricts
/// the infimum to a subspace of multipliers, e.g. zero-mean pressures.
pub fn estimate_infsup_with(
    c: &SparseOperator,
    a: &SparseOperator,
    mq: &SparseOperator,
    form: InfSupForm,
    multiplier_projector: Option<Projector<'_>>,
) -> Result<InfSupEstimate> {
    let (m, n) = (c.nrows(), c.ncols());
    if a.nrows() != n || a.ncols() != n || mq.nrows() != m || mq.ncols() != m {
        return Err(Error::DimensionMismatch {
            context: "inf-sup operators",
            expected: n,
            got: a.nrows(),
        });
    }
    if m == 0 {
        return Err(Error::InvalidArgument(
            "inf-sup constant needs at least one constraint".into(),
        ));
    }
    check_spd(a, "A")?;
    check_spd(mq, "Mq")?;
    match form {
        InfSupForm::DualForm => {
            let a_fact = SymmetricFactorization::new(a)?;
            let s = Sandwich {
                outer: c,
                transpose_outer: false,
                inner: &a_fact,
            };
            let pair = smallest_generalized_eigenpair(
                &s,
                mq,
                &EigenOptions {
                    solve_projector: multiplier_projector,
                    subspace_projector: multiplier_projector,
                    ..Default::default()
                },
            )?;
            Ok(InfSupEstimate {
                beta: pair.value.max(0.0).sqrt(),
                eigenvalue: pair.value,
                attaining_q: pair.vector,
                form,
                residual: pair.residual,
                iterations: pair.iterations,
            })
        }
        InfSupForm::PrimalForm => {
            if multiplier_projector.is_some() {
                return Err(Error::InvalidArgument(
                    "primal form needs a full-rank constraint; use the dual form".into(),
                ));
            }
            primal_form(c, a, mq)
        }
    }
}

fn primal_form(
    c: &SparseOperator,
    a: &SparseOperator,
    mq: &SparseOperator,
) -> Result<InfSupEstimate> {
    let n = c.ncols();
    let constraint = ConstraintFactorization::new(c)?;
    let z = constraint.kernel_matrix();
    let k = z.cols();
    let az_cols: Vec<Vec<f64>> = (0..k).map(|j| a.apply_vec(&z.column(j))).collect();
    let az = DenseMatrix::from_columns(n, &az_cols);
    let ztaz = if k > 0 {
        Some(Cholesky::factor(&z.transpose().matmul(&az))?)
    } else {
        None
    };
    // v -> v - Z (Z'AZ)^{-1} Z'A v : A-orthogonal projection away from Ker C
    let a_projector = |v: &mut [f64]| {
        if let Some(ch) = &ztaz {
            let zt_av = az.t_matvec(v);
            let y = ch.solve(&zt_av);
            let zy = z.matvec(&y);
            axpy(-1.0, &zy, v);
        }
    };
    // v -> v - Z Z' v : Euclidean projection onto range(C')
    let range_projector = |v: &mut [f64]| {
        if k > 0 {
            let zy = z.matvec(&z.t_matvec(v));
            axpy(-1.0, &zy, v);
        }
    };
    let mq_fact = SymmetricFactorization::new(mq)?;
    let s = Sandwich {
        outer: c,
        transpose_outer: true,
        inner: &mq_fact,
    };
    let pair = smallest_generalized_eigenpair(
        &s,
        a,
        &EigenOptions {
            solve_projector: Some(&range_projector),
            subspace_projector: Some(&a_projector),
            ..Default::default()
        },
    )?;
    // the attaining multiplier is the Riesz representative of C v
    let (mut q, _) = mq_fact.solve(&c.apply_vec(&pair.vector))?;
    let qmq = dot(&q, &mq.apply_vec(&q));
    if qmq > 0.0 {
        scale(1.0 / qmq.sqrt(), &mut q);
    }
    debug_assert!(norm2(&q).is_finite());
    Ok(InfSupEstimate {
        beta: pair.value.max(0.0).sqrt(),
        eigenvalue: pair.value,
        attaining_q: q,
        form: InfSupForm::PrimalForm,
        residual: pair.residual,
        iterations: pair.iterations,
    })
}
