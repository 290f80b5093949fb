use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::vector::{check_finite, check_len, dot, norm2};
use crate::linalg::{ConstraintFactorization, SparseOperator};

/// `min 1/2 x'Ax - b'x  s.t.  Cx = d`.
///
/// A zero `d` is the homogeneous setting `x in Ker C`; a nonzero `d` shifts
/// the feasible set to an affine subspace.
#[derive(Clone, Debug)]
pub struct QpProblem {
    a: SparseOperator,
    b: Vec<f64>,
    c: SparseOperator,
    d: Vec<f64>,
    constraint: OnceLock<ConstraintFactorization>,
}

impl QpProblem {
    /// Validates shapes, symmetry of `A`, a randomized definiteness spot-check,
    /// `M < N`, and full row rank of `C`.
    pub fn new(a: SparseOperator, b: Vec<f64>, c: SparseOperator, d: Vec<f64>) -> Result<Self> {
        let problem = Self::with_structural_rank(a, b, c, d)?;
        let factorization = ConstraintFactorization::new(&problem.c)?;
        let _ = problem.constraint.set(factorization);
        Ok(problem)
    }

    pub fn homogeneous(a: SparseOperator, b: Vec<f64>, c: SparseOperator) -> Result<Self> {
        let m = c.nrows();
        Self::new(a, b, c, vec![0.0; m])
    }

    /// Like [`QpProblem::new`] but skips the dense rank check of `C`. For
    /// large structured constraints whose full row rank is known by
    /// construction; the dense factorization is only built if a null-space
    /// operation asks for it.
    pub fn with_structural_rank(
        a: SparseOperator,
        b: Vec<f64>,
        c: SparseOperator,
        d: Vec<f64>,
    ) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::InvalidProblem(format!(
                "A must be square, got {}x{}",
                n,
                a.ncols()
            )));
        }
        let a = if a.is_symmetric() {
            a
        } else {
            a.to_symmetric()
                .map_err(|e| Error::InvalidProblem(format!("A must be symmetric: {e}")))?
        };
        check_len(&b, n, "b length")?;
        check_finite(&b, "b")?;
        if c.ncols() != n {
            return Err(Error::InvalidProblem(format!(
                "C has {} columns but A is {n}x{n}",
                c.ncols()
            )));
        }
        let m = c.nrows();
        if m >= n {
            return Err(Error::InvalidProblem(format!(
                "need fewer constraints than unknowns, got M = {m}, N = {n}"
            )));
        }
        check_len(&d, m, "d length")?;
        check_finite(&d, "d")?;
        spot_check_definite(&a)?;
        Ok(QpProblem {
            a,
            b,
            c,
            d,
            constraint: OnceLock::new(),
        })
    }

    pub fn a(&self) -> &SparseOperator {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &SparseOperator {
        &self.c
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn m(&self) -> usize {
        self.c.nrows()
    }

    /// Dense orthogonal factorization of `C^T`, built on first use.
    pub fn constraint_factorization(&self) -> Result<&ConstraintFactorization> {
        if let Some(f) = self.constraint.get() {
            return Ok(f);
        }
        let f = ConstraintFactorization::new(&self.c)?;
        Ok(self.constraint.get_or_init(|| f))
    }

    /// Residual normalization `|A|_F |x| + |b|`.
    pub fn scale(&self, x: &[f64]) -> f64 {
        self.a.frobenius_norm() * norm2(x) + norm2(&self.b)
    }

    /// Same problem with a different linear term.
    pub fn with_b(&self, b: Vec<f64>) -> Result<Self> {
        check_len(&b, self.n(), "b length")?;
        check_finite(&b, "b")?;
        Ok(QpProblem {
            a: self.a.clone(),
            b,
            c: self.c.clone(),
            d: self.d.clone(),
            constraint: self.constraint.clone(),
        })
    }
}

fn spot_check_definite(a: &SparseOperator) -> Result<()> {
    let n = a.nrows();
    for (i, d) in a.diagonal_entries().into_iter().enumerate() {
        if !(d > 0.0) {
            return Err(Error::InvalidProblem(format!(
                "A is not positive definite: diagonal entry {i} is {d}"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xa5a5);
    for _ in 0..8 {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ax = a.apply(&x)?;
        if !(dot(&x, &ax) > 0.0) {
            return Err(Error::InvalidProblem(
                "A is not positive definite: found x with x'Ax <= 0".into(),
            ));
        }
    }
    Ok(())
}

/// `grad J(x) = Ax - b`.
pub fn gradient(problem: &QpProblem, x: &[f64]) -> Result<Vec<f64>> {
    check_len(x, problem.n(), "gradient: x length")?;
    let mut g = problem.a.apply(x)?;
    g.iter_mut().zip(&problem.b).for_each(|(gi, bi)| *gi -= bi);
    Ok(g)
}

/// `J(x) = 1/2 x'Ax - b'x`.
pub fn objective(problem: &QpProblem, x: &[f64]) -> Result<f64> {
    check_len(x, problem.n(), "objective: x length")?;
    let ax = problem.a.apply(x)?;
    Ok(0.5 * dot(x, &ax) - dot(&problem.b, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Symmetry;

    fn unit_row() -> SparseOperator {
        SparseOperator::from_rows(&[vec![1.0, 0.0]], Symmetry::General).unwrap()
    }

    #[test]
    fn gradient_of_half_norm_squared() {
        let p =
            QpProblem::homogeneous(SparseOperator::identity(2), vec![0.0; 2], unit_row()).unwrap();
        assert_eq!(gradient(&p, &[3.0, -1.0]).unwrap(), vec![3.0, -1.0]);
    }

    #[test]
    fn objective_trivial_values() {
        let p =
            QpProblem::homogeneous(SparseOperator::identity(2), vec![0.0; 2], unit_row()).unwrap();
        assert_eq!(objective(&p, &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(objective(&p, &[3.0, 4.0]).unwrap(), 12.5);
    }

    #[test]
    fn gradient_vanishes_at_unconstrained_stationary_point() {
        let a = SparseOperator::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]], Symmetry::Symmetric)
            .unwrap();
        // x = (1, 1) => b = A x = (3, 4)
        let p = QpProblem::homogeneous(a, vec![3.0, 4.0], unit_row()).unwrap();
        assert_eq!(gradient(&p, &[1.0, 1.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn square_constraint_rejected() {
        let r = QpProblem::homogeneous(
            SparseOperator::identity(2),
            vec![1.0, 1.0],
            SparseOperator::identity(2),
        );
        assert!(matches!(r, Err(Error::InvalidProblem(_))));
    }

    #[test]
    fn rank_deficient_constraint_rejected() {
        let c = SparseOperator::from_rows(
            &[vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]],
            Symmetry::General,
        )
        .unwrap();
        let r = QpProblem::homogeneous(SparseOperator::identity(3), vec![0.0; 3], c);
        assert!(matches!(r, Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn indefinite_a_rejected() {
        let a = SparseOperator::diagonal(&[1.0, -1.0]);
        assert!(QpProblem::homogeneous(a, vec![0.0; 2], unit_row()).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let p =
            QpProblem::homogeneous(SparseOperator::identity(2), vec![0.0; 2], unit_row()).unwrap();
        assert!(gradient(&p, &[1.0]).is_err());
        assert!(objective(&p, &[1.0, 2.0, 3.0]).is_err());
    }
}
