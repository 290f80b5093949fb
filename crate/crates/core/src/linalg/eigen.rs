use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::cg::{conjugate_gradient_with, CgOptions};
use crate::linalg::dense::{symmetric_eigen, DenseMatrix};
use crate::linalg::operator::{LinearOperator, Projector};
use crate::linalg::vector::{axpy, dot, norm2, scale};

/// Options for [`smallest_generalized_eigenpair`].
#[derive(Clone, Copy)]
pub struct EigenOptions<'a> {
    /// Required residual `|S q - lambda M q| <= tol |q|`.
    pub tol: f64,
    pub max_iter: usize,
    /// Number of vectors iterated together.
    pub block: usize,
    /// Relative tolerance of the inner CG solves with `S`.
    pub solve_tol: f64,
    /// Euclidean-orthogonal projector used inside the inner CG; needed when
    /// `S` is singular and its kernel must be kept out of the iterates.
    pub solve_projector: Option<Projector<'a>>,
    /// Projector onto the admissible subspace, applied to every iterate.
    pub subspace_projector: Option<Projector<'a>>,
}

impl Default for EigenOptions<'_> {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-8,
            max_iter: 500,
            block: 4,
            solve_tol: 1e-13,
            solve_projector: None,
            subspace_projector: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GeneralizedEigenpair {
    pub value: f64,
    /// Normalized so that `q^T M q = 1`.
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Smallest eigenpair of `S q = lambda M q` on the projected subspace, by
/// block inverse iteration (shift 0) with Rayleigh-Ritz extraction in the
/// `M` inner product.
pub fn smallest_generalized_eigenpair(
    s: &dyn LinearOperator,
    m: &dyn LinearOperator,
    opts: &EigenOptions<'_>,
) -> Result<GeneralizedEigenpair> {
    let n = s.nrows();
    if s.ncols() != n || m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "generalized eigenproblem operators",
            expected: n,
            got: m.nrows(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("empty eigenproblem".into()));
    }
    let project = |v: &mut [f64]| {
        if let Some(p) = opts.subspace_projector {
            p(v)
        }
    };

    let block = opts.block.clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_e16e);
    let mut x: Vec<Vec<f64>> = (0..block)
        .map(|_| {
            let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            project(&mut v);
            v
        })
        .collect();
    x = m_orthonormalize(x, m)?;
    let mut best = f64::INFINITY;

    for iter in 0..opts.max_iter {
        // Rayleigh-Ritz on the current block
        let (values, ritz) = rayleigh_ritz(&x, s);
        let q = &ritz[0];
        let lambda = values[0];
        let sq = s.apply_vec(q);
        let mq = m.apply_vec(q);
        let mut r = sq;
        axpy(-lambda, &mq, &mut r);
        let residual = norm2(&r);
        let qnorm = norm2(q);
        best = best.min(residual / qnorm);
        if residual <= opts.tol * qnorm {
            return Ok(GeneralizedEigenpair {
                value: lambda,
                vector: q.clone(),
                residual,
                iterations: iter,
            });
        }

        // inverse iteration step on every Ritz vector
        let mut next = Vec::with_capacity(ritz.len());
        for v in &ritz {
            let rhs = m.apply_vec(v);
            let (mut y, rep) = conjugate_gradient_with(
                s,
                &rhs,
                &CgOptions {
                    tol: opts.solve_tol,
                    max_iter: 20 * n,
                    projector: opts.solve_projector,
                },
            )?;
            if let Some(reason) = rep.breakdown_reason {
                return Err(Error::Breakdown {
                    solver: "inverse iteration inner solve",
                    reason,
                });
            }
            project(&mut y);
            next.push(y);
        }
        x = m_orthonormalize(next, m)?;
    }
    Err(Error::NotConverged {
        solver: "inverse iteration",
        iterations: opts.max_iter,
        residual: best,
    })
}

/// Gram-Schmidt (twice) in the `M` inner product; nearly dependent vectors are
/// dropped.
fn m_orthonormalize(vs: Vec<Vec<f64>>, m: &dyn LinearOperator) -> Result<Vec<Vec<f64>>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut mbasis: Vec<Vec<f64>> = Vec::new();
    for mut v in vs {
        let mv0 = m.apply_vec(&v);
        let norm0 = dot(&v, &mv0);
        if !(norm0 > 0.0) {
            if norm0 < 0.0 || (basis.is_empty() && norm2(&v) > 0.0) {
                return Err(Error::NotPositiveDefinite {
                    pivot: basis.len(),
                    value: norm0,
                });
            }
            continue;
        }
        for _ in 0..2 {
            for (b, mb) in basis.iter().zip(&mbasis) {
                let c = dot(&v, mb);
                axpy(-c, b, &mut v);
            }
        }
        let mv = m.apply_vec(&v);
        let nv = dot(&v, &mv);
        if !(nv > 1e-20 * norm0) {
            continue;
        }
        let inv = 1.0 / nv.sqrt();
        scale(inv, &mut v);
        let mut mv = mv;
        scale(inv, &mut mv);
        basis.push(v);
        mbasis.push(mv);
    }
    if basis.is_empty() {
        return Err(Error::Breakdown {
            solver: "inverse iteration",
            reason: "iterates collapsed: admissible subspace is trivial".into(),
        });
    }
    Ok(basis)
}

/// Ritz values (ascending) and vectors of `S` on an `M`-orthonormal basis.
fn rayleigh_ritz(basis: &[Vec<f64>], s: &dyn LinearOperator) -> (Vec<f64>, Vec<Vec<f64>>) {
    let k = basis.len();
    let sb: Vec<Vec<f64>> = basis.iter().map(|v| s.apply_vec(v)).collect();
    let mut h = DenseMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..=i {
            let v = 0.5 * (dot(&basis[i], &sb[j]) + dot(&basis[j], &sb[i]));
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    let (values, w) = symmetric_eigen(&h);
    let n = basis[0].len();
    let vectors = (0..k)
        .map(|c| {
            let mut v = vec![0.0; n];
            for (i, b) in basis.iter().enumerate() {
                axpy(w[(i, c)], b, &mut v);
            }
            v
        })
        .collect();
    (values, vectors)
}
