use crate::error::{Error, Result};
use crate::linalg::sparse::SparseOperator;

/// Relative pivot threshold below which a factorization is declared singular.
const PIVOT_TOL: f64 = 1e-13;

/// Banded LU factorization with partial pivoting (`gbtrf`-style).
///
/// Row `i` of the working array holds columns `i - kl ..= i + kl + ku`; after
/// elimination the upper factor occupies columns `i ..= i + kl + ku`.
#[derive(Clone, Debug)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    ab: Vec<f64>,
    lower: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn factor(op: &SparseOperator) -> Result<Self> {
        let n = op.nrows();
        if op.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "band LU needs a square operator",
                expected: n,
                got: op.ncols(),
            });
        }
        let (kl, ku) = op.bandwidths();
        let width = 2 * kl + ku + 1;
        let mut ab = vec![0.0; n * width];
        for (r, c, v) in op.iter() {
            ab[r * width + (c + kl - r)] = v;
        }
        let scale = op.max_abs();
        let mut lu = BandLu {
            n,
            kl,
            ku,
            width,
            ab,
            lower: vec![0.0; n * kl],
            piv: vec![0; n],
        };
        lu.eliminate(scale)?;
        Ok(lu)
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> usize {
        r * self.width + (c + self.kl - r)
    }

    fn eliminate(&mut self, scale: f64) -> Result<()> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let tiny = PIVOT_TOL * scale.max(f64::MIN_POSITIVE);
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut p = k;
            let mut best = self.ab[self.at(k, k)].abs();
            for r in k + 1..=last_row {
                let v = self.ab[self.at(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if !(best > tiny) {
                return Err(Error::Singular {
                    pivot: k,
                    magnitude: best,
                });
            }
            self.piv[k] = p;
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (self.at(k, j), self.at(p, j));
                    self.ab.swap(a, b);
                }
            }
            let pivot = self.ab[self.at(k, k)];
            for r in k + 1..=last_row {
                let idx = self.at(r, k);
                let l = self.ab[idx] / pivot;
                self.ab[idx] = 0.0;
                self.lower[k * kl + (r - k - 1)] = l;
                if l == 0.0 {
                    continue;
                }
                let krow = k * self.width + kl - k;
                let rrow = r * self.width + kl - r;
                for j in k + 1..=last_col {
                    self.ab[rrow + j] -= l * self.ab[krow + j];
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            if xk != 0.0 {
                for r in k + 1..=(k + kl).min(n.saturating_sub(1)) {
                    x[r] -= self.lower[k * kl + (r - k - 1)] * xk;
                }
            }
        }
        for i in (0..n).rev() {
            let row = i * self.width + kl - i;
            let mut acc = x[i];
            for j in i + 1..=(i + kl + ku).min(n - 1) {
                acc -= self.ab[row + j] * x[j];
            }
            x[i] = acc / self.ab[row + i];
        }
    }
}
