use crate::error::{Error, Result};
use crate::linalg::operator::LinearOperator;
use crate::linalg::vector::{check_finite, check_len};

/// Whether an operator is declared symmetric.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric,
    General,
}

/// Row-compressed sparse matrix with sorted, unique column indices per row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    symmetry: Symmetry,
}

impl SparseOperator {
    /// Assemble from unordered `(row, col, value)` triples. Repeated pairs are
    /// summed. A `Symmetric` flag is verified exactly.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
        symmetry: Symmetry,
    ) -> Result<Self> {
        for (k, &(r, c, v)) in triplets.iter().enumerate() {
            if r >= nrows {
                return Err(Error::DimensionMismatch {
                    context: "triplet row index",
                    expected: nrows,
                    got: r,
                });
            }
            if c >= ncols {
                return Err(Error::DimensionMismatch {
                    context: "triplet column index",
                    expected: ncols,
                    got: c,
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    context: "triplet value",
                    index: k,
                });
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        // stable sort keeps duplicate summation order deterministic
        sorted.sort_by_key(|t| (t.0, t.1));

        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let op = SparseOperator {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
            symmetry,
        };
        if symmetry == Symmetry::Symmetric {
            op.verify_symmetric()?;
        }
        Ok(op)
    }

    pub fn identity(n: usize) -> Self {
        SparseOperator {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
            symmetry: Symmetry::Symmetric,
        }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        SparseOperator {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
            symmetry: Symmetry::Symmetric,
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseOperator {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
            symmetry: if nrows == ncols {
                Symmetry::Symmetric
            } else {
                Symmetry::General
            },
        }
    }

    /// Build from a row-major dense array, dropping exact zeros.
    pub fn from_dense(
        nrows: usize,
        ncols: usize,
        data: &[f64],
        symmetry: Symmetry,
    ) -> Result<Self> {
        check_len(data, nrows * ncols, "dense data")?;
        let triplets: Vec<_> = (0..nrows)
            .flat_map(|i| (0..ncols).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let v = data[i * ncols + j];
                (v != 0.0).then_some((i, j, v))
            })
            .collect();
        Self::from_triplets(nrows, ncols, &triplets, symmetry)
    }

    pub fn from_rows(rows: &[Vec<f64>], symmetry: Symmetry) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            check_len(r, ncols, "dense row")?;
            data.extend_from_slice(r);
        }
        Self::from_dense(nrows, ncols, &data, symmetry)
    }

    /// Re-flag as symmetric after verifying exact symmetry.
    pub fn to_symmetric(&self) -> Result<SparseOperator> {
        let mut op = self.clone();
        op.symmetry = Symmetry::Symmetric;
        op.verify_symmetric()?;
        Ok(op)
    }

    fn verify_symmetric(&self) -> Result<()> {
        if self.nrows != self.ncols {
            return Err(Error::DimensionMismatch {
                context: "symmetric operator must be square",
                expected: self.nrows,
                got: self.ncols,
            });
        }
        for (r, c, v) in self.iter() {
            if self.get(c, r) != v {
                return Err(Error::NotSymmetric { row: r, col: c });
            }
        }
        Ok(())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry == Symmetry::Symmetric
    }

    /// Stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
            (lo..hi).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn transpose(&self) -> SparseOperator {
        let triplets: Vec<_> = self.iter().map(|(r, c, v)| (c, r, v)).collect();
        // indices are already valid, assembly of a transpose cannot fail
        Self::from_triplets(self.ncols, self.nrows, &triplets, self.symmetry)
            .expect("transpose of a valid operator")
    }

    /// Returns `op * x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(x, self.ncols, "apply: operand length")?;
        check_finite(x, "apply operand")?;
        let mut y = vec![0.0; self.nrows];
        self.mul_into(x, &mut y);
        Ok(y)
    }

    /// Returns `op^T * y`.
    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(y, self.nrows, "apply_transpose: operand length")?;
        check_finite(y, "apply_transpose operand")?;
        let mut x = vec![0.0; self.ncols];
        self.mul_transpose_into(y, &mut x);
        Ok(x)
    }

    /// Unchecked `y = op * x`.
    pub fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate().take(self.nrows) {
            let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let mut acc = 0.0;
            for k in lo..hi {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yr = acc;
        }
    }

    /// Unchecked `x = op^T * y`.
    pub fn mul_transpose_into(&self, y: &[f64], x: &mut [f64]) {
        x.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..self.nrows {
            let yr = y[r];
            let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
            for k in lo..hi {
                x[self.col_idx[k]] += self.values[k] * yr;
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.nrows * self.ncols];
        for (r, c, v) in self.iter() {
            d[r * self.ncols + c] = v;
        }
        d
    }

    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .collect()
    }

    /// Keep the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> SparseOperator {
        let mut triplets = Vec::new();
        for (new_r, &r) in rows.iter().enumerate() {
            let (cols, vals) = self.row(r);
            triplets.extend(cols.iter().zip(vals).map(|(&c, &v)| (new_r, c, v)));
        }
        Self::from_triplets(rows.len(), self.ncols, &triplets, Symmetry::General)
            .expect("row selection of a valid operator")
    }

    /// Symmetric permutation `P A P^T` where row `i` of the result is row
    /// `perm[i]` of `self`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> SparseOperator {
        let mut inv = vec![0usize; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let triplets: Vec<_> = self.iter().map(|(r, c, v)| (inv[r], inv[c], v)).collect();
        Self::from_triplets(self.nrows, self.ncols, &triplets, self.symmetry)
            .expect("permutation of a valid operator")
    }

    /// Lower and upper bandwidths `(kl, ku)`.
    pub fn bandwidths(&self) -> (usize, usize) {
        self.iter().fold((0, 0), |(kl, ku), (r, c, _)| {
            if r > c {
                (kl.max(r - c), ku)
            } else {
                (kl, ku.max(c - r))
            }
        })
    }
}

impl LinearOperator for SparseOperator {
    fn nrows(&self) -> usize {
        self.nrows
    }

    fn ncols(&self) -> usize {
        self.ncols
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.mul_into(x, y)
    }
}
