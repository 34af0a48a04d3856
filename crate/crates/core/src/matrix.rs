//! Row-major dense matrix and a symmetric sparse weight operator.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "row {bad} has {} entries, expected {cols}",
                rows[bad].len()
            )));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols.max(1)).map(<[f64]>::to_vec).collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Symmetric weight operator in CSR form with the diagonal held separately.
///
/// Off-diagonal entries are stored for both `(l, m)` and `(m, l)`, sorted by
/// column within each row, so row dot products always run in the same order.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseWeights {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    diag: Vec<f64>,
}

impl SparseWeights {
    /// Builds the operator from `(l, m, w)` triplets. Off-diagonal triplets are
    /// accumulated at both `(l, m)` and `(m, l)`; `l == m` goes to the diagonal.
    pub fn from_undirected_triplets(
        n: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Self {
        let mut diag = vec![0.0; n];
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (l, m, w) in triplets {
            if l == m {
                diag[l] += w;
            } else {
                entries.push((l, m, w));
                entries.push((m, l, w));
            }
        }
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (l, m, w) in entries {
            if last == Some((l, m)) {
                *vals.last_mut().expect("merged entry follows a pushed one") += w;
                continue;
            }
            last = Some((l, m));
            cols.push(m);
            vals.push(w);
            row_ptr[l + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseWeights {
            n,
            row_ptr,
            cols,
            vals,
            diag,
        }
    }

    /// Sparse view of a square matrix. Zero entries are skipped. The matrix is
    /// expected to be symmetric; only its upper triangle is read.
    pub fn from_dense(w: &Matrix) -> Result<Self> {
        if !w.is_square() {
            return Err(Error::Dimension(format!(
                "weight matrix is {}x{}",
                w.rows(),
                w.cols()
            )));
        }
        let n = w.rows();
        let mut triplets = Vec::new();
        for l in 0..n {
            for m in l..n {
                let v = w[(l, m)];
                if v != 0.0 {
                    triplets.push((l, m, v));
                }
            }
        }
        Ok(SparseWeights::from_undirected_triplets(n, triplets))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored off-diagonal entries (each undirected pair counts twice).
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()]
            .iter()
            .copied()
            .zip(self.vals[range].iter().copied())
    }

    /// Column indices and values of the off-diagonal entries of row `i`.
    pub(crate) fn row_entries(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[range.clone()], &self.vals[range])
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.diag[i]
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn off_diagonal_sum(&self) -> f64 {
        self.vals.iter().sum()
    }

    /// Sum of every entry, diagonal included.
    pub fn total(&self) -> f64 {
        self.off_diagonal_sum() + self.diag.iter().sum::<f64>()
    }

    pub fn with_added_diagonal(&self, lambda: f64) -> SparseWeights {
        let mut out = self.clone();
        out.diag.iter_mut().for_each(|d| *d += lambda);
        out
    }

    pub fn scaled(&self, c: f64) -> SparseWeights {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= c);
        out.diag.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// Storage slot of the off-diagonal entry `(l, m)`, if present.
    pub(crate) fn slot(&self, l: usize, m: usize) -> Option<usize> {
        let range = self.row_ptr[l]..self.row_ptr[l + 1];
        self.cols[range.clone()].binary_search(&m).ok().map(|i| range.start + i)
    }

    pub(crate) fn set_slot(&mut self, slot: usize, value: f64) {
        self.vals[slot] = value;
    }

    pub(crate) fn fill_diagonal(&mut self, value: f64) {
        self.diag.fill(value);
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.n);
        for i in 0..self.n {
            m[(i, i)] = self.diag[i];
            for (j, w) in self.neighbors(i) {
                m[(i, j)] = w;
            }
        }
        m
    }

    /// Upper bound on the spectral radius of the off-diagonal part restricted
    /// to the rows/columns where `mask` is true.
    ///
    /// Uses the Collatz-Wielandt bound `max_i (Bx)_i / x_i`, valid for any
    /// nonnegative `B` and positive `x`, tightened by power iteration on
    /// `B + I` (the shift keeps bipartite blocks from oscillating).
    pub fn perron_upper_bound(&self, mask: &[bool]) -> f64 {
        let mut x = vec![1.0; self.n];
        self.perron_upper_bound_from(mask, &mut x)
    }

    /// [`Self::perron_upper_bound`] starting the power iteration from `x`
    /// (entries must be positive on the mask). `x` is left at the last
    /// iterate, so a slowly changing operator converges in a step or two.
    pub fn perron_upper_bound_from(&self, mask: &[bool], x: &mut [f64]) -> f64 {
        let idx: Vec<usize> = (0..self.n).filter(|&i| mask[i]).collect();
        if idx.is_empty() {
            return 0.0;
        }
        let mut y = vec![0.0; self.n];
        let mut best = f64::INFINITY;
        for _ in 0..200 {
            let mut upper = f64::NEG_INFINITY;
            let mut lower = f64::INFINITY;
            for &i in &idx {
                let mut acc = x[i];
                for (j, w) in self.neighbors(i) {
                    if mask[j] {
                        acc += w.abs() * x[j];
                    }
                }
                y[i] = acc;
                let ratio = acc / x[i];
                upper = upper.max(ratio);
                lower = lower.min(ratio);
            }
            best = best.min(upper - 1.0);
            if upper - lower <= 1e-6 * upper {
                break;
            }
            let scale = idx.iter().map(|&i| y[i]).fold(0.0, f64::max);
            for &i in &idx {
                // keep every component strictly positive
                x[i] = (y[i] / scale).max(1e-300);
            }
        }
        best.max(0.0)
    }
}
