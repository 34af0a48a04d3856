use crate::error::{Error, Result};
use crate::graph::Graph;

/// Row-stochastic `N x k` matrix of soft vertex-to-terminal associations.
///
/// Terminal rows are pinned to the matching unit vector and never change.
#[derive(Clone, Debug, PartialEq)]
pub struct AssociationMatrix {
    n: usize,
    k: usize,
    values: Vec<f64>,
    pinned: Vec<Option<usize>>,
}

impl AssociationMatrix {
    /// Uniform `1/k` rows for free vertices, one-hot rows for terminals.
    pub fn uniform(g: &Graph) -> Self {
        let (n, k) = (g.n_vertices(), g.k());
        let pinned: Vec<Option<usize>> = (0..n).map(|v| g.terminal_label(v)).collect();
        let mut values = vec![1.0 / k as f64; n * k];
        for (v, label) in pinned.iter().enumerate() {
            if let Some(j) = *label {
                let row = &mut values[v * k..(v + 1) * k];
                row.fill(0.0);
                row[j] = 1.0;
            }
        }
        AssociationMatrix {
            n,
            k,
            values,
            pinned,
        }
    }

    /// Validates user-supplied rows: entries in `[0, 1]`, rows summing to one
    /// within `1e-9`, terminal rows exactly one-hot.
    pub fn from_rows(g: &Graph, rows: &[Vec<f64>]) -> Result<Self> {
        let (n, k) = (g.n_vertices(), g.k());
        if rows.len() != n {
            return Err(Error::Dimension(format!("{} rows for {n} vertices", rows.len())));
        }
        let mut out = AssociationMatrix::uniform(g);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::Dimension(format!("row {i} has {} entries, k = {k}", row.len())));
            }
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::Parameter(format!("row {i} has entries outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Parameter(format!("row {i} sums to {sum}")));
            }
            if let Some(j) = out.pinned[i] {
                if row[j] != 1.0 {
                    return Err(Error::Parameter(format!(
                        "terminal row {i} must be the unit vector e_{j}"
                    )));
                }
            }
            out.values[i * k..(i + 1) * k].copy_from_slice(row);
        }
        Ok(out)
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.k + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.k..(i + 1) * self.k]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn pinned_label(&self, i: usize) -> Option<usize> {
        self.pinned[i]
    }

    pub fn is_pinned(&self, i: usize) -> bool {
        self.pinned[i].is_some()
    }

    /// `p(A_j) = sum_i p(j|i) / N`.
    pub fn partition_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.k];
        for row in self.values.chunks(self.k) {
            for (acc, p) in w.iter_mut().zip(row) {
                *acc += p;
            }
        }
        w.iter_mut().for_each(|x| *x /= self.n as f64);
        w
    }

    /// Largest absolute entry difference to `other`.
    pub fn max_abs_diff(&self, other: &AssociationMatrix) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.k).map(<[f64]>::to_vec).collect()
    }
}

/// Starting point of every anneal: uniform free rows, pinned terminal rows.
pub fn init_associations(g: &Graph) -> AssociationMatrix {
    AssociationMatrix::uniform(g)
}
