use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::SparseWeights;
use crate::mep::AssociationMatrix;

/// Below this many matrix entries a sweep runs on the calling thread.
const PARALLEL_MIN_ENTRIES: usize = 1 << 14;

/// Exponents below this are flushed to zero; `exp(-700)` is still a normal
/// number after division by any realistic `k`.
const UNDERFLOW_EXPONENT: f64 = -700.0;

/// One batch Gibbs update: every free row is recomputed from the incoming `p`.
///
/// `w` should already carry the diagonal shift.
pub fn gibbs_sweep(p: &AssociationMatrix, w: &SparseWeights, beta: f64) -> Result<AssociationMatrix> {
    let mut out = p.clone();
    gibbs_sweep_into(p, w, beta, &mut out, true)?;
    Ok(out)
}

/// Writes the update of `p` into `out` and returns the largest entry change.
///
/// Each row's field is accumulated in CSR order followed by the diagonal term,
/// so the result is bit-identical whether rows run serially or in parallel.
pub fn gibbs_sweep_into(
    p: &AssociationMatrix,
    w: &SparseWeights,
    beta: f64,
    out: &mut AssociationMatrix,
    parallel: bool,
) -> Result<f64> {
    check_shapes(p, w)?;
    if out.n_vertices() != p.n_vertices() || out.k() != p.k() {
        return Err(Error::Dimension("output matrix shape differs from input".into()));
    }
    let k = p.k();
    let src = p.values();
    let update = |i: usize, row: &mut [f64]| -> std::result::Result<f64, usize> {
        if p.is_pinned(i) {
            row.copy_from_slice(p.row(i));
            return Ok(0.0);
        }
        log_update_row(i, src, k, w, beta, row);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        for x in row.iter_mut() {
            let d = *x - max;
            // exact zero instead of a subnormal, which would slow every later sweep
            *x = if d < UNDERFLOW_EXPONENT { 0.0 } else { d.exp() };
            z += *x;
        }
        let mut change: f64 = 0.0;
        for (j, x) in row.iter_mut().enumerate() {
            *x /= z;
            if !x.is_finite() {
                return Err(i);
            }
            change = change.max((*x - src[i * k + j]).abs());
        }
        Ok(change)
    };

    let dst = out.values_mut();
    let results: Vec<std::result::Result<f64, usize>> =
        if parallel && dst.len() >= PARALLEL_MIN_ENTRIES {
            dst.par_chunks_mut(k)
                .enumerate()
                .map(|(i, row)| update(i, row))
                .collect()
        } else {
            dst.chunks_mut(k)
                .enumerate()
                .map(|(i, row)| update(i, row))
                .collect()
        };
    let mut change: f64 = 0.0;
    for r in results {
        match r {
            Ok(c) => change = change.max(c),
            Err(row) => return Err(Error::Numeric { row }),
        }
    }
    Ok(change)
}

/// `log p+(j|i)` for every free row (terminal rows get `log` of their one-hot
/// entries, i.e. `0` and `-inf`). Computed in the log domain so it stays exact
/// where the probabilities themselves underflow.
pub fn gibbs_log_update(p: &AssociationMatrix, w: &SparseWeights, beta: f64) -> Result<Vec<f64>> {
    check_shapes(p, w)?;
    let k = p.k();
    let mut out = vec![0.0; p.values().len()];
    for (i, row) in out.chunks_mut(k).enumerate() {
        if p.is_pinned(i) {
            for (x, &v) in row.iter_mut().zip(p.row(i)) {
                *x = v.ln();
            }
            continue;
        }
        log_update_row(i, p.values(), k, w, beta, row);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + row.iter().map(|x| (x - max).exp()).sum::<f64>().ln();
        row.iter_mut().for_each(|x| *x -= lse);
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric { row: i });
        }
    }
    Ok(out)
}

/// Unnormalized exponents `beta * sum_m p(j|m) w_im` for row `i`.
#[inline]
fn log_update_row(i: usize, p: &[f64], k: usize, w: &SparseWeights, beta: f64, row: &mut [f64]) {
    row.fill(0.0);
    let (cols, vals) = w.row_entries(i);
    let slice = |m: usize| &p[m * k..(m + 1) * k];
    // four neighbors per pass keeps the per-label accumulation chains short
    let mut c4 = cols.chunks_exact(4);
    let mut v4 = vals.chunks_exact(4);
    for (c, v) in (&mut c4).zip(&mut v4) {
        let (p0, p1, p2, p3) = (slice(c[0]), slice(c[1]), slice(c[2]), slice(c[3]));
        for ((((acc, a), b), c), d) in row.iter_mut().zip(p0).zip(p1).zip(p2).zip(p3) {
            *acc += (v[0] * a + v[1] * b) + (v[2] * c + v[3] * d);
        }
    }
    for (&m, &wv) in c4.remainder().iter().zip(v4.remainder()) {
        for (acc, &pj) in row.iter_mut().zip(slice(m)) {
            *acc += wv * pj;
        }
    }
    let d = w.diag(i);
    let pi = &p[i * k..(i + 1) * k];
    for (acc, &pj) in row.iter_mut().zip(pi) {
        *acc += d * pj;
    }
    row.iter_mut().for_each(|x| *x *= beta);
}

fn check_shapes(p: &AssociationMatrix, w: &SparseWeights) -> Result<()> {
    if w.n() != p.n_vertices() {
        return Err(Error::Dimension(format!(
            "weights are {0}x{0} but associations have {1} rows",
            w.n(),
            p.n_vertices()
        )));
    }
    Ok(())
}
