//! Free energy, relaxed cut cost, entropy and the auxiliary function used to
//! prove that every sweep lowers the free energy.

use crate::error::Result;
use crate::matrix::SparseWeights;
use crate::mep::{gibbs_log_update, AssociationMatrix};

/// `x ln x` with the continuous extension `0 ln 0 = 0`.
#[inline]
pub(crate) fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// `1 - <p_l, p_m>`, the probability that `l` and `m` land apart.
#[inline]
fn separation(p: &AssociationMatrix, l: usize, m: usize) -> f64 {
    1.0 - p.row(l).iter().zip(p.row(m)).map(|(a, b)| a * b).sum::<f64>()
}

/// `D = 1/2 sum_{l,m} w_lm (1 - sum_j p(j|l) p(j|m))`.
pub fn cut_cost(p: &AssociationMatrix, w: &SparseWeights) -> f64 {
    let mut total = 0.0;
    for l in 0..p.n_vertices() {
        for (m, wv) in w.neighbors(l) {
            total += wv * separation(p, l, m);
        }
        total += w.diag(l) * separation(p, l, l);
    }
    0.5 * total
}

/// `H = -sum p ln p`.
pub fn entropy(p: &AssociationMatrix) -> f64 {
    -p.values().iter().map(|&x| xlogx(x)).sum::<f64>()
}

/// `L = D - H / beta`.
pub fn free_energy(p: &AssociationMatrix, w: &SparseWeights, beta: f64) -> f64 {
    cut_cost(p, w) - entropy(p) / beta
}

/// Auxiliary function with `gamma_fn(P, P) == free_energy(P)`:
///
/// `1/2 sum w_lm + 1/2 sum_{l,m,j} (eta_lj - 2 zeta_lj) eta_mj w_lm + 1/beta sum zeta ln zeta`.
///
/// For fixed `eta` it is minimised over `zeta` by the Gibbs update of `eta`.
pub fn gamma_fn(zeta: &AssociationMatrix, eta: &AssociationMatrix, w: &SparseWeights, beta: f64) -> f64 {
    let k = eta.k();
    let mut quad = 0.0;
    for l in 0..eta.n_vertices() {
        let mut field = vec![0.0; k];
        for (m, wv) in w.neighbors(l) {
            for (f, e) in field.iter_mut().zip(eta.row(m)) {
                *f += wv * e;
            }
        }
        for (f, e) in field.iter_mut().zip(eta.row(l)) {
            *f += w.diag(l) * e;
        }
        for j in 0..k {
            quad += (eta.get(l, j) - 2.0 * zeta.get(l, j)) * field[j];
        }
    }
    let neg_entropy: f64 = zeta.values().iter().map(|&x| xlogx(x)).sum();
    0.5 * w.total() + 0.5 * quad + neg_entropy / beta
}

/// `sum_l KL(P_l || P+_l)` where `P+` is the Gibbs update of `P`.
///
/// Uses the log-domain update so rows whose updated probabilities underflow
/// still contribute their exact divergence.
pub fn kl_to_update(p: &AssociationMatrix, w: &SparseWeights, beta: f64) -> Result<f64> {
    let log_next = gibbs_log_update(p, w, beta)?;
    let mut total = 0.0;
    for (i, (&x, &lq)) in p.values().iter().zip(&log_next).enumerate() {
        if p.is_pinned(i / p.k()) || x <= 0.0 {
            continue;
        }
        total += x * (x.ln() - lq);
    }
    Ok(total)
}
