//! Squared-weight free energy and the control law that makes it a Lyapunov
//! function for the edge-weight dynamics.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::mep::{xlogx, AssociationMatrix};

/// `phi_lm = 1 - sum_j p(j|l) p(j|m)`: probability that `l` and `m` are
/// separated. Symmetric with entries in `[0, 1]`.
pub fn phi_matrix(p: &AssociationMatrix) -> Matrix {
    let n = p.n_vertices();
    let mut phi = Matrix::zeros(n, n);
    for l in 0..n {
        for m in l..n {
            let v = separation(p, l, m);
            phi[(l, m)] = v;
            phi[(m, l)] = v;
        }
    }
    phi
}

pub(crate) fn separation(p: &AssociationMatrix, l: usize, m: usize) -> f64 {
    let overlap: f64 = p.row(l).iter().zip(p.row(m)).map(|(a, b)| a * b).sum();
    // rounding can push the overlap of two identical one-hot rows past 1
    (1.0 - overlap).clamp(0.0, 1.0)
}

/// `F = 1/2 sum w_lm^2 phi_lm + 1/beta sum p ln p + mu ||U||_F^2`.
pub fn energy(w: &Matrix, u: &Matrix, p: &AssociationMatrix, mu: f64, beta: f64) -> Result<f64> {
    let n = p.n_vertices();
    check_square(w, n, "W")?;
    check_square(u, n, "U")?;
    let phi = phi_matrix(p);
    let mut l1 = 0.0;
    for l in 0..n {
        for m in 0..n {
            l1 += w[(l, m)].powi(2) * phi[(l, m)];
        }
    }
    let neg_entropy: f64 = p.values().iter().map(|&x| xlogx(x)).sum();
    let effort: f64 = u.as_slice().iter().map(|x| x * x).sum();
    Ok(0.5 * l1 + neg_entropy / beta + mu * effort)
}

/// `alpha = 2 sum_{l,m} phi_lm w_lm wdot_lm`.
pub fn alpha(phi: &Matrix, w: &Matrix, wdot: &Matrix) -> Result<f64> {
    let n = phi.rows();
    check_square(phi, n, "Phi")?;
    check_square(w, n, "W")?;
    check_square(wdot, n, "Wdot")?;
    Ok(2.0
        * phi
            .as_slice()
            .iter()
            .zip(w.as_slice())
            .zip(wdot.as_slice())
            .map(|((f, a), b)| f * a * b)
            .sum::<f64>())
}

fn check_square(m: &Matrix, n: usize, name: &str) -> Result<()> {
    if m.rows() != n || m.cols() != n {
        return Err(Error::Dimension(format!(
            "{name} is {}x{}, expected {n}x{n}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ControlUpdate {
    pub udot: Vec<f64>,
    /// The scalar `g` in `udot = -g U`.
    pub gain: f64,
    /// `||U||` was below the floor while `alpha > 0`; the decrease of the
    /// energy is not guaranteed at this point.
    pub clamped: bool,
}

/// `udot = -[C0 + (alpha + sqrt(alpha^2 + x^2)) / x] U` with `x = 4 mu ||U||^2`.
///
/// `u` holds the entries of `U` in any flat layout. Below `x < eps` the gain
/// tends to `C0` when `alpha <= 0`; for `alpha > 0` it diverges, so `x` is
/// floored at `eps` and the update is flagged.
pub fn control_law(u: &[f64], alpha: f64, mu: f64, c0: f64, eps: f64) -> Result<ControlUpdate> {
    if !(mu > 0.0) {
        return Err(Error::Parameter(format!("mu must be positive, got {mu}")));
    }
    if !(c0 > 0.0) {
        return Err(Error::Parameter(format!("C0 must be positive, got {c0}")));
    }
    let norm2: f64 = u.iter().map(|x| x * x).sum();
    let x = 4.0 * mu * norm2;
    let (gain, clamped) = if x >= eps {
        (c0 + (alpha + alpha.hypot(x)) / x, false)
    } else if alpha <= 0.0 {
        // alpha + sqrt(alpha^2 + x^2) ~ x^2 / (2|alpha|) -> 0 faster than x
        (c0, false)
    } else {
        (c0 + (alpha + alpha.hypot(eps)) / eps, true)
    };
    Ok(ControlUpdate {
        udot: u.iter().map(|v| -gain * v).collect(),
        gain,
        clamped,
    })
}

/// Time derivative of the energy with the associations held fixed:
/// `1/2 alpha + 2 mu <U, Udot>`.
pub fn energy_rate(alpha: f64, u: &[f64], udot: &[f64], mu: f64) -> f64 {
    0.5 * alpha + 2.0 * mu * u.iter().zip(udot).map(|(a, b)| a * b).sum::<f64>()
}

/// The same rate after substituting [`control_law`]:
/// `-2 mu C0 ||U||^2 - 1/2 sqrt(alpha^2 + (4 mu ||U||^2)^2)`, never positive.
pub fn controlled_energy_rate(alpha: f64, norm_u2: f64, mu: f64, c0: f64) -> f64 {
    let x = 4.0 * mu * norm_u2;
    -2.0 * mu * c0 * norm_u2 - 0.5 * alpha.hypot(x)
}
