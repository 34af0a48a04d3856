use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Graph, LambdaMode, Partition};
use crate::matrix::SparseWeights;
use crate::mep::{cut_cost, entropy, gibbs_sweep_into, init_associations, AssociationMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct AnnealConfig {
    pub beta_min: f64,
    pub beta_max: f64,
    /// Geometric growth rate of beta. `None` means `(beta_max / beta_min)^(1/10)`.
    pub gamma: Option<f64>,
    /// Inner loop stops once no entry moves by more than this.
    pub inner_tol: f64,
    pub max_inner_iters: usize,
    pub lambda: LambdaMode,
    pub tie_tol: f64,
    /// Allow row-parallel sweeps on large instances. Results do not depend on it.
    pub parallel: bool,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            beta_min: 0.01,
            beta_max: 40.0,
            gamma: None,
            inner_tol: 1e-6,
            max_inner_iters: 500,
            lambda: LambdaMode::default(),
            tie_tol: 1e-3,
            parallel: true,
        }
    }
}

impl AnnealConfig {
    pub fn growth_rate(&self) -> f64 {
        self.gamma
            .unwrap_or_else(|| (self.beta_max / self.beta_min).powf(0.1))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta_min > 0.0 && self.beta_min.is_finite()) {
            return Err(Error::Parameter(format!("beta_min must be positive, got {}", self.beta_min)));
        }
        if !(self.beta_max > self.beta_min && self.beta_max.is_finite()) {
            return Err(Error::Parameter(format!(
                "beta_max ({}) must exceed beta_min ({})",
                self.beta_max, self.beta_min
            )));
        }
        if !(self.growth_rate() > 1.0 && self.growth_rate().is_finite()) {
            return Err(Error::Parameter(format!("gamma must be > 1, got {}", self.growth_rate())));
        }
        if !(self.inner_tol > 0.0) {
            return Err(Error::Parameter("inner tolerance must be positive".into()));
        }
        if self.max_inner_iters == 0 {
            return Err(Error::Parameter("max_inner_iters must be at least 1".into()));
        }
        if !(self.tie_tol >= 0.0) {
            return Err(Error::Parameter("tie tolerance must be nonnegative".into()));
        }
        Ok(())
    }

    /// Every beta visited by the outer loop, ending exactly at `beta_max`.
    pub fn schedule(&self) -> Vec<f64> {
        let gamma = self.growth_rate();
        let mut betas = vec![self.beta_min];
        let mut beta = self.beta_min;
        while beta < self.beta_max {
            beta *= gamma;
            // absorb rounding so the final step lands on beta_max itself
            if beta >= self.beta_max * (1.0 - 1e-9) {
                beta = self.beta_max;
            }
            betas.push(beta);
        }
        betas
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry {
    pub beta: f64,
    pub free_energy: f64,
    pub cut_cost: f64,
    pub entropy: f64,
    pub partition_weights: Vec<f64>,
    pub inner_iters: usize,
    pub converged: bool,
}

/// Vertex id to the set of labels within the tie tolerance of its row max.
pub type TieReport = BTreeMap<usize, Vec<usize>>;

#[derive(Clone, Debug)]
pub struct SolveTrace {
    pub entries: Vec<TraceEntry>,
    pub lambda: f64,
    pub associations: AssociationMatrix,
    pub partition: Partition,
    pub ties: TieReport,
    pub warnings: Vec<String>,
    /// Total Gibbs sweeps over all outer steps.
    pub sweeps: usize,
}

/// Deterministic annealing from uniform associations up to `beta_max`,
/// followed by hardening.
pub fn anneal(g: &Graph, cfg: &AnnealConfig) -> Result<SolveTrace> {
    cfg.validate()?;
    let (w, lambda) = g.regularized_weights(cfg.lambda)?;
    let mut p = init_associations(g);
    let mut scratch = p.clone();
    let mut entries = Vec::new();
    let mut warnings = Vec::new();
    let mut sweeps = 0;

    for beta in cfg.schedule() {
        let (iters, converged) = relax(&mut p, &mut scratch, &w, beta, cfg)?;
        sweeps += iters;
        if !converged {
            warnings.push(format!(
                "inner loop at beta = {beta} stopped after {iters} sweeps without reaching tolerance {}",
                cfg.inner_tol
            ));
        }
        let d = cut_cost(&p, &w);
        let h = entropy(&p);
        entries.push(TraceEntry {
            beta,
            free_energy: d - h / beta,
            cut_cost: d,
            entropy: h,
            partition_weights: p.partition_weights(),
            inner_iters: iters,
            converged,
        });
    }

    let hardened = harden(&p, cfg.tie_tol);
    let partition = Partition::new(g, hardened.assignment)?;
    Ok(SolveTrace {
        entries,
        lambda,
        associations: p,
        partition,
        ties: hardened.ties,
        warnings,
        sweeps,
    })
}

/// Sweeps `p` at fixed `beta` until the largest entry change drops to the
/// tolerance or the iteration cap is hit. Returns `(sweeps, converged)`.
pub fn relax(
    p: &mut AssociationMatrix,
    scratch: &mut AssociationMatrix,
    w: &SparseWeights,
    beta: f64,
    cfg: &AnnealConfig,
) -> Result<(usize, bool)> {
    for iter in 1..=cfg.max_inner_iters {
        let change = gibbs_sweep_into(p, w, beta, scratch, cfg.parallel)?;
        std::mem::swap(p, scratch);
        if change <= cfg.inner_tol {
            return Ok((iter, true));
        }
    }
    Ok((cfg.max_inner_iters, false))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hardening {
    pub assignment: Vec<usize>,
    pub ties: TieReport,
}

/// Row-wise argmax with lowest-index tie-break. Rows with more than one entry
/// within `tie_tol` of the maximum are reported with all admissible labels.
pub fn harden(p: &AssociationMatrix, tie_tol: f64) -> Hardening {
    let mut assignment = Vec::with_capacity(p.n_vertices());
    let mut ties = TieReport::new();
    for i in 0..p.n_vertices() {
        let row = p.row(i);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let admissible: Vec<usize> = (0..row.len()).filter(|&j| row[j] >= max - tie_tol).collect();
        let best = (0..row.len())
            .find(|&j| row[j] == max)
            .expect("rows are non-empty");
        assignment.push(best);
        if admissible.len() > 1 {
            ties.insert(i, admissible);
        }
    }
    Hardening { assignment, ties }
}

/// Betas of outer steps whose partition weights moved by more than
/// `threshold` (in any component) relative to the previous step.
pub fn detect_phase_transitions(entries: &[TraceEntry], threshold: f64) -> Vec<f64> {
    entries
        .windows(2)
        .filter(|pair| {
            pair[0]
                .partition_weights
                .iter()
                .zip(&pair[1].partition_weights)
                .any(|(a, b)| (a - b).abs() > threshold)
        })
        .map(|pair| pair[1].beta)
        .collect()
}
