//! Timing helpers for the solver's scaling behavior.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::baselines::random_graph_with_edges;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mep::{anneal, gibbs_sweep_into, init_associations, AnnealConfig};

/// Per-sweep wall time on `g` at inverse temperature `beta`: the minimum over
/// `repeats` batches of the mean of `sweeps` serial sweeps.
pub fn time_sweep(g: &Graph, cfg: &AnnealConfig, beta: f64, sweeps: usize, repeats: usize) -> Result<Duration> {
    if sweeps == 0 || repeats == 0 {
        return Err(Error::Parameter("sweeps and repeats must be positive".into()));
    }
    let (w, _) = g.regularized_weights(cfg.lambda)?;
    let mut p = init_associations(g);
    let mut next = p.clone();
    let mut best = Duration::MAX;
    for _ in 0..repeats {
        let start = Instant::now();
        for _ in 0..sweeps {
            gibbs_sweep_into(&p, &w, beta, &mut next, false)?;
            std::mem::swap(&mut p, &mut next);
        }
        best = best.min(start.elapsed() / sweeps as u32);
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub n: usize,
    pub edges: usize,
    pub k: usize,
    pub anneal_time: Duration,
    pub total_sweeps: usize,
    pub per_sweep: Duration,
    pub cut_value: f64,
}

impl ScalingRow {
    /// `N |E| k`, the work model for one full anneal.
    pub fn work(&self) -> f64 {
        self.n as f64 * self.edges as f64 * self.k as f64
    }
}

/// One random unit-weight instance per size with `density * N (N - 1) / 2`
/// edges; each is annealed once and its sweeps timed separately.
pub fn scaling_rows<R: Rng + ?Sized>(
    sizes: &[usize],
    k: usize,
    density: f64,
    cfg: &AnnealConfig,
    rng: &mut R,
) -> Result<Vec<ScalingRow>> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::Parameter(format!("density must be in (0, 1], got {density}")));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let max_edges = n * n.saturating_sub(1) / 2;
        let m = ((density * max_edges as f64).round() as usize).max(1).min(max_edges);
        let g = random_graph_with_edges(n, k, m, rng)?;
        let start = Instant::now();
        let trace = anneal(&g, cfg)?;
        let anneal_time = start.elapsed();
        let per_sweep = time_sweep(&g, cfg, cfg.beta_max, 5, 3)?;
        rows.push(ScalingRow {
            n,
            edges: m,
            k,
            anneal_time,
            total_sweeps: trace.sweeps,
            per_sweep,
            cut_value: trace.partition.cut_value,
        });
    }
    Ok(rows)
}

/// Header `N,edges,k,anneal_s,sweeps,sweep_s,work,cut`.
pub fn write_scaling_csv<W: Write>(rows: &[ScalingRow], out: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(["N", "edges", "k", "anneal_s", "sweeps", "sweep_s", "work", "cut"])?;
    for r in rows {
        csv.write_record([
            r.n.to_string(),
            r.edges.to_string(),
            r.k.to_string(),
            r.anneal_time.as_secs_f64().to_string(),
            r.total_sweeps.to_string(),
            r.per_sweep.as_secs_f64().to_string(),
            r.work().to_string(),
            r.cut_value.to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}
