//! Instance generators: the adversarial pendant-cycle family, seeded random
//! graphs, and two small hand-built instances with known structure.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

/// Cycle `v_0 .. v_{k-1}` with unit edges and a pendant terminal `t_i`
/// hanging off every `v_i` with weight `pendant_weight`.
///
/// Vertex ids: cycle vertices are `0..k`, pendants `k..2k`; the terminals
/// are the pendants in order. For `pendant_weight` just below 2 the
/// isolating-cut heuristic cuts `k - 1` pendant edges while the optimum
/// cuts the `k` cycle edges.
pub fn gen_pendant_cycle(k: usize, pendant_weight: f64) -> Result<Graph> {
    if k < 3 {
        return Err(Error::Parameter(format!("pendant cycle needs k >= 3, got {k}")));
    }
    let mut edges: Vec<Edge> = (0..k).map(|i| Edge::new(i, (i + 1) % k, 1.0)).collect();
    edges.extend((0..k).map(|i| Edge::new(i, k + i, pendant_weight)));
    Graph::new(2 * k, edges, (k..2 * k).collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightDist {
    Unit,
    /// Integer weights drawn uniformly from `lo..=hi`.
    Integer(u32, u32),
    /// Real weights drawn uniformly from `[lo, hi)`.
    Uniform(f64, f64),
}

/// Parameters for Erdős–Rényi style random instances with random terminals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomGraphConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub edge_prob: f64,
    pub weights: WeightDist,
}

impl Default for RandomGraphConfig {
    fn default() -> Self {
        RandomGraphConfig {
            n_min: 5,
            n_max: 9,
            k_min: 2,
            k_max: 3,
            edge_prob: 0.35,
            weights: WeightDist::Unit,
        }
    }
}

/// Draws `k`, then `N >= k`, then each unordered pair independently with
/// `edge_prob` (listed once, lower id first), then `k` distinct terminals.
pub fn random_graph<R: Rng + ?Sized>(cfg: &RandomGraphConfig, rng: &mut R) -> Result<Graph> {
    if cfg.k_min < 2 || cfg.k_min > cfg.k_max || cfg.n_min > cfg.n_max || cfg.n_max < cfg.k_min {
        return Err(Error::Parameter(format!("inconsistent random graph ranges: {cfg:?}")));
    }
    if !(0.0..=1.0).contains(&cfg.edge_prob) {
        return Err(Error::Parameter(format!("edge probability {} outside [0, 1]", cfg.edge_prob)));
    }
    let k = rng.random_range(cfg.k_min..=cfg.k_max);
    let n = rng.random_range(cfg.n_min.max(k)..=cfg.n_max.max(k));
    let mut edges = Vec::new();
    for l in 0..n {
        for m in l + 1..n {
            if rng.random_bool(cfg.edge_prob) {
                let w = match cfg.weights {
                    WeightDist::Unit => 1.0,
                    WeightDist::Integer(lo, hi) => rng.random_range(lo..=hi) as f64,
                    WeightDist::Uniform(lo, hi) => rng.random_range(lo..hi),
                };
                edges.push(Edge::new(l, m, w));
            }
        }
    }
    let mut ids: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        ids.swap(i, j);
    }
    Graph::new(n, edges, ids[..k].to_vec())
}

/// Random unit-weight graph with exactly `n` vertices, `k` terminals and
/// `m` distinct undirected edges (used for timing sweeps).
pub fn random_graph_with_edges<R: Rng + ?Sized>(n: usize, k: usize, m: usize, rng: &mut R) -> Result<Graph> {
    let max_edges = n * n.saturating_sub(1) / 2;
    if m > max_edges {
        return Err(Error::Parameter(format!("{m} edges requested, at most {max_edges} fit")));
    }
    let mut seen = std::collections::HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b {
            continue;
        }
        let (l, r) = (a.min(b), a.max(b));
        if seen.insert((l, r)) {
            edges.push(Edge::new(l, r, 1.0));
        }
    }
    Graph::new(n, edges, (0..k).collect())
}

/// Complete unit-weight graph on `n` vertices; terminals are `0..k`.
pub fn complete_graph(n: usize, k: usize) -> Result<Graph> {
    let edges = (0..n)
        .flat_map(|l| (l + 1..n).map(move |m| Edge::new(l, m, 1.0)))
        .collect();
    Graph::new(n, edges, (0..k).collect())
}

/// Ten vertices in three dense clusters, `{0,1,2}`, `{3,4,5,6}`, `{7,8,9}`,
/// joined by the three bridges `(1,8)`, `(2,3)`, `(6,7)`; terminals 0, 5, 9.
/// Unit weights. The unique minimum 3-way cut removes exactly the bridges.
pub fn three_cluster_instance() -> Graph {
    let pairs = [
        (0, 1),
        (0, 2),
        (1, 2),
        (3, 4),
        (4, 5),
        (5, 6),
        (3, 5),
        (4, 6),
        (7, 8),
        (8, 9),
        (7, 9),
        (1, 8),
        (2, 3),
        (6, 7),
    ];
    let edges = pairs.iter().map(|&(u, v)| Edge::new(u, v, 1.0)).collect();
    Graph::new(10, edges, vec![0, 5, 9]).expect("static instance is valid")
}

/// Eight vertices, four terminals `0, 3, 4, 7`, unit weights. Vertex 2 only
/// touches terminals 3 and 4, so every minimum 4-way cut (value 4) can put it
/// on either side: the optimum is degenerate in exactly that vertex.
pub fn degenerate_tie_instance() -> Graph {
    let pairs = [
        (0, 1),
        (0, 5),
        (1, 5),
        (1, 6),
        (5, 6),
        (6, 7),
        (1, 3),
        (5, 4),
        (2, 3),
        (2, 4),
    ];
    let edges = pairs.iter().map(|&(u, v)| Edge::new(u, v, 1.0)).collect();
    Graph::new(8, edges, vec![0, 3, 4, 7]).expect("static instance is valid")
}
