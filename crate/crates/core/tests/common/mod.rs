#![allow(dead_code)]

use mepcut::baselines::{random_graph, RandomGraphConfig, WeightDist};
use mepcut::mep::AssociationMatrix;
use mepcut::{Edge, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random valid association matrix; roughly one entry in five is exactly 0
/// so the `0 ln 0` convention gets exercised.
pub fn random_associations(g: &Graph, rng: &mut impl Rng) -> AssociationMatrix {
    let k = g.k();
    let rows: Vec<Vec<f64>> = (0..g.n_vertices())
        .map(|v| match g.terminal_label(v) {
            Some(j) => (0..k).map(|i| if i == j { 1.0 } else { 0.0 }).collect(),
            None => loop {
                let raw: Vec<f64> = (0..k)
                    .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() })
                    .collect();
                let s: f64 = raw.iter().sum();
                if s > 0.0 {
                    break raw.iter().map(|x| x / s).collect();
                }
            },
        })
        .collect();
    AssociationMatrix::from_rows(g, &rows).unwrap()
}

/// Random directed graph on exactly `n` vertices with real weights.
pub fn random_digraph(n: usize, k: usize, density: f64, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for l in 0..n {
        for m in 0..n {
            if l != m && rng.random_bool(density) {
                edges.push(Edge::new(l, m, rng.random_range(0.1..3.0)));
            }
        }
    }
    let mut ids: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        ids.swap(i, j);
    }
    Graph::new(n, edges, ids[..k].to_vec()).unwrap()
}

pub fn small_random_graph(seed: u64, n_max: usize, k_max: usize, weights: WeightDist) -> Graph {
    let cfg = RandomGraphConfig {
        n_min: 3,
        n_max,
        k_min: 2,
        k_max,
        edge_prob: 0.4,
        weights,
    };
    random_graph(&cfg, &mut rng(seed)).unwrap()
}

/// Dense `0.5 * sum_{ordered pairs across components} (w_lm + w_ml)`.
pub fn dense_cut(g: &Graph, assignment: &[usize]) -> f64 {
    let w = g.dense_weights();
    let n = g.n_vertices();
    let mut total = 0.0;
    for l in 0..n {
        for m in 0..n {
            if assignment[l] != assignment[m] {
                total += w[(l, m)] + w[(m, l)];
            }
        }
    }
    0.5 * total
}
