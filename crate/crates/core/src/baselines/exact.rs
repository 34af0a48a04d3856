use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};

/// Default cap on the number of assignments enumerated.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Number of terminal-respecting assignments, `k^(N - k)`, as a float so that
/// hopeless sizes do not overflow.
pub fn enumeration_size(g: &Graph) -> f64 {
    (g.k() as f64).powi((g.n_vertices() - g.k()) as i32)
}

/// Exhaustive minimum multiway cut with [`DEFAULT_BUDGET`].
pub fn brute_force_exact(g: &Graph) -> Result<Partition> {
    brute_force_exact_with_budget(g, DEFAULT_BUDGET)
}

/// Enumerates every assignment of the free vertices in lexicographic order
/// and keeps the first one with the smallest cut.
pub fn brute_force_exact_with_budget(g: &Graph, budget: u64) -> Result<Partition> {
    let estimate = enumeration_size(g);
    if estimate > budget as f64 {
        return Err(Error::Budget { estimate, budget });
    }
    let n = g.n_vertices();
    let k = g.k();
    let free: Vec<usize> = (0..n).filter(|&v| !g.is_terminal(v)).collect();

    // undirected adjacency with merged weights; self-loops never cross
    let w = g.solver_weights();
    let adj: Vec<Vec<(usize, f64)>> = (0..n).map(|v| w.neighbors(v).collect()).collect();

    let mut labels: Vec<usize> = (0..n).map(|v| g.terminal_label(v).unwrap_or(0)).collect();
    let crossing = |labels: &[usize]| -> f64 {
        g.edges()
            .iter()
            .filter(|e| labels[e.source] != labels[e.target])
            .map(|e| e.weight)
            .sum()
    };
    let mut current = crossing(&labels);
    let mut best = labels.clone();
    let mut best_value = current;

    // odometer over free vertices, last free vertex fastest
    'outer: loop {
        let mut pos = free.len();
        loop {
            if pos == 0 {
                break 'outer;
            }
            pos -= 1;
            let v = free[pos];
            let old = labels[v];
            let new = if old + 1 == k { 0 } else { old + 1 };
            current += relabel_delta(&adj[v], &labels, old, new);
            labels[v] = new;
            if new != 0 {
                break;
            }
        }
        if current < best_value - 1e-9 * (1.0 + best_value.abs()) {
            best_value = current;
            best.copy_from_slice(&labels);
        }
    }
    Partition::new(g, best)
}

fn relabel_delta(neighbors: &[(usize, f64)], labels: &[usize], old: usize, new: usize) -> f64 {
    neighbors
        .iter()
        .map(|&(u, w)| {
            let before = (labels[u] != old) as u8 as f64;
            let after = (labels[u] != new) as u8 as f64;
            w * (after - before)
        })
        .sum()
}
