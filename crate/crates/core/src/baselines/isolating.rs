use rayon::prelude::*;

use crate::baselines::{min_st_cut, FlowNetwork, MinCut};
use crate::error::Result;
use crate::graph::{Graph, Partition};

/// Minimum cut separating terminal `j` from all other terminals.
pub fn isolating_cut(g: &Graph, j: usize) -> Result<MinCut> {
    let s = g.terminals()[j];
    let others: Vec<usize> = g.terminals().iter().copied().filter(|&t| t != s).collect();
    let net = FlowNetwork::from_graph(g, &[s], &others)?;
    let mut cut = min_st_cut(&net);
    cut.source_side.truncate(g.n_vertices());
    Ok(cut)
}

/// The classic `2(1 - 1/k)`-approximation: compute all `k` isolating cuts,
/// drop the most expensive one and keep the union of the rest.
///
/// A vertex inside a kept isolating side goes to the lowest-index terminal
/// whose side contains it; everything else joins the dropped terminal.
pub fn isolating_cut_heuristic(g: &Graph) -> Result<Partition> {
    let k = g.k();
    let cuts: Vec<MinCut> = (0..k)
        .into_par_iter()
        .map(|j| isolating_cut(g, j))
        .collect::<Result<_>>()?;

    // ties on the most expensive cut drop the highest index
    let worst = cuts.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
    let dropped = (0..k).rev().find(|&j| cuts[j].value == worst).expect("k >= 2");

    let mut assignment = vec![dropped; g.n_vertices()];
    for v in 0..g.n_vertices() {
        if let Some(j) = (0..k).find(|&j| j != dropped && cuts[j].source_side[v]) {
            assignment[v] = j;
        }
    }
    Partition::new(g, assignment)
}
