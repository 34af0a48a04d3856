//! Reference solvers: max-flow, the isolating-cut heuristic, exhaustive
//! search, and instance generators.

mod exact;
mod flow;
mod generators;
mod isolating;

pub use exact::{brute_force_exact, brute_force_exact_with_budget, enumeration_size, DEFAULT_BUDGET};
pub use flow::{min_st_cut, FlowNetwork, MinCut};
pub use generators::{
    complete_graph, degenerate_tie_instance, gen_pendant_cycle, random_graph,
    random_graph_with_edges, three_cluster_instance, RandomGraphConfig, WeightDist,
};
pub use isolating::{isolating_cut, isolating_cut_heuristic};
