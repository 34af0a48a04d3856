//! Deterministic annealing on soft vertex-to-terminal associations.
//!
//! At each inverse temperature `beta` the free energy `L = D - H / beta`
//! is minimised by repeated batch Gibbs updates
//! `p(j|i) ∝ exp(beta * sum_m p(j|m) w_im)`; `beta` then grows geometrically
//! until the associations harden into a partition.

mod anneal;
mod assoc;
mod objective;
mod sweep;

pub use anneal::{
    anneal, detect_phase_transitions, harden, relax, AnnealConfig, Hardening, SolveTrace,
    TieReport, TraceEntry,
};
pub use assoc::{init_associations, AssociationMatrix};
pub use objective::{cut_cost, entropy, free_energy, gamma_fn, kl_to_update};
pub(crate) use objective::xlogx;
pub use sweep::{gibbs_log_update, gibbs_sweep, gibbs_sweep_into};

/// Default threshold on the per-step change of `p(A_j)` that counts as a
/// phase transition.
pub const PHASE_TRANSITION_THRESHOLD: f64 = 0.05;
