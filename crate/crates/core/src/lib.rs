//! Minimum multiway k-cut by maximum-entropy deterministic annealing.
//!
//! Each vertex carries a soft association with every terminal. Annealing the
//! inverse temperature from near zero upward trades the entropy of those
//! associations against the expected cut weight until they harden into a
//! partition. The crate also provides exact and heuristic baselines, a
//! controlled dynamic-graph simulator built on the same free energy, and a
//! pixel-grid foreground/background segmenter.
//!
//! ```
//! use mepcut::baselines::gen_pendant_cycle;
//! use mepcut::mep::{anneal, AnnealConfig};
//!
//! let g = gen_pendant_cycle(3, 1.98).unwrap();
//! let trace = anneal(&g, &AnnealConfig::default()).unwrap();
//! assert!((trace.partition.cut_value - 3.0).abs() < 1e-9);
//! ```

pub mod baselines;
pub mod bench;
pub mod dynamic;
pub mod error;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod mep;
pub mod segmentation;

pub use error::{Error, Result};
pub use graph::{cut_value, regularize, symmetrize, Edge, Graph, LambdaMode, Partition};
pub use matrix::{Matrix, SparseWeights};
