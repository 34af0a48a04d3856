//! Graph representation, weight preprocessing and exact cut evaluation.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, SparseWeights};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

impl Edge {
    pub fn new(source: usize, target: usize, weight: f64) -> Self {
        Edge {
            source,
            target,
            weight,
        }
    }
}

/// A weighted digraph with `k` distinct terminal vertices.
///
/// Vertex ids are 0-based. Edges are directed; `(u, v)` and `(v, u)` may both
/// be present, but the same ordered pair may not appear twice.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n_vertices: usize,
    edges: Vec<Edge>,
    terminals: Vec<usize>,
    terminal_label: Vec<Option<usize>>,
}

impl Graph {
    pub fn new(n_vertices: usize, edges: Vec<Edge>, terminals: Vec<usize>) -> Result<Self> {
        if n_vertices == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let k = terminals.len();
        if k < 2 || k > n_vertices {
            return Err(Error::InvalidGraph(format!(
                "need 2 <= k <= N terminals, got k = {k} with N = {n_vertices}"
            )));
        }
        let mut terminal_label = vec![None; n_vertices];
        for (j, &s) in terminals.iter().enumerate() {
            if s >= n_vertices {
                return Err(Error::InvalidGraph(format!("terminal {s} is not a vertex")));
            }
            if terminal_label[s].is_some() {
                return Err(Error::InvalidGraph(format!("terminal {s} listed twice")));
            }
            terminal_label[s] = Some(j);
        }
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.source >= n_vertices || e.target >= n_vertices {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) references a vertex outside [0, {n_vertices})",
                    e.source, e.target
                )));
            }
            if !(e.weight >= 0.0 && e.weight.is_finite()) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has weight {}",
                    e.source, e.target, e.weight
                )));
            }
            if !seen.insert((e.source, e.target)) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    e.source, e.target
                )));
            }
        }
        Ok(Graph {
            n_vertices,
            edges,
            terminals,
            terminal_label,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn k(&self) -> usize {
        self.terminals.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    /// Index `j` such that `v == terminals[j]`, if `v` is a terminal.
    pub fn terminal_label(&self, v: usize) -> Option<usize> {
        self.terminal_label[v]
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.terminal_label[v].is_some()
    }

    /// Dense `N x N` view with `w_lm = 0` for every non-edge.
    pub fn dense_weights(&self) -> Matrix {
        let mut w = Matrix::zeros(self.n_vertices, self.n_vertices);
        for e in &self.edges {
            w[(e.source, e.target)] = e.weight;
        }
        w
    }

    /// Symmetric operator `W + W^T` used by the solvers.
    ///
    /// With this scaling the relaxed cut cost of a 0-1 association matrix is
    /// exactly [`cut_value`], and an undirected edge listed once with weight
    /// `w` appears as `w` in both `(u, v)` and `(v, u)`. Self-loops land on the
    /// diagonal (twice their weight) and never contribute to a hard cut.
    pub fn solver_weights(&self) -> SparseWeights {
        SparseWeights::from_undirected_triplets(
            self.n_vertices,
            self.edges
                .iter()
                .filter(|e| e.weight != 0.0)
                .map(|e| {
                    if e.source == e.target {
                        (e.source, e.source, 2.0 * e.weight)
                    } else {
                        (e.source, e.target, e.weight)
                    }
                }),
        )
    }

    /// Regularized solver operator and the diagonal shift that was applied.
    pub fn regularized_weights(&self, mode: LambdaMode) -> Result<(SparseWeights, f64)> {
        let w = self.solver_weights();
        let free: Vec<bool> = (0..self.n_vertices).map(|v| !self.is_terminal(v)).collect();
        let lambda = mode.resolve(&w, &free)?;
        Ok((w.with_added_diagonal(lambda), lambda))
    }

    /// Same vertex set and terminals with the edge weights replaced.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Graph> {
        if weights.len() != self.edges.len() {
            return Err(Error::Dimension(format!(
                "{} weights for {} edges",
                weights.len(),
                self.edges.len()
            )));
        }
        let edges = self
            .edges
            .iter()
            .zip(weights)
            .map(|(e, &w)| Edge::new(e.source, e.target, w))
            .collect();
        Graph::new(self.n_vertices, edges, self.terminals.clone())
    }
}

/// How the diagonal shift `lambda` in `W + lambda I` is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaMode {
    /// Sum of every off-diagonal weight. Makes the whole matrix strictly
    /// diagonally dominant, but is far larger than needed on big graphs.
    Auto,
    /// Upper bound on the Perron root of the free-vertex block. This is the
    /// smallest shift for which the block restricted to non-terminal rows is
    /// guaranteed positive semidefinite, which is all the descent argument uses.
    Spectral,
    Fixed(f64),
}

impl Default for LambdaMode {
    fn default() -> Self {
        LambdaMode::Spectral
    }
}

impl LambdaMode {
    /// Shift for `w` given which rows are free (non-terminal).
    pub fn resolve(self, w: &SparseWeights, free: &[bool]) -> Result<f64> {
        match self {
            LambdaMode::Auto => Ok(w.off_diagonal_sum()),
            // small relative margin turns semidefinite into definite
            LambdaMode::Spectral => Ok(w.perron_upper_bound(free) * (1.0 + 1e-9)),
            LambdaMode::Fixed(v) if v >= 0.0 && v.is_finite() => Ok(v),
            LambdaMode::Fixed(v) => Err(Error::Parameter(format!("lambda must be >= 0, got {v}"))),
        }
    }
}

impl fmt::Display for LambdaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaMode::Auto => f.write_str("auto"),
            LambdaMode::Spectral => f.write_str("spectral"),
            LambdaMode::Fixed(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for LambdaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(LambdaMode::Auto),
            "spectral" => Ok(LambdaMode::Spectral),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| Error::Parameter(format!("bad lambda '{s}'")))?;
                if v < 0.0 || !v.is_finite() {
                    return Err(Error::Parameter(format!("lambda must be >= 0, got {v}")));
                }
                Ok(LambdaMode::Fixed(v))
            }
        }
    }
}

/// `0.5 (W + W^T)`.
pub fn symmetrize(w: &Matrix) -> Result<Matrix> {
    if !w.is_square() {
        return Err(Error::Dimension(format!(
            "cannot symmetrize a {}x{} matrix",
            w.rows(),
            w.cols()
        )));
    }
    let n = w.rows();
    let mut out = Matrix::zeros(n, n);
    for l in 0..n {
        for m in 0..n {
            out[(l, m)] = 0.5 * (w[(l, m)] + w[(m, l)]);
        }
    }
    Ok(out)
}

/// `W + lambda I`. `Spectral` treats every row as free.
pub fn regularize(w: &Matrix, mode: LambdaMode) -> Result<Matrix> {
    let sparse = SparseWeights::from_dense(w)?;
    let lambda = mode.resolve(&sparse, &vec![true; w.rows()])?;
    let mut out = w.clone();
    for i in 0..w.rows() {
        out[(i, i)] += lambda;
    }
    Ok(out)
}

/// Hard assignment of every vertex to a terminal index, with its cut value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub assignment: Vec<usize>,
    pub cut_value: f64,
}

impl Partition {
    /// Validates `assignment` against `g` and evaluates its cut.
    pub fn new(g: &Graph, assignment: Vec<usize>) -> Result<Self> {
        let cut_value = cut_value(g, &assignment)?;
        Ok(Partition {
            assignment,
            cut_value,
        })
    }

    /// Vertices in component `j`.
    pub fn component(&self, j: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&v| self.assignment[v] == j)
            .collect()
    }
}

pub fn validate_assignment(g: &Graph, assignment: &[usize]) -> Result<()> {
    if assignment.len() != g.n_vertices() {
        return Err(Error::InvalidPartition(format!(
            "assignment has {} entries for {} vertices",
            assignment.len(),
            g.n_vertices()
        )));
    }
    if let Some(v) = assignment.iter().position(|&a| a >= g.k()) {
        return Err(Error::InvalidPartition(format!(
            "vertex {v} assigned to component {} but k = {}",
            assignment[v],
            g.k()
        )));
    }
    for (j, &s) in g.terminals().iter().enumerate() {
        if assignment[s] != j {
            return Err(Error::InvalidPartition(format!(
                "terminal {s} must be in component {j}, found {}",
                assignment[s]
            )));
        }
    }
    Ok(())
}

/// Total weight of edges whose endpoints land in different components.
pub fn cut_value(g: &Graph, assignment: &[usize]) -> Result<f64> {
    validate_assignment(g, assignment)?;
    Ok(g.edges()
        .iter()
        .filter(|e| assignment[e.source] != assignment[e.target])
        .map(|e| e.weight)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::new(
            3,
            vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0), Edge::new(0, 2, 1.0)],
            vec![0, 2],
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(Graph::new(3, vec![], vec![0]).is_err());
        assert!(Graph::new(3, vec![], vec![0, 0]).is_err());
        assert!(Graph::new(3, vec![], vec![0, 3]).is_err());
        assert!(Graph::new(3, vec![Edge::new(0, 1, -1.0)], vec![0, 1]).is_err());
        assert!(Graph::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(0, 1, 2.0)], vec![0, 1]).is_err());
        // opposite directions are distinct pairs
        assert!(Graph::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 0, 2.0)], vec![0, 1]).is_ok());
    }

    #[test]
    fn symmetrize_examples() {
        let w = Matrix::from_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let s = symmetrize(&w).unwrap();
        assert_eq!(s.to_rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(symmetrize(&s).unwrap(), s);
        assert!(symmetrize(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn regularize_examples() {
        let zero = regularize(&Matrix::zeros(3, 3), LambdaMode::Auto).unwrap();
        assert_eq!(zero, Matrix::zeros(3, 3));

        let tri = triangle().solver_weights().to_dense();
        let r = regularize(&tri, LambdaMode::Auto).unwrap();
        for i in 0..3 {
            assert_eq!(r[(i, i)], 6.0);
        }
        assert!(regularize(&tri, LambdaMode::Fixed(-1.0)).is_err());
    }

    #[test]
    fn lambda_mode_parsing() {
        assert_eq!("AUTO".parse::<LambdaMode>().unwrap(), LambdaMode::Auto);
        assert_eq!("spectral".parse::<LambdaMode>().unwrap(), LambdaMode::Spectral);
        assert_eq!("2.5".parse::<LambdaMode>().unwrap(), LambdaMode::Fixed(2.5));
        assert!("-1".parse::<LambdaMode>().is_err());
        assert!("often".parse::<LambdaMode>().is_err());
    }

    #[test]
    fn cut_value_single_edge_and_pinning() {
        let g = Graph::new(2, vec![Edge::new(0, 1, 5.0)], vec![0, 1]).unwrap();
        assert_eq!(cut_value(&g, &[0, 1]).unwrap(), 5.0);
        assert!(matches!(cut_value(&g, &[1, 0]), Err(Error::InvalidPartition(_))));
        assert!(cut_value(&g, &[0]).is_err());
    }

    #[test]
    fn self_loops_never_cross() {
        let g = Graph::new(
            3,
            vec![Edge::new(0, 0, 3.0), Edge::new(0, 2, 1.0), Edge::new(2, 1, 2.0)],
            vec![0, 1],
        )
        .unwrap();
        assert_eq!(cut_value(&g, &[0, 1, 1]).unwrap(), 1.0);
        assert_eq!(g.solver_weights().diag(0), 6.0);
    }

    #[test]
    fn spectral_lambda_ignores_terminal_rows() {
        // star centred on a terminal: free block has no edges
        let g = Graph::new(
            4,
            vec![Edge::new(0, 1, 1.0), Edge::new(0, 2, 1.0), Edge::new(0, 3, 1.0)],
            vec![0, 1],
        )
        .unwrap();
        let (_, lambda) = g.regularized_weights(LambdaMode::Spectral).unwrap();
        assert_eq!(lambda, 0.0);
        let (_, auto) = g.regularized_weights(LambdaMode::Auto).unwrap();
        assert_eq!(auto, 6.0);
    }
}
