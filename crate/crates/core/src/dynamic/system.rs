use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, LambdaMode};
use crate::matrix::SparseWeights;
use crate::mep::AnnealConfig;

/// Initial control on every controllable edge when none is given.
pub const DEFAULT_U0: f64 = -1.0;

/// Edge weights on a fixed undirected edge set evolving as
/// `wdot = a ∘ w + b ∘ u`, with the control `u` driven by the energy-descent
/// law. Edges with `b = 0` are not manipulable and keep `u = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicSystem {
    pub n_vertices: usize,
    pub terminals: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub a_diag: Vec<f64>,
    pub b_diag: Vec<f64>,
    pub w0: Vec<f64>,
    pub u0: Vec<f64>,
    /// Weight of the control effort `mu ||u||^2` in the energy.
    pub mu: f64,
    /// Minimum decay rate of the control.
    pub c0: f64,
    /// Inverse temperature at which associations are tracked.
    pub beta_track: f64,
    /// RK4 step.
    pub h: f64,
    pub horizon: f64,
    /// Floor on `4 mu ||u||^2` in the control law.
    pub eps: f64,
    /// Schedule for full anneals, plus the tolerance, iteration cap and
    /// regularization used by the per-step refresh.
    pub solver: AnnealConfig,
}

/// JSON layout of a [`DynamicSystem`]; vertex ids are 1-based.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemSpec {
    pub n: usize,
    pub terminals: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    #[serde(rename = "A_diag")]
    pub a_diag: Vec<f64>,
    #[serde(rename = "B_diag")]
    pub b_diag: Vec<f64>,
    #[serde(rename = "W0")]
    pub w0: Vec<f64>,
    #[serde(rename = "U0", default, skip_serializing_if = "Option::is_none")]
    pub u0: Option<Vec<f64>>,
    pub mu: f64,
    #[serde(rename = "C0")]
    pub c0: f64,
    pub beta_track: f64,
    pub h: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
}

impl DynamicSystem {
    /// Four vertices, all six edges in the order
    /// `(1,2), (1,3), (1,4), (2,3), (2,4), (3,4)`, terminals 2 and 4,
    /// `A = 5/6 diag(e^0.5, e^1.8, e^1.5, e^-1.5, e^-1, e^3.5)`,
    /// `B = diag(0, 1, 1, 1, 1, 1)`, over 0.075 time units.
    ///
    /// The initial weights start vertex 3 on the side of terminal 2 while the
    /// fast-growing edge `(3,4)` pulls it toward terminal 4.
    pub fn four_node_example() -> Self {
        let spec = SystemSpec {
            n: 4,
            terminals: vec![2, 4],
            edges: vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)],
            a_diag: [0.5, 1.8, 1.5, -1.5, -1.0, 3.5]
                .iter()
                .map(|x: &f64| 5.0 / 6.0 * x.exp())
                .collect(),
            b_diag: vec![0.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            w0: vec![1.0, 1.0, 0.3, 1.0, 0.3, 0.3],
            u0: None,
            mu: 10.0,
            c0: 1.0,
            beta_track: 40.0,
            h: 1e-4,
            horizon: 0.075,
        };
        DynamicSystem::from_spec(&spec).expect("built-in example is valid")
    }

    pub fn from_spec(spec: &SystemSpec) -> Result<Self> {
        let m = spec.edges.len();
        let one_based = |id: usize| -> Result<usize> {
            if id == 0 || id > spec.n {
                Err(Error::Parameter(format!("vertex {id} outside 1..={}", spec.n)))
            } else {
                Ok(id - 1)
            }
        };
        let edges = spec
            .edges
            .iter()
            .map(|&(u, v)| Ok((one_based(u)?, one_based(v)?)))
            .collect::<Result<Vec<_>>>()?;
        let terminals = spec.terminals.iter().map(|&s| one_based(s)).collect::<Result<Vec<_>>>()?;
        let u0 = match &spec.u0 {
            Some(u) => u.clone(),
            None => spec.b_diag.iter().map(|&b| if b != 0.0 { DEFAULT_U0 } else { 0.0 }).collect(),
        };
        if u0.len() != m {
            return Err(Error::Dimension(format!("U0 has {} entries for {m} edges", u0.len())));
        }
        let sys = DynamicSystem {
            n_vertices: spec.n,
            terminals,
            edges,
            a_diag: spec.a_diag.clone(),
            b_diag: spec.b_diag.clone(),
            w0: spec.w0.clone(),
            u0,
            mu: spec.mu,
            c0: spec.c0,
            beta_track: spec.beta_track,
            h: spec.h,
            horizon: spec.horizon,
            eps: 1e-12,
            solver: AnnealConfig::default(),
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn to_spec(&self) -> SystemSpec {
        SystemSpec {
            n: self.n_vertices,
            terminals: self.terminals.iter().map(|s| s + 1).collect(),
            edges: self.edges.iter().map(|&(u, v)| (u + 1, v + 1)).collect(),
            a_diag: self.a_diag.clone(),
            b_diag: self.b_diag.clone(),
            w0: self.w0.clone(),
            u0: Some(self.u0.clone()),
            mu: self.mu,
            c0: self.c0,
            beta_track: self.beta_track,
            h: self.h,
            horizon: self.horizon,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SystemSpec = serde_json::from_str(text)?;
        DynamicSystem::from_spec(&spec)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_spec())?)
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of RK4 steps covering the horizon.
    pub fn n_steps(&self) -> usize {
        (self.horizon / self.h).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.edges.len();
        for (name, v) in [("A_diag", &self.a_diag), ("B_diag", &self.b_diag), ("W0", &self.w0), ("U0", &self.u0)] {
            if v.len() != m {
                return Err(Error::Dimension(format!("{name} has {} entries for {m} edges", v.len())));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Parameter(format!("{name} contains a non-finite value")));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &self.edges {
            if u == v || u >= self.n_vertices || v >= self.n_vertices {
                return Err(Error::Parameter(format!("invalid edge ({}, {})", u + 1, v + 1)));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::Parameter(format!("duplicate edge ({}, {})", u + 1, v + 1)));
            }
        }
        // checks terminal count and distinctness
        self.skeleton(&vec![0.0; m])?;
        for (i, (&b, &u)) in self.b_diag.iter().zip(&self.u0).enumerate() {
            if b == 0.0 && u != 0.0 {
                return Err(Error::Parameter(format!("edge {} is not controllable but U0 = {u}", i + 1)));
            }
        }
        let positive = [("mu", self.mu), ("C0", self.c0), ("beta_track", self.beta_track), ("h", self.h), ("eps", self.eps)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(Error::Parameter(format!("horizon must be >= 0, got {}", self.horizon)));
        }
        self.solver.validate()
    }

    /// Static graph on the same edges with the given weights.
    pub fn skeleton(&self, weights: &[f64]) -> Result<Graph> {
        let edges = self
            .edges
            .iter()
            .zip(weights)
            .map(|(&(u, v), &w)| Edge::new(u, v, w))
            .collect();
        Graph::new(self.n_vertices, edges, self.terminals.clone())
    }

    /// Regularized solver operator for the squared weights `w_e^2`.
    pub fn squared_weight_operator(&self, w: &[f64], free: &[bool]) -> Result<SparseWeights> {
        let k = SparseWeights::from_undirected_triplets(
            self.n_vertices,
            self.edges.iter().zip(w).map(|(&(a, b), &x)| (a, b, x * x)),
        );
        let lambda = self.solver.lambda.resolve(&k, free)?;
        Ok(k.with_added_diagonal(lambda))
    }
}

/// Squared-weight operator for repeated refreshes: the sparsity pattern is
/// built once and the Perron vector behind the spectral shift is carried
/// over between calls.
pub(crate) struct SquaredOperator {
    op: SparseWeights,
    slots: Vec<(usize, usize)>,
    free: Vec<bool>,
    perron: Vec<f64>,
    mode: LambdaMode,
}

impl SquaredOperator {
    pub(crate) fn new(sys: &DynamicSystem, free: Vec<bool>) -> Self {
        let op = SparseWeights::from_undirected_triplets(
            sys.n_vertices,
            sys.edges.iter().map(|&(a, b)| (a, b, 1.0)),
        );
        let slots = sys
            .edges
            .iter()
            .map(|&(a, b)| {
                let forward = op.slot(a, b).expect("edge is in the pattern");
                let backward = op.slot(b, a).expect("edge is in the pattern");
                (forward, backward)
            })
            .collect();
        SquaredOperator {
            op,
            slots,
            free,
            perron: vec![1.0; sys.n_vertices],
            mode: sys.solver.lambda,
        }
    }

    pub(crate) fn update(&mut self, w: &[f64]) -> Result<&SparseWeights> {
        for (&(a, b), x) in self.slots.iter().zip(w) {
            self.op.set_slot(a, x * x);
            self.op.set_slot(b, x * x);
        }
        let lambda = match self.mode {
            LambdaMode::Spectral => self.op.perron_upper_bound_from(&self.free, &mut self.perron) * (1.0 + 1e-9),
            mode => mode.resolve(&self.op, &self.free)?,
        };
        self.op.fill_diagonal(lambda);
        Ok(&self.op)
    }
}
