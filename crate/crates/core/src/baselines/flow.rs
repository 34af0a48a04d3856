use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: f64,
}

/// Capacitated network for s-t minimum cuts. Arcs are stored in pairs so that
/// `arc ^ 1` is always the residual partner.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    n: usize,
    source: usize,
    sink: usize,
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinCut {
    pub value: f64,
    /// `true` for nodes reachable from the source in the final residual
    /// network (the minimal source side).
    pub source_side: Vec<bool>,
}

impl FlowNetwork {
    pub fn new(n: usize, source: usize, sink: usize) -> Result<Self> {
        if source >= n || sink >= n {
            return Err(Error::Parameter(format!("source/sink outside [0, {n})")));
        }
        if source == sink {
            return Err(Error::Parameter("source and sink coincide".into()));
        }
        Ok(FlowNetwork {
            n,
            source,
            sink,
            arcs: Vec::new(),
            adj: vec![Vec::new(); n],
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    fn push_pair(&mut self, u: usize, v: usize, forward: f64, backward: f64) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::Parameter(format!("arc ({u}, {v}) outside [0, {})", self.n)));
        }
        if !(forward >= 0.0 && backward >= 0.0) {
            return Err(Error::Parameter(format!("negative capacity on ({u}, {v})")));
        }
        self.adj[u].push(self.arcs.len());
        self.arcs.push(Arc { to: v, cap: forward });
        self.adj[v].push(self.arcs.len());
        self.arcs.push(Arc { to: u, cap: backward });
        Ok(())
    }

    /// Directed arc `u -> v`.
    pub fn add_arc(&mut self, u: usize, v: usize, cap: f64) -> Result<()> {
        self.push_pair(u, v, cap, 0.0)
    }

    /// Undirected edge: capacity `cap` in both directions.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: f64) -> Result<()> {
        self.push_pair(u, v, cap, cap)
    }

    /// Network on the symmetrized graph with a super-source tied to `sources`
    /// and a super-sink tied to `sinks` by infinite arcs. Graph vertices keep
    /// their ids; the super nodes are `N` (source) and `N + 1` (sink).
    pub fn from_graph(g: &Graph, sources: &[usize], sinks: &[usize]) -> Result<Self> {
        let n = g.n_vertices();
        if sources.is_empty() || sinks.is_empty() {
            return Err(Error::Parameter("source and sink sets must be non-empty".into()));
        }
        if let Some(v) = sources.iter().find(|v| sinks.contains(v)) {
            return Err(Error::Parameter(format!("vertex {v} is both source and sink")));
        }
        let mut net = FlowNetwork::new(n + 2, n, n + 1)?;
        let w = g.solver_weights();
        for l in 0..n {
            for (m, cap) in w.neighbors(l) {
                if m > l {
                    net.add_edge(l, m, cap)?;
                }
            }
        }
        for &s in sources {
            net.add_arc(n, s, f64::INFINITY)?;
        }
        for &t in sinks {
            net.add_arc(t, n + 1, f64::INFINITY)?;
        }
        Ok(net)
    }
}

/// Minimum s-t cut by Dinic's blocking-flow algorithm.
///
/// The returned value is the capacity of the witnessing cut summed from the
/// original capacities, so it carries no accumulated rounding from the flow.
pub fn min_st_cut(net: &FlowNetwork) -> MinCut {
    let mut res: Vec<f64> = net.arcs.iter().map(|a| a.cap).collect();
    let max_cap = res.iter().copied().filter(|c| c.is_finite()).fold(0.0, f64::max);
    let eps = max_cap * 1e-14;
    let (s, t) = (net.source, net.sink);
    let mut level = vec![-1i64; net.n];
    let mut next = vec![0usize; net.n];

    loop {
        level.fill(-1);
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &net.adj[u] {
                let v = net.arcs[a].to;
                if level[v] < 0 && res[a] > eps {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if level[t] < 0 {
            break;
        }

        next.fill(0);
        let mut path: Vec<usize> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                let bottleneck = path.iter().map(|&a| res[a]).fold(f64::INFINITY, f64::min);
                for &a in &path {
                    res[a] -= bottleneck;
                    res[a ^ 1] += bottleneck;
                }
                path.clear();
                u = s;
                continue;
            }
            let mut advanced = false;
            while next[u] < net.adj[u].len() {
                let a = net.adj[u][next[u]];
                let v = net.arcs[a].to;
                if res[a] > eps && level[v] == level[u] + 1 {
                    path.push(a);
                    u = v;
                    advanced = true;
                    break;
                }
                next[u] += 1;
            }
            if advanced {
                continue;
            }
            if u == s {
                break;
            }
            // dead end: retire the node and retreat one arc
            level[u] = -1;
            let a = path.pop().expect("non-source node has an incoming path arc");
            u = net.arcs[a ^ 1].to;
            next[u] += 1;
        }
    }

    let mut source_side = vec![false; net.n];
    source_side[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &a in &net.adj[u] {
            let v = net.arcs[a].to;
            if !source_side[v] && res[a] > eps {
                source_side[v] = true;
                queue.push_back(v);
            }
        }
    }
    let value = (0..net.n)
        .filter(|&u| source_side[u])
        .flat_map(|u| net.adj[u].iter().copied())
        .filter(|&a| !source_side[net.arcs[a].to])
        .map(|a| net.arcs[a].cap)
        .sum();
    MinCut { value, source_side }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_arc_and_series_path() {
        let mut net = FlowNetwork::new(2, 0, 1).unwrap();
        net.add_arc(0, 1, 5.0).unwrap();
        assert_eq!(min_st_cut(&net).value, 5.0);

        let mut path = FlowNetwork::new(3, 0, 2).unwrap();
        path.add_arc(0, 1, 3.0).unwrap();
        path.add_arc(1, 2, 7.0).unwrap();
        let cut = min_st_cut(&path);
        assert_eq!(cut.value, 3.0);
        assert_eq!(cut.source_side, vec![true, false, false]);
    }

    #[test]
    fn disconnected_is_zero() {
        let net = FlowNetwork::new(3, 0, 2).unwrap();
        assert_eq!(min_st_cut(&net).value, 0.0);
    }

    #[test]
    fn rejects_degenerate_networks() {
        assert!(FlowNetwork::new(2, 1, 1).is_err());
        assert!(FlowNetwork::new(2, 0, 2).is_err());
        let mut net = FlowNetwork::new(2, 0, 1).unwrap();
        assert!(net.add_arc(0, 1, -1.0).is_err());
    }
}
