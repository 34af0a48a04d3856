//! File formats. Vertex ids and component labels are 1-based in every file
//! and 0-based in memory.
//!
//! Text graph format:
//!
//! ```text
//! # comments and blank lines are ignored
//! N k
//! s_1 ... s_k
//! u v w
//! ...
//! ```
//!
//! JSON graph format: `{"n": N, "terminals": [s_1, ...], "edges": [[u, v, w], ...]}`.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Partition};
use crate::mep::{AssociationMatrix, TieReport, TraceEntry};

pub fn parse_graph_text(input: &str) -> Result<Graph> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines.next().ok_or_else(|| Error::parse(1, "empty graph file"))?;
    let head = parse_fields::<usize>(header_line, header)?;
    let [n, k] = head[..] else {
        return Err(Error::parse(header_line, "header must be `N k`"));
    };
    if n == 0 {
        return Err(Error::parse(header_line, "N must be positive"));
    }

    let (term_line, term) = lines
        .next()
        .ok_or_else(|| Error::parse(header_line + 1, "missing terminal line"))?;
    let terminals = parse_fields::<usize>(term_line, term)?;
    if terminals.len() != k {
        return Err(Error::parse(
            term_line,
            format!("expected {k} terminals, found {}", terminals.len()),
        ));
    }
    let terminals = terminals
        .into_iter()
        .map(|s| to_zero_based(s, n, term_line))
        .collect::<Result<Vec<_>>>()?;

    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (line, text) in lines {
        let fields: Vec<&str> = text.split_whitespace().collect();
        let [u, v, w] = fields[..] else {
            return Err(Error::parse(line, "edge line must be `u v w`"));
        };
        let u = to_zero_based(parse_field(line, u)?, n, line)?;
        let v = to_zero_based(parse_field(line, v)?, n, line)?;
        let w: f64 = parse_field(line, w)?;
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::parse(line, format!("weight {w} is not a nonnegative number")));
        }
        if !seen.insert((u, v)) {
            return Err(Error::parse(line, format!("duplicate edge {} {}", u + 1, v + 1)));
        }
        edges.push(Edge::new(u, v, w));
    }
    Graph::new(n, edges, terminals).map_err(|e| Error::parse(term_line, e.to_string()))
}

fn parse_field<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::parse(line, format!("cannot parse '{s}'")))
}

fn parse_fields<T: std::str::FromStr>(line: usize, s: &str) -> Result<Vec<T>> {
    s.split_whitespace().map(|f| parse_field(line, f)).collect()
}

fn to_zero_based(id: usize, n: usize, line: usize) -> Result<usize> {
    if id == 0 || id > n {
        return Err(Error::parse(line, format!("vertex {id} outside 1..={n}")));
    }
    Ok(id - 1)
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    terminals: Vec<usize>,
    edges: Vec<(usize, usize, f64)>,
}

pub fn parse_graph_json(input: &str) -> Result<Graph> {
    let raw: GraphJson = serde_json::from_str(input)?;
    let bad = |what: String| Error::parse(1, what);
    let one_based = |id: usize| -> Result<usize> {
        if id == 0 || id > raw.n {
            Err(bad(format!("vertex {id} outside 1..={}", raw.n)))
        } else {
            Ok(id - 1)
        }
    };
    let terminals = raw.terminals.iter().map(|&s| one_based(s)).collect::<Result<Vec<_>>>()?;
    let edges = raw
        .edges
        .iter()
        .map(|&(u, v, w)| Ok(Edge::new(one_based(u)?, one_based(v)?, w)))
        .collect::<Result<Vec<_>>>()?;
    Graph::new(raw.n, edges, terminals).map_err(|e| bad(e.to_string()))
}

/// Reads a graph, choosing the format from the extension (`.json`) or the
/// first non-blank character.
pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with('{');
    if is_json {
        parse_graph_json(&text)
    } else {
        parse_graph_text(&text)
    }
}

pub fn graph_to_text(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n_vertices(), g.k());
    let terms: Vec<String> = g.terminals().iter().map(|s| (s + 1).to_string()).collect();
    out.push_str(&terms.join(" "));
    out.push('\n');
    for e in g.edges() {
        out.push_str(&format!("{} {} {}\n", e.source + 1, e.target + 1, e.weight));
    }
    out
}

pub fn graph_to_json(g: &Graph) -> Result<String> {
    let raw = GraphJson {
        n: g.n_vertices(),
        terminals: g.terminals().iter().map(|s| s + 1).collect(),
        edges: g.edges().iter().map(|e| (e.source + 1, e.target + 1, e.weight)).collect(),
    };
    Ok(serde_json::to_string_pretty(&raw)?)
}

#[derive(Serialize)]
struct PartitionJson {
    assignment: Vec<usize>,
    cut_value: f64,
    ties: BTreeMap<String, Vec<usize>>,
}

/// `{"assignment": [...], "cut_value": x, "ties": {"vertex": [labels]}}`,
/// with 1-based component labels and vertex keys.
pub fn partition_to_json(p: &Partition, ties: &TieReport) -> Result<String> {
    let raw = PartitionJson {
        assignment: p.assignment.iter().map(|a| a + 1).collect(),
        cut_value: p.cut_value,
        ties: ties
            .iter()
            .map(|(v, labels)| ((v + 1).to_string(), labels.iter().map(|j| j + 1).collect()))
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&raw)?)
}

pub fn associations_to_json(p: &AssociationMatrix) -> Result<String> {
    Ok(serde_json::to_string(&p.to_rows())?)
}

/// Anneal trace with columns `beta,L,D,H,inner_iters,pA_1..pA_k`.
pub fn write_trace_csv<W: Write>(entries: &[TraceEntry], k: usize, out: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["beta", "L", "D", "H", "inner_iters"].map(String::from).to_vec();
    header.extend((1..=k).map(|j| format!("pA_{j}")));
    csv.write_record(&header)?;
    for e in entries {
        let mut row = vec![
            e.beta.to_string(),
            e.free_energy.to_string(),
            e.cut_cost.to_string(),
            e.entropy.to_string(),
            e.inner_iters.to_string(),
        ];
        row.extend(e.partition_weights.iter().map(f64::to_string));
        csv.write_record(&row)?;
    }
    csv.flush()?;
    Ok(())
}
