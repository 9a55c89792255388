//! Node and edge filtering functions used to drive filtrations.
//!
//! Conventions:
//! - closeness excludes unreachable pairs: `reachable / sum(hop distances)`,
//!   and an isolated node scores 0;
//! - betweenness (node and edge) is exact Brandes accumulation, counting each
//!   unordered pair of endpoints once, with no normalization. For edges, the
//!   pair made of the edge's own endpoints counts;
//! - Katz centrality is `(I - aA)^-1 1 - 1` with `a = 0.9 / lambda_max`;
//! - Forman-Ricci curvature of edge `(u, v)` is `4 - deg(u) - deg(v)`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{EmpError, Result};
use crate::graph::Graph;

const KATZ_DAMPING: f64 = 0.9;
const POWER_ITERATION_TOL: f64 = 1e-8;
const POWER_ITERATION_CAP: usize = 1000;
const KATZ_TOL: f64 = 1e-10;
const KATZ_ITERATION_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeFilterKind {
    Degree,
    WeightedDegree,
    Closeness,
    BetweennessNode,
    Katz,
    Attribute(usize),
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeFilterKind {
    Weight,
    EdgeBetweenness,
    FormanRicci,
    Attribute(usize),
}

/// Either kind of filtering function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    Node(NodeFilterKind),
    Edge(EdgeFilterKind),
}

impl fmt::Display for NodeFilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeFilterKind::Degree => f.write_str("degree"),
            NodeFilterKind::WeightedDegree => f.write_str("weighted_degree"),
            NodeFilterKind::Closeness => f.write_str("closeness"),
            NodeFilterKind::BetweennessNode => f.write_str("betweenness"),
            NodeFilterKind::Katz => f.write_str("katz"),
            NodeFilterKind::Attribute(i) => write!(f, "attr:{i}"),
            NodeFilterKind::Constant => f.write_str("constant"),
        }
    }
}

impl fmt::Display for EdgeFilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeFilterKind::Weight => f.write_str("weight"),
            EdgeFilterKind::EdgeBetweenness => f.write_str("edge_betweenness"),
            EdgeFilterKind::FormanRicci => f.write_str("ricci"),
            EdgeFilterKind::Attribute(i) => write!(f, "edge_attr:{i}"),
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterKind::Node(k) => k.fmt(f),
            FilterKind::Edge(k) => k.fmt(f),
        }
    }
}

fn parse_index(s: &str, prefix: &str) -> Option<usize> {
    s.strip_prefix(prefix).and_then(|rest| rest.parse().ok())
}

impl FromStr for FilterKind {
    type Err = EmpError;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s {
            "degree" => FilterKind::Node(NodeFilterKind::Degree),
            "weighted_degree" => FilterKind::Node(NodeFilterKind::WeightedDegree),
            "closeness" => FilterKind::Node(NodeFilterKind::Closeness),
            "betweenness" | "betweenness_node" => FilterKind::Node(NodeFilterKind::BetweennessNode),
            "katz" => FilterKind::Node(NodeFilterKind::Katz),
            "constant" => FilterKind::Node(NodeFilterKind::Constant),
            "weight" => FilterKind::Edge(EdgeFilterKind::Weight),
            "edge_betweenness" => FilterKind::Edge(EdgeFilterKind::EdgeBetweenness),
            "ricci" | "forman_ricci" => FilterKind::Edge(EdgeFilterKind::FormanRicci),
            other => {
                if let Some(i) = parse_index(other, "edge_attr:") {
                    FilterKind::Edge(EdgeFilterKind::Attribute(i))
                } else if let Some(i) = parse_index(other, "attr:") {
                    FilterKind::Node(NodeFilterKind::Attribute(i))
                } else {
                    return Err(EmpError::Config(format!("unknown filter kind '{other}'")));
                }
            }
        };
        Ok(kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeFilterValues {
    pub kind: NodeFilterKind,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFilterValues {
    pub kind: EdgeFilterKind,
    pub values: Vec<f64>,
}

pub fn compute_node_filter(graph: &Graph, kind: NodeFilterKind) -> Result<NodeFilterValues> {
    let values = match kind {
        NodeFilterKind::Degree => graph.degrees().into_iter().map(|d| d as f64).collect(),
        NodeFilterKind::WeightedDegree => {
            let weights = graph.edge_weights().ok_or(EmpError::MissingWeights)?;
            let mut out = vec![0.0; graph.node_count()];
            for (&(u, v), &w) in graph.edges().iter().zip(weights) {
                out[u] += w;
                out[v] += w;
            }
            out
        }
        NodeFilterKind::Closeness => closeness(graph),
        NodeFilterKind::BetweennessNode => brandes(graph).0,
        NodeFilterKind::Katz => katz(graph).values,
        NodeFilterKind::Attribute(index) => {
            let attrs = graph.node_attributes().ok_or(EmpError::MissingAttribute {
                scope: "node",
                index,
            })?;
            attrs
                .iter()
                .map(|a| {
                    a.get(index).copied().ok_or(EmpError::MissingAttribute {
                        scope: "node",
                        index,
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        NodeFilterKind::Constant => vec![0.0; graph.node_count()],
    };
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(EmpError::InvalidGraph(format!(
            "{kind} produced non-finite value {bad}"
        )));
    }
    Ok(NodeFilterValues { kind, values })
}

pub fn compute_edge_filter(graph: &Graph, kind: EdgeFilterKind) -> Result<EdgeFilterValues> {
    let values = match kind {
        EdgeFilterKind::Weight => graph
            .edge_weights()
            .ok_or(EmpError::MissingWeights)?
            .to_vec(),
        EdgeFilterKind::EdgeBetweenness => brandes(graph).1,
        EdgeFilterKind::FormanRicci => {
            let deg = graph.degrees();
            graph
                .edges()
                .iter()
                .map(|&(u, v)| 4.0 - deg[u] as f64 - deg[v] as f64)
                .collect()
        }
        EdgeFilterKind::Attribute(index) => {
            let attrs = graph.edge_attributes().ok_or(EmpError::MissingAttribute {
                scope: "edge",
                index,
            })?;
            attrs
                .iter()
                .map(|a| {
                    a.get(index).copied().ok_or(EmpError::MissingAttribute {
                        scope: "edge",
                        index,
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(EmpError::InvalidGraph(format!(
            "{kind} produced non-finite value {bad}"
        )));
    }
    Ok(EdgeFilterValues { kind, values })
}

/// Hop distances from `source`; `usize::MAX` marks unreachable nodes.
pub fn bfs_distances(adj: &[Vec<usize>], source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

fn closeness(graph: &Graph) -> Vec<f64> {
    let adj = graph.adjacency();
    (0..graph.node_count())
        .map(|s| {
            let (reached, total) = bfs_distances(&adj, s)
                .into_iter()
                .filter(|&d| d != usize::MAX && d > 0)
                .fold((0usize, 0usize), |(n, t), d| (n + 1, t + d));
            if total == 0 {
                0.0
            } else {
                reached as f64 / total as f64
            }
        })
        .collect()
}

/// Brandes accumulation over unweighted shortest paths.
///
/// Returns (node betweenness, edge betweenness), both over unordered pairs.
fn brandes(graph: &Graph) -> (Vec<f64>, Vec<f64>) {
    let n = graph.node_count();
    let inc = graph.incidence();
    let mut node_bc = vec![0.0; n];
    let mut edge_bc = vec![0.0; graph.edge_count()];

    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut preds: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();

    for s in 0..n {
        sigma.fill(0.0);
        dist.fill(usize::MAX);
        delta.fill(0.0);
        preds.iter_mut().for_each(Vec::clear);
        order.clear();

        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &(v, e) in &inc[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
                if dist[v] == dist[u] + 1 {
                    sigma[v] += sigma[u];
                    preds[v].push((u, e));
                }
            }
        }
        for &w in order.iter().rev() {
            for &(u, e) in &preds[w] {
                let share = sigma[u] / sigma[w] * (1.0 + delta[w]);
                edge_bc[e] += share;
                delta[u] += share;
            }
            if w != s {
                node_bc[w] += delta[w];
            }
        }
    }
    // every unordered pair was visited from both ends
    node_bc.iter_mut().for_each(|x| *x /= 2.0);
    edge_bc.iter_mut().for_each(|x| *x /= 2.0);
    (node_bc, edge_bc)
}

/// Katz centrality together with the solver diagnostics.
#[derive(Debug, Clone)]
pub struct KatzResult {
    pub values: Vec<f64>,
    pub lambda_max: f64,
    pub alpha: f64,
    pub iterations: usize,
    /// Max-norm difference between the last two iterates.
    pub last_step: f64,
}

/// Upper estimate of the spectral radius of the adjacency matrix.
///
/// Power iteration on `A + I` from the all-ones vector. The iterate stays
/// positive, so `max_i (Bx)_i / x_i` bounds the top eigenvalue of `B = A + I`
/// from above and the Rayleigh quotient bounds it from below; iteration stops
/// once they agree to tolerance. The upper bound is returned so that
/// `0.9 / lambda` never exceeds `0.9 / lambda_max`.
pub fn spectral_radius_upper(graph: &Graph) -> f64 {
    let n = graph.node_count();
    if graph.edge_count() == 0 {
        return 0.0;
    }
    let adj = graph.adjacency();
    let mut x = vec![1.0; n];
    let mut upper = f64::INFINITY;
    for _ in 0..POWER_ITERATION_CAP {
        let y: Vec<f64> = (0..n)
            .map(|i| x[i] + adj[i].iter().map(|&j| x[j]).sum::<f64>())
            .collect();
        let ratio = (0..n)
            .map(|i| y[i] / x[i])
            .fold(f64::NEG_INFINITY, f64::max);
        upper = upper.min(ratio);
        let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let xx: f64 = x.iter().map(|a| a * a).sum();
        let rayleigh = xy / xx;
        let norm = y.iter().cloned().fold(0.0, f64::max);
        x = y.into_iter().map(|v| v / norm).collect();
        if upper - rayleigh < POWER_ITERATION_TOL {
            break;
        }
    }
    upper - 1.0
}

pub fn katz(graph: &Graph) -> KatzResult {
    let n = graph.node_count();
    let lambda_max = spectral_radius_upper(graph);
    if lambda_max <= 0.0 {
        return KatzResult {
            values: vec![0.0; n],
            lambda_max,
            alpha: 0.0,
            iterations: 0,
            last_step: 0.0,
        };
    }
    let alpha = KATZ_DAMPING / lambda_max;
    let adj = graph.adjacency();
    // c <- aA(c + 1) converges to (I - aA)^-1 1 - 1
    let mut c = vec![0.0; n];
    let mut iterations = 0;
    let mut last_step = f64::INFINITY;
    while iterations < KATZ_ITERATION_CAP {
        let next: Vec<f64> = (0..n)
            .map(|i| alpha * adj[i].iter().map(|&j| c[j] + 1.0).sum::<f64>())
            .collect();
        last_step = next
            .iter()
            .zip(&c)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        c = next;
        iterations += 1;
        if last_step < KATZ_TOL {
            break;
        }
    }
    KatzResult {
        values: c,
        lambda_max,
        alpha,
        iterations,
        last_step,
    }
}
