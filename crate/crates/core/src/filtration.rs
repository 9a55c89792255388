//! Threshold selection, first-direction slicing and the power (Rips) filtration.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::complex::{check_thresholds, fill_triangles, Edge, FilteredComplex, Vertex};
use crate::error::{EmpError, Result};
use crate::filters::{bfs_distances, EdgeFilterValues, NodeFilterValues};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdStrategy {
    Quantile,
    Uniform,
    ExactValues,
}

impl FromStr for ThresholdStrategy {
    type Err = EmpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantile" => Ok(ThresholdStrategy::Quantile),
            "uniform" => Ok(ThresholdStrategy::Uniform),
            "exact" | "exact_values" => Ok(ThresholdStrategy::ExactValues),
            other => Err(EmpError::Config(format!(
                "unknown threshold strategy '{other}'"
            ))),
        }
    }
}

impl fmt::Display for ThresholdStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdStrategy::Quantile => "quantile",
            ThresholdStrategy::Uniform => "uniform",
            ThresholdStrategy::ExactValues => "exact_values",
        })
    }
}

/// A threshold sequence and whether it had to be invented because every
/// input value was identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub values: Vec<f64>,
    pub degenerate: bool,
}

/// Picks at most `count` strictly increasing thresholds covering the range
/// of `values`.
///
/// Quantile thresholds are order statistics at evenly spaced ranks
/// (`round(k (N-1) / (count-1))` in the sorted sample), deduplicated.
/// When all values coincide at `v` the result is `[v, v + 1]`, flagged
/// degenerate.
pub fn select_thresholds(
    values: &[f64],
    count: usize,
    strategy: ThresholdStrategy,
) -> Result<Thresholds> {
    if count < 2 {
        return Err(EmpError::InvalidThresholds(format!(
            "need at least 2 thresholds, got {count}"
        )));
    }
    if values.is_empty() {
        return Err(EmpError::InvalidThresholds(
            "no values to choose thresholds from".into(),
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(EmpError::InvalidThresholds(
            "non-finite filter value".into(),
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    if lo == hi {
        return Ok(Thresholds {
            values: vec![lo, lo + 1.0],
            degenerate: true,
        });
    }
    let mut out: Vec<f64> = match strategy {
        ThresholdStrategy::Uniform => (0..count)
            .map(|k| {
                if k == count - 1 {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (count - 1) as f64
                }
            })
            .collect(),
        ThresholdStrategy::Quantile => quantile_picks(&sorted, count),
        ThresholdStrategy::ExactValues => {
            let mut distinct = sorted.clone();
            distinct.dedup();
            if distinct.len() <= count {
                distinct
            } else {
                quantile_picks(&distinct, count)
            }
        }
    };
    out.dedup();
    Ok(Thresholds {
        values: out,
        degenerate: false,
    })
}

fn quantile_picks(sorted: &[f64], count: usize) -> Vec<f64> {
    let last = (sorted.len() - 1) as f64;
    (0..count)
        .map(|k| sorted[(last * k as f64 / (count - 1) as f64).round() as usize])
        .collect()
}

/// Extends a strictly increasing sequence to exactly `count` entries by
/// repeatedly inserting the midpoint of the widest gap (the first one on
/// ties). Existing thresholds are kept, so the columns they index keep
/// their meaning.
pub fn fill_to_count(values: &[f64], count: usize) -> Vec<f64> {
    let mut out = values.to_vec();
    while out.len() < count && out.len() >= 2 {
        let (k, _) = out
            .windows(2)
            .enumerate()
            .map(|(k, w)| (k, w[1] - w[0]))
            .fold((0, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
        let mid = out[k] + (out[k + 1] - out[k]) / 2.0;
        if !(mid > out[k] && mid < out[k + 1]) {
            break;
        }
        out.insert(k + 1, mid);
    }
    out
}

/// Threshold sequences for the two filtering directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdGrid {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub strategy: ThresholdStrategy,
}

impl ThresholdGrid {
    pub fn new(alphas: Vec<f64>, betas: Vec<f64>, strategy: ThresholdStrategy) -> Result<Self> {
        check_thresholds(&alphas)?;
        check_thresholds(&betas)?;
        Ok(ThresholdGrid {
            alphas,
            betas,
            strategy,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.alphas.len(), self.betas.len())
    }
}

/// A subgraph of a parent graph, as sorted node ids and parent edge indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub threshold: f64,
    pub nodes: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Slice {
    pub fn full(graph: &Graph, threshold: f64) -> Self {
        Slice {
            threshold,
            nodes: (0..graph.node_count()).collect(),
            edges: (0..graph.edge_count()).collect(),
        }
    }

    pub fn is_subslice_of(&self, other: &Slice) -> bool {
        is_sorted_subset(&self.nodes, &other.nodes) && is_sorted_subset(&self.edges, &other.edges)
    }
}

fn is_sorted_subset(a: &[usize], b: &[usize]) -> bool {
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
    }
    true
}

/// The nested subgraphs cut out by one filtering direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlicedFiltration {
    pub slices: Vec<Slice>,
}

/// A first-direction filter restricted to the parent graph: node values give
/// induced sublevel subgraphs, edge values give weight filtrations.
#[derive(Debug, Clone, Copy)]
pub enum SliceFilter<'a> {
    Node(&'a [f64]),
    Edge(&'a [f64]),
}

/// Slices `base` at each threshold.
///
/// Node filters keep the nodes of `base` with value `<= alpha` and the edges
/// of `base` between them. Edge filters keep every node of `base` and the
/// edges of `base` with value `<= alpha`.
pub fn slices_within(
    graph: &Graph,
    base: &Slice,
    filter: SliceFilter<'_>,
    alphas: &[f64],
) -> Result<SlicedFiltration> {
    check_thresholds(alphas)?;
    let slices = match filter {
        SliceFilter::Node(f) => {
            if f.len() != graph.node_count() {
                return Err(EmpError::LengthMismatch {
                    expected: graph.node_count(),
                    found: f.len(),
                });
            }
            alphas
                .iter()
                .map(|&alpha| {
                    let nodes: Vec<usize> = base
                        .nodes
                        .iter()
                        .copied()
                        .filter(|&v| f[v] <= alpha)
                        .collect();
                    let edges = base
                        .edges
                        .iter()
                        .copied()
                        .filter(|&e| {
                            let (u, v) = graph.edges()[e];
                            f[u] <= alpha && f[v] <= alpha
                        })
                        .collect();
                    Slice {
                        threshold: alpha,
                        nodes,
                        edges,
                    }
                })
                .collect()
        }
        SliceFilter::Edge(w) => {
            if w.len() != graph.edge_count() {
                return Err(EmpError::LengthMismatch {
                    expected: graph.edge_count(),
                    found: w.len(),
                });
            }
            alphas
                .iter()
                .map(|&alpha| Slice {
                    threshold: alpha,
                    nodes: base.nodes.clone(),
                    edges: base
                        .edges
                        .iter()
                        .copied()
                        .filter(|&e| w[e] <= alpha)
                        .collect(),
                })
                .collect()
        }
    };
    Ok(SlicedFiltration { slices })
}

/// Induced sublevel subgraphs `{v : f(v) <= alpha_i}`.
pub fn sublevel_slices(
    graph: &Graph,
    f: &NodeFilterValues,
    alphas: &[f64],
) -> Result<SlicedFiltration> {
    slices_within(
        graph,
        &Slice::full(graph, f64::INFINITY),
        SliceFilter::Node(&f.values),
        alphas,
    )
}

/// Weight filtration: all nodes, plus the edges with value `<= alpha_i`.
pub fn edge_weight_slices(
    graph: &Graph,
    w: &EdgeFilterValues,
    alphas: &[f64],
) -> Result<SlicedFiltration> {
    slices_within(
        graph,
        &Slice::full(graph, f64::INFINITY),
        SliceFilter::Edge(&w.values),
        alphas,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry(f64, usize);

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Pairwise shortest-path distances inside a slice, in slice-node order.
///
/// Without `lengths` distances count hops; with `lengths` (indexed by parent
/// edge id, all positive) they are weighted path lengths. Unreachable pairs
/// are `f64::INFINITY`.
pub fn shortest_path_matrix(
    graph: &Graph,
    slice: &Slice,
    lengths: Option<&[f64]>,
) -> Result<Vec<Vec<f64>>> {
    let n = slice.nodes.len();
    let local: HashMap<usize, usize> = slice
        .nodes
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &e in &slice.edges {
        let (u, v) = graph.edges()[e];
        let (Some(&a), Some(&b)) = (local.get(&u), local.get(&v)) else {
            return Err(EmpError::InvalidGraph(format!(
                "slice edge {e} has an endpoint outside the slice"
            )));
        };
        let len = match lengths {
            None => 1.0,
            Some(l) => {
                let x = l[e];
                if !(x > 0.0 && x.is_finite()) {
                    return Err(EmpError::InvalidGraph(format!(
                        "edge length {x} must be positive and finite"
                    )));
                }
                x
            }
        };
        adj[a].push((b, len));
        adj[b].push((a, len));
    }

    if lengths.is_none() {
        let hop: Vec<Vec<usize>> = adj
            .iter()
            .map(|l| l.iter().map(|&(b, _)| b).collect())
            .collect();
        return Ok((0..n)
            .map(|s| {
                bfs_distances(&hop, s)
                    .into_iter()
                    .map(|d| {
                        if d == usize::MAX {
                            f64::INFINITY
                        } else {
                            d as f64
                        }
                    })
                    .collect()
            })
            .collect());
    }

    Ok((0..n)
        .map(|s| {
            let mut dist = vec![f64::INFINITY; n];
            let mut heap = BinaryHeap::new();
            dist[s] = 0.0;
            heap.push(HeapEntry(0.0, s));
            while let Some(HeapEntry(d, u)) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &(v, len) in &adj[u] {
                    let nd = d + len;
                    if nd < dist[v] {
                        dist[v] = nd;
                        heap.push(HeapEntry(nd, v));
                    }
                }
            }
            dist
        })
        .collect())
}

/// Rips complex on `nodes` with distance matrix `dist`: a simplex enters at
/// the first epsilon strictly greater than all of its pairwise distances.
pub fn rips_complex(
    nodes: &[usize],
    dist: &[Vec<f64>],
    epsilons: &[f64],
) -> Result<FilteredComplex> {
    check_thresholds(epsilons)?;
    let vertices = nodes
        .iter()
        .map(|&node| Vertex { node, grade: 0 })
        .collect();
    let mut edges = Vec::new();
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            let d = dist[i][j];
            let grade = epsilons.partition_point(|&e| e <= d);
            if grade < epsilons.len() {
                edges.push(Edge {
                    nodes: [nodes[i], nodes[j]],
                    grade,
                });
            }
        }
    }
    let triangles = fill_triangles(&edges);
    FilteredComplex::new(epsilons.to_vec(), vertices, edges, triangles)
}

/// Power filtration of one slice: shortest-path distances inside the slice
/// followed by the Rips construction.
pub fn power_complex(
    graph: &Graph,
    slice: &Slice,
    lengths: Option<&[f64]>,
    epsilons: &[f64],
) -> Result<FilteredComplex> {
    let dist = shortest_path_matrix(graph, slice, lengths)?;
    rips_complex(&slice.nodes, &dist, epsilons)
}

/// Power filtration of a whole graph, using hop distances or, when the
/// graph is weighted, weighted shortest paths.
pub fn power_filtration(graph: &Graph, epsilons: &[f64]) -> Result<FilteredComplex> {
    power_complex(
        graph,
        &Slice::full(graph, f64::INFINITY),
        graph.edge_weights(),
        epsilons,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{compute_node_filter, NodeFilterKind};

    #[test]
    fn uniform_endpoints() {
        let t = select_thresholds(&[1.0, 2.0, 3.0, 4.0], 2, ThresholdStrategy::Uniform).unwrap();
        assert_eq!(t.values, vec![1.0, 4.0]);
        assert!(!t.degenerate);
    }

    #[test]
    fn identical_values_are_degenerate() {
        let t = select_thresholds(&[0.0, 0.0, 0.0], 5, ThresholdStrategy::Quantile).unwrap();
        assert_eq!(t.values, vec![0.0, 1.0]);
        assert!(t.degenerate);
    }

    #[test]
    fn quantiles_with_ties() {
        let v = [1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 100.0];
        let t = select_thresholds(&v, 4, ThresholdStrategy::Quantile).unwrap();
        assert_eq!(t.values, vec![1.0, 2.0, 3.0, 100.0]);
    }

    #[test]
    fn quantiles_deduplicate() {
        let v = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        let t = select_thresholds(&v, 5, ThresholdStrategy::Quantile).unwrap();
        assert_eq!(t.values, vec![0.0, 1.0]);
    }

    #[test]
    fn exact_values_lists_distinct_values() {
        let t =
            select_thresholds(&[3.0, 1.0, 3.0, 2.0], 10, ThresholdStrategy::ExactValues).unwrap();
        assert_eq!(t.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn threshold_errors() {
        assert!(select_thresholds(&[1.0], 1, ThresholdStrategy::Uniform).is_err());
        assert!(select_thresholds(&[], 3, ThresholdStrategy::Uniform).is_err());
        assert!(select_thresholds(&[f64::NAN], 3, ThresholdStrategy::Uniform).is_err());
        assert!(ThresholdGrid::new(vec![1.0, 1.0], vec![0.0], ThresholdStrategy::Uniform).is_err());
    }

    #[test]
    fn sublevel_path() {
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let f = NodeFilterValues {
            kind: NodeFilterKind::Constant,
            values: vec![1.0, 2.0, 3.0],
        };
        let s = sublevel_slices(&g, &f, &[1.0, 2.0, 3.0]).unwrap();
        let nodes: Vec<_> = s.slices.iter().map(|s| s.nodes.clone()).collect();
        assert_eq!(nodes, vec![vec![0], vec![0, 1], vec![0, 1, 2]]);
        assert_eq!(s.slices[2].edges, vec![0, 1]);
    }

    #[test]
    fn first_slice_below_minimum_is_empty() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let f = NodeFilterValues {
            kind: NodeFilterKind::Constant,
            values: vec![1.0, 2.0],
        };
        let s = sublevel_slices(&g, &f, &[0.0, 2.0]).unwrap();
        assert!(s.slices[0].nodes.is_empty() && s.slices[0].edges.is_empty());
    }

    #[test]
    fn star_degree_slices() {
        let g = Graph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let f = compute_node_filter(&g, NodeFilterKind::Degree).unwrap();
        let s = sublevel_slices(&g, &f, &[1.0, 3.0]).unwrap();
        assert_eq!(s.slices[0].nodes, vec![1, 2, 3]);
        assert!(s.slices[0].edges.is_empty());
        assert_eq!(s.slices[1].nodes, vec![0, 1, 2, 3]);
        assert_eq!(s.slices[1].edges.len(), 3);
    }

    #[test]
    fn weight_slices_keep_all_nodes() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let w = EdgeFilterValues {
            kind: crate::filters::EdgeFilterKind::Weight,
            values: vec![1.0, 2.0, 3.0],
        };
        let s = edge_weight_slices(&g, &w, &[1.0, 2.0, 3.0]).unwrap();
        let counts: Vec<_> = s.slices.iter().map(|s| s.edges.len()).collect();
        assert_eq!(counts, vec![1, 2, 3]);
        let low = edge_weight_slices(&g, &w, &[0.5]).unwrap();
        assert_eq!(low.slices[0].nodes.len(), 3);
        assert!(low.slices[0].edges.is_empty());
    }

    #[test]
    fn power_filtration_of_path() {
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let c = power_filtration(&g, &[1.5, 2.5]).unwrap();
        let far = c.edges().iter().find(|e| e.nodes == [0, 2]).unwrap();
        assert_eq!(c.grade_value(far.grade), 2.5);
        assert_eq!(c.triangles().len(), 1);
        assert_eq!(c.grade_value(c.triangles()[0].grade), 2.5);
        assert!(c
            .edges()
            .iter()
            .filter(|e| e.nodes != [0, 2])
            .all(|e| c.grade_value(e.grade) == 1.5));
    }

    #[test]
    fn power_filtration_edge_cases() {
        let single = power_filtration(&Graph::new(1, vec![]).unwrap(), &[1.0, 2.0]).unwrap();
        assert_eq!(single.vertices().len(), 1);
        assert_eq!(single.grade_value(single.vertices()[0].grade), 1.0);

        let apart = power_filtration(&Graph::new(2, vec![]).unwrap(), &[1.0, 1e9]).unwrap();
        assert!(apart.edges().is_empty());

        let empty = power_filtration(&Graph::new(0, vec![]).unwrap(), &[1.0]).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn weighted_distances_use_dijkstra() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)])
            .unwrap()
            .with_weights(vec![1.0, 1.0, 5.0])
            .unwrap();
        let d = shortest_path_matrix(&g, &Slice::full(&g, 0.0), g.edge_weights()).unwrap();
        assert_eq!(d[0][2], 2.0);
        let bad = Graph::new(2, vec![(0, 1)])
            .unwrap()
            .with_weights(vec![-1.0])
            .unwrap();
        assert!(power_filtration(&bad, &[1.0]).is_err());
    }

    #[test]
    fn fill_to_count_keeps_existing_thresholds() {
        assert_eq!(
            fill_to_count(&[0.0, 1.0, 4.0], 5),
            vec![0.0, 1.0, 1.75, 2.5, 4.0]
        );
        assert_eq!(fill_to_count(&[1.0, 2.0, 3.0], 2), vec![1.0, 2.0, 3.0]);
    }
}
