//! Undirected simple graphs with optional weights and attributes.

use serde::{Deserialize, Serialize};

use crate::error::{EmpError, Result};

/// An undirected simple graph on nodes `0..node_count`.
///
/// Edges are stored once with `u < v`, in the order they were first seen.
/// Optional per-edge data (`edge_weights`, `edge_attributes`) is aligned with
/// `edges`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    edge_weights: Option<Vec<f64>>,
    node_attributes: Option<Vec<Vec<f64>>>,
    edge_attributes: Option<Vec<Vec<f64>>>,
    label: Option<i64>,
}

impl Graph {
    /// Builds a graph from an edge list.
    ///
    /// Endpoints are normalized to `u < v`. Self-loops, out-of-range ids and
    /// duplicate edges are rejected; use [`GraphBuilder`] to drop duplicates
    /// instead.
    pub fn new(node_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let graph = Graph {
            node_count,
            edges: edges
                .into_iter()
                .map(|(u, v)| (u.min(v), u.max(v)))
                .collect(),
            edge_weights: None,
            node_attributes: None,
            edge_attributes: None,
            label: None,
        };
        graph.validate()?;
        Ok(graph)
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.edges.len() {
            return Err(EmpError::LengthMismatch {
                expected: self.edges.len(),
                found: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
            return Err(EmpError::InvalidGraph(format!(
                "non-finite edge weight {w}"
            )));
        }
        self.edge_weights = Some(weights);
        Ok(self)
    }

    pub fn with_node_attributes(mut self, attributes: Vec<Vec<f64>>) -> Result<Self> {
        if attributes.len() != self.node_count {
            return Err(EmpError::LengthMismatch {
                expected: self.node_count,
                found: attributes.len(),
            });
        }
        self.node_attributes = Some(attributes);
        Ok(self)
    }

    pub fn with_edge_attributes(mut self, attributes: Vec<Vec<f64>>) -> Result<Self> {
        if attributes.len() != self.edges.len() {
            return Err(EmpError::LengthMismatch {
                expected: self.edges.len(),
                found: attributes.len(),
            });
        }
        self.edge_attributes = Some(attributes);
        Ok(self)
    }

    pub fn with_label(mut self, label: i64) -> Self {
        self.label = Some(label);
        self
    }

    fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::with_capacity(self.edges.len());
        for &(u, v) in &self.edges {
            if v >= self.node_count {
                return Err(EmpError::InvalidGraph(format!(
                    "edge ({u}, {v}) references a node outside 0..{}",
                    self.node_count
                )));
            }
            if u == v {
                return Err(EmpError::InvalidGraph(format!("self-loop at node {u}")));
            }
            if !seen.insert((u, v)) {
                return Err(EmpError::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_weights(&self) -> Option<&[f64]> {
        self.edge_weights.as_deref()
    }

    pub fn node_attributes(&self) -> Option<&[Vec<f64>]> {
        self.node_attributes.as_deref()
    }

    pub fn edge_attributes(&self) -> Option<&[Vec<f64>]> {
        self.edge_attributes.as_deref()
    }

    pub fn label(&self) -> Option<i64> {
        self.label
    }

    /// Sorted neighbour lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Neighbour lists carrying the index of the connecting edge.
    pub fn incidence(&self) -> Vec<Vec<(usize, usize)>> {
        let mut inc = vec![Vec::new(); self.node_count];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            inc[u].push((v, e));
            inc[v].push((u, e));
        }
        for list in &mut inc {
            list.sort_unstable();
        }
        inc
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Relabels nodes so that old node `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.node_count {
            return Err(EmpError::LengthMismatch {
                expected: self.node_count,
                found: perm.len(),
            });
        }
        let mut g = Graph::new(
            self.node_count,
            self.edges
                .iter()
                .map(|&(u, v)| (perm[u], perm[v]))
                .collect(),
        )?;
        g.edge_weights = self.edge_weights.clone();
        g.edge_attributes = self.edge_attributes.clone();
        g.label = self.label;
        if let Some(attrs) = &self.node_attributes {
            let mut moved = vec![Vec::new(); self.node_count];
            for (old, a) in attrs.iter().enumerate() {
                moved[perm[old]] = a.clone();
            }
            g.node_attributes = Some(moved);
        }
        Ok(g)
    }
}

/// Accumulates edges, silently dropping duplicates of an undirected edge.
///
/// The first occurrence of an edge keeps its weight and attributes.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    node_count: usize,
    index: std::collections::HashMap<(usize, usize), usize>,
    edges: Vec<(usize, usize)>,
    weights: Vec<f64>,
    edge_attributes: Vec<Vec<f64>>,
}

impl GraphBuilder {
    pub fn new(node_count: usize) -> Self {
        GraphBuilder {
            node_count,
            ..Default::default()
        }
    }

    /// Adds an edge; returns false if it was a duplicate or a self-loop.
    pub fn add_edge(
        &mut self,
        u: usize,
        v: usize,
        weight: Option<f64>,
        attrs: Option<Vec<f64>>,
    ) -> bool {
        if u == v {
            return false;
        }
        let key = (u.min(v), u.max(v));
        if self.index.contains_key(&key) {
            return false;
        }
        self.index.insert(key, self.edges.len());
        self.edges.push(key);
        self.weights.push(weight.unwrap_or(f64::NAN));
        self.edge_attributes.push(attrs.unwrap_or_default());
        true
    }

    pub fn build(self, with_weights: bool, with_edge_attributes: bool) -> Result<Graph> {
        let mut g = Graph::new(self.node_count, self.edges)?;
        if with_weights {
            g = g.with_weights(self.weights)?;
        }
        if with_edge_attributes {
            g = g.with_edge_attributes(self.edge_attributes)?;
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_edge_orientation() {
        let g = Graph::new(3, vec![(1, 0), (2, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        assert!(Graph::new(2, vec![(1, 1)]).is_err());
        assert!(Graph::new(2, vec![(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, vec![(0, 2)]).is_err());
    }

    #[test]
    fn rejects_non_finite_weights() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        assert!(g.clone().with_weights(vec![f64::INFINITY]).is_err());
        assert!(g.with_weights(vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn builder_drops_reverse_duplicates() {
        let mut b = GraphBuilder::new(3);
        assert!(b.add_edge(0, 1, Some(2.0), None));
        assert!(!b.add_edge(1, 0, Some(5.0), None));
        assert!(!b.add_edge(2, 2, None, None));
        let g = b.build(true, false).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        assert_eq!(g.edge_weights(), Some(&[2.0][..]));
    }

    #[test]
    fn permutation_moves_node_attributes() {
        let g = Graph::new(3, vec![(0, 1)])
            .unwrap()
            .with_node_attributes(vec![vec![0.0], vec![1.0], vec![2.0]])
            .unwrap();
        let p = g.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.edges(), &[(0, 2)]);
        assert_eq!(p.node_attributes().unwrap()[2], vec![0.0]);
    }
}
