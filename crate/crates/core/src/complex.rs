//! Graded simplicial complexes of dimension at most two.
//!
//! Every simplex carries a grade given as an index into a strictly
//! increasing threshold sequence; a value is snapped to the first threshold
//! that is greater than or equal to it.

use std::collections::HashMap;

use crate::error::{EmpError, Result};
use crate::filtration::Slice;
use crate::graph::Graph;

/// Index of the first threshold `>= value`, or `None` above the last one.
pub fn snap_to_threshold(thresholds: &[f64], value: f64) -> Option<usize> {
    let j = thresholds.partition_point(|&t| t < value);
    (j < thresholds.len()).then_some(j)
}

pub(crate) fn check_thresholds(thresholds: &[f64]) -> Result<()> {
    if thresholds.is_empty() {
        return Err(EmpError::InvalidThresholds(
            "empty threshold sequence".into(),
        ));
    }
    if thresholds.iter().any(|t| !t.is_finite()) {
        return Err(EmpError::InvalidThresholds("non-finite threshold".into()));
    }
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EmpError::InvalidThresholds(
            "thresholds must be strictly increasing".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vertex {
    pub node: usize,
    pub grade: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub nodes: [usize; 2],
    pub grade: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triangle {
    pub nodes: [usize; 3],
    pub grade: usize,
}

/// One simplex in the reduction order, referring into the per-dimension lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimplexRef {
    Vertex(usize),
    Edge(usize),
    Triangle(usize),
}

/// A graded flag-style complex with simplices up to dimension two.
///
/// Invariants (checked on construction):
/// - grades index into `thresholds`;
/// - each edge's endpoints are vertices of no larger grade;
/// - each triangle's three edges are present with no larger grade.
///
/// Each per-dimension list is stably sorted by grade, so simplices that
/// share a grade keep the order they were supplied in.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredComplex {
    thresholds: Vec<f64>,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    triangles: Vec<Triangle>,
}

impl FilteredComplex {
    pub fn new(
        thresholds: Vec<f64>,
        mut vertices: Vec<Vertex>,
        mut edges: Vec<Edge>,
        mut triangles: Vec<Triangle>,
    ) -> Result<Self> {
        check_thresholds(&thresholds)?;
        let q = thresholds.len();
        let malformed = |msg: String| Err(EmpError::MalformedComplex(msg));

        let mut vertex_grade = HashMap::with_capacity(vertices.len());
        for v in &vertices {
            if v.grade >= q {
                return malformed(format!(
                    "vertex {} has grade index {} >= {q}",
                    v.node, v.grade
                ));
            }
            if vertex_grade.insert(v.node, v.grade).is_some() {
                return malformed(format!("duplicate vertex {}", v.node));
            }
        }

        let mut edge_grade = HashMap::with_capacity(edges.len());
        for e in &mut edges {
            e.nodes.sort_unstable();
            let [u, v] = e.nodes;
            if u == v {
                return malformed(format!("degenerate edge ({u}, {v})"));
            }
            if e.grade >= q {
                return malformed(format!(
                    "edge ({u}, {v}) has grade index {} >= {q}",
                    e.grade
                ));
            }
            for w in [u, v] {
                match vertex_grade.get(&w) {
                    None => return malformed(format!("edge ({u}, {v}) has missing vertex {w}")),
                    Some(&g) if g > e.grade => {
                        return malformed(format!("edge ({u}, {v}) enters before its vertex {w}"))
                    }
                    _ => {}
                }
            }
            if edge_grade.insert((u, v), e.grade).is_some() {
                return malformed(format!("duplicate edge ({u}, {v})"));
            }
        }

        let mut seen = std::collections::HashSet::with_capacity(triangles.len());
        for t in &mut triangles {
            t.nodes.sort_unstable();
            let [a, b, c] = t.nodes;
            if a == b || b == c {
                return malformed(format!("degenerate triangle {:?}", t.nodes));
            }
            if t.grade >= q {
                return malformed(format!(
                    "triangle {:?} has grade index {} >= {q}",
                    t.nodes, t.grade
                ));
            }
            for face in [(a, b), (a, c), (b, c)] {
                match edge_grade.get(&face) {
                    None => {
                        return malformed(format!(
                            "triangle {:?} is missing edge {face:?}",
                            t.nodes
                        ))
                    }
                    Some(&g) if g > t.grade => {
                        return malformed(format!(
                            "triangle {:?} enters before its edge {face:?}",
                            t.nodes
                        ))
                    }
                    _ => {}
                }
            }
            if !seen.insert(t.nodes) {
                return malformed(format!("duplicate triangle {:?}", t.nodes));
            }
        }

        vertices.sort_by_key(|v| v.grade);
        edges.sort_by_key(|e| e.grade);
        triangles.sort_by_key(|t| t.grade);
        Ok(FilteredComplex {
            thresholds,
            vertices,
            edges,
            triangles,
        })
    }

    pub fn empty(thresholds: Vec<f64>) -> Result<Self> {
        Self::new(thresholds, Vec::new(), Vec::new(), Vec::new())
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// The last threshold, used to close bars that never die.
    pub fn cap(&self) -> f64 {
        *self.thresholds.last().expect("thresholds are non-empty")
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn grade_value(&self, grade: usize) -> f64 {
        self.thresholds[grade]
    }

    pub fn len(&self) -> usize {
        self.vertices.len() + self.edges.len() + self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All simplices ordered by (grade, dimension, position in list).
    pub fn filtration_order(&self) -> Vec<SimplexRef> {
        let mut order = Vec::with_capacity(self.len());
        let (mut i, mut j, mut k) = (0, 0, 0);
        for grade in 0..self.thresholds.len() {
            while i < self.vertices.len() && self.vertices[i].grade == grade {
                order.push(SimplexRef::Vertex(i));
                i += 1;
            }
            while j < self.edges.len() && self.edges[j].grade == grade {
                order.push(SimplexRef::Edge(j));
                j += 1;
            }
            while k < self.triangles.len() && self.triangles[k].grade == grade {
                order.push(SimplexRef::Triangle(k));
                k += 1;
            }
        }
        order
    }

    /// Number of simplices per dimension with grade index `<= grade`.
    pub fn counts_at(&self, grade: usize) -> [usize; 3] {
        [
            self.vertices.partition_point(|v| v.grade <= grade),
            self.edges.partition_point(|e| e.grade <= grade),
            self.triangles.partition_point(|t| t.grade <= grade),
        ]
    }
}

/// Enumerates the triangles of a graph given sorted adjacency lists over
/// arbitrary node ids, calling `emit` once per triangle `a < b < c`.
fn for_each_triangle(adj: &HashMap<usize, Vec<usize>>, mut emit: impl FnMut(usize, usize, usize)) {
    let mut nodes: Vec<usize> = adj.keys().copied().collect();
    nodes.sort_unstable();
    for &a in &nodes {
        let na = &adj[&a];
        for &b in na.iter().filter(|&&b| b > a) {
            let nb = &adj[&b];
            // sorted-list intersection restricted to c > b
            let (mut x, mut y) = (
                na.partition_point(|&c| c <= b),
                nb.partition_point(|&c| c <= b),
            );
            while x < na.len() && y < nb.len() {
                match na[x].cmp(&nb[y]) {
                    std::cmp::Ordering::Less => x += 1,
                    std::cmp::Ordering::Greater => y += 1,
                    std::cmp::Ordering::Equal => {
                        emit(a, b, na[x]);
                        x += 1;
                        y += 1;
                    }
                }
            }
        }
    }
}

fn adjacency_of(edges: &[Edge]) -> HashMap<usize, Vec<usize>> {
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for e in edges {
        let [u, v] = e.nodes;
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    for list in adj.values_mut() {
        list.sort_unstable();
    }
    adj
}

/// Fills every 3-clique among `edges`, grading each triangle by its latest edge.
pub(crate) fn fill_triangles(edges: &[Edge]) -> Vec<Triangle> {
    let grade: HashMap<(usize, usize), usize> = edges
        .iter()
        .map(|e| ((e.nodes[0], e.nodes[1]), e.grade))
        .collect();
    let mut triangles = Vec::new();
    for_each_triangle(&adjacency_of(edges), |a, b, c| {
        let g = grade[&(a, b)].max(grade[&(a, c)]).max(grade[&(b, c)]);
        triangles.push(Triangle {
            nodes: [a, b, c],
            grade: g,
        });
    });
    triangles
}

/// Lower-star clique complex of a slice under a node function.
///
/// `g` is indexed by parent-graph node id. Vertices whose value exceeds the
/// last threshold are left out, together with their cofaces.
pub fn clique_complex(
    graph: &Graph,
    slice: &Slice,
    g: &[f64],
    betas: &[f64],
) -> Result<FilteredComplex> {
    check_thresholds(betas)?;
    if g.len() != graph.node_count() {
        return Err(EmpError::LengthMismatch {
            expected: graph.node_count(),
            found: g.len(),
        });
    }
    let mut grade_of = HashMap::with_capacity(slice.nodes.len());
    let vertices: Vec<Vertex> = slice
        .nodes
        .iter()
        .filter_map(|&node| {
            let grade = snap_to_threshold(betas, g[node])?;
            grade_of.insert(node, grade);
            Some(Vertex { node, grade })
        })
        .collect();
    let edges: Vec<Edge> = slice
        .edges
        .iter()
        .filter_map(|&e| {
            let (u, v) = graph.edges()[e];
            let grade = (*grade_of.get(&u)?).max(*grade_of.get(&v)?);
            Some(Edge {
                nodes: [u, v],
                grade,
            })
        })
        .collect();
    let triangles = fill_triangles(&edges);
    FilteredComplex::new(betas.to_vec(), vertices, edges, triangles)
}

/// Clique complex of a slice graded by an edge function.
///
/// Every slice vertex enters at the first threshold; `w` is indexed by
/// parent-graph edge id.
pub fn edge_graded_complex(
    graph: &Graph,
    slice: &Slice,
    w: &[f64],
    betas: &[f64],
) -> Result<FilteredComplex> {
    check_thresholds(betas)?;
    if w.len() != graph.edge_count() {
        return Err(EmpError::LengthMismatch {
            expected: graph.edge_count(),
            found: w.len(),
        });
    }
    let vertices = slice
        .nodes
        .iter()
        .map(|&node| Vertex { node, grade: 0 })
        .collect();
    let edges: Vec<Edge> = slice
        .edges
        .iter()
        .filter_map(|&e| {
            let (u, v) = graph.edges()[e];
            let grade = snap_to_threshold(betas, w[e])?;
            Some(Edge {
                nodes: [u, v],
                grade,
            })
        })
        .collect();
    let triangles = fill_triangles(&edges);
    FilteredComplex::new(betas.to_vec(), vertices, edges, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(graph: &Graph) -> Slice {
        Slice::full(graph, f64::INFINITY)
    }

    #[test]
    fn snapping_is_right_continuous() {
        let t = [1.0, 2.0, 3.0];
        assert_eq!(snap_to_threshold(&t, 0.5), Some(0));
        assert_eq!(snap_to_threshold(&t, 1.0), Some(0));
        assert_eq!(snap_to_threshold(&t, 1.5), Some(1));
        assert_eq!(snap_to_threshold(&t, 3.0), Some(2));
        assert_eq!(snap_to_threshold(&t, 3.1), None);
    }

    #[test]
    fn triangle_with_constant_function() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let c = clique_complex(&g, &full(&g), &[0.0; 3], &[0.0]).unwrap();
        assert_eq!(
            (c.vertices().len(), c.edges().len(), c.triangles().len()),
            (3, 3, 1)
        );
        assert!(c.edges().iter().all(|e| e.grade == 0));
        assert_eq!(c.triangles()[0].grade, 0);
    }

    #[test]
    fn path_edges_take_max_endpoint_grade() {
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let c = clique_complex(&g, &full(&g), &[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        let grades: Vec<(usize, usize, f64)> = c
            .edges()
            .iter()
            .map(|e| (e.nodes[0], e.nodes[1], c.grade_value(e.grade)))
            .collect();
        assert_eq!(grades, vec![(0, 1, 2.0), (1, 2, 3.0)]);
        assert!(c.triangles().is_empty());
    }

    #[test]
    fn vertices_above_last_threshold_are_dropped() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let c = clique_complex(&g, &full(&g), &[0.0, 0.0, 9.0], &[0.0, 1.0]).unwrap();
        assert_eq!(c.vertices().len(), 2);
        assert_eq!(c.edges().len(), 1);
        assert!(c.triangles().is_empty());
    }

    #[test]
    fn edge_graded_triangle_takes_latest_edge() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let c = edge_graded_complex(&g, &full(&g), &[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(c.triangles().len(), 1);
        assert_eq!(c.grade_value(c.triangles()[0].grade), 3.0);
        assert!(c.vertices().iter().all(|v| v.grade == 0));
    }

    #[test]
    fn edge_above_last_threshold_is_excluded() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let c = edge_graded_complex(&g, &full(&g), &[5.0], &[1.0]).unwrap();
        assert_eq!(c.vertices().len(), 2);
        assert!(c.edges().is_empty());
    }

    #[test]
    fn rejects_non_monotone_grading() {
        let err = FilteredComplex::new(
            vec![0.0, 1.0],
            vec![Vertex { node: 0, grade: 1 }, Vertex { node: 1, grade: 0 }],
            vec![Edge {
                nodes: [0, 1],
                grade: 0,
            }],
            vec![],
        );
        assert!(matches!(err, Err(EmpError::MalformedComplex(_))));
    }

    #[test]
    fn rejects_triangle_without_edges() {
        let vs = (0..3).map(|node| Vertex { node, grade: 0 }).collect();
        let err = FilteredComplex::new(
            vec![0.0],
            vs,
            vec![Edge {
                nodes: [0, 1],
                grade: 0,
            }],
            vec![Triangle {
                nodes: [0, 1, 2],
                grade: 0,
            }],
        );
        assert!(matches!(err, Err(EmpError::MalformedComplex(_))));
    }

    #[test]
    fn filtration_order_is_grade_then_dimension() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let c = clique_complex(&g, &full(&g), &[0.0, 1.0, 1.0], &[0.0, 1.0]).unwrap();
        let order = c.filtration_order();
        assert_eq!(order.len(), 7);
        assert_eq!(order[0], SimplexRef::Vertex(0));
        assert!(matches!(order[1], SimplexRef::Vertex(_)));
        assert!(matches!(order[6], SimplexRef::Triangle(0)));
        assert_eq!(c.counts_at(0), [1, 0, 0]);
        assert_eq!(c.counts_at(1), [3, 3, 1]);
    }
}
