//! Persistence diagrams in dimensions 0 and 1 over GF(2).
//!
//! Bars that never die are closed at the complex's cap (its last threshold)
//! and flagged essential. Finite bars of zero length are dropped; essential
//! bars are always kept, including those born at the cap, so that counting
//! live points reproduces the Betti numbers at every threshold.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::complex::{FilteredComplex, SimplexRef};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistencePoint {
    pub birth: f64,
    pub death: f64,
    pub essential: bool,
}

impl PersistencePoint {
    pub fn finite(birth: f64, death: f64) -> Self {
        PersistencePoint {
            birth,
            death,
            essential: false,
        }
    }

    pub fn lifetime(&self) -> f64 {
        self.death - self.birth
    }

    /// Alive at `t`: born by `t` and not yet dead, essentials alive to the end.
    pub fn alive_at(&self, t: f64) -> bool {
        self.birth <= t && (self.essential || t < self.death)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub dimension: usize,
    pub points: Vec<PersistencePoint>,
    pub cap: f64,
}

impl PersistenceDiagram {
    pub fn new(dimension: usize, points: Vec<PersistencePoint>, cap: f64) -> Self {
        PersistenceDiagram {
            dimension,
            points,
            cap,
        }
    }

    pub fn empty(dimension: usize, cap: f64) -> Self {
        Self::new(dimension, Vec::new(), cap)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn alive_at(&self, t: f64) -> usize {
        self.points.iter().filter(|p| p.alive_at(t)).count()
    }

    /// Points sorted by (birth, death, essential) for multiset comparison.
    pub fn sorted_points(&self) -> Vec<PersistencePoint> {
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| {
            a.birth
                .total_cmp(&b.birth)
                .then(a.death.total_cmp(&b.death))
                .then(a.essential.cmp(&b.essential))
        });
        pts
    }

    /// Text dump, one `dim birth death essential_flag` line per point.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let _ = writeln!(
                out,
                "{} {} {} {}",
                self.dimension,
                p.birth,
                p.death,
                u8::from(p.essential)
            );
        }
        out
    }
}

/// Diagrams plus the bookkeeping needed for internal consistency checks.
#[derive(Debug, Clone)]
pub struct PersistenceOutput {
    pub pd0: PersistenceDiagram,
    pub pd1: PersistenceDiagram,
    /// Zero-length (vertex, edge) and (edge, triangle) pairs that were dropped.
    pub zero_pairs: [usize; 2],
}

struct UnionFind {
    parent: Vec<usize>,
    // (grade, position) of the oldest vertex in each root's component
    oldest: Vec<(usize, usize)>,
}

impl UnionFind {
    fn new(birth: Vec<(usize, usize)>) -> Self {
        UnionFind {
            parent: (0..birth.len()).collect(),
            oldest: birth,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

fn vertex_positions(complex: &FilteredComplex) -> HashMap<usize, usize> {
    complex
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.node, i))
        .collect()
}

/// H0 by Kruskal-style union-find with the elder rule.
///
/// Returns the diagram, the number of zero-length pairs, and for each edge
/// whether it merged two components.
fn zero_dimensional(complex: &FilteredComplex) -> (PersistenceDiagram, usize, Vec<bool>) {
    let cap = complex.cap();
    let vpos = vertex_positions(complex);
    let mut uf = UnionFind::new(
        complex
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| (v.grade, i))
            .collect(),
    );
    let mut merges = vec![false; complex.edges().len()];
    let mut points = Vec::new();
    let mut zero = 0;

    for (i, e) in complex.edges().iter().enumerate() {
        let (a, b) = (uf.find(vpos[&e.nodes[0]]), uf.find(vpos[&e.nodes[1]]));
        if a == b {
            continue;
        }
        merges[i] = true;
        let (elder, younger) = if uf.oldest[a] <= uf.oldest[b] {
            (a, b)
        } else {
            (b, a)
        };
        let birth_grade = uf.oldest[younger].0;
        uf.parent[younger] = elder;
        if birth_grade == e.grade {
            zero += 1;
        } else {
            points.push(PersistencePoint::finite(
                complex.grade_value(birth_grade),
                complex.grade_value(e.grade),
            ));
        }
    }
    for i in 0..complex.vertices().len() {
        if uf.find(i) == i {
            points.push(PersistencePoint {
                birth: complex.grade_value(uf.oldest[i].0),
                death: cap,
                essential: true,
            });
        }
    }
    (PersistenceDiagram::new(0, points, cap), zero, merges)
}

/// Symmetric difference of two sorted index columns.
fn add_column(target: &mut Vec<usize>, other: &[usize]) {
    let mut out = Vec::with_capacity(target.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < other.len() {
        match target[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                out.push(target[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&target[i..]);
    out.extend_from_slice(&other[j..]);
    *target = out;
}

/// Reduces boundary columns left to right; `columns[c]` lists row indices
/// in increasing order. Returns `pivot_col[row] = Some(col)` for each pivot.
fn reduce_columns(columns: &mut [Vec<usize>], rows: usize) -> Vec<Option<usize>> {
    let mut pivot_col: Vec<Option<usize>> = vec![None; rows];
    for c in 0..columns.len() {
        while let Some(&low) = columns[c].last() {
            match pivot_col[low] {
                Some(other) => {
                    let (head, tail) = columns.split_at_mut(c);
                    add_column(&mut tail[0], &head[other]);
                }
                None => {
                    pivot_col[low] = Some(c);
                    break;
                }
            }
        }
    }
    pivot_col
}

fn edge_positions(complex: &FilteredComplex) -> HashMap<(usize, usize), usize> {
    complex
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.nodes[0], e.nodes[1]), i))
        .collect()
}

fn triangle_columns(
    complex: &FilteredComplex,
    epos: &HashMap<(usize, usize), usize>,
) -> Vec<Vec<usize>> {
    complex
        .triangles()
        .iter()
        .map(|t| {
            let [a, b, c] = t.nodes;
            let mut col = vec![epos[&(a, b)], epos[&(a, c)], epos[&(b, c)]];
            col.sort_unstable();
            col
        })
        .collect()
}

/// Persistence diagrams of a complex: union-find for H0, triangle-column
/// reduction for H1.
pub fn compute_persistence_detailed(complex: &FilteredComplex) -> PersistenceOutput {
    let cap = complex.cap();
    let (pd0, zero0, merges) = zero_dimensional(complex);

    // Edge list order is the filtration order restricted to edges.
    let epos = edge_positions(complex);
    let mut columns = triangle_columns(complex, &epos);
    let pivot_col = reduce_columns(&mut columns, complex.edges().len());

    let mut points = Vec::new();
    let mut zero1 = 0;
    for (i, e) in complex.edges().iter().enumerate() {
        if merges[i] {
            continue;
        }
        match pivot_col[i] {
            Some(t) => {
                let death = complex.triangles()[t].grade;
                if death == e.grade {
                    zero1 += 1;
                } else {
                    points.push(PersistencePoint::finite(
                        complex.grade_value(e.grade),
                        complex.grade_value(death),
                    ));
                }
            }
            None => points.push(PersistencePoint {
                birth: complex.grade_value(e.grade),
                death: cap,
                essential: true,
            }),
        }
    }
    PersistenceOutput {
        pd0,
        pd1: PersistenceDiagram::new(1, points, cap),
        zero_pairs: [zero0, zero1],
    }
}

pub fn compute_persistence(complex: &FilteredComplex) -> (PersistenceDiagram, PersistenceDiagram) {
    let out = compute_persistence_detailed(complex);
    (out.pd0, out.pd1)
}

/// Persistence by full boundary-matrix reduction with clearing.
///
/// Columns are indexed by position in [`FilteredComplex::filtration_order`].
/// Triangles are reduced first; the edges they kill are known to be
/// positive and their columns are cleared before the edge pass.
pub fn reduce_boundary(complex: &FilteredComplex) -> PersistenceOutput {
    let cap = complex.cap();
    let order = complex.filtration_order();
    let mut position: HashMap<SimplexRef, usize> = HashMap::with_capacity(order.len());
    for (i, s) in order.iter().enumerate() {
        position.insert(*s, i);
    }
    let vpos = vertex_positions(complex);
    let epos = edge_positions(complex);
    let grade_of = |s: SimplexRef| match s {
        SimplexRef::Vertex(i) => complex.vertices()[i].grade,
        SimplexRef::Edge(i) => complex.edges()[i].grade,
        SimplexRef::Triangle(i) => complex.triangles()[i].grade,
    };
    let boundary = |s: SimplexRef| -> Vec<usize> {
        let mut col: Vec<usize> = match s {
            SimplexRef::Vertex(_) => Vec::new(),
            SimplexRef::Edge(i) => complex.edges()[i]
                .nodes
                .iter()
                .map(|n| position[&SimplexRef::Vertex(vpos[n])])
                .collect(),
            SimplexRef::Triangle(i) => {
                let [a, b, c] = complex.triangles()[i].nodes;
                [(a, b), (a, c), (b, c)]
                    .iter()
                    .map(|f| position[&SimplexRef::Edge(epos[f])])
                    .collect()
            }
        };
        col.sort_unstable();
        col
    };

    let n = order.len();
    let mut columns: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut pivot_of: Vec<Option<usize>> = vec![None; n];
    let mut paired = vec![false; n];
    let mut pairs: Vec<(usize, usize)> = Vec::new();

    for dim in [2usize, 1] {
        for c in 0..n {
            let s = order[c];
            let is_dim = matches!(
                (dim, s),
                (2, SimplexRef::Triangle(_)) | (1, SimplexRef::Edge(_))
            );
            if !is_dim || paired[c] {
                // cleared: a column that is already a pivot row reduces to zero
                continue;
            }
            columns[c] = boundary(s);
            while let Some(&low) = columns[c].last() {
                match pivot_of[low] {
                    Some(other) => {
                        let rhs = columns[other].clone();
                        add_column(&mut columns[c], &rhs);
                    }
                    None => {
                        pivot_of[low] = Some(c);
                        paired[low] = true;
                        paired[c] = true;
                        pairs.push((low, c));
                        break;
                    }
                }
            }
        }
    }

    let dim_of = |s: SimplexRef| match s {
        SimplexRef::Vertex(_) => 0,
        SimplexRef::Edge(_) => 1,
        SimplexRef::Triangle(_) => 2,
    };
    let mut pts: [Vec<PersistencePoint>; 2] = [Vec::new(), Vec::new()];
    let mut zero_pairs = [0usize; 2];
    for &(birth, death) in &pairs {
        let d = dim_of(order[birth]);
        let (gb, gd) = (grade_of(order[birth]), grade_of(order[death]));
        if gb == gd {
            zero_pairs[d] += 1;
        } else {
            pts[d].push(PersistencePoint::finite(
                complex.grade_value(gb),
                complex.grade_value(gd),
            ));
        }
    }
    for c in 0..n {
        // an unpaired vertex or edge whose own column is zero is essential
        let d = dim_of(order[c]);
        if d < 2 && !paired[c] {
            pts[d].push(PersistencePoint {
                birth: complex.grade_value(grade_of(order[c])),
                death: cap,
                essential: true,
            });
        }
    }
    let [p0, p1] = pts;
    PersistenceOutput {
        pd0: PersistenceDiagram::new(0, p0, cap),
        pd1: PersistenceDiagram::new(1, p1, cap),
        zero_pairs,
    }
}

/// Betti number of the sub-complex of simplices with grade value `<= grade`.
///
/// Computed from scratch: components by union-find, and
/// `b1 = (#edges - rank d1) - rank d2` with `rank d1 = #vertices - b0`.
pub fn betti_at(complex: &FilteredComplex, grade: f64, dim: usize) -> usize {
    let idx = complex.thresholds().partition_point(|&t| t <= grade);
    if idx == 0 {
        return 0;
    }
    let [nv, ne, nt] = complex.counts_at(idx - 1);
    let vpos = vertex_positions(complex);
    let mut uf = UnionFind::new(vec![(0, 0); complex.vertices().len()]);
    let mut components = nv;
    for e in &complex.edges()[..ne] {
        let (a, b) = (uf.find(vpos[&e.nodes[0]]), uf.find(vpos[&e.nodes[1]]));
        if a != b {
            uf.parent[a] = b;
            components -= 1;
        }
    }
    match dim {
        0 => components,
        1 => {
            let epos = edge_positions(complex);
            let mut columns = triangle_columns(complex, &epos);
            columns.truncate(nt);
            let pivots = reduce_columns(&mut columns, complex.edges().len());
            let rank2 = pivots.iter().filter(|p| p.is_some()).count();
            let rank1 = nv - components;
            ne - rank1 - rank2
        }
        _ => 0,
    }
}
