//! EMP summaries: slice a graph along a first filtering direction, compute a
//! persistence diagram per slice along a second direction, vectorize each
//! diagram and stack the vectors.

use std::fmt;
use std::str::FromStr;

use ndarray::{ArrayD, Axis, IxDyn};
use serde::{Deserialize, Serialize};

use crate::complex::{clique_complex, edge_graded_complex, FilteredComplex};
use crate::error::{EmpError, Result};
use crate::filters::{
    compute_edge_filter, compute_node_filter, EdgeFilterKind, FilterKind, NodeFilterKind,
};
use crate::filtration::{
    power_complex, slices_within, Slice, SliceFilter, SlicedFiltration, ThresholdGrid,
};
use crate::graph::Graph;
use crate::persistence::{compute_persistence, PersistenceDiagram};
use crate::vectorize::{vectorize, Vectorization};

/// Edge lengths for a power filtration taken from an edge filter, shifted so
/// that the smallest value `floor` maps to length 1: `len = value - floor + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLengths {
    pub kind: EdgeFilterKind,
    pub floor: f64,
}

/// How the second filtering direction turns a slice into a filtered complex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SecondDirection {
    /// Lower-star clique complex of a node function.
    Sublevel { filter: NodeFilterKind },
    /// Clique complex graded by an edge function, vertices at the first threshold.
    EdgeWeight { filter: EdgeFilterKind },
    /// Rips complex of shortest-path distances inside the slice. Without
    /// lengths, hop distance (or the graph's own weights if it has them).
    Power { lengths: Option<PowerLengths> },
}

impl SecondDirection {
    /// The natural second direction for a filter: sublevel for node
    /// functions, weight grading for edge functions.
    pub fn for_filter(kind: FilterKind) -> Self {
        match kind {
            FilterKind::Node(filter) => SecondDirection::Sublevel { filter },
            FilterKind::Edge(filter) => SecondDirection::EdgeWeight { filter },
        }
    }

    pub fn filter(&self) -> Option<FilterKind> {
        match *self {
            SecondDirection::Sublevel { filter } => Some(FilterKind::Node(filter)),
            SecondDirection::EdgeWeight { filter } => Some(FilterKind::Edge(filter)),
            SecondDirection::Power { lengths } => lengths.map(|l| FilterKind::Edge(l.kind)),
        }
    }
}

impl fmt::Display for SecondDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SecondDirection::Sublevel { filter } => write!(f, "sublevel({filter})"),
            SecondDirection::EdgeWeight { filter } => write!(f, "edge-weight({filter})"),
            SecondDirection::Power { lengths: None } => f.write_str("power(hop)"),
            SecondDirection::Power { lengths: Some(l) } => {
                write!(f, "power({}, floor={})", l.kind, l.floor)
            }
        }
    }
}

/// Which filter drives the slicing when a configuration names two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterOrder {
    Fg,
    Gf,
}

impl FromStr for FilterOrder {
    type Err = EmpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fg" => Ok(FilterOrder::Fg),
            "gf" => Ok(FilterOrder::Gf),
            other => Err(EmpError::Config(format!("unknown filter order '{other}'"))),
        }
    }
}

impl fmt::Display for FilterOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FilterOrder::Fg => "fg",
            FilterOrder::Gf => "gf",
        })
    }
}

/// Everything that determines an EMP summary apart from the thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpSpec {
    pub first: FilterKind,
    pub second: SecondDirection,
    pub method: Vectorization,
    pub homology_dim: usize,
}

impl EmpSpec {
    /// Exchanges the roles of the two filters.
    ///
    /// The old second filter drives the slicing; the old first filter
    /// becomes the second direction in its natural form. A hop-distance
    /// power direction has no filter to promote and cannot be swapped.
    pub fn swapped(&self) -> Result<Self> {
        let first = self.second.filter().ok_or_else(|| {
            EmpError::Config("a hop-distance power direction cannot be moved first".into())
        })?;
        Ok(EmpSpec {
            first,
            second: SecondDirection::for_filter(self.first),
            ..*self
        })
    }
}

/// Values of a first-direction filter on a graph.
pub fn first_filter_values(graph: &Graph, kind: FilterKind) -> Result<Vec<f64>> {
    Ok(match kind {
        FilterKind::Node(k) => compute_node_filter(graph, k)?.values,
        FilterKind::Edge(k) => compute_edge_filter(graph, k)?.values,
    })
}

fn slice_filter<'a>(kind: FilterKind, values: &'a [f64]) -> SliceFilter<'a> {
    match kind {
        FilterKind::Node(_) => SliceFilter::Node(values),
        FilterKind::Edge(_) => SliceFilter::Edge(values),
    }
}

/// First-direction slices of a whole graph.
pub fn first_direction_slices(
    graph: &Graph,
    first: FilterKind,
    alphas: &[f64],
) -> Result<SlicedFiltration> {
    let values = first_filter_values(graph, first)?;
    slices_within(
        graph,
        &Slice::full(graph, f64::INFINITY),
        slice_filter(first, &values),
        alphas,
    )
}

/// Second-direction data computed once per graph and reused for every slice.
pub struct SecondDirectionValues {
    direction: SecondDirection,
    values: Option<Vec<f64>>,
}

impl SecondDirectionValues {
    pub fn compute(graph: &Graph, direction: SecondDirection) -> Result<Self> {
        let values = match direction {
            SecondDirection::Sublevel { filter } => {
                Some(compute_node_filter(graph, filter)?.values)
            }
            SecondDirection::EdgeWeight { filter } => {
                Some(compute_edge_filter(graph, filter)?.values)
            }
            SecondDirection::Power { lengths: Some(l) } => {
                let raw = compute_edge_filter(graph, l.kind)?.values;
                Some(raw.into_iter().map(|v| v - l.floor + 1.0).collect())
            }
            SecondDirection::Power { lengths: None } => graph.edge_weights().map(<[f64]>::to_vec),
        };
        Ok(SecondDirectionValues { direction, values })
    }

    /// Filtered complex of one slice over the second-direction thresholds.
    pub fn complex(&self, graph: &Graph, slice: &Slice, betas: &[f64]) -> Result<FilteredComplex> {
        match self.direction {
            SecondDirection::Sublevel { .. } => {
                clique_complex(graph, slice, self.values.as_deref().unwrap_or(&[]), betas)
            }
            SecondDirection::EdgeWeight { .. } => {
                edge_graded_complex(graph, slice, self.values.as_deref().unwrap_or(&[]), betas)
            }
            SecondDirection::Power { .. } => {
                power_complex(graph, slice, self.values.as_deref(), betas)
            }
        }
    }
}

/// Per-slice (H0, H1) diagrams along the first direction.
pub fn slice_persistence(
    graph: &Graph,
    first: FilterKind,
    second: SecondDirection,
    grid: &ThresholdGrid,
) -> Result<Vec<(PersistenceDiagram, PersistenceDiagram)>> {
    let sliced = first_direction_slices(graph, first, &grid.alphas)?;
    let second = SecondDirectionValues::compute(graph, second)?;
    sliced
        .slices
        .iter()
        .map(|slice| {
            Ok(compute_persistence(&second.complex(
                graph,
                slice,
                &grid.betas,
            )?))
        })
        .collect()
}

/// Slice diagrams of a single homology dimension.
pub fn slice_diagrams(
    graph: &Graph,
    first: FilterKind,
    second: SecondDirection,
    grid: &ThresholdGrid,
    homology_dim: usize,
) -> Result<Vec<PersistenceDiagram>> {
    check_dim(homology_dim)?;
    Ok(slice_persistence(graph, first, second, grid)?
        .into_iter()
        .map(|(pd0, pd1)| if homology_dim == 0 { pd0 } else { pd1 })
        .collect())
}

fn check_dim(dim: usize) -> Result<()> {
    if dim > 1 {
        return Err(EmpError::Config(format!(
            "homology dimension {dim} is not supported (use 0 or 1)"
        )));
    }
    Ok(())
}

/// Where a summary came from, detailed enough to recompute it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub first_filter: String,
    pub alphas: Vec<f64>,
    /// Middle direction of a three-parameter summary.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub middle_filter: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub middle_thresholds: Option<Vec<f64>>,
    pub second_direction: String,
    pub betas: Vec<f64>,
    pub order: FilterOrder,
    pub cap: f64,
    pub homology_dim: usize,
    pub method: Vectorization,
    pub conventions: Vec<String>,
}

/// Conventions that affect the numbers in every summary.
pub fn conventions() -> Vec<String> {
    [
        "essential bars closed at cap = last second-direction threshold; kept even when born at the cap",
        "zero-length finite bars dropped",
        "grades snap to the first threshold >= value",
        "edge-weight grading: every slice vertex enters at the first threshold",
        "power filtration: applied per first-direction slice, simplex enters at first eps > all pairwise distances",
        "power lengths from an edge filter: value - floor + 1",
        "closeness: unreachable pairs excluded, isolated node scores 0",
        "betweenness: exact, unordered pairs counted once, unnormalized",
        "katz: (I - aA)^-1 1 - 1 with a = 0.9 / lambda_max",
        "forman-ricci: 4 - deg(u) - deg(v)",
        "empty slices give zero rows",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpSummary {
    /// `[m, k]` for two parameters, `[m, n, k]` for three.
    pub data: ArrayD<f64>,
    pub provenance: Provenance,
}

impl EmpSummary {
    pub fn shape(&self) -> &[usize] {
        self.data.shape()
    }

    /// Vectors along the last axis, in row-major order of the other axes.
    pub fn rows(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.data
            .lanes(Axis(self.data.ndim() - 1))
            .into_iter()
            .map(|l| l.to_vec())
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.data.iter().copied().collect()
    }

    pub fn method(&self) -> Vectorization {
        self.provenance.method
    }
}

fn stack(rows: Vec<Vec<f64>>, lead: &[usize], width: usize) -> ArrayD<f64> {
    let mut shape = lead.to_vec();
    shape.push(width);
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    ArrayD::from_shape_vec(IxDyn(&shape), flat).expect("rows have uniform width")
}

fn vectorize_rows(
    diagrams: &[PersistenceDiagram],
    betas: &[f64],
    method: &Vectorization,
) -> Result<Vec<Vec<f64>>> {
    diagrams
        .iter()
        .map(|pd| Ok(vectorize(pd, betas, method)?.values))
        .collect()
}

fn provenance(spec: &EmpSpec, alphas: &[f64], betas: &[f64], order: FilterOrder) -> Provenance {
    Provenance {
        first_filter: spec.first.to_string(),
        alphas: alphas.to_vec(),
        middle_filter: None,
        middle_thresholds: None,
        second_direction: spec.second.to_string(),
        betas: betas.to_vec(),
        order,
        cap: *betas.last().expect("grid thresholds are non-empty"),
        homology_dim: spec.homology_dim,
        method: spec.method,
        conventions: conventions(),
    }
}

/// Builds summaries for several homology dimensions from one pass of slice
/// diagrams. Row `i` of each summary is the vectorized diagram of slice `i`.
pub fn emp_summaries(
    graph: &Graph,
    spec: &EmpSpec,
    grid: &ThresholdGrid,
    dims: &[usize],
    order: FilterOrder,
) -> Result<Vec<EmpSummary>> {
    for &d in dims {
        check_dim(d)?;
    }
    let pds = slice_persistence(graph, spec.first, spec.second, grid)?;
    let width = spec.method.output_len(grid.betas.len());
    dims.iter()
        .map(|&dim| {
            let diagrams: Vec<PersistenceDiagram> = pds
                .iter()
                .map(|(a, b)| if dim == 0 { a.clone() } else { b.clone() })
                .collect();
            let rows = vectorize_rows(&diagrams, &grid.betas, &spec.method)?;
            let spec = EmpSpec {
                homology_dim: dim,
                ..*spec
            };
            Ok(EmpSummary {
                data: stack(rows, &[grid.alphas.len()], width),
                provenance: provenance(&spec, &grid.alphas, &grid.betas, order),
            })
        })
        .collect()
}

/// `m x k` summary: row `i` is the vectorization of slice `i`'s diagram.
pub fn emp_summary(graph: &Graph, spec: &EmpSpec, grid: &ThresholdGrid) -> Result<EmpSummary> {
    Ok(emp_summaries(graph, spec, grid, &[spec.homology_dim], FilterOrder::Fg)?.remove(0))
}

/// Bigraded Betti numbers: entry `(i, j)` is the Betti number of the complex
/// at first threshold `i` and second threshold `j`.
pub fn emp_betti(
    graph: &Graph,
    first: FilterKind,
    second: SecondDirection,
    grid: &ThresholdGrid,
    homology_dim: usize,
) -> Result<EmpSummary> {
    let spec = EmpSpec {
        first,
        second,
        method: Vectorization::Betti,
        homology_dim,
    };
    emp_summary(graph, &spec, grid)
}

/// Three-parameter configuration: two slicing directions and a diagram direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpSpec3 {
    pub first: FilterKind,
    pub middle: FilterKind,
    pub second: SecondDirection,
    pub method: Vectorization,
    pub homology_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdGrid3 {
    pub alphas: Vec<f64>,
    pub middle: Vec<f64>,
    pub betas: Vec<f64>,
}

/// `m x n x k` summary: floor `(i, j)` is the vectorized diagram of the
/// subgraph cut out by the first two directions at `(alpha_i, middle_j)`.
pub fn emp_summary_3d(graph: &Graph, spec: &EmpSpec3, grid: &ThresholdGrid3) -> Result<EmpSummary> {
    check_dim(spec.homology_dim)?;
    let outer = first_direction_slices(graph, spec.first, &grid.alphas)?;
    let middle_values = first_filter_values(graph, spec.middle)?;
    let second = SecondDirectionValues::compute(graph, spec.second)?;
    let width = spec.method.output_len(grid.betas.len());

    let mut rows = Vec::with_capacity(grid.alphas.len() * grid.middle.len());
    for slice in &outer.slices {
        let inner = slices_within(
            graph,
            slice,
            slice_filter(spec.middle, &middle_values),
            &grid.middle,
        )?;
        for cell in &inner.slices {
            let (pd0, pd1) = compute_persistence(&second.complex(graph, cell, &grid.betas)?);
            let pd = if spec.homology_dim == 0 { pd0 } else { pd1 };
            rows.push(vectorize(&pd, &grid.betas, &spec.method)?.values);
        }
    }
    let flat = EmpSpec {
        first: spec.first,
        second: spec.second,
        method: spec.method,
        homology_dim: spec.homology_dim,
    };
    let mut prov = provenance(&flat, &grid.alphas, &grid.betas, FilterOrder::Fg);
    prov.middle_filter = Some(spec.middle.to_string());
    prov.middle_thresholds = Some(grid.middle.clone());
    Ok(EmpSummary {
        data: stack(rows, &[grid.alphas.len(), grid.middle.len()], width),
        provenance: prov,
    })
}
