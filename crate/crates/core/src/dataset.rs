//! TU-format graph datasets and feature export.
//!
//! A dataset directory holds comma-separated text files named `DS_*.txt`:
//! `DS_A.txt` (1-based node pairs), `DS_graph_indicator.txt` (graph id per
//! node) and `DS_graph_labels.txt` are required; `DS_node_attributes.txt`,
//! `DS_node_labels.txt`, `DS_edge_attributes.txt` and `DS_edge_labels.txt`
//! are read when present.
//!
//! Node attribute columns are the columns of `DS_node_attributes.txt`
//! followed by the node label, if any; edge attributes likewise.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::emp::{
    emp_summaries, emp_summary_3d, first_filter_values, EmpSpec, EmpSpec3, FilterOrder,
    PowerLengths, SecondDirection, ThresholdGrid3,
};
use crate::error::{EmpError, Result};
use crate::filters::{compute_edge_filter, compute_node_filter, FilterKind};
use crate::filtration::{
    fill_to_count, select_thresholds, shortest_path_matrix, Slice, ThresholdGrid, ThresholdStrategy,
};
use crate::graph::{Graph, GraphBuilder};
use crate::vectorize::Vectorization;

#[derive(Debug, Clone, PartialEq)]
pub struct GraphDataset {
    pub name: String,
    pub graphs: Vec<Graph>,
    pub labels: Vec<i64>,
    pub node_attribute_dim: usize,
    pub edge_attribute_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub graphs: usize,
    pub mean_nodes: f64,
    pub mean_edges: f64,
    pub classes: usize,
}

impl GraphDataset {
    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn stats(&self) -> DatasetStats {
        let n = self.graphs.len().max(1) as f64;
        DatasetStats {
            graphs: self.graphs.len(),
            mean_nodes: self
                .graphs
                .iter()
                .map(|g| g.node_count() as f64)
                .sum::<f64>()
                / n,
            mean_edges: self
                .graphs
                .iter()
                .map(|g| g.edge_count() as f64)
                .sum::<f64>()
                / n,
            classes: self.labels.iter().collect::<BTreeSet<_>>().len(),
        }
    }
}

/// A file path with its non-empty, trimmed lines and their 1-based numbers.
type NumberedLines = (PathBuf, Vec<(usize, String)>);

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let text = fs::read_to_string(path)?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim().to_string()))
        .filter(|(_, l)| !l.is_empty())
        .collect())
}

fn parse_err(file: &Path, line: usize, message: impl Into<String>) -> EmpError {
    EmpError::Parse {
        file: file.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_row<T: std::str::FromStr>(file: &Path, line: usize, text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|_| parse_err(file, line, format!("cannot parse '{}'", tok.trim())))
        })
        .collect()
}

fn read_required(dir: &Path, name: &str, suffix: &str) -> Result<NumberedLines> {
    let path = dir.join(format!("{name}_{suffix}.txt"));
    if !path.is_file() {
        return Err(EmpError::MissingFile(path));
    }
    let lines = read_lines(&path)?;
    Ok((path, lines))
}

fn read_optional(dir: &Path, name: &str, suffix: &str) -> Result<Option<NumberedLines>> {
    let path = dir.join(format!("{name}_{suffix}.txt"));
    if !path.is_file() {
        return Ok(None);
    }
    let lines = read_lines(&path)?;
    Ok(Some((path, lines)))
}

/// Reads a per-row real matrix, checking its row count.
fn read_matrix(file: Option<NumberedLines>, rows: usize) -> Result<Option<Vec<Vec<f64>>>> {
    let Some((path, lines)) = file else {
        return Ok(None);
    };
    if lines.len() != rows {
        return Err(EmpError::Dataset(format!(
            "{} has {} rows, expected {rows}",
            path.display(),
            lines.len()
        )));
    }
    lines
        .iter()
        .map(|(ln, text)| parse_row::<f64>(&path, *ln, text))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

fn join_columns(a: Option<Vec<Vec<f64>>>, b: Option<Vec<Vec<f64>>>) -> Option<Vec<Vec<f64>>> {
    match (a, b) {
        (None, None) => None,
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (Some(a), Some(b)) => Some(
            a.into_iter()
                .zip(b)
                .map(|(mut x, y)| {
                    x.extend(y);
                    x
                })
                .collect(),
        ),
    }
}

/// Finds the dataset name from the `*_A.txt` file in a directory.
pub fn detect_name(dir: &Path) -> Result<String> {
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            e.file_name()
                .to_str()
                .and_then(|n| n.strip_suffix("_A.txt"))
                .map(String::from)
        })
        .collect();
    names.sort();
    match names.len() {
        1 => Ok(names.remove(0)),
        0 => Err(EmpError::MissingFile(dir.join("DS_A.txt"))),
        _ => Err(EmpError::Config(format!(
            "several datasets in {}: {}",
            dir.display(),
            names.join(", ")
        ))),
    }
}

/// Loads a TU-format dataset, reindexing nodes per graph from 0 and
/// dropping repeated undirected edges (the first occurrence is kept).
pub fn load_tudataset(dir: &Path, name: &str) -> Result<GraphDataset> {
    let (a_path, a_lines) = read_required(dir, name, "A")?;
    let (ind_path, ind_lines) = read_required(dir, name, "graph_indicator")?;
    let (lab_path, lab_lines) = read_required(dir, name, "graph_labels")?;

    let labels: Vec<i64> = lab_lines
        .iter()
        .map(|(ln, t)| {
            t.parse::<i64>()
                .map_err(|_| parse_err(&lab_path, *ln, format!("non-integer label '{t}'")))
        })
        .collect::<Result<_>>()?;
    let n_graphs = labels.len();

    let indicator: Vec<usize> = ind_lines
        .iter()
        .map(|(ln, t)| {
            t.parse::<usize>()
                .map_err(|_| parse_err(&ind_path, *ln, format!("bad graph id '{t}'")))
        })
        .collect::<Result<_>>()?;
    let n_nodes = indicator.len();

    // nodes of a graph must be contiguous and graph ids within 1..=N
    let mut first_node = vec![usize::MAX; n_graphs];
    let mut node_count = vec![0usize; n_graphs];
    let mut prev = 0;
    for (i, &gid) in indicator.iter().enumerate() {
        if gid == 0 || gid > n_graphs {
            return Err(EmpError::Dataset(format!(
                "node {} belongs to graph {gid}, outside 1..={n_graphs}",
                i + 1
            )));
        }
        if gid < prev {
            return Err(EmpError::Dataset(format!(
                "graph indicator is not sorted at node {}",
                i + 1
            )));
        }
        if gid != prev && first_node[gid - 1] != usize::MAX {
            return Err(EmpError::Dataset(format!(
                "nodes of graph {gid} are not contiguous"
            )));
        }
        prev = gid;
        if first_node[gid - 1] == usize::MAX {
            first_node[gid - 1] = i;
        }
        node_count[gid - 1] += 1;
    }

    let node_attrs = read_matrix(read_optional(dir, name, "node_attributes")?, n_nodes)?;
    let node_labels = read_matrix(read_optional(dir, name, "node_labels")?, n_nodes)?;
    let node_attrs = join_columns(node_attrs, node_labels);
    let n_edges_raw = a_lines.len();
    let edge_attrs = read_matrix(read_optional(dir, name, "edge_attributes")?, n_edges_raw)?;
    let edge_labels = read_matrix(read_optional(dir, name, "edge_labels")?, n_edges_raw)?;
    let edge_attrs = join_columns(edge_attrs, edge_labels);

    let mut builders: Vec<GraphBuilder> =
        node_count.iter().map(|&c| GraphBuilder::new(c)).collect();
    for (k, (ln, text)) in a_lines.iter().enumerate() {
        let pair: Vec<usize> = parse_row(&a_path, *ln, text)?;
        let [u, v] = pair[..] else {
            return Err(parse_err(&a_path, *ln, "expected two node ids"));
        };
        if u == 0 || v == 0 || u > n_nodes || v > n_nodes {
            return Err(parse_err(
                &a_path,
                *ln,
                format!("node id out of range 1..={n_nodes}"),
            ));
        }
        let (gu, gv) = (indicator[u - 1], indicator[v - 1]);
        if gu != gv {
            return Err(parse_err(
                &a_path,
                *ln,
                format!("edge joins graphs {gu} and {gv}"),
            ));
        }
        let base = first_node[gu - 1];
        let attrs = edge_attrs.as_ref().map(|a| a[k].clone());
        builders[gu - 1].add_edge(u - 1 - base, v - 1 - base, None, attrs);
    }

    let graphs = builders
        .into_iter()
        .enumerate()
        .map(|(g, b)| {
            let mut graph = b.build(false, edge_attrs.is_some())?.with_label(labels[g]);
            if let Some(attrs) = &node_attrs {
                let start = first_node[g].min(n_nodes);
                graph = graph.with_node_attributes(attrs[start..start + node_count[g]].to_vec())?;
            }
            Ok(graph)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(GraphDataset {
        name: name.to_string(),
        graphs,
        node_attribute_dim: node_attrs
            .as_ref()
            .and_then(|a| a.first())
            .map_or(0, Vec::len),
        edge_attribute_dim: edge_attrs
            .as_ref()
            .and_then(|a| a.first())
            .map_or(0, Vec::len),
        labels,
    })
}

/// How the second direction is chosen in an export configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionKind {
    Sublevel,
    EdgeWeight,
    Power,
}

impl std::str::FromStr for DirectionKind {
    type Err = EmpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sublevel" => Ok(DirectionKind::Sublevel),
            "edge-weight" | "edge_weight" => Ok(DirectionKind::EdgeWeight),
            "power" => Ok(DirectionKind::Power),
            other => Err(EmpError::Config(format!(
                "unknown second direction '{other}'"
            ))),
        }
    }
}

/// Where threshold sequences come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdScope {
    /// Pooled filter values of the whole dataset; columns are comparable.
    #[default]
    Dataset,
    /// Each graph's own values, `count` evenly spaced thresholds over its range.
    Graph,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportConfig {
    pub f: FilterKind,
    /// Second filter; optional only for a hop-distance power direction.
    pub g: Option<FilterKind>,
    /// Third filter. When set, `g` slices every `f`-slice again and the
    /// second direction is built from `h`, giving `m x n x k` summaries.
    pub h: Option<FilterKind>,
    pub direction: DirectionKind,
    pub method: Vectorization,
    pub dims: Vec<usize>,
    /// Threshold counts `(m, n)` of the first two filters.
    pub grid: (usize, usize),
    /// Threshold count of the `h` direction; `n` when absent.
    pub h_count: Option<usize>,
    pub strategy: ThresholdStrategy,
    pub order: FilterOrder,
    pub scope: ThresholdScope,
}

/// Filters of an export after applying the order; power lengths still carry
/// a placeholder floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExportLayout {
    pub first: FilterKind,
    pub middle: Option<FilterKind>,
    pub second: SecondDirection,
}

impl ExportConfig {
    pub fn layout(&self) -> Result<ExportLayout> {
        let diagram_filter = if self.h.is_some() { self.h } else { self.g };
        let second = match (self.direction, diagram_filter) {
            (DirectionKind::Power, None) => SecondDirection::Power { lengths: None },
            (DirectionKind::Power, Some(FilterKind::Edge(kind))) => SecondDirection::Power {
                lengths: Some(PowerLengths { kind, floor: 0.0 }),
            },
            (DirectionKind::Power, Some(FilterKind::Node(k))) => {
                return Err(EmpError::Config(format!(
                    "power direction needs an edge filter for lengths, got {k}"
                )))
            }
            (DirectionKind::Sublevel, Some(FilterKind::Node(filter))) => {
                SecondDirection::Sublevel { filter }
            }
            (DirectionKind::EdgeWeight, Some(FilterKind::Edge(filter))) => {
                SecondDirection::EdgeWeight { filter }
            }
            (d, g) => {
                return Err(EmpError::Config(format!(
                    "second direction {d:?} does not accept filter {}",
                    g.map_or("none".to_string(), |g| g.to_string())
                )))
            }
        };
        if self.h.is_some() {
            let middle = self.g.ok_or_else(|| {
                EmpError::Config("a third filter needs a second slicing filter g".into())
            })?;
            let (first, middle) = match self.order {
                FilterOrder::Fg => (self.f, middle),
                FilterOrder::Gf => (middle, self.f),
            };
            return Ok(ExportLayout {
                first,
                middle: Some(middle),
                second,
            });
        }
        let spec = EmpSpec {
            first: self.f,
            second,
            method: self.method,
            homology_dim: 0,
        };
        let spec = match self.order {
            FilterOrder::Fg => spec,
            FilterOrder::Gf => spec.swapped()?,
        };
        Ok(ExportLayout {
            first: spec.first,
            middle: None,
            second: spec.second,
        })
    }

    /// Threshold counts of (first, middle, second) directions.
    fn counts(&self) -> (usize, Option<usize>, usize) {
        match self.h {
            Some(_) => (
                self.grid.0,
                Some(self.grid.1),
                self.h_count.unwrap_or(self.grid.1),
            ),
            None => (self.grid.0, None, self.grid.1),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.iter().any(|&d| d > 1) {
            return Err(EmpError::Config(format!(
                "homology dimensions must be 0 and/or 1, got {:?}",
                self.dims
            )));
        }
        let (m, mid, n) = self.counts();
        if m < 2 || n < 2 || mid.is_some_and(|c| c < 2) {
            return Err(EmpError::Config(
                "every threshold count must be at least 2".into(),
            ));
        }
        Ok(())
    }
}

/// Values the second direction thresholds are drawn from.
fn second_direction_sample(graph: &Graph, second: &SecondDirection) -> Result<Vec<f64>> {
    Ok(match *second {
        SecondDirection::Sublevel { filter } => compute_node_filter(graph, filter)?.values,
        SecondDirection::EdgeWeight { filter } => compute_edge_filter(graph, filter)?.values,
        SecondDirection::Power { lengths } => {
            let lens = match lengths {
                Some(l) => Some(
                    compute_edge_filter(graph, l.kind)?
                        .values
                        .into_iter()
                        .map(|v| v - l.floor + 1.0)
                        .collect::<Vec<_>>(),
                ),
                None => graph.edge_weights().map(<[f64]>::to_vec),
            };
            let dist =
                shortest_path_matrix(graph, &Slice::full(graph, f64::INFINITY), lens.as_deref())?;
            let mut out = Vec::new();
            for (i, row) in dist.iter().enumerate() {
                out.extend(row[i + 1..].iter().copied().filter(|d| d.is_finite()));
            }
            out
        }
    })
}

/// Fills in the power-length floor as the minimum of the length filter
/// over `graphs`.
fn resolve_floor(graphs: &[&Graph], second: SecondDirection) -> Result<SecondDirection> {
    if let SecondDirection::Power { lengths: Some(l) } = second {
        let mut floor = f64::INFINITY;
        for g in graphs {
            for v in compute_edge_filter(g, l.kind)?.values {
                floor = floor.min(v);
            }
        }
        let floor = if floor.is_finite() { floor } else { 0.0 };
        return Ok(SecondDirection::Power {
            lengths: Some(PowerLengths {
                kind: l.kind,
                floor,
            }),
        });
    }
    Ok(second)
}

/// Exactly `count` thresholds: the strategy's picks, widened by gap
/// midpoints when ties leave fewer distinct values than requested.
fn thresholds_from(sample: &[f64], count: usize, strategy: ThresholdStrategy) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Ok(uniform(0.0, 1.0, count));
    }
    Ok(fill_to_count(
        &select_thresholds(sample, count, strategy)?.values,
        count,
    ))
}

fn uniform(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| {
            if k == count - 1 {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (count - 1) as f64
            }
        })
        .collect()
}

/// Exactly `count` evenly spaced thresholds over the range of `sample`.
fn per_graph_thresholds(sample: &[f64], count: usize) -> Vec<f64> {
    let lo = sample.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sample.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 0.0) };
    uniform(lo, if hi > lo { hi } else { lo + 1.0 }, count)
}

/// Thresholds of every direction of an export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportGrid {
    pub alphas: Vec<f64>,
    pub middle: Option<Vec<f64>>,
    pub betas: Vec<f64>,
}

/// Resolved filters and thresholds shared by every graph of an export.
#[derive(Debug, Clone, PartialEq)]
pub struct ExportPlan {
    pub layout: ExportLayout,
    /// Dataset-wide thresholds; `None` in per-graph mode.
    pub grid: Option<ExportGrid>,
}

fn build_grid(
    graphs: &[&Graph],
    layout: &ExportLayout,
    config: &ExportConfig,
    pick: impl Fn(&[f64], usize) -> Result<Vec<f64>>,
) -> Result<ExportGrid> {
    let (m, mid, n) = config.counts();
    let mut f_sample = Vec::new();
    let mut mid_sample = Vec::new();
    let mut g_sample = Vec::new();
    for g in graphs {
        f_sample.extend(first_filter_values(g, layout.first)?);
        if let Some(middle) = layout.middle {
            mid_sample.extend(first_filter_values(g, middle)?);
        }
        g_sample.extend(second_direction_sample(g, &layout.second)?);
    }
    Ok(ExportGrid {
        alphas: pick(&f_sample, m)?,
        middle: mid.map(|c| pick(&mid_sample, c)).transpose()?,
        betas: pick(&g_sample, n)?,
    })
}

pub fn plan_export(dataset: &GraphDataset, config: &ExportConfig) -> Result<ExportPlan> {
    config.validate()?;
    let mut layout = config.layout()?;
    let all: Vec<&Graph> = dataset.graphs.iter().collect();
    layout.second = resolve_floor(&all, layout.second)?;
    let grid = match config.scope {
        ThresholdScope::Graph => None,
        ThresholdScope::Dataset => Some(build_grid(&all, &layout, config, |s, c| {
            thresholds_from(s, c, config.strategy)
        })?),
    };
    Ok(ExportPlan { layout, grid })
}

/// Flattened EMP features of one graph: each requested dimension's summary
/// in row-major order, concatenated.
pub fn graph_features(graph: &Graph, plan: &ExportPlan, config: &ExportConfig) -> Result<Vec<f64>> {
    let (layout, grid) = match &plan.grid {
        Some(grid) => (plan.layout, grid.clone()),
        None => {
            let mut layout = plan.layout;
            layout.second = resolve_floor(&[graph], layout.second)?;
            let grid = build_grid(&[graph], &layout, config, |s, c| {
                Ok(per_graph_thresholds(s, c))
            })?;
            (layout, grid)
        }
    };
    let summaries = match (layout.middle, grid.middle) {
        (Some(middle), Some(mid)) => {
            let grid3 = ThresholdGrid3 {
                alphas: grid.alphas,
                middle: mid,
                betas: grid.betas,
            };
            config
                .dims
                .iter()
                .map(|&d| {
                    let spec = EmpSpec3 {
                        first: layout.first,
                        middle,
                        second: layout.second,
                        method: config.method,
                        homology_dim: d,
                    };
                    emp_summary_3d(graph, &spec, &grid3)
                })
                .collect::<Result<Vec<_>>>()?
        }
        _ => {
            let spec = EmpSpec {
                first: layout.first,
                second: layout.second,
                method: config.method,
                homology_dim: config.dims[0],
            };
            let grid = ThresholdGrid::new(grid.alphas, grid.betas, config.strategy)?;
            emp_summaries(graph, &spec, &grid, &config.dims, config.order)?
        }
    };
    Ok(summaries.iter().flat_map(|s| s.flatten()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportMetadata {
    pub dataset: String,
    pub graphs: usize,
    pub version: String,
    pub config: ExportConfig,
    pub first_filter: String,
    pub middle_filter: Option<String>,
    pub second_direction: String,
    /// Shared thresholds; absent in per-graph mode.
    pub grid: Option<ExportGrid>,
    pub cap: Option<f64>,
    pub summary_shape: Vec<usize>,
    pub columns: usize,
    pub float_format: String,
    pub conventions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureExport {
    pub header: Vec<String>,
    pub labels: Vec<i64>,
    /// `n_nodes, n_edges`, then the flattened summaries.
    pub rows: Vec<Vec<f64>>,
    pub metadata: ExportMetadata,
}

fn feature_header(dims: &[usize], shape: &[usize]) -> Vec<String> {
    let mut header = vec![
        "label".to_string(),
        "n_nodes".to_string(),
        "n_edges".to_string(),
    ];
    let cells: usize = shape.iter().product();
    for &d in dims {
        for flat in 0..cells {
            let mut idx = Vec::with_capacity(shape.len());
            let mut rest = flat;
            for &s in shape.iter().rev() {
                idx.push(rest % s);
                rest /= s;
            }
            let idx: Vec<String> = idx.iter().rev().map(usize::to_string).collect();
            header.push(format!("h{d}_{}", idx.join("_")));
        }
    }
    header
}

/// Computes one feature row per graph, in graph order.
pub fn compute_features(dataset: &GraphDataset, config: &ExportConfig) -> Result<FeatureExport> {
    let plan = plan_export(dataset, config)?;
    let (m, mid, n) = config.counts();
    let mut shape = vec![m];
    shape.extend(mid);
    shape.push(config.method.output_len(n));

    let features: Vec<Vec<f64>> = dataset
        .graphs
        .par_iter()
        .map(|g| {
            let mut row = vec![g.node_count() as f64, g.edge_count() as f64];
            row.extend(graph_features(g, &plan, config)?);
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let width = 2 + config.dims.len() * shape.iter().product::<usize>();
    if let Some(bad) = features
        .iter()
        .position(|r| r.len() != width || r.iter().any(|x| !x.is_finite()))
    {
        return Err(EmpError::Dataset(format!(
            "graph {bad} produced a malformed feature row"
        )));
    }

    let metadata = ExportMetadata {
        dataset: dataset.name.clone(),
        graphs: dataset.len(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        first_filter: plan.layout.first.to_string(),
        middle_filter: plan.layout.middle.map(|m| m.to_string()),
        second_direction: plan.layout.second.to_string(),
        cap: plan.grid.as_ref().and_then(|g| g.betas.last().copied()),
        grid: plan.grid,
        columns: width + 1,
        float_format: "17 significant digits (Rust {:.16e})".to_string(),
        conventions: crate::emp::conventions(),
        summary_shape: shape.clone(),
    };
    Ok(FeatureExport {
        header: feature_header(&config.dims, &shape),
        labels: dataset.labels.clone(),
        rows: features,
        metadata,
    })
}

pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

impl FeatureExport {
    /// Writes `<prefix>.csv` and `<prefix>.json`; returns both paths.
    pub fn write(&self, prefix: &Path) -> Result<(PathBuf, PathBuf)> {
        let csv_path = with_suffix(prefix, "csv");
        let json_path = with_suffix(prefix, "json");
        let mut w = csv::Writer::from_path(&csv_path)?;
        w.write_record(&self.header)?;
        for (label, row) in self.labels.iter().zip(&self.rows) {
            let mut record = Vec::with_capacity(row.len() + 1);
            record.push(label.to_string());
            record.push((row[0] as usize).to_string());
            record.push((row[1] as usize).to_string());
            record.extend(row[2..].iter().map(|&x| format_real(x)));
            w.write_record(&record)?;
        }
        w.flush()?;
        let mut f = fs::File::create(&json_path)?;
        serde_json::to_writer_pretty(&mut f, &self.metadata)?;
        f.write_all(b"\n")?;
        Ok((csv_path, json_path))
    }
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Computes and writes features for a dataset.
pub fn export_features(
    dataset: &GraphDataset,
    config: &ExportConfig,
    prefix: &Path,
) -> Result<FeatureExport> {
    let export = compute_features(dataset, config)?;
    export.write(prefix)?;
    Ok(export)
}

/// A feature CSV read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub header: Vec<String>,
    pub labels: Vec<i64>,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_feature_csv(path: &Path) -> Result<FeatureTable> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let label = rec
            .get(0)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(path, line, "bad label"))?;
        let row = rec
            .iter()
            .skip(1)
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| parse_err(path, line, format!("bad number '{s}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        labels.push(label);
        rows.push(row);
    }
    Ok(FeatureTable {
        header,
        labels,
        rows,
    })
}

/// Per-class graph counts, for quick dataset summaries.
pub fn class_counts(labels: &[i64]) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    for &l in labels {
        *out.entry(l).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::NodeFilterKind;

    fn write(dir: &Path, name: &str, body: &str) {
        fs::write(dir.join(name), body).unwrap();
    }

    /// Two graphs: a triangle (label 1) and a path on two nodes (label -1).
    pub(crate) fn fixture(dir: &Path) {
        write(dir, "TOY_A.txt", "1, 2\n2, 1\n2, 3\n3, 1\n4, 5\n5, 4\n");
        write(dir, "TOY_graph_indicator.txt", "1\n1\n1\n2\n2\n");
        write(dir, "TOY_graph_labels.txt", "1\n-1\n");
        write(dir, "TOY_node_labels.txt", "0\n1\n2\n0\n0\n");
    }

    #[test]
    fn loads_fixture() {
        let tmp = tempfile::tempdir().unwrap();
        fixture(tmp.path());
        let ds = load_tudataset(tmp.path(), "TOY").unwrap();
        assert_eq!(ds.labels, vec![1, -1]);
        assert_eq!(ds.graphs[0].edges(), &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(ds.graphs[1].edges(), &[(0, 1)]);
        assert_eq!(ds.graphs[0].node_attributes().unwrap()[2], vec![2.0]);
        assert_eq!(ds.node_attribute_dim, 1);
        assert_eq!(ds.stats().classes, 2);
        assert_eq!(detect_name(tmp.path()).unwrap(), "TOY");
    }

    #[test]
    fn missing_file_is_reported() {
        let tmp = tempfile::tempdir().unwrap();
        fixture(tmp.path());
        fs::remove_file(tmp.path().join("TOY_graph_labels.txt")).unwrap();
        assert!(matches!(
            load_tudataset(tmp.path(), "TOY"),
            Err(EmpError::MissingFile(_))
        ));
    }

    #[test]
    fn rejects_bad_labels_and_indicators() {
        let tmp = tempfile::tempdir().unwrap();
        fixture(tmp.path());
        write(tmp.path(), "TOY_graph_labels.txt", "1\nx\n");
        assert!(matches!(
            load_tudataset(tmp.path(), "TOY"),
            Err(EmpError::Parse { .. })
        ));
        fixture(tmp.path());
        write(tmp.path(), "TOY_graph_indicator.txt", "1\n1\n1\n3\n3\n");
        assert!(matches!(
            load_tudataset(tmp.path(), "TOY"),
            Err(EmpError::Dataset(_))
        ));
        write(tmp.path(), "TOY_graph_indicator.txt", "1\n2\n1\n2\n2\n");
        assert!(load_tudataset(tmp.path(), "TOY").is_err());
    }

    #[test]
    fn rejects_cross_graph_edges() {
        let tmp = tempfile::tempdir().unwrap();
        fixture(tmp.path());
        write(tmp.path(), "TOY_A.txt", "1, 4\n");
        write(tmp.path(), "TOY_node_labels.txt", "0\n1\n2\n0\n0\n");
        assert!(load_tudataset(tmp.path(), "TOY").is_err());
    }

    #[test]
    fn export_shape_and_header() {
        let tmp = tempfile::tempdir().unwrap();
        fixture(tmp.path());
        let ds = load_tudataset(tmp.path(), "TOY").unwrap();
        let config = ExportConfig {
            f: FilterKind::Node(NodeFilterKind::Degree),
            g: Some(FilterKind::Node(NodeFilterKind::Attribute(0))),
            h: None,
            direction: DirectionKind::Sublevel,
            method: Vectorization::Betti,
            dims: vec![0, 1],
            grid: (3, 3),
            h_count: None,
            strategy: ThresholdStrategy::Uniform,
            order: FilterOrder::Fg,
            scope: ThresholdScope::Dataset,
        };
        let out = export_features(&ds, &config, &tmp.path().join("feat")).unwrap();
        assert_eq!(out.header.len(), 3 + 2 * 3 * 3);
        assert_eq!(out.header[3], "h0_0_0");
        let table = read_feature_csv(&tmp.path().join("feat.csv")).unwrap();
        assert_eq!(table.labels, vec![1, -1]);
        assert_eq!(table.rows, out.rows);
        assert!(tmp.path().join("feat.json").is_file());
    }

    #[test]
    fn config_rejects_mismatched_direction() {
        let config = ExportConfig {
            f: FilterKind::Node(NodeFilterKind::Degree),
            g: Some(FilterKind::Node(NodeFilterKind::Katz)),
            h: None,
            direction: DirectionKind::Power,
            method: Vectorization::Betti,
            dims: vec![0],
            grid: (3, 3),
            h_count: None,
            strategy: ThresholdStrategy::Uniform,
            order: FilterOrder::Fg,
            scope: ThresholdScope::Dataset,
        };
        assert!(config.layout().is_err());
    }

    #[test]
    fn per_graph_thresholds_always_have_count_entries() {
        assert_eq!(per_graph_thresholds(&[2.0, 2.0], 3), vec![2.0, 2.5, 3.0]);
        assert_eq!(per_graph_thresholds(&[], 2), vec![0.0, 1.0]);
        assert_eq!(per_graph_thresholds(&[0.0, 4.0], 3), vec![0.0, 2.0, 4.0]);
    }

    fn toy_config() -> ExportConfig {
        ExportConfig {
            f: FilterKind::Node(NodeFilterKind::Degree),
            g: Some(FilterKind::Node(NodeFilterKind::Attribute(0))),
            h: None,
            direction: DirectionKind::Sublevel,
            method: Vectorization::Betti,
            dims: vec![0, 1],
            grid: (6, 7),
            h_count: None,
            strategy: ThresholdStrategy::Quantile,
            order: FilterOrder::Fg,
            scope: ThresholdScope::Dataset,
        }
    }

    #[test]
    fn quantile_ties_still_give_requested_shape() {
        let tmp = tempfile::tempdir().unwrap();
        fixture(tmp.path());
        let ds = load_tudataset(tmp.path(), "TOY").unwrap();
        let out = compute_features(&ds, &toy_config()).unwrap();
        assert_eq!(out.metadata.summary_shape, vec![6, 7]);
        let grid = out.metadata.grid.unwrap();
        assert_eq!(grid.alphas.len(), 6);
        assert_eq!(grid.betas.len(), 7);
        // every distinct degree survives as a threshold
        assert!(grid.alphas.contains(&1.0) && grid.alphas.contains(&2.0));
        assert!(out.rows.iter().all(|r| r.len() == 2 + 2 * 6 * 7));
    }

    #[test]
    fn three_filter_export() {
        let tmp = tempfile::tempdir().unwrap();
        fixture(tmp.path());
        let ds = load_tudataset(tmp.path(), "TOY").unwrap();
        let config = ExportConfig {
            g: Some(FilterKind::Node(NodeFilterKind::Attribute(0))),
            h: Some(FilterKind::Node(NodeFilterKind::Degree)),
            grid: (2, 3),
            h_count: Some(4),
            ..toy_config()
        };
        let out = compute_features(&ds, &config).unwrap();
        assert_eq!(out.metadata.summary_shape, vec![2, 3, 4]);
        assert_eq!(out.header[3], "h0_0_0_0");
        assert_eq!(out.header.last().unwrap(), "h1_1_2_3");
        assert_eq!(out.rows[0].len(), 2 + 2 * 24);
    }

    #[test]
    fn per_graph_scope_keeps_shape() {
        let tmp = tempfile::tempdir().unwrap();
        fixture(tmp.path());
        let ds = load_tudataset(tmp.path(), "TOY").unwrap();
        let config = ExportConfig {
            scope: ThresholdScope::Graph,
            ..toy_config()
        };
        let out = compute_features(&ds, &config).unwrap();
        assert!(out.metadata.grid.is_none());
        assert!(out.rows.iter().all(|r| r.len() == 2 + 2 * 6 * 7));
    }

    #[test]
    fn empty_dataset_writes_header_only() {
        let tmp = tempfile::tempdir().unwrap();
        let ds = GraphDataset {
            name: "EMPTY".into(),
            graphs: vec![],
            labels: vec![],
            node_attribute_dim: 0,
            edge_attribute_dim: 0,
        };
        let config = ExportConfig {
            g: Some(FilterKind::Node(NodeFilterKind::Degree)),
            ..toy_config()
        };
        export_features(&ds, &config, &tmp.path().join("e")).unwrap();
        let text = fs::read_to_string(tmp.path().join("e.csv")).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("label,n_nodes,n_edges,h0_0_0"));
    }
}
