//! Matching distances between diagrams and between EMP summaries.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::emp::{emp_summary, slice_diagrams, EmpSpec, EmpSummary};
use crate::error::{EmpError, Result};
use crate::filtration::ThresholdGrid;
use crate::graph::Graph;
use crate::persistence::{PersistenceDiagram, PersistencePoint};

/// Exponent of a Wasserstein distance; `Infinity` is the bottleneck distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WassersteinOrder {
    Finite(f64),
    Infinity,
}

impl FromStr for WassersteinOrder {
    type Err = EmpError;

    fn from_str(s: &str) -> Result<Self> {
        if matches!(s, "inf" | "infinity" | "∞") {
            return Ok(WassersteinOrder::Infinity);
        }
        match s.parse::<f64>() {
            Ok(p) if p >= 1.0 && p.is_finite() => Ok(WassersteinOrder::Finite(p)),
            _ => Err(EmpError::Config(format!(
                "invalid Wasserstein order '{s}' (expected p >= 1 or 'inf')"
            ))),
        }
    }
}

impl fmt::Display for WassersteinOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WassersteinOrder::Finite(p) => write!(f, "{p}"),
            WassersteinOrder::Infinity => f.write_str("inf"),
        }
    }
}

/// L-infinity distance between two diagram points.
pub fn point_distance(a: &PersistencePoint, b: &PersistencePoint) -> f64 {
    (a.birth - b.birth).abs().max((a.death - b.death).abs())
}

/// L-infinity distance from a point to the diagonal.
pub fn diagonal_distance(a: &PersistencePoint) -> f64 {
    (a.death - a.birth).abs() / 2.0
}

/// Minimum-cost perfect assignment on a square cost matrix.
///
/// Shortest augmenting paths with vertex potentials, `O(n^3)`. Returns
/// `assignment[row] = col` and the total cost.
pub fn hungarian(cost: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = cost.len();
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    // 1-based arrays with a virtual column 0
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[row_of[j] - 1] = j - 1;
    }
    let total = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .sum();
    (assignment, total)
}

/// Ground costs of the diagonal-augmented bipartite problem.
///
/// Rows are the points of `a` followed by one diagonal slot per point of
/// `b`; columns are the points of `b` followed by one diagonal slot per
/// point of `a`. Any point may go to any diagonal slot at its diagonal
/// distance, and diagonal slots match each other for free.
fn augmented_costs(a: &[PersistencePoint], b: &[PersistencePoint]) -> Vec<Vec<f64>> {
    let (n, m) = (a.len(), b.len());
    let mut cost = vec![vec![0.0; n + m]; n + m];
    for (row, p) in cost.iter_mut().zip(a) {
        for (c, q) in row.iter_mut().zip(b) {
            *c = point_distance(p, q);
        }
        row[m..].fill(diagonal_distance(p));
    }
    for row in &mut cost[n..] {
        for (c, q) in row.iter_mut().zip(b) {
            *c = diagonal_distance(q);
        }
    }
    cost
}

/// Whether the bipartite graph of entries `<= limit` has a perfect matching
/// (Kuhn's augmenting paths).
fn has_perfect_matching(cost: &[Vec<f64>], limit: f64) -> bool {
    let n = cost.len();
    let mut match_col: Vec<Option<usize>> = vec![None; n];

    fn augment(
        row: usize,
        cost: &[Vec<f64>],
        limit: f64,
        seen: &mut [bool],
        match_col: &mut [Option<usize>],
    ) -> bool {
        for col in 0..cost.len() {
            if cost[row][col] <= limit && !seen[col] {
                seen[col] = true;
                if match_col[col].is_none_or(|r| augment(r, cost, limit, seen, match_col)) {
                    match_col[col] = Some(row);
                    return true;
                }
            }
        }
        false
    }

    (0..n).all(|row| {
        let mut seen = vec![false; n];
        augment(row, cost, limit, &mut seen, &mut match_col)
    })
}

/// Bottleneck distance: the smallest candidate cost admitting a perfect
/// matching, found by binary search over the sorted distinct costs.
fn bottleneck(cost: &[Vec<f64>]) -> f64 {
    let mut candidates: Vec<f64> = cost.iter().flatten().copied().collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    if candidates.is_empty() {
        return 0.0;
    }
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_perfect_matching(cost, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// p-Wasserstein distance with L-infinity ground cost and diagonal
/// augmentation. Essential points are compared as ordinary (capped) points.
pub fn wasserstein(a: &PersistenceDiagram, b: &PersistenceDiagram, p: WassersteinOrder) -> f64 {
    let cost = augmented_costs(&a.points, &b.points);
    match p {
        WassersteinOrder::Infinity => bottleneck(&cost),
        WassersteinOrder::Finite(p) => {
            let powered: Vec<Vec<f64>> = cost
                .iter()
                .map(|r| r.iter().map(|c| c.powf(p)).collect())
                .collect();
            let (_, total) = hungarian(&powered);
            total.max(0.0).powf(1.0 / p)
        }
    }
}

/// Sum of slice-wise Wasserstein distances between two diagram stacks.
pub fn induced_matching_distance(
    plus: &[PersistenceDiagram],
    minus: &[PersistenceDiagram],
    p: WassersteinOrder,
) -> Result<f64> {
    Ok(per_slice_wasserstein(plus, minus, p)?.iter().sum())
}

pub fn per_slice_wasserstein(
    plus: &[PersistenceDiagram],
    minus: &[PersistenceDiagram],
    p: WassersteinOrder,
) -> Result<Vec<f64>> {
    if plus.len() != minus.len() {
        return Err(EmpError::LengthMismatch {
            expected: plus.len(),
            found: minus.len(),
        });
    }
    Ok(plus
        .iter()
        .zip(minus)
        .map(|(a, b)| wasserstein(a, b, p))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowMetric {
    #[default]
    Sup,
    L1,
    L2,
}

impl RowMetric {
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            RowMetric::Sup => diffs.fold(0.0, f64::max),
            RowMetric::L1 => diffs.sum(),
            RowMetric::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
        }
    }
}

/// Sum over rows of the row-wise distance between two summaries.
pub fn emp_distance(plus: &EmpSummary, minus: &EmpSummary, metric: RowMetric) -> Result<f64> {
    if plus.shape() != minus.shape() {
        return Err(EmpError::ShapeMismatch(format!(
            "{:?} vs {:?}",
            plus.shape(),
            minus.shape()
        )));
    }
    if plus.method() != minus.method() {
        return Err(EmpError::ShapeMismatch(format!(
            "vectorizations differ: {} vs {}",
            plus.method(),
            minus.method()
        )));
    }
    let (a, b) = (&plus.provenance, &minus.provenance);
    if a.alphas != b.alphas || a.betas != b.betas || a.middle_thresholds != b.middle_thresholds {
        return Err(EmpError::ShapeMismatch(
            "summaries were built on different grids".into(),
        ));
    }
    Ok(plus
        .rows()
        .zip(minus.rows())
        .map(|(x, y)| metric.distance(&x, &y))
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub pair_id: usize,
    #[serde(rename = "per_slice")]
    pub per_slice_wasserstein: Vec<f64>,
    #[serde(rename = "induced")]
    pub induced_matching: f64,
    #[serde(rename = "emp")]
    pub emp_distance: f64,
    /// `emp / induced`, absent when the induced distance is zero.
    pub ratio: Option<f64>,
}

impl DistanceReport {
    /// Whether `emp <= constant * induced`, up to rounding.
    pub fn satisfies(&self, constant: f64) -> bool {
        self.emp_distance
            <= constant * self.induced_matching + 1e-12 * (1.0 + self.induced_matching)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityConfig {
    pub spec: EmpSpec,
    pub grid: ThresholdGrid,
    pub p: WassersteinOrder,
    pub row_metric: RowMetric,
}

/// Compares slice-wise diagram distances with summary distances for each
/// graph pair, both graphs going through identical filters and grids.
pub fn stability_check(
    pairs: &[(Graph, Graph)],
    config: &StabilityConfig,
) -> Result<Vec<DistanceReport>> {
    let spec = &config.spec;
    pairs
        .iter()
        .enumerate()
        .map(|(pair_id, (plus, minus))| {
            let dp = slice_diagrams(
                plus,
                spec.first,
                spec.second,
                &config.grid,
                spec.homology_dim,
            )?;
            let dm = slice_diagrams(
                minus,
                spec.first,
                spec.second,
                &config.grid,
                spec.homology_dim,
            )?;
            let per_slice = per_slice_wasserstein(&dp, &dm, config.p)?;
            let induced: f64 = per_slice.iter().sum();
            let emp = emp_distance(
                &emp_summary(plus, spec, &config.grid)?,
                &emp_summary(minus, spec, &config.grid)?,
                config.row_metric,
            )?;
            Ok(DistanceReport {
                pair_id,
                per_slice_wasserstein: per_slice,
                induced_matching: induced,
                emp_distance: emp,
                ratio: (induced > 0.0).then(|| emp / induced),
            })
        })
        .collect()
}

/// Largest observed `emp / induced` ratio, an empirical stability constant.
pub fn max_ratio(reports: &[DistanceReport]) -> Option<f64> {
    reports.iter().filter_map(|r| r.ratio).reduce(f64::max)
}
