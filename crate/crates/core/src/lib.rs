//! Effective multidimensional persistence (EMP) fingerprints for graphs.
//!
//! A graph is sliced by a first filter, each slice is filtered in a second
//! direction, and the persistence diagrams of the slices are vectorized and
//! stacked into a matrix summary.

pub mod complex;
pub mod dataset;
pub mod emp;
pub mod error;
pub mod filters;
pub mod filtration;
pub mod graph;
pub mod metrics;
pub mod persistence;
pub mod vectorize;

pub use complex::{clique_complex, edge_graded_complex, FilteredComplex};
pub use dataset::{
    compute_features, export_features, load_tudataset, read_feature_csv, DirectionKind,
    ExportConfig, FeatureExport, GraphDataset, ThresholdScope,
};
pub use emp::{
    emp_betti, emp_summaries, emp_summary, emp_summary_3d, EmpSpec, EmpSpec3, EmpSummary,
    FilterOrder, PowerLengths, SecondDirection, ThresholdGrid3,
};
pub use error::{EmpError, Result};
pub use filters::{
    compute_edge_filter, compute_node_filter, EdgeFilterKind, FilterKind, NodeFilterKind,
};
pub use filtration::{select_thresholds, ThresholdGrid, ThresholdStrategy};
pub use graph::{Graph, GraphBuilder};
pub use metrics::{
    emp_distance, induced_matching_distance, stability_check, wasserstein, DistanceReport,
    RowMetric, StabilityConfig, WassersteinOrder,
};
pub use persistence::{compute_persistence, PersistenceDiagram, PersistencePoint};
pub use vectorize::{vectorize, Vectorization};
