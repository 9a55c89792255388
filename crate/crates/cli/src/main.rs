use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use emp_core::dataset::{detect_name, plan_export, ExportPlan};
use emp_core::emp::{slice_persistence, FilterOrder};
use emp_core::filtration::ThresholdGrid;
use emp_core::{
    export_features, load_tudataset, stability_check, DirectionKind, EmpError, EmpSpec,
    ExportConfig, FilterKind, GraphDataset, RowMetric, StabilityConfig, ThresholdScope,
    ThresholdStrategy, Vectorization, WassersteinOrder,
};

#[derive(Parser)]
#[command(
    name = "emp",
    version,
    about = "Multiparameter persistence fingerprints for graph datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute EMP features for every graph and write <out>.csv and <out>.json.
    Compute {
        #[command(flatten)]
        features: FeatureArgs,
        /// Output path prefix.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare slice-wise diagram distances with summary distances for graph pairs.
    Stability {
        #[command(flatten)]
        features: FeatureArgs,
        /// Number of pairs: graph 2k is paired with graph 2k+1. All
        /// consecutive pairs when omitted.
        #[arg(long)]
        pairs: Option<usize>,
        /// Text file with one `i,j` pair of 0-based graph indices per line,
        /// used instead of consecutive pairs.
        #[arg(long, conflicts_with = "pairs")]
        pair_file: Option<PathBuf>,
        /// Wasserstein order: p >= 1 or `inf`.
        #[arg(long, default_value = "inf")]
        p: String,
        /// Row metric of the summary distance: sup, l1 or l2.
        #[arg(long, default_value = "sup")]
        row_metric: String,
        /// Output JSON-lines report; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the per-slice persistence diagrams of one graph.
    Diagram {
        #[command(flatten)]
        features: FeatureArgs,
        /// 0-based graph index.
        #[arg(long)]
        graph: usize,
        /// Only this 0-based slice.
        #[arg(long)]
        slice: Option<usize>,
    },
    /// Print dataset statistics as JSON.
    Stats {
        #[command(flatten)]
        data: DataArgs,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Directory holding the dataset text files.
    #[arg(long)]
    data: PathBuf,
    /// Dataset name; detected from the `*_A.txt` file when omitted.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct FeatureArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Slicing filter.
    #[arg(long, default_value = "degree", value_parser = parse_filter)]
    f: FilterKind,
    /// Second filter (edge filter giving lengths for `power`).
    #[arg(long, value_parser = parse_filter)]
    g: Option<FilterKind>,
    /// Third filter: `g` then slices again and the diagrams come from `h`.
    #[arg(long, value_parser = parse_filter)]
    h: Option<FilterKind>,
    /// Direction the diagrams are taken in: sublevel, edge-weight or power.
    #[arg(
        long = "second-direction",
        alias = "direction",
        default_value = "sublevel"
    )]
    direction: String,
    /// Vectorization: betti, landscape, silhouette, entropy or image.
    #[arg(long, default_value = "betti")]
    method: String,
    /// Homology dimensions.
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    dims: Vec<usize>,
    /// Threshold counts as MxN, or MxNxK with a third filter.
    #[arg(long, default_value = "50x50", value_parser = parse_grid)]
    grid: GridSize,
    /// Threshold strategy: quantile, uniform or exact.
    #[arg(long = "thresholds", alias = "strategy", default_value = "quantile")]
    strategy: String,
    /// Filter order: fg or gf.
    #[arg(long, default_value = "fg")]
    order: String,
    /// Thresholds pooled over the dataset, or chosen per graph.
    #[arg(long, default_value = "dataset")]
    scope: String,
}

fn parse_filter(s: &str) -> Result<FilterKind, String> {
    s.parse().map_err(|e: EmpError| e.to_string())
}

/// Threshold counts per direction, two or three of them.
#[derive(Clone)]
struct GridSize(Vec<usize>);

fn parse_grid(s: &str) -> Result<GridSize, String> {
    let sizes = s
        .split(['x', 'X'])
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad grid size '{t}'"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if !(2..=3).contains(&sizes.len()) {
        return Err(format!("grid '{s}' is not of the form MxN or MxNxK"));
    }
    Ok(GridSize(sizes))
}

impl DataArgs {
    fn load(&self) -> emp_core::Result<GraphDataset> {
        if !self.data.is_dir() {
            return Err(EmpError::MissingFile(self.data.clone()));
        }
        let name = match &self.name {
            Some(n) => n.clone(),
            None => detect_name(&self.data)?,
        };
        load_tudataset(&self.data, &name)
    }
}

impl FeatureArgs {
    fn config(&self) -> emp_core::Result<ExportConfig> {
        let scope = match self.scope.as_str() {
            "dataset" => ThresholdScope::Dataset,
            "graph" => ThresholdScope::Graph,
            other => {
                return Err(EmpError::Config(format!(
                    "unknown threshold scope '{other}'"
                )))
            }
        };
        if self.grid.0.len() == 3 && self.h.is_none() {
            return Err(EmpError::Config(
                "an MxNxK grid needs a third filter --h".into(),
            ));
        }
        Ok(ExportConfig {
            f: self.f,
            g: self.g,
            h: self.h,
            direction: self.direction.parse::<DirectionKind>()?,
            method: Vectorization::parse(&self.method)?,
            dims: self.dims.clone(),
            grid: (self.grid.0[0], self.grid.0[1]),
            h_count: self.grid.0.get(2).copied(),
            strategy: self.strategy.parse::<ThresholdStrategy>()?,
            order: self.order.parse::<FilterOrder>()?,
            scope,
        })
    }

    /// Two-parameter plan on dataset-wide thresholds.
    fn dataset_plan(
        &self,
        dataset: &GraphDataset,
        config: &ExportConfig,
    ) -> emp_core::Result<(ExportPlan, ThresholdGrid)> {
        if config.scope != ThresholdScope::Dataset {
            return Err(EmpError::Config(
                "this command needs dataset-wide thresholds".into(),
            ));
        }
        if config.h.is_some() {
            return Err(EmpError::Config(
                "this command takes two filters, not three".into(),
            ));
        }
        let plan = plan_export(dataset, config)?;
        let grid = plan.grid.clone().expect("dataset scope yields a grid");
        let grid = ThresholdGrid::new(grid.alphas, grid.betas, config.strategy)?;
        Ok((plan, grid))
    }
}

fn consecutive_pairs(
    requested: Option<usize>,
    count: usize,
) -> emp_core::Result<Vec<(usize, usize)>> {
    let k = requested.unwrap_or(count / 2);
    if k > count / 2 {
        return Err(EmpError::Config(format!(
            "{k} pairs requested but the dataset has {count} graphs"
        )));
    }
    Ok((0..k).map(|i| (2 * i, 2 * i + 1)).collect())
}

fn read_pairs(path: &Path, count: usize) -> emp_core::Result<Vec<(usize, usize)>> {
    let text = fs::read_to_string(path).map_err(|_| EmpError::MissingFile(path.to_path_buf()))?;
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| EmpError::Parse {
            file: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| parse_err("expected 'i,j'".into()))?;
        let a: usize = a
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("bad index '{a}'")))?;
        let b: usize = b
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("bad index '{b}'")))?;
        if a >= count || b >= count {
            return Err(parse_err(format!(
                "index out of range (dataset has {count} graphs)"
            )));
        }
        pairs.push((a, b));
    }
    Ok(pairs)
}

fn run(cli: Cli) -> emp_core::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Compute {
            features,
            out: prefix,
        } => {
            let config = features.config()?;
            let dataset = features.data.load()?;
            let export = export_features(&dataset, &config, &prefix)?;
            writeln!(
                out,
                "wrote {} rows x {} columns to {}.csv",
                export.rows.len(),
                export.header.len(),
                prefix.display()
            )?;
        }
        Command::Stability {
            features,
            pairs,
            pair_file,
            p,
            row_metric,
            out: path,
        } => {
            let config = features.config()?;
            if config.dims.len() != 1 {
                return Err(EmpError::Config(
                    "stability checks take a single homology dimension".into(),
                ));
            }
            let p: WassersteinOrder = p.parse()?;
            let row_metric = match row_metric.as_str() {
                "sup" => RowMetric::Sup,
                "l1" => RowMetric::L1,
                "l2" => RowMetric::L2,
                other => return Err(EmpError::Config(format!("unknown row metric '{other}'"))),
            };
            let dataset = features.data.load()?;
            let (plan, grid) = features.dataset_plan(&dataset, &config)?;
            let index_pairs = match &pair_file {
                Some(path) => read_pairs(path, dataset.len())?,
                None => consecutive_pairs(pairs, dataset.len())?,
            };
            let graph_pairs: Vec<_> = index_pairs
                .iter()
                .map(|&(a, b)| (dataset.graphs[a].clone(), dataset.graphs[b].clone()))
                .collect();
            let stability = StabilityConfig {
                spec: EmpSpec {
                    first: plan.layout.first,
                    second: plan.layout.second,
                    method: config.method,
                    homology_dim: config.dims[0],
                },
                grid,
                p,
                row_metric,
            };
            let reports = stability_check(&graph_pairs, &stability)?;
            let mut text = String::new();
            for r in &reports {
                text.push_str(&serde_json::to_string(r)?);
                text.push('\n');
            }
            match path {
                Some(path) => fs::write(path, text)?,
                None => out.write_all(text.as_bytes())?,
            }
        }
        Command::Diagram {
            features,
            graph,
            slice,
        } => {
            let config = features.config()?;
            let dataset = features.data.load()?;
            let (plan, grid) = features.dataset_plan(&dataset, &config)?;
            let g = dataset.graphs.get(graph).ok_or_else(|| {
                EmpError::Config(format!(
                    "graph {graph} out of range (dataset has {})",
                    dataset.len()
                ))
            })?;
            let diagrams = slice_persistence(g, plan.layout.first, plan.layout.second, &grid)?;
            if let Some(s) = slice {
                if s >= diagrams.len() {
                    return Err(EmpError::Config(format!(
                        "slice {s} out of range ({} slices)",
                        diagrams.len()
                    )));
                }
            }
            for (i, (pd0, pd1)) in diagrams.iter().enumerate() {
                if slice.is_some_and(|s| s != i) {
                    continue;
                }
                writeln!(out, "# slice {i} alpha {}", grid.alphas[i])?;
                for &d in &config.dims {
                    out.write_all(if d == 0 { pd0 } else { pd1 }.to_text().as_bytes())?;
                }
            }
        }
        Command::Stats { data } => {
            let dataset = data.load()?;
            let stats = dataset.stats();
            writeln!(out, "{}", serde_json::to_string_pretty(&stats)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}
