//! Fixed-length vectorizations of persistence diagrams.
//!
//! Landscapes and silhouettes are sampled on the thresholds and their
//! midpoints (`2n - 1` values); Betti and life-entropy curves on the `n`
//! thresholds; persistence images on a `k x l` grid over the
//! (birth, persistence) plane.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{EmpError, Result};
use crate::persistence::{PersistenceDiagram, PersistencePoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Vectorization {
    Landscape {
        order: usize,
    },
    Betti,
    Silhouette {
        power: f64,
    },
    Entropy,
    Image {
        resolution: (usize, usize),
        /// Gaussian standard deviation; `None` means one grid-cell diagonal.
        bandwidth: Option<f64>,
        weight_power: f64,
    },
}

impl Vectorization {
    pub const DEFAULT_RESOLUTION: usize = 50;

    pub fn landscape() -> Self {
        Vectorization::Landscape { order: 1 }
    }

    pub fn silhouette() -> Self {
        Vectorization::Silhouette { power: 1.0 }
    }

    pub fn image() -> Self {
        Vectorization::Image {
            resolution: (Self::DEFAULT_RESOLUTION, Self::DEFAULT_RESOLUTION),
            bandwidth: None,
            weight_power: 1.0,
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "betti" => Ok(Vectorization::Betti),
            "landscape" => Ok(Self::landscape()),
            "silhouette" => Ok(Self::silhouette()),
            "entropy" => Ok(Vectorization::Entropy),
            "image" => Ok(Self::image()),
            other => Err(EmpError::Config(format!("unknown vectorization '{other}'"))),
        }
    }

    /// Output length for a second-direction grid of `n` thresholds.
    pub fn output_len(&self, n: usize) -> usize {
        match self {
            Vectorization::Landscape { .. } | Vectorization::Silhouette { .. } => 2 * n - 1,
            Vectorization::Betti | Vectorization::Entropy => n,
            Vectorization::Image {
                resolution: (k, l), ..
            } => k * l,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Vectorization::Landscape { order: 0 } => {
                Err(EmpError::Config("landscape order must be >= 1".into()))
            }
            Vectorization::Silhouette { power } if power.is_nan() || power < 0.0 => {
                Err(EmpError::Config("silhouette power must be >= 0".into()))
            }
            Vectorization::Image {
                resolution: (k, l),
                bandwidth,
                ..
            } => {
                if k == 0 || l == 0 {
                    return Err(EmpError::Config(
                        "image resolution must be at least 1x1".into(),
                    ));
                }
                if let Some(b) = bandwidth {
                    if b.is_nan() || b <= 0.0 {
                        return Err(EmpError::Config("image bandwidth must be positive".into()));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Vectorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vectorization::Landscape { order } => write!(f, "landscape(order={order})"),
            Vectorization::Betti => f.write_str("betti"),
            Vectorization::Silhouette { power } => write!(f, "silhouette(power={power})"),
            Vectorization::Entropy => f.write_str("entropy"),
            Vectorization::Image {
                resolution: (k, l), ..
            } => write!(f, "image({k}x{l})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorizedDiagram {
    pub values: Vec<f64>,
    /// Sampling positions for curves; empty for images.
    pub grid: Vec<f64>,
    /// `[len]` for curves, `[k, l]` (row-major) for images.
    pub shape: Vec<usize>,
    pub method: Vectorization,
}

/// Thresholds interleaved with their midpoints.
pub fn midpoint_grid(betas: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(betas.len().saturating_mul(2).saturating_sub(1));
    for (i, &b) in betas.iter().enumerate() {
        if i > 0 {
            out.push((betas[i - 1] + b) / 2.0);
        }
        out.push(b);
    }
    out
}

/// Tent function of a point: zero outside `[b, d]`, peak `(d - b) / 2`.
pub fn tent(p: &PersistencePoint, t: f64) -> f64 {
    (t - p.birth).min(p.death - t).max(0.0)
}

fn curve(values: Vec<f64>, grid: Vec<f64>, method: Vectorization) -> VectorizedDiagram {
    let shape = vec![values.len()];
    VectorizedDiagram {
        values,
        grid,
        shape,
        method,
    }
}

/// `order`-th largest tent value at each grid point (zero when fewer points).
pub fn landscape(pd: &PersistenceDiagram, betas: &[f64], order: usize) -> VectorizedDiagram {
    let grid = midpoint_grid(betas);
    let mut tents = Vec::with_capacity(pd.len());
    let values = grid
        .iter()
        .map(|&t| {
            if order == 0 || order > pd.len() {
                return 0.0;
            }
            tents.clear();
            tents.extend(pd.points.iter().map(|p| tent(p, t)));
            let k = order - 1;
            tents.select_nth_unstable_by(k, |a, b| b.total_cmp(a));
            tents[k]
        })
        .collect();
    curve(values, grid, Vectorization::Landscape { order })
}

/// Number of points alive at each threshold.
pub fn betti_curve(pd: &PersistenceDiagram, betas: &[f64]) -> VectorizedDiagram {
    let values = betas.iter().map(|&t| pd.alive_at(t) as f64).collect();
    curve(values, betas.to_vec(), Vectorization::Betti)
}

/// Lifetime-weighted mean of tents, weights `(d - b)^power`.
pub fn silhouette(pd: &PersistenceDiagram, betas: &[f64], power: f64) -> VectorizedDiagram {
    let grid = midpoint_grid(betas);
    let weights: Vec<f64> = pd.points.iter().map(|p| p.lifetime().powf(power)).collect();
    let total: f64 = weights.iter().sum();
    let values = grid
        .iter()
        .map(|&t| {
            if total <= 0.0 {
                return 0.0;
            }
            pd.points
                .iter()
                .zip(&weights)
                .map(|(p, w)| w * tent(p, t))
                .sum::<f64>()
                / total
        })
        .collect();
    curve(values, grid, Vectorization::Silhouette { power })
}

/// Normalized life entropy of the points alive at each threshold:
/// `-sum (l_i / L) log(l_i / L)` with `L` the total lifetime of the diagram.
pub fn entropy_curve(pd: &PersistenceDiagram, betas: &[f64]) -> VectorizedDiagram {
    let total: f64 = pd.points.iter().map(PersistencePoint::lifetime).sum();
    let values = betas
        .iter()
        .map(|&t| {
            if total <= 0.0 {
                return 0.0;
            }
            let h: f64 = pd
                .points
                .iter()
                .filter(|p| p.alive_at(t) && p.lifetime() > 0.0)
                .map(|p| {
                    let q = p.lifetime() / total;
                    -q * q.ln()
                })
                .sum();
            // -0.0 from a single full-mass bar
            h.max(0.0)
        })
        .collect();
    curve(values, betas.to_vec(), Vectorization::Entropy)
}

/// Extent of a persistence image in the (birth, persistence) plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageGrid {
    pub birth: (f64, f64),
    pub persistence: (f64, f64),
    pub resolution: (usize, usize),
}

impl ImageGrid {
    /// `[beta_1, beta_n] x [0, beta_n - beta_1]`, widened to unit length if
    /// the thresholds span nothing.
    pub fn from_thresholds(betas: &[f64], resolution: (usize, usize)) -> Self {
        let lo = betas.first().copied().unwrap_or(0.0);
        let mut hi = betas.last().copied().unwrap_or(1.0);
        if hi <= lo {
            hi = lo + 1.0;
        }
        ImageGrid {
            birth: (lo, hi),
            persistence: (0.0, hi - lo),
            resolution,
        }
    }

    fn cell(&self) -> (f64, f64) {
        (
            (self.birth.1 - self.birth.0) / self.resolution.0 as f64,
            (self.persistence.1 - self.persistence.0) / self.resolution.1 as f64,
        )
    }

    pub fn cell_diagonal(&self) -> f64 {
        let (w, h) = self.cell();
        w.hypot(h)
    }
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / std::f64::consts::SQRT_2))
}

/// Persistence image: cell integrals of weighted isotropic Gaussians centred
/// at each `(birth, death - birth)`, weights `(d - b)^weight_power`.
///
/// The matrix is `k x l` (birth bins by persistence bins), stored row-major.
pub fn persistence_image(
    pd: &PersistenceDiagram,
    grid: &ImageGrid,
    bandwidth: f64,
    weight_power: f64,
) -> VectorizedDiagram {
    let (k, l) = grid.resolution;
    let (cw, ch) = grid.cell();
    let mut values = vec![0.0; k * l];
    for p in &pd.points {
        let pers = p.lifetime();
        let w = pers.powf(weight_power);
        if w == 0.0 {
            continue;
        }
        let bx: Vec<f64> = (0..k)
            .map(|a| {
                let x0 = grid.birth.0 + a as f64 * cw;
                normal_cdf((x0 + cw - p.birth) / bandwidth) - normal_cdf((x0 - p.birth) / bandwidth)
            })
            .collect();
        let by: Vec<f64> = (0..l)
            .map(|b| {
                let y0 = grid.persistence.0 + b as f64 * ch;
                normal_cdf((y0 + ch - pers) / bandwidth) - normal_cdf((y0 - pers) / bandwidth)
            })
            .collect();
        for a in 0..k {
            for b in 0..l {
                values[a * l + b] += w * bx[a] * by[b];
            }
        }
    }
    VectorizedDiagram {
        values,
        grid: Vec::new(),
        shape: vec![k, l],
        method: Vectorization::Image {
            resolution: (k, l),
            bandwidth: Some(bandwidth),
            weight_power,
        },
    }
}

/// Applies `method` to a diagram over the second-direction thresholds.
pub fn vectorize(
    pd: &PersistenceDiagram,
    betas: &[f64],
    method: &Vectorization,
) -> Result<VectorizedDiagram> {
    method.validate()?;
    Ok(match *method {
        Vectorization::Landscape { order } => landscape(pd, betas, order),
        Vectorization::Betti => betti_curve(pd, betas),
        Vectorization::Silhouette { power } => silhouette(pd, betas, power),
        Vectorization::Entropy => entropy_curve(pd, betas),
        Vectorization::Image {
            resolution,
            bandwidth,
            weight_power,
        } => {
            let grid = ImageGrid::from_thresholds(betas, resolution);
            let sigma = bandwidth.unwrap_or_else(|| grid.cell_diagonal());
            persistence_image(pd, &grid, sigma, weight_power)
        }
    })
}
