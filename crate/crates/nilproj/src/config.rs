//! JSON run configuration: group, kernel quadrature, grid, suite selection,
//! tolerances and seed.

use std::collections::BTreeMap;
use std::path::Path;

use nilproj_core::group::{validate_group, DEFAULT_SIGMA_MIN_THRESHOLD};
use nilproj_core::{GroupDescriptor, KernelConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "NILPROJ_WORKERS";

/// A `2n × 2n` matrix given either as nested rows or flat row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    /// `[[row], [row], …]`.
    Rows(Vec<Vec<f64>>),
    /// Row-major entries.
    Flat(Vec<f64>),
}

impl MatrixSpec {
    fn to_matrix(&self, d: usize) -> Result<nilproj_core::nalgebra::DMatrix<f64>> {
        let flat: Vec<f64> = match self {
            MatrixSpec::Rows(rows) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::Config(format!("matrix must be {d}×{d}")));
                }
                rows.iter().flatten().copied().collect()
            }
            MatrixSpec::Flat(v) => {
                if v.len() != d * d {
                    return Err(Error::Config(format!("flat matrix needs {} entries, got {}", d * d, v.len())));
                }
                v.clone()
            }
        };
        Ok(nilproj_core::nalgebra::DMatrix::from_row_slice(d, d, &flat))
    }
}

/// Kernel quadrature section; omitted fields take the library defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSection {
    /// Contour height `ε`.
    pub epsilon: f64,
    /// `S^{r−1}` rule resolution (`null`: library default).
    pub sphere_degree: Option<usize>,
    /// `S^{r−2}` rule resolution of the contour representation.
    pub continued_sphere_degree: usize,
    /// Oracle radial Gauss–Laguerre order.
    pub radial_nodes: usize,
    /// Largest admissible `m`.
    pub m_max: usize,
    /// Relative tolerance of the contour integration.
    pub contour_tol: f64,
    /// Sphere-rule convergence tolerance.
    pub convergence_tol: f64,
}

impl Default for KernelSection {
    fn default() -> Self {
        let k = KernelConfig::default();
        Self {
            epsilon: k.epsilon,
            sphere_degree: k.sphere_degree,
            continued_sphere_degree: k.continued_sphere_degree,
            radial_nodes: k.radial_nodes,
            m_max: k.m_max,
            contour_tol: k.contour_tol,
            convergence_tol: k.convergence_tol,
        }
    }
}

impl KernelSection {
    /// Library configuration.
    pub fn to_kernel_config(&self) -> KernelConfig {
        KernelConfig {
            epsilon: self.epsilon,
            sphere_degree: self.sphere_degree,
            continued_sphere_degree: self.continued_sphere_degree,
            radial_nodes: self.radial_nodes,
            m_max: self.m_max,
            contour_tol: self.contour_tol,
            convergence_tol: self.convergence_tol,
        }
    }
}

/// Grid section (per-axis values).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    /// Half-width of each `y` axis.
    pub y_extent: f64,
    /// Points per `y` axis.
    pub y_points: usize,
    /// Half-width of each `t` axis.
    pub t_extent: f64,
    /// Points per `t` axis.
    pub t_points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { y_extent: 6.0, y_points: 128, t_extent: 12.0, t_points: 256 }
    }
}

impl GridSection {
    /// Grid for a group with `2n` and `r` axes.
    pub fn to_grid(&self, n: usize, r: usize) -> Result<Grid> {
        Grid::new(2 * n, self.y_extent, self.y_points, r, self.t_extent, self.t_points)
    }
}

/// Suite selection, tolerances and sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteSection {
    /// Checks to run (`null`: all).
    pub checks: Option<Vec<String>>,
    /// Per-check tolerance overrides.
    pub tolerances: BTreeMap<String, f64>,
    /// Random frequencies for the normalisation check.
    pub normalization_samples: usize,
    /// Random points for the kernel checks.
    pub kernel_samples: usize,
    /// Random points for the size statistics.
    pub cz_samples: usize,
    /// Grid for the energy and Abel checks (`null`: the main grid).
    pub energy_grid: Option<GridSection>,
    /// Largest level of the energy check.
    pub energy_levels: usize,
    /// Radial nodes of the mean-value quadrature.
    pub mean_value_radial: usize,
    /// Angular resolution of the mean-value quadrature.
    pub mean_value_angular: usize,
}

impl Default for SuiteSection {
    fn default() -> Self {
        Self {
            checks: None,
            tolerances: BTreeMap::new(),
            normalization_samples: 1000,
            kernel_samples: 20,
            cz_samples: 12,
            energy_grid: None,
            energy_levels: 8,
            mean_value_radial: 200,
            mean_value_angular: 16,
        }
    }
}

fn default_threshold() -> f64 {
    DEFAULT_SIGMA_MIN_THRESHOLD
}

/// Complete run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Half the horizontal dimension.
    pub n: usize,
    /// Centre dimension.
    pub r: usize,
    /// The matrices `B¹, …, B^r`.
    #[serde(rename = "B")]
    pub b: Vec<MatrixSpec>,
    /// Non-degeneracy threshold on the smallest singular value.
    #[serde(default = "default_threshold")]
    pub sigma_min_threshold: f64,
    /// Kernel quadrature.
    #[serde(default)]
    pub kernel: KernelSection,
    /// Sampling grid.
    #[serde(default)]
    pub grid: GridSection,
    /// Suite selection and sizes.
    #[serde(default)]
    pub suite: SuiteSection,
    /// Seed of every random sample set.
    #[serde(default)]
    pub seed: u64,
    /// Worker threads (`null`: environment, then rayon default).
    #[serde(default)]
    pub workers: Option<usize>,
    /// Record wall-clock runtimes in reports (makes reports non-reproducible).
    #[serde(default)]
    pub record_timing: bool,
}

impl Config {
    /// Parses a JSON string.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads and parses a JSON file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Validated group.
    pub fn group(&self) -> Result<GroupDescriptor> {
        if self.b.len() != self.r {
            return Err(Error::Config(format!("{} matrices given for r = {}", self.b.len(), self.r)));
        }
        let mats = self.b.iter().map(|m| m.to_matrix(2 * self.n)).collect::<Result<Vec<_>>>()?;
        Ok(validate_group(self.n, self.r, &mats, self.sigma_min_threshold)?)
    }

    /// Main grid.
    pub fn main_grid(&self) -> Result<Grid> {
        self.grid.to_grid(self.n, self.r)
    }

    /// Worker count: explicit override, then config, then the environment,
    /// then `0` (rayon default).
    pub fn resolve_workers(&self, cli: Option<usize>) -> usize {
        cli.or(self.workers)
            .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse().ok()))
            .unwrap_or(0)
    }

    /// SHA-256 of the canonical JSON serialisation.
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serialises");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
