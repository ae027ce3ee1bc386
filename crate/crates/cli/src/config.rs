//! Experiment configuration files.

use std::path::{Path, PathBuf};

use holodist::extremal::SolverConfig;
use holodist::geodesics::{ApproachConfig, GeodesicConfig};
use holodist::{DomainGeometry, Point};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Metric,
    Sandwich,
    Theorem1,
    Localize,
    Classical,
    Visibility,
    Completeness,
    Geodesic,
    Mconvex,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Metric => "metric",
            Task::Sandwich => "sandwich",
            Task::Theorem1 => "theorem1",
            Task::Localize => "localize",
            Task::Classical => "classical",
            Task::Visibility => "visibility",
            Task::Completeness => "completeness",
            Task::Geodesic => "geodesic",
            Task::Mconvex => "mconvex",
        }
    }
}

/// Interior sampling: `pairs` pairs and `tangents` tangent vectors with
/// boundary distance in `[delta_min, delta_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Samples {
    pub pairs: usize,
    pub tangents: usize,
    pub delta_min: f64,
    pub delta_max: f64,
}

impl Default for Samples {
    fn default() -> Self {
        Samples {
            pairs: 100,
            tangents: 0,
            delta_min: 0.02,
            delta_max: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub dir: PathBuf,
    /// File stem; the task name when absent.
    pub name: Option<String>,
}

impl Default for Output {
    fn default() -> Self {
        Output {
            dir: PathBuf::from("."),
            name: None,
        }
    }
}

/// Thresholds behind exit codes 2 and 3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    /// Largest accepted half-sample stability ratio.
    pub stability: f64,
    /// Largest accepted fraction of failed rows.
    pub failure_fraction: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            stability: 1.5,
            failure_fraction: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalizeParams {
    pub p: Point,
    pub outer_radius: f64,
    pub inner_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MconvexParams {
    pub m: f64,
    #[serde(default = "default_mconvex_samples")]
    pub samples: usize,
}

fn default_mconvex_samples() -> usize {
    1200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: DomainGeometry,
    pub task: Option<Task>,
    /// Required here or on the command line.
    pub seed: Option<u64>,
    #[serde(default)]
    pub samples: Samples,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: Output,
    #[serde(default)]
    pub limits: Limits,
    /// Explicit interior pairs; replace sampling for metric, sandwich and
    /// geodesic.
    pub points: Option<Vec<(Point, Point)>>,
    /// Boundary pairs for visibility; sampled when absent.
    pub boundary_pairs: Option<Vec<(Point, Point)>>,
    /// Least separation of sampled boundary pairs.
    #[serde(default = "default_separation")]
    pub min_separation: f64,
    /// Boundary points for completeness.
    pub boundary_points: Option<Vec<Point>>,
    #[serde(default)]
    pub approach: ApproachConfig,
    #[serde(default)]
    pub geodesic: GeodesicConfig,
    pub localize: Option<LocalizeParams>,
    pub mconvex: Option<MconvexParams>,
}

fn default_separation() -> f64 {
    0.5
}

/// A config with overrides applied and task-required fields checked.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub cfg: ExperimentConfig,
    pub task: Task,
    pub seed: u64,
}

impl Resolved {
    pub fn stem(&self) -> String {
        self.cfg
            .output
            .name
            .clone()
            .unwrap_or_else(|| self.task.name().to_string())
    }
}

pub fn load(path: &Path) -> Result<ExperimentConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
}

pub fn resolve(
    mut cfg: ExperimentConfig,
    task: Option<Task>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<Resolved, String> {
    let task = task
        .or(cfg.task)
        .ok_or("config names no task and --task was not given")?;
    let seed = seed
        .or(cfg.seed)
        .ok_or("a seed is required, in the config or via --seed")?;
    if let Some(dir) = out {
        cfg.output.dir = dir;
    }
    cfg.task = Some(task);
    cfg.seed = Some(seed);
    cfg.solver.seed = seed;
    cfg.geodesic.solver.seed = seed;
    cfg.solver.validate().map_err(|e| e.to_string())?;
    if let Some(name) = &cfg.output.name {
        if name.is_empty() || name.contains(['/', '\\']) {
            return Err(format!("output name {name:?} must be a plain file stem"));
        }
    }
    let s = &cfg.samples;
    if !(s.delta_min > 0.0 && s.delta_min < s.delta_max) {
        return Err(format!(
            "samples need 0 < delta_min < delta_max, got {} and {}",
            s.delta_min, s.delta_max
        ));
    }
    if !(cfg.limits.stability >= 1.0 && (0.0..=1.0).contains(&cfg.limits.failure_fraction)) {
        return Err("limits need stability >= 1 and failure_fraction in [0, 1]".into());
    }
    let missing = |field: &str| Err(format!("task {} needs `{field}`", task.name()));
    match task {
        Task::Localize if cfg.localize.is_none() => return missing("localize"),
        Task::Completeness if cfg.boundary_points.as_ref().is_none_or(|v| v.is_empty()) => {
            return missing("boundary_points")
        }
        Task::Mconvex if cfg.mconvex.is_none() => return missing("mconvex"),
        Task::Visibility if cfg.boundary_pairs.is_none() && s.pairs == 0 => {
            return missing("boundary_pairs or samples.pairs")
        }
        _ => {}
    }
    if let Some(points) = &cfg.points {
        for (z, w) in points {
            for p in [z, w] {
                let delta = cfg.domain.boundary_distance(p).map_err(|e| e.to_string())?;
                if delta <= cfg.solver.min_delta {
                    return Err(format!("point {:?} is within min_delta of the boundary", p.0));
                }
            }
        }
    }
    Ok(Resolved { cfg, task, seed })
}
