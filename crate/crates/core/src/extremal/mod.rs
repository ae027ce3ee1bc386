//! Numerical solution of the extremal problems behind the invariant
//! functions: discs for the Lempert function and Kobayashi metric,
//! bounded functionals for the Carathéodory side, and path integrals for
//! the Kobayashi distance.
//!
//! Every reported number is one-sided. Upper bounds come from discs whose
//! containment has been certified; lower bounds come from functionals whose
//! sup-norm has been certified.

mod caratheodory;
mod disc;
mod functional;
mod kobayashi;
mod lempert;

use serde::{Deserialize, Serialize};

use crate::closed_forms::HyperbolicValue;
use crate::domains::DomainGeometry;
use crate::error::{Error, Result};
use crate::point::Point;

pub use caratheodory::{caratheodory_lower, caratheodory_metric_lower};
pub use disc::{AnalyticDiscParam, DiscChart};
pub use functional::ScalarFunctionalParam;
pub(crate) use kobayashi::shortest_path;
pub use kobayashi::{kobayashi_distance_upper, kobayashi_distance_upper_with_disc, PathEstimate, PathMethod};
pub use lempert::{kobayashi_metric_upper, lempert_upper};

/// Solver settings. Serializes as a flat JSON object; missing fields take
/// their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Polynomial degree of trial discs.
    pub degree: usize,
    /// Boundary circle samples used by the containment penalty.
    pub boundary_samples: usize,
    pub restarts: usize,
    /// Reported solver tolerance; also the slack used in chain checks.
    pub tol: f64,
    pub seed: u64,
    /// Points closer than this to the boundary are refused.
    pub min_delta: f64,
    /// Laurent degree on each side for annulus functionals.
    pub laurent_degree: usize,
    /// Interior nodes of discretized paths; refined up to 16 times when the
    /// quadrature error estimate exceeds `tol`.
    pub path_nodes: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            degree: 8,
            boundary_samples: 128,
            restarts: 8,
            tol: 1e-3,
            seed: 0,
            min_delta: 1e-4,
            laurent_degree: 12,
            path_nodes: 64,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.degree == 0 || self.boundary_samples < 8 || self.restarts == 0 || self.path_nodes < 2 {
            return Err(Error::Input(
                "solver needs degree >= 1, boundary_samples >= 8, restarts >= 1, path_nodes >= 2".into(),
            ));
        }
        if !(self.tol > 0.0 && self.min_delta >= 0.0) {
            return Err(Error::Input(
                "solver tol must be positive and min_delta nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Which side of the true value a reported number lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSide {
    Upper,
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketMeta {
    pub lower_family: String,
    pub disc_degree: usize,
    pub disc_margin: f64,
    pub tol: f64,
}

/// Carathéodory-side lower bound and Lempert-side upper bound for one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lower: HyperbolicValue,
    pub upper: HyperbolicValue,
    pub meta: BracketMeta,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.upper.value() - self.lower.value()
    }

    /// `lower ≤ upper + tol`.
    pub fn is_consistent(&self) -> bool {
        self.lower.value() <= self.upper.value() + self.meta.tol
    }
}

/// `c_D(z,w) ≤ l_D(z,w)` bracket from the two solvers.
pub fn sandwich(d: &DomainGeometry, z: &Point, w: &Point, cfg: &SolverConfig) -> Result<Bracket> {
    let (lower, functional) = caratheodory_lower(d, z, w, cfg)?;
    let (upper, disc) = lempert_upper(d, z, w, cfg)?;
    Ok(Bracket {
        lower,
        upper,
        meta: BracketMeta {
            lower_family: functional.family_name().to_string(),
            disc_degree: disc.degree(),
            disc_margin: disc.margin,
            tol: cfg.tol,
        },
    })
}

/// Shared preconditions: dimensions, membership, boundary distance floor.
pub(crate) fn check_points(d: &DomainGeometry, pts: &[&Point], cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    for p in pts {
        d.check_dim(&p.0)?;
        if !d.contains(p)? {
            return Err(Error::Domain(format!("{:?} is not in {}", p.0, d.name())));
        }
        let delta = d.delta(&p.0);
        if delta < cfg.min_delta {
            return Err(Error::Input(format!(
                "point at boundary distance {delta:.3e} is below min_delta {:.1e}",
                cfg.min_delta
            )));
        }
    }
    Ok(())
}
