//! Upper bounds for the Kobayashi distance as the integrated metric.

use serde::{Deserialize, Serialize};

use super::disc::AnalyticDiscParam;
use super::{check_points, lempert_upper, SolverConfig};
use crate::closed_forms::{mobius, model_metric, HyperbolicValue};
use crate::domains::{DomainGeometry, DomainKind};
use crate::error::{Error, Result};
use crate::point::{Point, Tangent, C64};

/// How the path was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMethod {
    /// Image under the extremal disc of the hyperbolic geodesic joining the
    /// preimages.
    DiscTrace,
    /// Straight segment.
    Segment,
    /// Segment in logarithmic coordinates (annulus).
    LogSegment,
    /// No closed-form metric: the Lempert upper bound, valid since `k ≤ l`.
    LempertBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEstimate {
    pub value: HyperbolicValue,
    /// `|I_P − I_{P/2}|/3`, the Richardson estimate of the trapezoid error.
    pub error_estimate: f64,
    pub nodes: usize,
    pub method: PathMethod,
}

/// Trapezoid sum of `κ` over the polygon through `nodes`.
fn polygon_length(d: &DomainGeometry, nodes: &[Point]) -> Option<f64> {
    let mut total = 0.0;
    for pair in nodes.windows(2) {
        let step = pair[1].sub(&pair[0]);
        let k0 = model_metric(
            d,
            &Tangent {
                base: pair[0].clone(),
                direction: step.clone(),
            },
        )
        .ok()?;
        let k1 = model_metric(
            d,
            &Tangent {
                base: pair[1].clone(),
                direction: step,
            },
        )
        .ok()?;
        total += 0.5 * (k0 + k1);
    }
    Some(total)
}

/// Local cost of node `j` (its two adjacent segments).
fn local_cost(d: &DomainGeometry, nodes: &[Point], j: usize) -> f64 {
    polygon_length(d, &nodes[j - 1..=j + 1]).unwrap_or(f64::INFINITY)
}

/// Coordinate-wise node moves that shorten the polygon.
fn relax(d: &DomainGeometry, nodes: &mut [Point], passes: usize) {
    let n = nodes[0].dim();
    let units: Vec<C64> = vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
    for _ in 0..passes {
        for j in 1..nodes.len() - 1 {
            let spacing = nodes[j + 1].dist(&nodes[j - 1]) * 0.05;
            let mut best = local_cost(d, nodes, j);
            for i in 0..n {
                for u in &units {
                    for sign in [1.0, -1.0] {
                        let mut e = vec![C64::new(0.0, 0.0); n];
                        e[i] = u * sign;
                        let trial = nodes[j].offset(&e, C64::new(spacing, 0.0));
                        if !d.is_inside(&trial.0) {
                            continue;
                        }
                        let old = std::mem::replace(&mut nodes[j], trial);
                        let c = local_cost(d, nodes, j);
                        if c < best {
                            best = c;
                        } else {
                            nodes[j] = old;
                        }
                    }
                }
            }
        }
    }
}

fn disc_trace(disc: &AnalyticDiscParam, count: usize) -> Option<Vec<Point>> {
    let a = disc.base_preimage;
    let b = disc.target_preimage?;
    let beta = mobius(a, b);
    let len = beta.norm().atanh();
    let phase = if beta.norm() > 0.0 {
        beta / beta.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    Some(
        (0..=count)
            .map(|j| {
                let u = phase * (len * j as f64 / count as f64).tanh();
                // inverse of ζ ↦ (ζ − a)/(1 − āζ)
                disc.eval((u + a) / (C64::new(1.0, 0.0) + a.conj() * u))
            })
            .collect(),
    )
}

fn segment(z: &Point, w: &Point, count: usize) -> Vec<Point> {
    (0..=count).map(|j| z.lerp(w, j as f64 / count as f64)).collect()
}

fn log_segment(r: f64, z: C64, w: C64, count: usize) -> Vec<Point> {
    let (sz, mut sw) = (z.ln(), w.ln());
    let turn = (sz.im - sw.im) / std::f64::consts::TAU;
    sw += C64::new(0.0, std::f64::consts::TAU * turn.round());
    let _ = r;
    (0..=count)
        .map(|j| {
            let t = j as f64 / count as f64;
            Point::scalar((sz * (1.0 - t) + sw * t).exp())
        })
        .collect()
}

fn estimate(d: &DomainGeometry, mut nodes: Vec<Point>, method: PathMethod) -> Option<(PathEstimate, Vec<Point>)> {
    if !nodes.iter().all(|p| d.is_inside(&p.0)) {
        return None;
    }
    relax(d, &mut nodes, 2);
    let full = polygon_length(d, &nodes)?;
    let half: Vec<Point> = nodes.iter().step_by(2).cloned().collect();
    let half = if (nodes.len() - 1) % 2 == 0 { half } else { return None };
    let coarse = polygon_length(d, &half)?;
    let est = PathEstimate {
        value: HyperbolicValue::new(full).ok()?,
        error_estimate: (full - coarse).abs() / 3.0,
        nodes: nodes.len(),
        method,
    };
    Some((est, nodes))
}

/// Shortest relaxed polygon among the candidate paths, with its nodes.
/// Needs a closed-form metric.
pub(crate) fn shortest_path(
    d: &DomainGeometry,
    z: &Point,
    w: &Point,
    cfg: &SolverConfig,
    disc: Option<&AnalyticDiscParam>,
) -> Result<(PathEstimate, Vec<Point>)> {
    let owned;
    let disc = match disc {
        Some(disc) => Some(disc),
        None => {
            owned = lempert_upper(d, z, w, cfg).ok().map(|x| x.1);
            owned.as_ref()
        }
    };
    // far pairs near the boundary need finer polygons; double the node
    // count until the error estimate is within tolerance
    let base = 2 * cfg.path_nodes.div_ceil(2);
    let mut count = base;
    loop {
        let mut candidates = Vec::new();
        if let Some(nodes) = disc.and_then(|disc| disc_trace(disc, count)) {
            candidates.extend(estimate(d, nodes, PathMethod::DiscTrace));
        }
        match d.kind() {
            DomainKind::Annulus { inner_radius } => {
                candidates.extend(estimate(
                    d,
                    log_segment(*inner_radius, z.0[0], w.0[0], count),
                    PathMethod::LogSegment,
                ));
            }
            _ => candidates.extend(estimate(d, segment(z, w, count), PathMethod::Segment)),
        }
        let best = candidates
            .into_iter()
            .min_by(|a, b| a.0.value.partial_cmp(&b.0.value).unwrap())
            .ok_or_else(|| Error::Topology(format!("no interior path found in {}", d.name())))?;
        if best.0.error_estimate <= cfg.tol || count >= MAX_REFINEMENT * base {
            return Ok(best);
        }
        count *= 2;
    }
}

/// Node counts go up to this multiple of `path_nodes`.
const MAX_REFINEMENT: usize = 16;

/// Upper bound for `k_D(z, w)` by integrating `κ_D` along a discretized
/// path, refined by node moves; see [`PathEstimate`] for the error
/// estimate. Reuses `disc` as the initial path when given.
pub fn kobayashi_distance_upper_with_disc(
    d: &DomainGeometry,
    z: &Point,
    w: &Point,
    cfg: &SolverConfig,
    disc: Option<&AnalyticDiscParam>,
) -> Result<PathEstimate> {
    check_points(d, &[z, w], cfg)?;
    if z == w {
        return Ok(PathEstimate {
            value: HyperbolicValue::ZERO,
            error_estimate: 0.0,
            nodes: 1,
            method: PathMethod::Segment,
        });
    }
    if !d.has_closed_form() {
        let upper = match disc {
            Some(disc) if disc.target_preimage.is_some() => {
                crate::closed_forms::disc_distance(disc.base_preimage, disc.target_preimage.unwrap())
            }
            _ => lempert_upper(d, z, w, cfg)?.0.value(),
        };
        return Ok(PathEstimate {
            value: HyperbolicValue::new(upper)?,
            error_estimate: 0.0,
            nodes: 0,
            method: PathMethod::LempertBound,
        });
    }
    Ok(shortest_path(d, z, w, cfg, disc)?.0)
}

/// [`kobayashi_distance_upper_with_disc`] without a precomputed disc.
pub fn kobayashi_distance_upper(d: &DomainGeometry, z: &Point, w: &Point, cfg: &SolverConfig) -> Result<PathEstimate> {
    kobayashi_distance_upper_with_disc(d, z, w, cfg, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::model_distance;

    #[test]
    fn examples() {
        let cfg = SolverConfig::default();
        let disc = DomainGeometry::unit_disc();
        let e = kobayashi_distance_upper(&disc, &Point::real(&[0.0]), &Point::real(&[0.5]), &cfg).unwrap();
        assert!((e.value.value() - 0.549306).abs() < 5e-3);
        assert!(e.error_estimate < 1e-3);
        let z = Point::real(&[0.3]);
        assert_eq!(
            kobayashi_distance_upper(&disc, &z, &z, &cfg).unwrap().value.value(),
            0.0
        );
        let ann = DomainGeometry::annulus(0.3).unwrap();
        let (z, w) = (Point::real(&[-0.6]), Point::real(&[0.6]));
        let e = kobayashi_distance_upper(&ann, &z, &w, &cfg).unwrap();
        let oracle = model_distance(&ann, &z, &w).unwrap().value();
        assert!((e.value.value() - oracle).abs() < 1e-2, "{:?} vs {oracle}", e);
    }
}
