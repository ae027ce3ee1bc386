//! Gromov products, complex and real geodesics, and the visibility and
//! strong-completeness probes built on them.

mod complex;
mod visibility;

use serde::{Deserialize, Serialize};

use crate::closed_forms::model_distance;
use crate::domains::DomainGeometry;
use crate::error::{Error, Result};
use crate::extremal::{sandwich, SolverConfig};
use crate::point::Point;

pub use complex::{
    boundary_extension_check, complex_geodesic, equicontinuity_modulus, exact_geodesic, normalize_star, real_geodesic,
    BoundaryExtension, ComplexGeodesicDisc, EquicontinuityGrid, EquicontinuityReport, GeodesicConfig, GeodesicOrigin,
    PathRoute, RealGeodesicPath,
};
pub use visibility::{
    approach_point, sample_boundary_pairs, strong_completeness_probe, visibility_classify, ApproachConfig,
    ApproachRecord, CompletenessReport, GromovVerdict, PairVisibility, Visibility, VisibilityReport,
};

/// Where distances come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricSource {
    /// Closed-form model distance.
    Oracle,
    /// `[c_lower, l_upper]` brackets from the extremal solvers.
    Bracket { cfg: SolverConfig },
}

impl MetricSource {
    pub fn name(&self) -> &'static str {
        match self {
            MetricSource::Oracle => "oracle",
            MetricSource::Bracket { .. } => "bracket",
        }
    }

    /// Lower and upper bound for `k_D(z, w)`.
    pub fn distance(&self, d: &DomainGeometry, z: &Point, w: &Point) -> Result<(f64, f64)> {
        match self {
            MetricSource::Oracle => {
                if !d.has_closed_form() {
                    return Err(Error::Capability(format!("no closed-form metric on {}", d.name())));
                }
                let v = model_distance(d, z, w)?.value();
                Ok((v, v))
            }
            MetricSource::Bracket { cfg } => {
                if z == w {
                    return Ok((0.0, 0.0));
                }
                let b = sandwich(d, z, w, cfg)?;
                Ok((b.lower.value(), b.upper.value()))
            }
        }
    }
}

/// `(z|w)_o = k(z,o) + k(w,o) − k(z,w)` in the `tanh⁻¹` scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GromovRecord {
    pub z: Point,
    pub w: Point,
    pub o: Point,
    /// From midpoints of the distance brackets (exact for the oracle).
    pub value: f64,
    /// Certified bounds: `lower + lower − upper` and the reverse.
    pub lower: f64,
    pub upper: f64,
    pub source: String,
}

impl GromovRecord {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

pub fn gromov_product(
    d: &DomainGeometry,
    z: &Point,
    w: &Point,
    o: &Point,
    source: &MetricSource,
) -> Result<GromovRecord> {
    let (zo_lo, zo_up) = source.distance(d, z, o)?;
    let (wo_lo, wo_up) = source.distance(d, w, o)?;
    let (zw_lo, zw_up) = source.distance(d, z, w)?;
    let mid = |a: f64, b: f64| 0.5 * (a + b);
    Ok(GromovRecord {
        z: z.clone(),
        w: w.clone(),
        o: o.clone(),
        value: mid(zo_lo, zo_up) + mid(wo_lo, wo_up) - mid(zw_lo, zw_up),
        lower: zo_lo + wo_lo - zw_up,
        upper: zo_up + wo_up - zw_lo,
        source: source.name().to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_examples() {
        let d = DomainGeometry::unit_disc();
        let o = Point::real(&[0.0]);
        let r = gromov_product(&d, &o, &o, &o, &MetricSource::Oracle).unwrap();
        assert_eq!(r.value, 0.0);
        let (z, w) = (Point::real(&[0.9]), Point::real(&[-0.9]));
        let r = gromov_product(&d, &z, &w, &o, &MetricSource::Oracle).unwrap();
        // −0.9, 0, 0.9 lie on one geodesic, so the product vanishes
        let expected = 2.0 * 0.9f64.atanh() - (1.8f64 / 1.81).atanh();
        assert!((r.value - expected).abs() < 1e-12 && r.value.abs() < 1e-12);
        let r = gromov_product(&d, &z, &z, &o, &MetricSource::Oracle).unwrap();
        assert!((r.value - 2.944439).abs() < 1e-6);
    }

    #[test]
    fn brackets_contain_the_oracle() {
        let d = DomainGeometry::unit_ball(2);
        let (z, w, o) = (Point::real(&[0.5, 0.1]), Point::real(&[-0.2, 0.6]), Point::zeros(2));
        let exact = gromov_product(&d, &z, &w, &o, &MetricSource::Oracle).unwrap().value;
        let r = gromov_product(
            &d,
            &z,
            &w,
            &o,
            &MetricSource::Bracket {
                cfg: SolverConfig::default(),
            },
        )
        .unwrap();
        assert!(r.lower <= exact + 1e-12 && exact <= r.upper + 1e-12);
        assert!(r.value >= -r.width());
        let cut = DomainGeometry::intersection(
            &d,
            crate::domains::BallWindow {
                center: o.clone(),
                radius: 0.9,
            },
        )
        .unwrap();
        assert!(matches!(
            gromov_product(&cut, &z, &w, &o, &MetricSource::Oracle),
            Err(Error::Capability(_))
        ));
    }
}
