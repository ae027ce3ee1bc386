//! Visibility and strong completeness, read off Gromov products along
//! sequences approaching the boundary.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MetricSource;
use crate::bounds::format_vector;
use crate::domains::{boundary_point_on_ray, rng_from_seed, unit_sample, DomainGeometry};
use crate::error::{Error, Result};
use crate::point::{complement_basis, Point, C64};

/// Boundary test for the targets `p`, `q`.
const ON_BOUNDARY: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ApproachConfig {
    /// `δ_j = delta0 · ratio^j` for `j < steps`.
    pub steps: usize,
    pub delta0: f64,
    pub ratio: f64,
    /// Base point `o`; the domain's reference point when absent.
    pub origin: Option<Point>,
    pub source: MetricSource,
    /// Gromov brackets wider than this make a verdict inconclusive.
    pub max_width: f64,
    /// Tangential offset `w_j = z_j + split·δ_j·t` for the completeness
    /// probe; `0` gives radial sequences with `w_j = z_j`.
    pub split: f64,
}

impl Default for ApproachConfig {
    fn default() -> Self {
        ApproachConfig {
            steps: 12,
            delta0: 0.1,
            ratio: 0.5,
            origin: None,
            source: MetricSource::Oracle,
            max_width: 0.1,
            split: 0.0,
        }
    }
}

impl ApproachConfig {
    fn deltas(&self) -> Result<Vec<f64>> {
        if !(self.delta0 > 0.0 && self.ratio > 0.0 && self.ratio < 1.0 && self.steps >= 4) {
            return Err(Error::Input(format!(
                "approach needs delta0 > 0, 0 < ratio < 1 and at least 4 steps, got {}, {}, {}",
                self.delta0, self.ratio, self.steps
            )));
        }
        Ok((0..self.steps)
            .map(|j| self.delta0 * self.ratio.powi(j as i32))
            .collect())
    }

    fn origin_in(&self, d: &DomainGeometry) -> Point {
        self.origin.clone().unwrap_or_else(|| d.reference_point())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproachRecord {
    pub j: usize,
    pub delta: f64,
    pub gromov: f64,
    pub lower: f64,
    pub upper: f64,
    /// `(k(z_j, o) + k(w_j, o))/2`.
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum GromovVerdict {
    Bounded { sup: f64 },
    Divergent { slope: f64 },
    Inconclusive { width: f64 },
}

impl GromovVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            GromovVerdict::Bounded { .. } => "bounded",
            GromovVerdict::Divergent { .. } => "divergent",
            GromovVerdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairVisibility {
    pub p: Point,
    pub q: Point,
    pub records: Vec<ApproachRecord>,
    /// Slope of the Gromov product against `log(1/δ_j)` over the last half.
    pub slope: f64,
    /// Slope against the depth `k(o, ·)` over the same range.
    pub depth_slope: f64,
    pub verdict: GromovVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "overall", rename_all = "snake_case")]
pub enum Visibility {
    VisibleEvidence,
    /// Index of a pair with divergent products.
    NotVisible {
        witness: usize,
    },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibilityReport {
    pub pairs: Vec<PairVisibility>,
    pub overall: Visibility,
}

impl VisibilityReport {
    /// One row per pair and step: `p, q, j, delta, gromov, slope, verdict`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["p", "q", "j", "delta", "gromov", "slope", "verdict"])?;
        for pair in &self.pairs {
            for r in &pair.records {
                w.write_record([
                    format_vector(&pair.p.0),
                    format_vector(&pair.q.0),
                    r.j.to_string(),
                    r.delta.to_string(),
                    r.gromov.to_string(),
                    pair.slope.to_string(),
                    pair.verdict.name().to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return 0.0;
    }
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

fn check_boundary(d: &DomainGeometry, p: &Point) -> Result<()> {
    d.check_dim(&p.0)?;
    let rho = d.defining(&p.0);
    if !(rho.abs() <= ON_BOUNDARY) {
        return Err(Error::Input(format!(
            "{:?} is not on the boundary of {} (ρ = {rho:e})",
            p.0,
            d.name()
        )));
    }
    Ok(())
}

/// `p − δ·ν(p)`, the point at depth `δ` on the inward normal at `p ∈ ∂D`.
pub fn approach_point(d: &DomainGeometry, p: &Point, delta: f64) -> Result<Point> {
    check_boundary(d, p)?;
    let nu = d.outward_normal(&p.0);
    let z = p.offset(&nu, C64::new(-delta, 0.0));
    if !d.contains(&z)? {
        return Err(Error::Domain(format!(
            "inward normal at {:?} leaves {} at depth {delta}",
            p.0,
            d.name()
        )));
    }
    Ok(z)
}

fn record(
    d: &DomainGeometry,
    j: usize,
    delta: f64,
    z: &Point,
    w: &Point,
    o: &Point,
    source: &MetricSource,
) -> Result<ApproachRecord> {
    let (zo_lo, zo_up) = source.distance(d, z, o)?;
    let (wo_lo, wo_up) = source.distance(d, w, o)?;
    let (zw_lo, zw_up) = source.distance(d, z, w)?;
    Ok(ApproachRecord {
        j,
        delta,
        gromov: 0.5 * (zo_lo + zo_up + wo_lo + wo_up - zw_lo - zw_up),
        lower: zo_lo + wo_lo - zw_up,
        upper: zo_up + wo_up - zw_lo,
        depth: 0.25 * (zo_lo + zo_up + wo_lo + wo_up),
    })
}

/// Slopes of the Gromov product against `log(1/δ)` and against depth over
/// `records[from..]`.
fn tail_slopes(records: &[ApproachRecord], from: usize) -> (f64, f64) {
    let tail = &records[from..];
    let by_delta: Vec<(f64, f64)> = tail.iter().map(|r| (-r.delta.ln(), r.gromov)).collect();
    let by_depth: Vec<(f64, f64)> = tail.iter().map(|r| (r.depth, r.gromov)).collect();
    (least_squares_slope(&by_delta), least_squares_slope(&by_depth))
}

/// Slope above which a Gromov sequence counts as divergent.
const DIVERGENCE_SLOPE: f64 = 0.25;

/// Gromov products `(z_j|w_j)_o` along inward normals towards each pair
/// `p ≠ q` of boundary points. A pair whose products grow with slope above
/// 1/4 per `log(1/δ)` over the last half is divergent, which makes it a
/// not-visible witness; brackets wider than `max_width` make it
/// inconclusive.
pub fn visibility_classify(
    d: &DomainGeometry,
    pairs: &[(Point, Point)],
    cfg: &ApproachConfig,
) -> Result<VisibilityReport> {
    let deltas = cfg.deltas()?;
    let o = cfg.origin_in(d);
    for (p, q) in pairs {
        check_boundary(d, p)?;
        check_boundary(d, q)?;
        if p.dist(q) <= ON_BOUNDARY {
            return Err(Error::Input("visibility pairs need p ≠ q".into()));
        }
    }
    let results: Result<Vec<PairVisibility>> = pairs
        .par_iter()
        .map(|(p, q)| {
            let records = deltas
                .iter()
                .enumerate()
                .map(|(j, &delta)| {
                    let (z, w) = (approach_point(d, p, delta)?, approach_point(d, q, delta)?);
                    record(d, j, delta, &z, &w, &o, &cfg.source)
                })
                .collect::<Result<Vec<_>>>()?;
            let (slope, depth_slope) = tail_slopes(&records, records.len() / 2);
            let width = records.iter().map(|r| r.upper - r.lower).fold(0.0, f64::max);
            let verdict = if width > cfg.max_width {
                GromovVerdict::Inconclusive { width }
            } else if slope > DIVERGENCE_SLOPE {
                GromovVerdict::Divergent { slope }
            } else {
                GromovVerdict::Bounded {
                    sup: records.iter().map(|r| r.gromov).fold(f64::NEG_INFINITY, f64::max),
                }
            };
            Ok(PairVisibility {
                p: p.clone(),
                q: q.clone(),
                records,
                slope,
                depth_slope,
                verdict,
            })
        })
        .collect();
    let pairs = results?;
    let overall = match pairs
        .iter()
        .position(|p| matches!(p.verdict, GromovVerdict::Divergent { .. }))
    {
        Some(witness) => Visibility::NotVisible { witness },
        None if pairs
            .iter()
            .any(|p| matches!(p.verdict, GromovVerdict::Inconclusive { .. })) =>
        {
            Visibility::Inconclusive
        }
        None => Visibility::VisibleEvidence,
    };
    Ok(VisibilityReport { pairs, overall })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub p: Point,
    pub records: Vec<ApproachRecord>,
    /// Slope against `log(1/δ)` over the last half, and over its two halves.
    pub slope: f64,
    pub first_slope: f64,
    pub second_slope: f64,
    pub divergent: bool,
    pub inconclusive: bool,
}

/// Growth of `(z_j|w_j)_o` for `z_j, w_j → p`: divergent when the slope
/// against `log(1/δ)` over the last half is at least 1/2 and its two halves
/// agree within 20%.
pub fn strong_completeness_probe(d: &DomainGeometry, p: &Point, cfg: &ApproachConfig) -> Result<CompletenessReport> {
    let deltas = cfg.deltas()?;
    check_boundary(d, p)?;
    let o = cfg.origin_in(d);
    let nu = d.outward_normal(&p.0);
    let tangent = if d.dim() == 1 {
        vec![nu[0] * C64::new(0.0, 1.0)]
    } else {
        complement_basis(&nu).swap_remove(0)
    };
    let records = deltas
        .par_iter()
        .enumerate()
        .map(|(j, &delta)| {
            let z = approach_point(d, p, delta)?;
            let w = z.offset(&tangent, C64::new(cfg.split * delta, 0.0));
            if !d.contains(&w)? {
                return Err(Error::Domain(format!(
                    "split point at depth {delta} leaves {}",
                    d.name()
                )));
            }
            record(d, j, delta, &z, &w, &o, &cfg.source)
        })
        .collect::<Result<Vec<_>>>()?;
    let n = records.len();
    let half = n / 2;
    let quarter = half + (n - half) / 2;
    let slope = tail_slopes(&records, half).0;
    let first_slope = tail_slopes(&records[..=quarter], half).0;
    let second_slope = tail_slopes(&records, quarter).0;
    let inconclusive = records.iter().any(|r| r.upper - r.lower > cfg.max_width);
    let divergent = !inconclusive && slope >= 0.5 && (first_slope - second_slope).abs() <= 0.2 * slope;
    Ok(CompletenessReport {
        p: p.clone(),
        records,
        slope,
        first_slope,
        second_slope,
        divergent,
        inconclusive,
    })
}

/// Seeded pairs of boundary points, hit by rays from the reference point,
/// at Euclidean distance at least `min_separation`.
pub fn sample_boundary_pairs(
    d: &DomainGeometry,
    count: usize,
    min_separation: f64,
    seed: u64,
) -> Result<Vec<(Point, Point)>> {
    let mut rng = rng_from_seed(seed);
    let n = d.dim();
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        if tries > 1000 * count.max(1) {
            return Err(Error::Sampling(format!(
                "no boundary pairs at separation {min_separation}"
            )));
        }
        let Some(p) = boundary_point_on_ray(d, &unit_sample(&mut rng, n)) else {
            continue;
        };
        let Some(q) = boundary_point_on_ray(d, &unit_sample(&mut rng, n)) else {
            continue;
        };
        if p.dist(&q) >= min_separation {
            out.push((p, q));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polydisc_face_pairs_diverge() {
        let d = DomainGeometry::polydisc(&[1.0, 1.0]).unwrap();
        let cfg = ApproachConfig {
            origin: Some(Point::zeros(2)),
            ..ApproachConfig::default()
        };
        let pairs = vec![(Point::real(&[1.0, 0.2]), Point::real(&[1.0, -0.2]))];
        let r = visibility_classify(&d, &pairs, &cfg).unwrap();
        assert_eq!(r.overall, Visibility::NotVisible { witness: 0 });
        let last = r.pairs[0].records.last().unwrap();
        let expected = 2.0 * (1.0 - last.delta).atanh() - (0.4f64 / 1.04).atanh();
        assert!((last.gromov - expected).abs() < 1e-9);
        assert!(r.pairs[0].depth_slope >= 1.8);
    }

    #[test]
    fn opposite_disc_points_are_bounded() {
        let d = DomainGeometry::unit_disc();
        let cfg = ApproachConfig {
            origin: Some(Point::real(&[0.0])),
            ..ApproachConfig::default()
        };
        let r = visibility_classify(&d, &[(Point::real(&[1.0]), Point::real(&[-1.0]))], &cfg).unwrap();
        assert_eq!(r.overall, Visibility::VisibleEvidence);
        assert!(r.pairs[0].records.iter().all(|x| x.gromov.abs() < 1e-9));
        let csv = r.to_csv_string().unwrap();
        assert_eq!(csv.lines().count(), 1 + cfg.steps);
        assert!(visibility_classify(&d, &[(Point::real(&[0.5]), Point::real(&[-1.0]))], &cfg).is_err());
    }

    #[test]
    fn radial_disc_sequences_diverge_at_rate_one() {
        let d = DomainGeometry::unit_disc();
        let cfg = ApproachConfig {
            steps: 20,
            delta0: 0.5,
            origin: Some(Point::real(&[0.0])),
            ..ApproachConfig::default()
        };
        let r = strong_completeness_probe(&d, &Point::real(&[1.0]), &cfg).unwrap();
        assert!(r.divergent && (r.slope - 1.0).abs() < 0.2, "{}", r.slope);
        let poly = DomainGeometry::polydisc(&[1.0, 1.0]).unwrap();
        let cfg = ApproachConfig {
            split: 1.0,
            origin: Some(Point::zeros(2)),
            ..cfg
        };
        let r = strong_completeness_probe(&poly, &Point::real(&[1.0, 0.0]), &cfg).unwrap();
        assert!(r.divergent, "{r:?}");
    }

    #[test]
    fn boundary_pairs_are_on_the_boundary() {
        let d = DomainGeometry::unit_ball(2);
        let pairs = sample_boundary_pairs(&d, 5, 1.4, 3).unwrap();
        for (p, q) in &pairs {
            assert!(d.defining(&p.0).abs() < 1e-9 && p.dist(q) >= 1.4);
        }
    }
}
