//! Maximal complex affine discs and the m-convexity probe.

use serde::Serialize;

use super::sampling::{rng_from_seed, shell_point};
use super::{DomainGeometry, DomainKind};
use crate::error::{Error, Result};
use crate::optim::nelder_mead;
use crate::point::{Point, C64};

/// Radius of the largest complex affine disc centered at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineDiscRadius {
    /// Exact value, or a lower bound found by the direction search.
    pub value: f64,
    pub exact: bool,
    /// Angular spacing of the direction grid (zero when exact).
    pub grid_gap: f64,
}

const CIRCLE_SAMPLES: usize = 64;
const GRID_PER_PAIR: usize = 16;

pub fn affine_disc_radius(d: &DomainGeometry, z: &Point) -> Result<AffineDiscRadius> {
    let delta = d.boundary_distance(z)?;
    let exact = |value| {
        Ok(AffineDiscRadius {
            value,
            exact: true,
            grid_gap: 0.0,
        })
    };
    if d.dim() == 1 {
        return exact(delta);
    }
    match d.kind() {
        DomainKind::Ball { center, radius } => {
            let s = z.dist(center);
            exact(((radius - s) * (radius + s)).sqrt())
        }
        DomainKind::Polydisc { radii } => exact(
            z.0.iter()
                .zip(radii)
                .map(|(c, r)| (r - c.norm()).powi(2))
                .sum::<f64>()
                .sqrt(),
        ),
        DomainKind::HalfPlane { .. } => exact(f64::INFINITY),
        _ => Ok(search_radius(d, z, delta)),
    }
}

/// Largest rho with the circle `z + rho e^{it} v` inside the (convex) domain.
///
/// The sampled polygon circumscribes the circle of radius `rho·cos(π/M)`, so
/// that radius is returned as a certified value.
fn radius_along(d: &DomainGeometry, z: &Point, v: &[C64], lo: f64, hi: f64) -> f64 {
    let fits = |rho: f64| {
        (0..CIRCLE_SAMPLES).all(|k| {
            let t = C64::from_polar(rho, std::f64::consts::TAU * k as f64 / CIRCLE_SAMPLES as f64);
            let x: Vec<C64> = z.0.iter().zip(v).map(|(a, b)| a + t * b).collect();
            d.is_inside(&x)
        })
    };
    let (mut lo, mut hi) = (lo, hi);
    if !fits(lo) {
        return 0.0;
    }
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo * (std::f64::consts::PI / CIRCLE_SAMPLES as f64).cos()
}

fn pair_direction(n: usize, i: usize, j: usize, a: f64, b: f64) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[i] = C64::new(a.cos(), 0.0);
    v[j] = C64::from_polar(a.sin(), b);
    v
}

fn search_radius(d: &DomainGeometry, z: &Point, delta: f64) -> AffineDiscRadius {
    let n = d.dim();
    let lo = delta * 0.5;
    let hi = 4.0 * d.bounding_ball().1 + 1.0;
    let step_a = std::f64::consts::FRAC_PI_2 / GRID_PER_PAIR as f64;
    let step_b = std::f64::consts::TAU / GRID_PER_PAIR as f64;
    let mut best = (delta, (0usize, 1usize, 0.0f64, 0.0f64));
    for i in 0..n {
        for j in (i + 1)..n {
            for ka in 0..=GRID_PER_PAIR {
                for kb in 0..GRID_PER_PAIR {
                    let (a, b) = (ka as f64 * step_a, kb as f64 * step_b);
                    let v = pair_direction(n, i, j, a, b);
                    let r = radius_along(d, z, &v, lo, hi);
                    if r > best.0 {
                        best = (r, (i, j, a, b));
                    }
                }
            }
        }
    }
    let (i, j, a0, b0) = best.1;
    let refined = nelder_mead(
        |x| -radius_along(d, z, &pair_direction(n, i, j, x[0], x[1]), lo, hi),
        &[a0, b0],
        step_a * 0.5,
        200,
        1e-6,
    );
    AffineDiscRadius {
        value: best.0.max(-refined.value).max(delta),
        exact: false,
        grid_gap: step_b,
    }
}

/// Outcome of sampling `δ̂ / δ^{1/m}` on dyadic boundary shells.
#[derive(Debug, Clone, Serialize)]
pub struct MConvexityReport {
    pub m: f64,
    pub max_ratio: f64,
    pub worst_point: Point,
    /// `(shell delta, max ratio on the shell)`, outermost first.
    pub shells: Vec<(f64, f64)>,
    /// Innermost-shell ratio stays within twice the middle-shell ratio.
    pub bounded: bool,
}

pub fn m_convexity_probe(d: &DomainGeometry, m: f64, samples: usize, seed: u64) -> Result<MConvexityReport> {
    if !d.is_convex() {
        return Err(Error::Unsupported(format!("{} is not convex", d.name())));
    }
    if !(m > 0.0) || samples == 0 {
        return Err(Error::Input("need m > 0 and at least one sample".into()));
    }
    let mut rng = rng_from_seed(seed);
    let levels: Vec<f64> = (2..=13).map(|k| 2f64.powi(-k)).collect();
    let per_shell = (samples / levels.len()).max(1);
    let mut shells = Vec::with_capacity(levels.len());
    let mut worst = (f64::NEG_INFINITY, Point::zeros(d.dim()));
    for &delta in &levels {
        let mut shell_max = f64::NEG_INFINITY;
        for _ in 0..per_shell {
            let z = shell_point(d, None, delta, &mut rng)?;
            let dd = d.boundary_distance(&z)?;
            let ratio = affine_disc_radius(d, &z)?.value / dd.powf(1.0 / m);
            if ratio > shell_max {
                shell_max = ratio;
            }
            if ratio > worst.0 {
                worst = (ratio, z);
            }
        }
        shells.push((delta, shell_max));
    }
    let mid = shells[shells.len() / 2].1;
    let last = shells.last().unwrap().1;
    Ok(MConvexityReport {
        m,
        max_ratio: worst.0,
        worst_point: worst.1,
        bounded: last.is_finite() && last <= 2.0 * mid,
        shells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_examples() {
        let ball = DomainGeometry::unit_ball(2);
        assert_eq!(affine_disc_radius(&ball, &Point::zeros(2)).unwrap().value, 1.0);
        let disc = DomainGeometry::unit_disc();
        assert_eq!(affine_disc_radius(&disc, &Point::real(&[0.5])).unwrap().value, 0.5);
        let poly = DomainGeometry::polydisc(&[1.0, 1.0]).unwrap();
        let r = affine_disc_radius(&poly, &Point::real(&[0.9, 0.0])).unwrap();
        // the vertical disc (0.9, ζ) already has radius 1; tilting does slightly better
        assert!(r.value >= 1.0);
        assert!((r.value - 1.01f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn polydisc_exact_value_matches_direction_search() {
        // independent route: brute-force the disc search on the same point
        let poly = DomainGeometry::polydisc(&[1.0, 1.0]).unwrap();
        let z = Point::real(&[0.9, 0.3]);
        let exact = affine_disc_radius(&poly, &z).unwrap().value;
        let searched = search_radius(&poly, &z, poly.delta(&z.0)).value;
        assert!(searched <= exact + 1e-9);
        assert!(exact - searched < 5e-3, "{exact} vs {searched}");
    }

    #[test]
    fn ellipsoid_radius_at_least_delta() {
        let e = DomainGeometry::ellipsoid(&[1.0, 2.0]).unwrap();
        let z = Point::real(&[0.0, 0.9]);
        let r = affine_disc_radius(&e, &z).unwrap();
        assert!(!r.exact);
        assert!(r.value >= e.delta(&z.0) - 1e-9);
        // horizontal disc (ζ, 0.9) fits up to |ζ|^2 < 1 - 0.9^4
        let certified = (std::f64::consts::PI / CIRCLE_SAMPLES as f64).cos();
        assert!(r.value >= (1.0 - 0.9f64.powi(4)).sqrt() * certified - 1e-6);
        assert!(r.value <= (1.0 - 0.9f64.powi(4)).sqrt() + 1e-6);
    }

    #[test]
    fn m_convexity_examples() {
        let ball = DomainGeometry::unit_ball(2);
        let rep = m_convexity_probe(&ball, 2.0, 48, 1).unwrap();
        assert!(rep.bounded && rep.max_ratio <= 2.0);
        let poly = DomainGeometry::polydisc(&[1.0, 1.0]).unwrap();
        let rep = m_convexity_probe(&poly, 2.0, 48, 1).unwrap();
        assert!(!rep.bounded && rep.max_ratio > 20.0);
        let hp = DomainGeometry::half_plane(vec![C64::new(1.0, 0.0)], 0.0).unwrap();
        let rep = m_convexity_probe(&hp, 2.0, 24, 1).unwrap();
        assert!(rep.bounded);
        assert!(rep.shells.last().unwrap().1 < 0.02);
        assert!(matches!(
            m_convexity_probe(&DomainGeometry::annulus(0.3).unwrap(), 2.0, 10, 1),
            Err(Error::Unsupported(_))
        ));
    }
}
