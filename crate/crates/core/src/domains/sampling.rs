//! Seeded point samplers and the intersection connectivity check.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{DomainGeometry, DomainKind, BOUNDARY_EXCLUSION};
use crate::error::{Error, Result};
use crate::point::{hdot, norm, Point, Tangent, C64};

pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const MAX_TRIES: usize = 20_000;

/// Uniform sample of the Euclidean ball of radius `r` in `C^n`.
pub(crate) fn ball_sample(rng: &mut Rng, n: usize, r: f64) -> Vec<C64> {
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let len = norm(&v);
    let u: f64 = rng.gen::<f64>();
    let s = r * u.powf(1.0 / (2 * n) as f64) / len;
    for c in v.iter_mut() {
        *c *= s;
    }
    v
}

/// Uniform random unit vector in `C^n`.
pub(crate) fn unit_sample(rng: &mut Rng, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let len = norm(&v);
    v.into_iter().map(|c| c / len).collect()
}

fn accept(d: &DomainGeometry, z: &[C64], lo: f64, hi: f64) -> bool {
    let g = d.defining(z);
    if !(g < 0.0) {
        return false;
    }
    // -defining is a lower bound for delta
    if -g > hi {
        return false;
    }
    let delta = d.delta(z);
    delta >= lo.max(BOUNDARY_EXCLUSION) && delta <= hi
}

/// Two distinct interior points with boundary distance in `[delta_min, delta_max]`,
/// concentrated near `p` when given. Deterministic per seed.
pub fn sample_pair_near(
    d: &DomainGeometry,
    p: Option<&Point>,
    delta_min: f64,
    delta_max: f64,
    seed: u64,
) -> Result<(Point, Point)> {
    let mut rng = rng_from_seed(seed);
    sample_pair_with(d, p, delta_min, delta_max, &mut rng)
}

/// Interior point with boundary distance in `[delta_min, delta_max]` and a
/// uniformly random unit direction. Deterministic per seed.
pub fn sample_tangent_near(
    d: &DomainGeometry,
    p: Option<&Point>,
    delta_min: f64,
    delta_max: f64,
    seed: u64,
) -> Result<Tangent> {
    let mut rng = rng_from_seed(seed);
    if !(delta_min > 0.0 && delta_min < delta_max) {
        return Err(Error::Sampling(format!(
            "need 0 < delta_min < delta_max, got [{delta_min}, {delta_max}]"
        )));
    }
    let z = sample_point_with(d, p, delta_min, delta_max, &mut rng)?;
    let x = unit_sample(&mut rng, d.dim());
    Tangent::new(z, x)
}

pub(crate) fn sample_pair_with(
    d: &DomainGeometry,
    p: Option<&Point>,
    delta_min: f64,
    delta_max: f64,
    rng: &mut Rng,
) -> Result<(Point, Point)> {
    if !(delta_min > 0.0 && delta_min < delta_max) {
        return Err(Error::Sampling(format!(
            "need 0 < delta_min < delta_max, got [{delta_min}, {delta_max}]"
        )));
    }
    if let Some(p) = p {
        d.check_dim(&p.0)?;
    }
    let z = sample_point_with(d, p, delta_min, delta_max, rng)?;
    for _ in 0..MAX_TRIES {
        let w = sample_point_with(d, p, delta_min, delta_max, rng)?;
        if w.dist(&z) > 1e-12 {
            return Ok((z, w));
        }
    }
    Err(Error::Sampling("could not draw two distinct points".into()))
}

pub(crate) fn sample_point_with(
    d: &DomainGeometry,
    p: Option<&Point>,
    delta_min: f64,
    delta_max: f64,
    rng: &mut Rng,
) -> Result<Point> {
    let n = d.dim();
    let (center, radius) = match p {
        Some(p) => (p.clone(), (4.0 * delta_max).min(d.bounding_ball().1 * 2.0)),
        None => d.bounding_ball(),
    };
    for _ in 0..MAX_TRIES {
        let v = ball_sample(rng, n, radius);
        let z: Vec<C64> = center.0.iter().zip(&v).map(|(a, b)| a + b).collect();
        if accept(d, &z, delta_min, delta_max) {
            return Ok(Point(z));
        }
    }
    Err(Error::Sampling(format!(
        "no point with delta in [{delta_min}, {delta_max}] after {MAX_TRIES} draws"
    )))
}

/// Interior point with boundary distance `delta`, on a random ray from the
/// reference point (or towards `toward` when given).
pub fn shell_point(d: &DomainGeometry, toward: Option<&Point>, delta: f64, rng: &mut Rng) -> Result<Point> {
    let n = d.dim();
    match d.kind() {
        DomainKind::Annulus { inner_radius } => {
            let angle = match toward {
                Some(q) => q.0[0].arg(),
                None => rng.gen::<f64>() * std::f64::consts::TAU,
            };
            let outer = toward.map_or(rng.gen::<bool>(), |q| q.0[0].norm() > (1.0 + inner_radius) / 2.0);
            let r = if outer { 1.0 - delta } else { inner_radius + delta };
            if !(r > *inner_radius && r < 1.0) || 2.0 * delta >= 1.0 - inner_radius {
                return Err(Error::Sampling(format!("no annulus point at delta {delta}")));
            }
            return Ok(Point::scalar(C64::from_polar(r, angle)));
        }
        DomainKind::HalfPlane { normal, offset } => {
            let base = match toward {
                Some(q) => {
                    let s = hdot(&q.0, normal).re - offset;
                    q.offset(normal, C64::new(-s, 0.0))
                }
                None => {
                    let t = ball_sample(rng, n, 1.0);
                    let s = hdot(&t, normal).re - offset;
                    Point(t).offset(normal, C64::new(-s, 0.0))
                }
            };
            return Ok(base.offset(normal, C64::new(-delta, 0.0)));
        }
        _ => {}
    }
    let o = d.reference_point();
    let u = match toward {
        Some(q) => {
            let v = q.sub(&o);
            let l = norm(&v);
            if l == 0.0 {
                return Err(Error::Input("target coincides with reference point".into()));
            }
            v.into_iter().map(|c| c / l).collect()
        }
        None => unit_sample(rng, n),
    };
    let along = |t: f64| o.offset(&u, C64::new(t, 0.0));
    let mut t_out = d.bounding_ball().1 * 4.0 + o.dist(&d.bounding_ball().0);
    if d.defining(&along(t_out).0) < 0.0 {
        return Err(Error::Sampling("ray does not leave the domain".into()));
    }
    let mut t_in = 0.0;
    while t_out - t_in > 1e-15 * t_out {
        let mid = 0.5 * (t_in + t_out);
        if d.defining(&along(mid).0) < 0.0 {
            t_in = mid;
        } else {
            t_out = mid;
        }
    }
    if d.delta(&o.0) < delta {
        return Err(Error::Sampling(format!(
            "delta {delta} exceeds the inradius along the ray"
        )));
    }
    let (mut lo, mut hi) = (0.0, t_in);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if d.delta(&along(mid).0) >= delta {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Ok(along(lo))
}

/// Flood fill on a grid over the bounding ball; rejects empty or
/// disconnected interiors.
pub fn check_connected(d: &DomainGeometry, side: usize) -> Result<()> {
    let n = d.dim();
    let dims = 2 * n;
    let cap = (1usize << 20) as f64;
    let side = side.min(cap.powf(1.0 / dims as f64).floor() as usize).max(2);
    let (center, radius) = d.bounding_ball();
    let total = side.pow(dims as u32);
    let h = 2.0 * radius / side as f64;
    let coord = |idx: usize| -> Vec<C64> {
        let mut rem = idx;
        let mut x = vec![0.0; dims];
        for xi in x.iter_mut() {
            *xi = -radius + h * ((rem % side) as f64 + 0.5);
            rem /= side;
        }
        (0..n).map(|i| center.0[i] + C64::new(x[2 * i], x[2 * i + 1])).collect()
    };
    let inside: Vec<bool> = (0..total).map(|i| d.defining(&coord(i)) < 0.0).collect();
    let count = inside.iter().filter(|&&b| b).count();
    let Some(start) = inside.iter().position(|&b| b) else {
        return Err(Error::Setup(format!("{} has empty interior on the grid", d.name())));
    };
    let mut seen = vec![false; total];
    let mut stack = vec![start];
    seen[start] = true;
    let mut reached = 0;
    while let Some(i) = stack.pop() {
        reached += 1;
        let mut stride = 1;
        for _ in 0..dims {
            let pos = (i / stride) % side;
            if pos > 0 && inside[i - stride] && !seen[i - stride] {
                seen[i - stride] = true;
                stack.push(i - stride);
            }
            if pos + 1 < side && inside[i + stride] && !seen[i + stride] {
                seen[i + stride] = true;
                stack.push(i + stride);
            }
            stride *= side;
        }
    }
    if reached != count {
        return Err(Error::Setup(format!(
            "{} interior is disconnected on a {side}-per-side grid",
            d.name()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::BallWindow;

    #[test]
    fn pair_in_disc_crescent() {
        let d = DomainGeometry::unit_disc();
        let p = Point::real(&[1.0]);
        let (z, w) = sample_pair_near(&d, Some(&p), 0.01, 0.1, 3).unwrap();
        for x in [&z, &w] {
            let delta = d.boundary_distance(x).unwrap();
            assert!((0.01..=0.1).contains(&delta));
            assert!(x.dist(&p) <= 0.4);
        }
        assert_ne!(z, w);
        assert_eq!(sample_pair_near(&d, Some(&p), 0.01, 0.1, 3).unwrap(), (z, w));
    }

    #[test]
    fn pair_anywhere_and_degenerate() {
        let d = DomainGeometry::unit_ball(2);
        let (z, w) = sample_pair_near(&d, None, 0.05, 1.0, 1).unwrap();
        assert!(d.contains(&z).unwrap() && d.contains(&w).unwrap());
        assert!(matches!(
            sample_pair_near(&d, None, 0.1, 0.1, 1),
            Err(Error::Sampling(_))
        ));
    }

    #[test]
    fn shell_points_hit_target_distance() {
        let mut rng = rng_from_seed(9);
        for d in [
            DomainGeometry::unit_ball(2),
            DomainGeometry::polydisc(&[1.0, 0.5]).unwrap(),
            DomainGeometry::ellipsoid(&[1.0, 2.0]).unwrap(),
            DomainGeometry::annulus(0.3).unwrap(),
        ] {
            for delta in [0.2, 1e-3, 1e-6] {
                let z = shell_point(&d, None, delta, &mut rng).unwrap();
                let got = d.boundary_distance(&z).unwrap();
                assert!(
                    (got - delta).abs() < 1e-9 * delta.max(1e-3),
                    "{}: {got} vs {delta}",
                    d.name()
                );
            }
        }
    }

    #[test]
    fn connectivity_on_models() {
        assert!(check_connected(&DomainGeometry::annulus(0.3).unwrap(), 16).is_ok());
        let base = DomainGeometry::unit_ball(2);
        let d = DomainGeometry::intersection(
            &base,
            BallWindow {
                center: Point::real(&[1.0, 0.0]),
                radius: 0.5,
            },
        );
        assert!(d.is_ok());
        let empty = DomainGeometry::intersection(
            &base,
            BallWindow {
                center: Point::real(&[1.6, 0.0]),
                radius: 0.5,
            },
        );
        assert!(matches!(empty, Err(Error::Setup(_))));
    }
}
