//! Complex flatness of the boundary: affine discs in `∂D` and strict
//! C-convexity at a boundary point.

use rand::Rng as _;
use serde::Serialize;

use super::sampling::{rng_from_seed, unit_sample, Rng};
use super::{DomainGeometry, DomainKind};
use crate::error::{Error, Result};
use crate::point::{complement_basis, Point, C64};

/// Affine disc `ζ ↦ center + radius·ζ·direction`, `|ζ| < 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineDiscWitness {
    pub center: Point,
    pub direction: Vec<C64>,
    pub radius: f64,
}

impl AffineDiscWitness {
    pub fn at(&self, zeta: C64) -> Point {
        self.center.offset(&self.direction, zeta * self.radius)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DiscVerdict {
    DiscFound(AffineDiscWitness),
    NoDiscFound,
}

impl DiscVerdict {
    pub fn found(&self) -> bool {
        matches!(self, DiscVerdict::DiscFound(_))
    }
}

const ON_BOUNDARY_TOL: f64 = 1e-9;

fn e(n: usize, k: usize, v: C64) -> Vec<C64> {
    let mut x = vec![C64::new(0.0, 0.0); n];
    x[k] = v;
    x
}

/// Point of `∂D` on a ray from the reference point.
pub(crate) fn boundary_point_on_ray(d: &DomainGeometry, u: &[C64]) -> Option<Point> {
    let o = d.reference_point();
    let (c, r) = d.bounding_ball();
    let mut hi = 4.0 * r + o.dist(&c) + 1.0;
    if d.defining(&o.offset(u, C64::new(hi, 0.0)).0) < 0.0 {
        return None;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if d.defining(&o.offset(u, C64::new(mid, 0.0)).0) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(o.offset(u, C64::new(hi, 0.0)))
}

fn disc_on_boundary(d: &DomainGeometry, center: &Point, v: &[C64], radius: f64) -> bool {
    (1..=4).all(|ring| {
        let rho = radius * ring as f64 / 4.0;
        (0..32).all(|k| {
            let t = C64::from_polar(rho, std::f64::consts::TAU * k as f64 / 32.0);
            d.defining(&center.offset(v, t).0).abs() <= ON_BOUNDARY_TOL
        })
    })
}

/// Searches `∂D` for a nonconstant complex affine disc of the given radius.
pub fn disc_free_certificate(d: &DomainGeometry, samples: usize, radius: f64, seed: u64) -> DiscVerdict {
    let n = d.dim();
    if n == 1 {
        // boundaries of planar domains are curves
        return DiscVerdict::NoDiscFound;
    }
    match d.kind() {
        DomainKind::Ball { .. } => DiscVerdict::NoDiscFound,
        DomainKind::Polydisc { radii } => {
            // face {|z_i| = r_i}, free coordinate j with the widest room
            let Some(j) = (0..n).max_by(|&a, &b| radii[a].total_cmp(&radii[b])) else {
                return DiscVerdict::NoDiscFound;
            };
            let i = if j == 0 { 1 } else { 0 };
            if radius >= radii[j] {
                return DiscVerdict::NoDiscFound;
            }
            DiscVerdict::DiscFound(AffineDiscWitness {
                center: Point(e(n, i, C64::new(radii[i], 0.0))),
                direction: e(n, j, C64::new(1.0, 0.0)),
                radius,
            })
        }
        DomainKind::HalfPlane { normal, offset } => DiscVerdict::DiscFound(AffineDiscWitness {
            center: Point(normal.iter().map(|c| c * *offset).collect()),
            direction: complement_basis(normal).remove(0),
            radius,
        }),
        _ => sampled_search(d, samples, radius, &mut rng_from_seed(seed)),
    }
}

fn sampled_search(d: &DomainGeometry, samples: usize, radius: f64, rng: &mut Rng) -> DiscVerdict {
    let n = d.dim();
    for _ in 0..samples.max(1) {
        let Some(p) = boundary_point_on_ray(d, &unit_sample(rng, n)) else {
            continue;
        };
        let basis = complement_basis(&d.outward_normal(&p.0));
        let mut directions = basis.clone();
        for _ in 0..4 {
            let mut v = vec![C64::new(0.0, 0.0); n];
            for b in &basis {
                let w = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += w * bi;
                }
            }
            if let Some(v) = crate::point::normalize(&v) {
                directions.push(v);
            }
        }
        for v in directions {
            if disc_on_boundary(d, &p, &v, radius) {
                return DiscVerdict::DiscFound(AffineDiscWitness {
                    center: p,
                    direction: v,
                    radius,
                });
            }
        }
    }
    DiscVerdict::NoDiscFound
}

/// True iff no sampled point of `∂D` other than `p` lies in the complex
/// tangent hyperplane `p + T^C_p`.
pub fn strict_c_convexity_probe(d: &DomainGeometry, p: &Point, samples: usize, tolerance: f64) -> Result<bool> {
    d.check_dim(&p.0)?;
    if !d.is_convex() {
        return Err(Error::Unsupported(format!("{} is not convex", d.name())));
    }
    if d.defining(&p.0).abs() > tolerance.max(1e-8) {
        return Err(Error::Input(format!("{:?} is not on the boundary", p.0)));
    }
    let basis = complement_basis(&d.outward_normal(&p.0));
    if basis.is_empty() {
        return Ok(true);
    }
    let reach = 2.0 * d.bounding_ball().1;
    let mut rng = rng_from_seed(0x5eed ^ samples as u64);
    let on_boundary = |q: &Point| d.defining(&q.0).abs() <= tolerance;
    for b in &basis {
        for k in 0..=64 {
            let s = 1e-3 * (reach / 1e-3).powf(k as f64 / 64.0);
            for phase in 0..8 {
                let t = C64::from_polar(s, std::f64::consts::TAU * phase as f64 / 8.0);
                if on_boundary(&p.offset(b, t)) {
                    return Ok(false);
                }
            }
        }
    }
    for _ in 0..samples {
        let s = 1e-3 * (reach / 1e-3).powf(rng.gen::<f64>());
        let mut v = vec![C64::new(0.0, 0.0); d.dim()];
        for b in &basis {
            let w = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += w * bi;
            }
        }
        let Some(v) = crate::point::normalize(&v) else { continue };
        if on_boundary(&p.offset(&v, C64::new(s, 0.0))) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_free_examples() {
        let poly = DomainGeometry::polydisc(&[1.0, 1.0]).unwrap();
        match disc_free_certificate(&poly, 16, 0.9, 1) {
            DiscVerdict::DiscFound(w) => {
                let x = w.at(C64::new(1.0, 0.0));
                assert_eq!(x.0, vec![C64::new(1.0, 0.0), C64::new(0.9, 0.0)]);
                for k in 0..16 {
                    let q = w.at(C64::from_polar(0.99, k as f64));
                    assert!(poly.defining(&q.0).abs() < 1e-12);
                }
            }
            v => panic!("expected a disc, got {v:?}"),
        }
        assert_eq!(
            disc_free_certificate(&DomainGeometry::unit_ball(2), 16, 0.1, 1),
            DiscVerdict::NoDiscFound
        );
        let hp = DomainGeometry::half_plane(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)], 0.5).unwrap();
        assert!(disc_free_certificate(&hp, 16, 1.0, 1).found());
    }

    #[test]
    fn sampled_search_agrees_with_exact_verdicts() {
        let ell = DomainGeometry::ellipsoid(&[1.0, 2.0]).unwrap();
        assert!(!disc_free_certificate(&ell, 64, 0.05, 2).found());
        let poly = DomainGeometry::polydisc(&[1.0, 1.0]).unwrap();
        assert!(sampled_search(&poly, 64, 0.05, &mut rng_from_seed(3)).found());
        let ball = DomainGeometry::unit_ball(2);
        assert!(!sampled_search(&ball, 64, 0.05, &mut rng_from_seed(3)).found());
    }

    #[test]
    fn strict_c_convexity_examples() {
        let ball = DomainGeometry::unit_ball(2);
        assert!(strict_c_convexity_probe(&ball, &Point::real(&[1.0, 0.0]), 200, 1e-9).unwrap());
        let poly = DomainGeometry::polydisc(&[1.0, 1.0]).unwrap();
        assert!(!strict_c_convexity_probe(&poly, &Point::real(&[1.0, 0.5]), 200, 1e-9).unwrap());
        let disc = DomainGeometry::unit_disc();
        assert!(strict_c_convexity_probe(&disc, &Point::real(&[1.0]), 200, 1e-9).unwrap());
        assert!(matches!(
            strict_c_convexity_probe(&ball, &Point::real(&[0.5, 0.0]), 10, 1e-9),
            Err(Error::Input(_))
        ));
    }
}
