//! Exact invariant distances and metrics where closed forms exist.
//!
//! Values are kept in the `tanh⁻¹` scale, `tanh⁻¹ t = ½ log((1+t)/(1−t))`.
//! Every formula computes `t` and `1 − t²` separately and combines them as
//! `log1p(t) − ½ log(1 − t²)`, which stays accurate as points approach the
//! boundary.

use serde::{Deserialize, Serialize};

use crate::domains::{DomainGeometry, DomainKind};
use crate::error::{Error, Result};
use crate::point::{hdot, norm, Point, Tangent, C64};

/// A nonnegative distance or metric value in the `tanh⁻¹` scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HyperbolicValue(f64);

impl HyperbolicValue {
    pub const ZERO: HyperbolicValue = HyperbolicValue(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value >= 0.0 {
            Ok(HyperbolicValue(value))
        } else {
            Err(Error::Input(format!(
                "hyperbolic value must be nonnegative, got {value}"
            )))
        }
    }

    /// `tanh⁻¹ t` for `t ∈ [0, 1)`.
    pub fn from_modulus(t: f64) -> Self {
        HyperbolicValue(t.clamp(0.0, 1.0).atanh())
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The modulus `t = tanh(value)`.
    pub fn modulus(self) -> f64 {
        self.0.tanh()
    }
}

impl std::fmt::Display for HyperbolicValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

fn from_parts(t: f64, one_minus_t2: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    t.ln_1p() - 0.5 * one_minus_t2.ln()
}

/// `(1 − |a|²)` computed as `(1 − |a|)(1 + |a|)`.
fn one_minus_sq(r: f64) -> f64 {
    (1.0 - r) * (1.0 + r)
}

/// Distance in the unit ball of `C^n` (the unit disc when `n = 1`).
pub fn unit_ball_distance(a: &[C64], z: &[C64]) -> f64 {
    let d: Vec<C64> = z.iter().zip(a).map(|(x, y)| x - y).collect();
    let dn2: f64 = d.iter().map(|c| c.norm_sqr()).sum();
    if dn2 == 0.0 {
        return 0.0;
    }
    let an2: f64 = a.iter().map(|c| c.norm_sqr()).sum();
    let wedge = (an2 * dn2 - hdot(&d, a).norm_sqr()).max(0.0);
    let denom = (C64::new(1.0, 0.0) - hdot(z, a)).norm_sqr();
    let t = ((dn2 - wedge).max(0.0) / denom).sqrt();
    let rest = one_minus_sq(norm(a)) * one_minus_sq(norm(z)) / denom;
    from_parts(t.min(1.0), rest)
}

/// Poincaré distance in the unit disc.
pub fn disc_distance(a: C64, z: C64) -> f64 {
    unit_ball_distance(&[a], &[z])
}

/// Distance in the right half-plane `Re s > 0`.
pub fn right_half_plane_distance(s1: C64, s2: C64) -> f64 {
    let denom = (s1 + s2.conj()).norm();
    let t = (s1 - s2).norm() / denom;
    let rest = 4.0 * s1.re * s2.re / (denom * denom);
    from_parts(t.min(1.0), rest)
}

/// Distance in the upper half-plane `Im W > 0`.
pub fn upper_half_plane_distance(w1: C64, w2: C64) -> f64 {
    let denom = (w1 - w2.conj()).norm();
    let t = (w1 - w2).norm() / denom;
    let rest = 4.0 * w1.im * w2.im / (denom * denom);
    from_parts(t.min(1.0), rest)
}

/// Image of an annulus point in the upper half-plane chart of its
/// universal cover: `z = e^s`, `u = (π/L)·i·(s − log r)`, `W = e^u`.
pub(crate) fn annulus_chart(inner: f64, z: C64) -> C64 {
    let l = -inner.ln();
    let s = z.ln();
    let u = C64::new(0.0, std::f64::consts::PI / l) * (s - inner.ln());
    u.exp()
}

/// Inverse of [`annulus_chart`]: the covering map from the upper
/// half-plane onto the annulus.
#[cfg(test)]
pub(crate) fn annulus_chart_inverse(inner: f64, w: C64) -> C64 {
    let l = -inner.ln();
    let u = w.ln();
    (C64::new(0.0, -l / std::f64::consts::PI) * u + inner.ln()).exp()
}

/// Chart images of `z` and of the lift of `w` nearest to it.
#[cfg(test)]
pub(crate) fn annulus_nearest_lift(inner: f64, z: C64, w: C64) -> (C64, C64) {
    let (_, _, wz, ww) = annulus_search(inner, z, w);
    (wz, ww)
}

/// Kobayashi distance on `{r < |z| < 1}` as the infimum over deck
/// translates of the lifted distance. Returns the value and the number of
/// translates examined; the search stops once the lower bound
/// `½ |log|W₁| − log|W₂'||` of every remaining translate exceeds the best
/// value, so the result is the exact infimum.
pub fn annulus_distance(inner: f64, z: C64, w: C64) -> (f64, usize) {
    let (best, terms, _, _) = annulus_search(inner, z, w);
    (best, terms)
}

fn annulus_search(inner: f64, z: C64, w: C64) -> (f64, usize, C64, C64) {
    let wz = annulus_chart(inner, z);
    let ww = annulus_chart(inner, w);
    let l = -inner.ln();
    let log_q = 2.0 * std::f64::consts::PI.powi(2) / l;
    let gap = wz.norm().ln() - ww.norm().ln();
    let j0 = (gap / log_q).round() as i64;
    let lift = |j: i64| upper_half_plane_distance(wz, ww * (j as f64 * log_q).exp());
    let lower = |j: i64| 0.5 * (gap - j as f64 * log_q).abs();
    let mut best = lift(j0);
    let mut best_j = j0;
    let mut terms = 1;
    for step in 1.. {
        let mut any = false;
        for j in [j0 - step, j0 + step] {
            if lower(j) < best {
                let v = lift(j);
                if v < best {
                    best = v;
                    best_j = j;
                }
                any = true;
            }
            terms += 1;
        }
        if !any {
            break;
        }
    }
    (best, terms, wz, ww * (best_j as f64 * log_q).exp())
}

/// Kobayashi metric of the annulus, pulled back from the half-plane chart.
pub fn annulus_metric(inner: f64, z: C64, x: C64) -> f64 {
    let l = -inner.ln();
    let r = z.norm();
    let angle = std::f64::consts::PI * (r.ln() - inner.ln()) / l;
    x.norm() * std::f64::consts::PI / (2.0 * l * r * angle.sin())
}

/// Möbius automorphism of the disc `ζ ↦ (ζ − a)/(1 − āζ)`.
pub fn mobius(a: C64, zeta: C64) -> C64 {
    (zeta - a) / (C64::new(1.0, 0.0) - a.conj() * zeta)
}

/// Automorphism of the unit ball exchanging `a` and `0`.
pub fn ball_automorphism(a: &[C64], x: &[C64]) -> Vec<C64> {
    let an2: f64 = a.iter().map(|c| c.norm_sqr()).sum();
    let denom = C64::new(1.0, 0.0) - hdot(x, a);
    if an2 == 0.0 {
        return x.iter().map(|c| -c).collect();
    }
    let s = (1.0 - an2).sqrt();
    let proj = hdot(x, a) / an2;
    a.iter()
        .zip(x)
        .map(|(ai, xi)| {
            let p = proj * ai;
            let q = xi - p;
            (ai - p - q * s) / denom
        })
        .collect()
}

fn require_inside(d: &DomainGeometry, z: &Point) -> Result<()> {
    if !d.contains(z)? {
        return Err(Error::Domain(format!("{:?} is not in {}", z.0, d.name())));
    }
    Ok(())
}

/// Exact invariant distance (`c = k = l` on the convex models, `k = l` on
/// the annulus).
pub fn model_distance(d: &DomainGeometry, z: &Point, w: &Point) -> Result<HyperbolicValue> {
    if !d.has_closed_form() {
        return Err(Error::Capability(format!("no closed form on {}", d.name())));
    }
    require_inside(d, z)?;
    require_inside(d, w)?;
    if z == w {
        return Ok(HyperbolicValue::ZERO);
    }
    let v = match d.kind() {
        DomainKind::UnitDisc {} => disc_distance(z.0[0], w.0[0]),
        DomainKind::Ball { center, radius } => {
            let u: Vec<C64> = z.0.iter().zip(&center.0).map(|(a, c)| (a - c) / radius).collect();
            let v: Vec<C64> = w.0.iter().zip(&center.0).map(|(a, c)| (a - c) / radius).collect();
            unit_ball_distance(&u, &v)
        }
        DomainKind::Polydisc { radii } => {
            z.0.iter()
                .zip(&w.0)
                .zip(radii)
                .map(|((a, b), r)| disc_distance(a / r, b / r))
                .fold(0.0, f64::max)
        }
        DomainKind::HalfPlane { normal, offset } => {
            let s1 = C64::new(*offset, 0.0) - hdot(&z.0, normal);
            let s2 = C64::new(*offset, 0.0) - hdot(&w.0, normal);
            right_half_plane_distance(s1, s2)
        }
        DomainKind::Annulus { inner_radius } => annulus_distance(*inner_radius, z.0[0], w.0[0]).0,
        _ => unreachable!("closed-form kinds handled above"),
    };
    HyperbolicValue::new(v.max(0.0))
}

/// Exact infinitesimal Kobayashi (= Carathéodory on convex models) metric.
pub fn model_metric(d: &DomainGeometry, t: &Tangent) -> Result<f64> {
    if !d.has_closed_form() {
        return Err(Error::Capability(format!("no closed form on {}", d.name())));
    }
    d.check_dim(&t.direction)?;
    require_inside(d, &t.base)?;
    let z = &t.base.0;
    let x = &t.direction;
    Ok(match d.kind() {
        DomainKind::UnitDisc {} => x[0].norm() / one_minus_sq(z[0].norm()),
        DomainKind::Ball { center, radius } => {
            let u: Vec<C64> = z.iter().zip(&center.0).map(|(a, c)| (a - c) / radius).collect();
            let xs: Vec<C64> = x.iter().map(|c| c / radius).collect();
            let q = one_minus_sq(norm(&u));
            (norm(&xs).powi(2) / q + hdot(&xs, &u).norm_sqr() / (q * q)).sqrt()
        }
        DomainKind::Polydisc { radii } => z
            .iter()
            .zip(x)
            .zip(radii)
            .map(|((a, v), r)| (v.norm() / r) / one_minus_sq(a.norm() / r))
            .fold(0.0, f64::max),
        DomainKind::HalfPlane { normal, offset } => {
            let s = *offset - hdot(z, normal).re;
            hdot(x, normal).norm() / (2.0 * s)
        }
        DomainKind::Annulus { inner_radius } => annulus_metric(*inner_radius, z[0], x[0]),
        _ => unreachable!("closed-form kinds handled above"),
    })
}

/// `log(1 + |ζ−η| / (2 δ(ζ)^{1/2} δ(η)^{1/2}))` on the unit disc, a lower
/// bound for the Poincaré distance.
pub fn disc_gromov_lower(zeta: C64, eta: C64) -> Result<HyperbolicValue> {
    let (dz, de) = (1.0 - zeta.norm(), 1.0 - eta.norm());
    if !(dz > 0.0 && de > 0.0) {
        return Err(Error::Domain("points must lie in the unit disc".into()));
    }
    HyperbolicValue::new(((zeta - eta).norm() / (2.0 * (dz * de).sqrt())).ln_1p())
}
