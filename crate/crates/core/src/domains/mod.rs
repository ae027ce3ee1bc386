//! Model domains in `C^n`: membership, boundary distance, normals, support
//! functions and window intersections.

mod affine;
mod ellipsoid;
mod flatness;
mod sampling;

pub use affine::{affine_disc_radius, m_convexity_probe, AffineDiscRadius, MConvexityReport};
pub(crate) use flatness::boundary_point_on_ray;
pub use flatness::{disc_free_certificate, strict_c_convexity_probe, AffineDiscWitness, DiscVerdict};
pub use sampling::{check_connected, rng_from_seed, sample_pair_near, sample_tangent_near, shell_point, Rng};
pub(crate) use sampling::{sample_point_with, unit_sample};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{hdot, norm, normalize, Point, C64};

/// Points closer than this to the boundary are refused by samplers.
pub const BOUNDARY_EXCLUSION: f64 = 1e-10;

/// Ball used as the localization window `U` in an intersection `D ∩ U`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallWindow {
    pub center: Point,
    pub radius: f64,
}

/// Serialized form of a domain: `{"kind": ..., "params": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum DomainKind {
    UnitDisc {},
    Ball {
        center: Point,
        radius: f64,
    },
    /// Polydisc centered at the origin.
    Polydisc {
        radii: Vec<f64>,
    },
    /// `{ sum |z_i|^(2 m_i) < 1 }`.
    ComplexEllipsoid {
        exponents: Vec<f64>,
    },
    /// `{ r < |z| < 1 }` in the plane.
    Annulus {
        inner_radius: f64,
    },
    /// `{ Re <z, normal> < offset }`; the normal is normalized on construction.
    HalfPlane {
        normal: Vec<C64>,
        offset: f64,
    },
    Intersection {
        base: Box<DomainKind>,
        window: BallWindow,
    },
}

/// An immutable, validated domain together with derived metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainKind", into = "DomainKind")]
pub struct DomainGeometry {
    kind: DomainKind,
    dimension: usize,
    is_convex: bool,
    has_closed_form: bool,
}

impl TryFrom<DomainKind> for DomainGeometry {
    type Error = Error;
    fn try_from(kind: DomainKind) -> Result<Self> {
        DomainGeometry::new(kind)
    }
}

impl From<DomainGeometry> for DomainKind {
    fn from(d: DomainGeometry) -> Self {
        d.kind
    }
}

/// Localization window: `V ⋐ U` balls around a boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub center: Point,
    pub outer_radius: f64,
    pub inner_radius: f64,
}

impl Window {
    pub fn new(center: Point, outer_radius: f64, inner_radius: f64) -> Result<Self> {
        if !(inner_radius > 0.0 && inner_radius < outer_radius) {
            return Err(Error::Input(format!(
                "window radii must satisfy 0 < r_V < r_U, got r_V={inner_radius}, r_U={outer_radius}"
            )));
        }
        Ok(Window {
            center,
            outer_radius,
            inner_radius,
        })
    }

    pub fn outer_ball(&self) -> BallWindow {
        BallWindow {
            center: self.center.clone(),
            radius: self.outer_radius,
        }
    }

    pub fn in_inner(&self, z: &Point) -> bool {
        z.dist(&self.center) < self.inner_radius
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

impl DomainGeometry {
    pub fn new(kind: DomainKind) -> Result<Self> {
        let kind = normalize_kind(kind)?;
        let dimension = kind_dimension(&kind);
        let is_convex = kind_convex(&kind);
        let has_closed_form = !matches!(
            kind,
            DomainKind::ComplexEllipsoid { .. } | DomainKind::Intersection { .. }
        );
        let d = DomainGeometry {
            kind,
            dimension,
            is_convex,
            has_closed_form,
        };
        if let DomainKind::Intersection { .. } = d.kind {
            check_connected(&d, 16)?;
        }
        Ok(d)
    }

    pub fn unit_disc() -> Self {
        Self::new(DomainKind::UnitDisc {}).unwrap()
    }

    pub fn unit_ball(n: usize) -> Self {
        Self::new(DomainKind::Ball {
            center: Point::zeros(n),
            radius: 1.0,
        })
        .unwrap()
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        Self::new(DomainKind::Ball { center, radius })
    }

    pub fn polydisc(radii: &[f64]) -> Result<Self> {
        Self::new(DomainKind::Polydisc { radii: radii.to_vec() })
    }

    pub fn ellipsoid(exponents: &[f64]) -> Result<Self> {
        Self::new(DomainKind::ComplexEllipsoid {
            exponents: exponents.to_vec(),
        })
    }

    pub fn annulus(inner_radius: f64) -> Result<Self> {
        Self::new(DomainKind::Annulus { inner_radius })
    }

    pub fn half_plane(normal: Vec<C64>, offset: f64) -> Result<Self> {
        Self::new(DomainKind::HalfPlane { normal, offset })
    }

    pub fn intersection(base: &DomainGeometry, window: BallWindow) -> Result<Self> {
        Self::new(DomainKind::Intersection {
            base: Box::new(base.kind.clone()),
            window,
        })
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dimension
    }

    pub fn is_convex(&self) -> bool {
        self.is_convex
    }

    pub fn has_closed_form(&self) -> bool {
        self.has_closed_form
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self.kind, DomainKind::HalfPlane { .. })
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            DomainKind::UnitDisc {} => "UnitDisc",
            DomainKind::Ball { .. } => "Ball",
            DomainKind::Polydisc { .. } => "Polydisc",
            DomainKind::ComplexEllipsoid { .. } => "ComplexEllipsoid",
            DomainKind::Annulus { .. } => "Annulus",
            DomainKind::HalfPlane { .. } => "HalfPlane",
            DomainKind::Intersection { .. } => "Intersection",
        }
    }

    /// The base domain of an intersection, if any.
    pub fn base(&self) -> Option<DomainGeometry> {
        match &self.kind {
            DomainKind::Intersection { base, .. } => Some(DomainGeometry::new((**base).clone()).ok()?),
            _ => None,
        }
    }

    pub(crate) fn check_dim(&self, z: &[C64]) -> Result<()> {
        if z.len() != self.dimension {
            return Err(Error::Input(format!(
                "dimension mismatch: domain has n={}, point has {}",
                self.dimension,
                z.len()
            )));
        }
        Ok(())
    }

    /// Signed defining function, negative exactly on the interior.
    ///
    /// Inside the domain `-defining(z)` is a lower bound for the boundary
    /// distance; it equals it for every kind except the ellipsoid, where the
    /// gauge is used.
    pub fn defining(&self, z: &[C64]) -> f64 {
        defining_kind(&self.kind, z)
    }

    /// Cheap function with the same sign as [`defining`](Self::defining),
    /// used inside optimizer loops. Not a distance bound.
    pub(crate) fn penalty(&self, z: &[C64]) -> f64 {
        penalty_kind(&self.kind, z)
    }

    /// Cheap lower bound for the boundary distance, negative outside.
    ///
    /// Equals `-defining` except on the ellipsoid, where the gauge is
    /// replaced by `-ρ/G` with `ρ = Σ|z_i|^{2m_i} − 1` and `G = |(2m_i)|`
    /// bounding `|∇ρ|` on the closed unit polydisc, which contains `D̄`.
    pub(crate) fn margin_fast(&self, z: &[C64]) -> f64 {
        margin_kind(&self.kind, z)
    }

    /// True when the domain is an annulus or is cut out of one, so
    /// containment of a disc needs a winding check.
    pub(crate) fn has_hole(&self) -> bool {
        match &self.kind {
            DomainKind::Annulus { .. } => true,
            DomainKind::Intersection { base, .. } => matches!(**base, DomainKind::Annulus { .. }),
            _ => false,
        }
    }

    /// Cheap interior test without dimension checks.
    pub fn is_inside(&self, z: &[C64]) -> bool {
        match &self.kind {
            DomainKind::ComplexEllipsoid { exponents } => {
                let a: Vec<f64> = z.iter().map(|c| c.norm()).collect();
                ellipsoid::defining(&a, exponents) < 0.0
            }
            DomainKind::Intersection { base, window } => {
                let inner = DomainGeometry {
                    kind: (**base).clone(),
                    dimension: self.dimension,
                    is_convex: self.is_convex,
                    has_closed_form: true,
                };
                inner.is_inside(z) && window.center.dist(&Point(z.to_vec())) < window.radius
            }
            _ => self.defining(z) < 0.0,
        }
    }

    pub fn contains(&self, z: &Point) -> Result<bool> {
        self.check_dim(&z.0)?;
        Ok(self.defining(&z.0) < 0.0)
    }

    /// Euclidean distance to the boundary.
    pub fn boundary_distance(&self, z: &Point) -> Result<f64> {
        if !self.contains(z)? {
            return Err(Error::Domain(format!("{:?} is not in {}", z.0, self.name())));
        }
        Ok(distance_kind(&self.kind, &z.0))
    }

    /// Unchecked boundary distance for callers that already know `z ∈ D`.
    pub(crate) fn delta(&self, z: &[C64]) -> f64 {
        distance_kind(&self.kind, z)
    }

    /// Unit outward normal (as a `∂ρ/∂z̄` direction) at or near a boundary point.
    pub fn outward_normal(&self, p: &[C64]) -> Vec<C64> {
        normal_kind(&self.kind, p)
    }

    /// `sup_{x ∈ D} Re <x, nu>`; `+inf` when unbounded in that direction.
    /// For intersections this is an upper bound (min of the two supports).
    pub fn support(&self, nu: &[C64]) -> f64 {
        support_kind(&self.kind, nu)
    }

    /// Center and radius of a ball containing the domain (or a reference
    /// region for unbounded kinds).
    pub fn bounding_ball(&self) -> (Point, f64) {
        bounding_kind(&self.kind)
    }

    /// A fixed interior point with comfortable boundary distance.
    pub fn reference_point(&self) -> Point {
        reference_kind(self)
    }
}

fn normalize_kind(kind: DomainKind) -> Result<DomainKind> {
    let bad = |m: String| Err(Error::Input(m));
    match kind {
        DomainKind::UnitDisc {} => Ok(kind),
        DomainKind::Ball { ref center, radius } => {
            if center.0.is_empty() || !(radius > 0.0 && radius.is_finite()) {
                return bad(format!("ball needs n >= 1 and radius > 0, got {radius}"));
            }
            Ok(kind)
        }
        DomainKind::Polydisc { ref radii } => {
            if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
                return bad("polydisc radii must be positive".into());
            }
            Ok(kind)
        }
        DomainKind::ComplexEllipsoid { ref exponents } => {
            if exponents.is_empty() || exponents.iter().any(|m| !(*m >= 1.0 && m.is_finite())) {
                return bad("ellipsoid exponents must satisfy m_i >= 1".into());
            }
            Ok(kind)
        }
        DomainKind::Annulus { inner_radius } => {
            if !(inner_radius > 0.0 && inner_radius < 1.0) {
                return bad(format!("annulus inner radius must lie in (0,1), got {inner_radius}"));
            }
            Ok(kind)
        }
        DomainKind::HalfPlane { normal, offset } => match normalize(&normal) {
            Some(nu) if offset.is_finite() => Ok(DomainKind::HalfPlane {
                normal: nu,
                offset: offset / norm(&normal),
            }),
            _ => bad("half-plane normal must be nonzero".into()),
        },
        DomainKind::Intersection { base, window } => {
            if matches!(*base, DomainKind::Intersection { .. }) {
                return bad("nested intersections are not supported".into());
            }
            let base = normalize_kind(*base)?;
            if window.center.dim() != kind_dimension(&base) || !(window.radius > 0.0) {
                return bad("window must match the base dimension and have radius > 0".into());
            }
            Ok(DomainKind::Intersection {
                base: Box::new(base),
                window,
            })
        }
    }
}

fn kind_dimension(kind: &DomainKind) -> usize {
    match kind {
        DomainKind::UnitDisc {} | DomainKind::Annulus { .. } => 1,
        DomainKind::Ball { center, .. } => center.dim(),
        DomainKind::Polydisc { radii } => radii.len(),
        DomainKind::ComplexEllipsoid { exponents } => exponents.len(),
        DomainKind::HalfPlane { normal, .. } => normal.len(),
        DomainKind::Intersection { base, .. } => kind_dimension(base),
    }
}

fn kind_convex(kind: &DomainKind) -> bool {
    match kind {
        DomainKind::Annulus { .. } => false,
        DomainKind::Intersection { base, .. } => kind_convex(base),
        _ => true,
    }
}

fn defining_kind(kind: &DomainKind, z: &[C64]) -> f64 {
    match kind {
        DomainKind::UnitDisc {} => z[0].norm() - 1.0,
        DomainKind::Ball { center, radius } => {
            norm(&z.iter().zip(&center.0).map(|(a, b)| a - b).collect::<Vec<_>>()) - radius
        }
        DomainKind::Polydisc { radii } => z
            .iter()
            .zip(radii)
            .map(|(a, r)| a.norm() - r)
            .fold(f64::NEG_INFINITY, f64::max),
        DomainKind::ComplexEllipsoid { exponents } => {
            let a: Vec<f64> = z.iter().map(|c| c.norm()).collect();
            ellipsoid::gauge(&a, exponents) - 1.0
        }
        DomainKind::Annulus { inner_radius } => {
            let r = z[0].norm();
            (inner_radius - r).max(r - 1.0)
        }
        DomainKind::HalfPlane { normal, offset } => hdot(z, normal).re - offset,
        DomainKind::Intersection { base, window } => {
            let w = norm(&z.iter().zip(&window.center.0).map(|(a, b)| a - b).collect::<Vec<_>>()) - window.radius;
            defining_kind(base, z).max(w)
        }
    }
}

fn margin_kind(kind: &DomainKind, z: &[C64]) -> f64 {
    match kind {
        DomainKind::ComplexEllipsoid { exponents } => {
            let a: Vec<f64> = z.iter().map(|c| c.norm()).collect();
            let g = exponents.iter().map(|m| 4.0 * m * m).sum::<f64>().sqrt();
            -ellipsoid::defining(&a, exponents) / g
        }
        DomainKind::Intersection { base, window } => {
            let w = window.radius - norm(&z.iter().zip(&window.center.0).map(|(a, b)| a - b).collect::<Vec<_>>());
            margin_kind(base, z).min(w)
        }
        _ => -defining_kind(kind, z),
    }
}

fn penalty_kind(kind: &DomainKind, z: &[C64]) -> f64 {
    let sq = |c: &Point, r: f64| {
        let d2: f64 = z.iter().zip(&c.0).map(|(a, b)| (a - b).norm_sqr()).sum();
        (d2 - r * r) / (2.0 * r)
    };
    match kind {
        DomainKind::UnitDisc {} => 0.5 * (z[0].norm_sqr() - 1.0),
        DomainKind::Ball { center, radius } => sq(center, *radius),
        DomainKind::ComplexEllipsoid { exponents } => {
            let a: Vec<f64> = z.iter().map(|c| c.norm()).collect();
            ellipsoid::defining(&a, exponents)
        }
        DomainKind::Intersection { base, window } => penalty_kind(base, z).max(sq(&window.center, window.radius)),
        _ => defining_kind(kind, z),
    }
}

fn distance_kind(kind: &DomainKind, z: &[C64]) -> f64 {
    match kind {
        DomainKind::ComplexEllipsoid { exponents } => {
            let a: Vec<f64> = z.iter().map(|c| c.norm()).collect();
            ellipsoid::boundary_distance(&a, exponents)
        }
        DomainKind::Intersection { base, window } => {
            let w = window.radius - norm(&z.iter().zip(&window.center.0).map(|(a, b)| a - b).collect::<Vec<_>>());
            distance_kind(base, z).min(w)
        }
        _ => -defining_kind(kind, z),
    }
}

fn normal_kind(kind: &DomainKind, p: &[C64]) -> Vec<C64> {
    let unit = |v: Vec<C64>| normalize(&v).unwrap_or(v);
    match kind {
        DomainKind::UnitDisc {} => unit(vec![p[0]]),
        DomainKind::Ball { center, .. } => unit(p.iter().zip(&center.0).map(|(a, b)| a - b).collect()),
        DomainKind::Polydisc { radii } => {
            let k = (0..p.len())
                .max_by(|&i, &j| (p[i].norm() - radii[i]).total_cmp(&(p[j].norm() - radii[j])))
                .unwrap();
            let mut v = vec![c(0.0); p.len()];
            v[k] = if p[k].norm() > 0.0 { p[k] / p[k].norm() } else { c(1.0) };
            v
        }
        DomainKind::ComplexEllipsoid { exponents } => unit(ellipsoid::complex_gradient(p, exponents)),
        DomainKind::Annulus { inner_radius } => {
            let r = p[0].norm();
            let u = if r > 0.0 { p[0] / r } else { c(1.0) };
            if (r - inner_radius).abs() < (1.0 - r).abs() {
                vec![-u]
            } else {
                vec![u]
            }
        }
        DomainKind::HalfPlane { normal, .. } => normal.clone(),
        DomainKind::Intersection { base, window } => {
            let w = norm(&p.iter().zip(&window.center.0).map(|(a, b)| a - b).collect::<Vec<_>>()) - window.radius;
            if defining_kind(base, p) >= w {
                normal_kind(base, p)
            } else {
                unit(p.iter().zip(&window.center.0).map(|(a, b)| a - b).collect())
            }
        }
    }
}

fn support_kind(kind: &DomainKind, nu: &[C64]) -> f64 {
    match kind {
        DomainKind::UnitDisc {} => nu[0].norm(),
        DomainKind::Ball { center, radius } => hdot(&center.0, nu).re + radius * norm(nu),
        DomainKind::Polydisc { radii } => nu.iter().zip(radii).map(|(a, r)| a.norm() * r).sum(),
        DomainKind::ComplexEllipsoid { exponents } => {
            let a: Vec<f64> = nu.iter().map(|c| c.norm()).collect();
            ellipsoid::support(&a, exponents)
        }
        DomainKind::Annulus { .. } => nu[0].norm(),
        DomainKind::HalfPlane { normal, offset } => {
            let lam = hdot(nu, normal);
            let residual: Vec<C64> = nu.iter().zip(normal).map(|(a, b)| a - lam * b).collect();
            if lam.im.abs() < 1e-12 && lam.re >= 0.0 && norm(&residual) < 1e-12 {
                lam.re * offset
            } else {
                f64::INFINITY
            }
        }
        DomainKind::Intersection { base, window } => {
            let w = hdot(&window.center.0, nu).re + window.radius * norm(nu);
            support_kind(base, nu).min(w)
        }
    }
}

fn bounding_kind(kind: &DomainKind) -> (Point, f64) {
    match kind {
        DomainKind::UnitDisc {} | DomainKind::Annulus { .. } => (Point::zeros(1), 1.0),
        DomainKind::Ball { center, radius } => (center.clone(), *radius),
        DomainKind::Polydisc { radii } => (
            Point::zeros(radii.len()),
            radii.iter().map(|r| r * r).sum::<f64>().sqrt(),
        ),
        DomainKind::ComplexEllipsoid { exponents } => (Point::zeros(exponents.len()), (exponents.len() as f64).sqrt()),
        DomainKind::HalfPlane { normal, offset } => (Point(normal.iter().map(|v| v * (offset - 1.0)).collect()), 2.0),
        DomainKind::Intersection { window, .. } => (window.center.clone(), window.radius),
    }
}

fn reference_kind(d: &DomainGeometry) -> Point {
    match &d.kind {
        DomainKind::Annulus { inner_radius } => Point::real(&[(1.0 + inner_radius) / 2.0]),
        DomainKind::HalfPlane { normal, offset } => Point(normal.iter().map(|v| v * (offset - 1.0)).collect()),
        DomainKind::Intersection { base, window } => {
            let b = DomainGeometry {
                kind: (**base).clone(),
                dimension: d.dimension,
                is_convex: d.is_convex,
                has_closed_form: true,
            };
            let from = b.reference_point();
            let mut best = (f64::NEG_INFINITY, window.center.clone());
            for k in 0..=256 {
                let z = window.center.lerp(&from, k as f64 / 256.0);
                let v = -d.defining(&z.0);
                if v > best.0 {
                    best = (v, z);
                }
            }
            best.1
        }
        _ => bounding_kind(&d.kind).0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cz(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn membership_examples() {
        let disc = DomainGeometry::unit_disc();
        assert!(disc.contains(&Point::real(&[0.0])).unwrap());
        assert!(!disc.contains(&Point::real(&[1.0])).unwrap());
        let poly = DomainGeometry::polydisc(&[1.0, 1.0]).unwrap();
        assert!(poly.contains(&Point::real(&[0.5, 0.999])).unwrap());
        assert!(matches!(disc.contains(&Point::zeros(2)), Err(Error::Input(_))));
    }

    #[test]
    fn boundary_distance_examples() {
        let disc = DomainGeometry::unit_disc();
        assert!((disc.boundary_distance(&Point::real(&[0.9])).unwrap() - 0.1).abs() < 1e-15);
        let ball = DomainGeometry::unit_ball(2);
        assert!((ball.boundary_distance(&Point::real(&[0.6, 0.0])).unwrap() - 0.4).abs() < 1e-15);
        let ann = DomainGeometry::annulus(0.3).unwrap();
        assert!((ann.boundary_distance(&Point::real(&[0.5])).unwrap() - 0.2).abs() < 1e-15);
        assert!(matches!(
            ann.boundary_distance(&Point::real(&[0.1])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn intersection_distance_is_min() {
        let ball = DomainGeometry::unit_ball(2);
        let w = BallWindow {
            center: Point::real(&[1.0, 0.0]),
            radius: 0.5,
        };
        let d = DomainGeometry::intersection(&ball, w.clone()).unwrap();
        assert!(d.is_convex());
        assert!(!d.has_closed_form());
        let z = Point(vec![cz(0.8, 0.05), cz(0.1, -0.1)]);
        let expect = ball.delta(&z.0).min(0.5 - z.dist(&w.center));
        assert_eq!(d.boundary_distance(&z).unwrap(), expect);
    }

    #[test]
    fn validation() {
        assert!(DomainGeometry::annulus(1.2).is_err());
        assert!(DomainGeometry::polydisc(&[1.0, -1.0]).is_err());
        assert!(DomainGeometry::ellipsoid(&[0.5, 1.0]).is_err());
        assert!(Window::new(Point::real(&[1.0]), 0.2, 0.3).is_err());
        let far = BallWindow {
            center: Point::real(&[5.0, 0.0]),
            radius: 0.5,
        };
        assert!(DomainGeometry::intersection(&DomainGeometry::unit_ball(2), far).is_err());
    }

    #[test]
    fn json_shape() {
        let d = DomainGeometry::polydisc(&[1.0, 2.0]).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"kind":"Polydisc","params":{"radii":[1.0,2.0]}}"#);
        let back: DomainGeometry = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        let disc: DomainGeometry = serde_json::from_str(r#"{"kind":"UnitDisc","params":{}}"#).unwrap();
        assert_eq!(disc.dim(), 1);
        let bad = serde_json::from_str::<DomainGeometry>(r#"{"kind":"Annulus","params":{"inner_radius":2}}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn half_plane_normalizes() {
        let h = DomainGeometry::half_plane(vec![cz(2.0, 0.0)], 2.0).unwrap();
        let z = Point::real(&[0.25]);
        assert!((h.boundary_distance(&z).unwrap() - 0.75).abs() < 1e-15);
        assert!(h.support(&[cz(1.0, 0.0)]) == 1.0);
        assert!(h.support(&[cz(-1.0, 0.0)]).is_infinite());
    }
}
