//! Complex geodesics `φ: Δ → D`, real geodesics on their traces, the (∗)
//! normalization and the family and boundary checks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MetricSource;
use crate::closed_forms::{disc_distance, mobius, model_distance, model_metric};
use crate::domains::{DomainGeometry, DomainKind};
use crate::error::{Error, Result};
use crate::extremal::{check_points, lempert_upper, shortest_path, AnalyticDiscParam, DiscChart, SolverConfig};
use crate::optim::{golden_section, nelder_mead};
use crate::point::{hdot, normalize, Point, Tangent, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeodesicConfig {
    /// Acceptance tolerance for the isometry defect, `tanh⁻¹` scale.
    pub tol: f64,
    /// Test grid: `rings` circles up to `grid_radius` with `angles` points
    /// each, plus the origin and the two preimages.
    pub grid_radius: f64,
    pub rings: usize,
    pub angles: usize,
    /// Grid points kept when distances come from brackets.
    pub bracket_points: usize,
    /// Nodes of a real geodesic on the convex route.
    pub nodes: usize,
    pub solver: SolverConfig,
}

impl Default for GeodesicConfig {
    fn default() -> Self {
        GeodesicConfig {
            tol: 5e-3,
            grid_radius: 0.7,
            rings: 2,
            angles: 6,
            bracket_points: 5,
            nodes: 9,
            solver: SolverConfig::default(),
        }
    }
}

/// How the underlying disc was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeodesicOrigin {
    /// Closed-form affine construction (disc, ball slices, polydisc).
    ClosedForm,
    /// Extremal disc from the Lempert solver.
    Solver,
    /// Supplied by the caller.
    Given,
}

/// An accepted complex geodesic `ζ ↦ disc(A(ζ))` with the disc
/// automorphism `A(ζ) = (e^{iα}ζ + c)/(1 + c̄e^{iα}ζ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexGeodesicDisc {
    pub disc: AnalyticDiscParam,
    pub rotation: f64,
    pub center: C64,
    /// Largest distance from `k_Δ(ζ,η)` to the bound interval for
    /// `k_D(φ(ζ),φ(η))` over the test grid: `|k_Δ − k_D|` with the oracle.
    pub defect: f64,
    /// Worst case `max(k_Δ − lower, upper − k_Δ)`; equals `defect` with the
    /// oracle, and is at least the bracket width otherwise.
    pub certified_defect: f64,
    pub tol: f64,
    pub grid_points: usize,
    /// Satisfies (∗): `δ_D∘φ` peaks at the origin.
    pub normalized: bool,
    pub origin: GeodesicOrigin,
}

impl ComplexGeodesicDisc {
    fn pre(&self, zeta: C64) -> C64 {
        let u = C64::from_polar(1.0, self.rotation) * zeta;
        (u + self.center) / (C64::new(1.0, 0.0) + self.center.conj() * u)
    }

    fn pre_inverse(&self, x: C64) -> C64 {
        C64::from_polar(1.0, -self.rotation) * mobius(self.center, x)
    }

    pub fn eval(&self, zeta: C64) -> Point {
        self.disc.eval(self.pre(zeta))
    }

    /// Parameters of the base point and (if any) the target.
    pub fn preimages(&self) -> (C64, Option<C64>) {
        (
            self.pre_inverse(self.disc.base_preimage),
            self.disc.target_preimage.map(|b| self.pre_inverse(b)),
        )
    }

    /// Checks a given disc (precomposed with the automorphism given by
    /// `rotation` and `center`) and accepts it when its defect is within
    /// `cfg.tol`.
    pub fn verify(
        d: &DomainGeometry,
        disc: AnalyticDiscParam,
        rotation: f64,
        center: C64,
        cfg: &GeodesicConfig,
    ) -> Result<Self> {
        accept(d, disc, rotation, center, GeodesicOrigin::Given, cfg)
    }

    /// Defect on the grid of `cfg`, e.g. a finer one than at acceptance.
    pub fn reverify(&self, d: &DomainGeometry, cfg: &GeodesicConfig) -> Result<f64> {
        let (source, pts) = test_grid(d, self, cfg);
        Ok(isometry_defect(d, self, &pts, &source)?.0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

fn source_for(d: &DomainGeometry, cfg: &GeodesicConfig) -> MetricSource {
    if d.has_closed_form() {
        MetricSource::Oracle
    } else {
        MetricSource::Bracket {
            cfg: cfg.solver.clone(),
        }
    }
}

fn test_grid(d: &DomainGeometry, g: &ComplexGeodesicDisc, cfg: &GeodesicConfig) -> (MetricSource, Vec<C64>) {
    let (a, b) = g.preimages();
    let mut pts = vec![a];
    pts.extend(b);
    pts.push(C64::new(0.0, 0.0));
    for ring in 1..=cfg.rings {
        let r = cfg.grid_radius * ring as f64 / cfg.rings as f64;
        for j in 0..cfg.angles {
            // stagger the rings so no two share a ray
            let t = std::f64::consts::TAU * (j as f64 + 0.5 * ring as f64) / cfg.angles as f64;
            pts.push(C64::from_polar(r, t));
        }
    }
    let source = source_for(d, cfg);
    if matches!(source, MetricSource::Bracket { .. }) {
        pts.truncate(cfg.bracket_points.max(2));
    }
    (source, pts)
}

/// Distance from `model` to `[lo, up]`, and the worst case over the interval.
fn interval_defect(model: f64, lo: f64, up: f64) -> (f64, f64) {
    (
        (lo - model).max(model - up).max(0.0),
        (model - lo).max(up - model).max(0.0),
    )
}

fn max_pair(v: Vec<(f64, f64)>) -> (f64, f64) {
    v.into_iter().fold((0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)))
}

/// `(defect, certified_defect)` of `k_Δ` against the distance bounds over
/// all grid pairs.
fn isometry_defect(
    d: &DomainGeometry,
    g: &ComplexGeodesicDisc,
    pts: &[C64],
    source: &MetricSource,
) -> Result<(f64, f64)> {
    let images: Vec<Point> = pts.iter().map(|&z| g.eval(z)).collect();
    let pairs: Vec<(usize, usize)> = (0..pts.len())
        .flat_map(|i| (i + 1..pts.len()).map(move |j| (i, j)))
        .collect();
    let defects: Result<Vec<(f64, f64)>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (lo, up) = source.distance(d, &images[i], &images[j])?;
            Ok(interval_defect(disc_distance(pts[i], pts[j]), lo, up))
        })
        .collect();
    Ok(max_pair(defects?))
}

fn accept(
    d: &DomainGeometry,
    disc: AnalyticDiscParam,
    rotation: f64,
    center: C64,
    origin: GeodesicOrigin,
    cfg: &GeodesicConfig,
) -> Result<ComplexGeodesicDisc> {
    d.check_dim(&disc.eval(C64::new(0.0, 0.0)).0)?;
    let mut g = ComplexGeodesicDisc {
        disc,
        rotation,
        center,
        defect: f64::INFINITY,
        certified_defect: f64::INFINITY,
        tol: cfg.tol,
        grid_points: 0,
        normalized: false,
        origin,
    };
    let (source, pts) = test_grid(d, &g, cfg);
    (g.defect, g.certified_defect) = isometry_defect(d, &g, &pts, &source)?;
    g.grid_points = pts.len();
    if g.defect > cfg.tol {
        return Err(Error::Rejected {
            defect: g.defect,
            tol: cfg.tol,
        });
    }
    Ok(g)
}

fn affine_disc(c0: Vec<C64>, c1: Vec<C64>, a: C64, b: C64) -> AnalyticDiscParam {
    AnalyticDiscParam {
        dimension: c0.len(),
        coefficients: vec![c0, c1],
        chart: DiscChart::Identity,
        base_preimage: a,
        target_preimage: Some(b),
        boundary_samples: 0,
        // proper map: the closed disc touches the boundary
        margin: 0.0,
        certified: false,
    }
}

/// Affine complex geodesic through `z` and `w` where one is known in closed
/// form: the disc itself, the slice of a ball by the complex line through
/// the points, and on the polydisc the identity in the dominant coordinate
/// when the others interpolate affinely. `None` otherwise.
pub fn exact_geodesic(d: &DomainGeometry, z: &Point, w: &Point) -> Option<AnalyticDiscParam> {
    if z == w {
        return None;
    }
    match d.kind() {
        DomainKind::UnitDisc {} => Some(affine_disc(
            vec![C64::new(0.0, 0.0)],
            vec![C64::new(1.0, 0.0)],
            z.0[0],
            w.0[0],
        )),
        DomainKind::Ball { center, radius } => {
            let unit = |p: &Point| -> Vec<C64> { p.0.iter().zip(&center.0).map(|(x, c)| (x - c) / radius).collect() };
            let (zu, wu) = (unit(z), unit(w));
            let diff: Vec<C64> = wu.iter().zip(&zu).map(|(a, b)| a - b).collect();
            let u = normalize(&diff)?;
            let (lz, lw) = (hdot(&zu, &u), hdot(&wu, &u));
            let foot: Vec<C64> = zu.iter().zip(&u).map(|(x, e)| x - lz * e).collect();
            let r = (1.0 - foot.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt();
            let c0 = foot.iter().zip(&center.0).map(|(f, c)| c + f * radius).collect();
            let c1 = u.iter().map(|e| e * (radius * r)).collect();
            Some(affine_disc(c0, c1, lz / r, lw / r))
        }
        DomainKind::Polydisc { radii } => {
            let scaled = |p: &Point, i: usize| p.0[i] / radii[i];
            let dist = |i: usize| disc_distance(scaled(z, i), scaled(w, i));
            let j = (0..radii.len()).max_by(|&a, &b| dist(a).partial_cmp(&dist(b)).unwrap())?;
            let (a, b) = (scaled(z, j), scaled(w, j));
            let mut c0 = Vec::with_capacity(radii.len());
            let mut c1 = Vec::with_capacity(radii.len());
            for (i, &r) in radii.iter().enumerate() {
                if i == j {
                    c0.push(C64::new(0.0, 0.0));
                    c1.push(C64::new(r, 0.0));
                    continue;
                }
                let beta = (scaled(w, i) - scaled(z, i)) / (b - a);
                let alpha = scaled(z, i) - beta * a;
                if alpha.norm() + beta.norm() > 1.0 {
                    return None;
                }
                c0.push(alpha * r);
                c1.push(beta * r);
            }
            Some(affine_disc(c0, c1, a, b))
        }
        _ => None,
    }
}

/// Complex geodesic through `z` and `w` on a convex domain: the closed-form
/// construction where available, else the extremal disc from the Lempert
/// solver. Accepted when `k_Δ` is within `cfg.tol` of the oracle, or of
/// the `[c, l]` bracket where there is no closed form; the worst case over
/// the bracket is reported as `certified_defect`.
pub fn complex_geodesic(d: &DomainGeometry, z: &Point, w: &Point, cfg: &GeodesicConfig) -> Result<ComplexGeodesicDisc> {
    if !d.is_convex() {
        return Err(Error::Capability(format!(
            "complex geodesics need a convex domain, {} is not",
            d.name()
        )));
    }
    check_points(d, &[z, w], &cfg.solver)?;
    if z == w {
        return Err(Error::Input("a complex geodesic needs z ≠ w".into()));
    }
    let zero = C64::new(0.0, 0.0);
    if let Some(disc) = exact_geodesic(d, z, w) {
        if let Ok(g) = accept(d, disc, 0.0, zero, GeodesicOrigin::ClosedForm, cfg) {
            return Ok(g);
        }
    }
    let (_, disc) = lempert_upper(d, z, w, &cfg.solver)?;
    accept(d, disc, 0.0, zero, GeodesicOrigin::Solver, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathRoute {
    /// Image of the hyperbolic segment under a complex geodesic.
    ComplexGeodesic,
    /// Shortest relaxed polygon for the closed-form metric.
    Variational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealGeodesicPath {
    pub nodes: Vec<Point>,
    /// Arc length in the `tanh⁻¹` scale.
    pub parameters: Vec<f64>,
    /// Largest distance from `|s − t|` to the bounds for `k(ψ(s), ψ(t))`
    /// over the checked node pairs.
    pub defect: f64,
    /// Worst case over the bound intervals.
    pub certified_defect: f64,
    /// Declared tolerance the defect was accepted against.
    pub tol: f64,
    pub route: PathRoute,
}

impl RealGeodesicPath {
    pub fn length(&self) -> f64 {
        self.parameters.last().copied().unwrap_or(0.0)
    }
}

fn path_defect(d: &DomainGeometry, nodes: &[Point], params: &[f64], source: &MetricSource) -> Result<(f64, f64)> {
    let n = nodes.len();
    let pairs: Vec<(usize, usize)> = match source {
        MetricSource::Oracle => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
        // brackets are expensive: the pairs through either endpoint
        MetricSource::Bracket { .. } => (1..n).map(|i| (0, i)).chain((1..n - 1).map(|i| (i, n - 1))).collect(),
    };
    let defects: Result<Vec<(f64, f64)>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (lo, up) = source.distance(d, &nodes[i], &nodes[j])?;
            Ok(interval_defect((params[j] - params[i]).abs(), lo, up))
        })
        .collect();
    Ok(max_pair(defects?))
}

/// Real geodesic from `z` to `w`. On convex domains it is the trace of the
/// complex geodesic over the hyperbolic segment between the preimages,
/// accepted against `cfg.tol`. Elsewhere (closed-form metric required) it
/// is the shortest relaxed polygon, reparametrized by arc length; its
/// defect is bounded by the excess `L − k(z, w)` plus the quadrature error,
/// which with `cfg.tol` forms the declared tolerance.
pub fn real_geodesic(d: &DomainGeometry, z: &Point, w: &Point, cfg: &GeodesicConfig) -> Result<RealGeodesicPath> {
    if d.is_convex() {
        let g = complex_geodesic(d, z, w, cfg)?;
        let (a, b) = g.preimages();
        let b = b.expect("two-point geodesic");
        let beta = mobius(a, b);
        let len = disc_distance(a, b);
        let phase = beta / beta.norm();
        let count = cfg.nodes.max(2);
        let params: Vec<f64> = (0..count).map(|i| len * i as f64 / (count - 1) as f64).collect();
        let nodes: Vec<Point> = params
            .iter()
            .map(|&t| {
                let u = phase * t.tanh();
                g.eval((u + a) / (C64::new(1.0, 0.0) + a.conj() * u))
            })
            .collect();
        let (defect, certified_defect) = path_defect(d, &nodes, &params, &source_for(d, cfg))?;
        if defect > cfg.tol {
            return Err(Error::Rejected { defect, tol: cfg.tol });
        }
        return Ok(RealGeodesicPath {
            nodes,
            parameters: params,
            defect,
            certified_defect,
            tol: cfg.tol,
            route: PathRoute::ComplexGeodesic,
        });
    }
    if !d.has_closed_form() {
        return Err(Error::Capability(format!(
            "no geodesic route on {}: neither convex nor closed-form",
            d.name()
        )));
    }
    check_points(d, &[z, w], &cfg.solver)?;
    if z == w {
        return Err(Error::Input("a real geodesic needs z ≠ w".into()));
    }
    let (est, nodes) = shortest_path(d, z, w, &cfg.solver, None)?;
    let mut params = vec![0.0];
    for pair in nodes.windows(2) {
        let step = pair[1].sub(&pair[0]);
        let k0 = model_metric(
            d,
            &Tangent {
                base: pair[0].clone(),
                direction: step.clone(),
            },
        )?;
        let k1 = model_metric(
            d,
            &Tangent {
                base: pair[1].clone(),
                direction: step,
            },
        )?;
        params.push(params.last().unwrap() + 0.5 * (k0 + k1));
    }
    let excess = params.last().unwrap() - model_distance(d, z, w)?.value();
    let tol = cfg.tol + excess.max(0.0) + est.error_estimate;
    let (defect, certified_defect) = path_defect(d, &nodes, &params, &MetricSource::Oracle)?;
    if defect > tol {
        return Err(Error::Rejected { defect, tol });
    }
    Ok(RealGeodesicPath {
        nodes,
        parameters: params,
        defect,
        certified_defect,
        tol,
        route: PathRoute::Variational,
    })
}

/// Radial resolution of the (∗) search grid.
const STAR_RINGS: usize = 40;
const STAR_ANGLES: usize = 64;

fn delta_at(d: &DomainGeometry, g: &ComplexGeodesicDisc, zeta: C64) -> f64 {
    let p = g.eval(zeta);
    if d.is_inside(&p.0) {
        d.delta(&p.0)
    } else {
        0.0
    }
}

/// Reparametrizes `g` so that `δ_D∘φ` peaks at the origin: grid search with
/// local refinement, ties going to the smallest `|ζ|`, then precomposition
/// with the automorphism sending 0 to the maximizer.
pub fn normalize_star(g: &ComplexGeodesicDisc, d: &DomainGeometry) -> ComplexGeodesicDisc {
    let mut grid = vec![C64::new(0.0, 0.0)];
    for k in 1..STAR_RINGS {
        let r = k as f64 / STAR_RINGS as f64;
        grid.extend(
            (0..STAR_ANGLES).map(|j| C64::from_polar(r, std::f64::consts::TAU * j as f64 / STAR_ANGLES as f64)),
        );
    }
    let values: Vec<f64> = grid.iter().map(|&z| delta_at(d, g, z)).collect();
    let top = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let slack = 1e-12 * top.abs().max(1.0);
    // grid is ordered by |ζ|, so the first near-maximal point is the smallest
    let i = values.iter().position(|&v| v >= top - slack).unwrap_or(0);
    let mut star = grid[i];
    let res = nelder_mead(
        |x| {
            let z = C64::new(x[0], x[1]);
            if z.norm() >= 0.999 {
                return f64::INFINITY;
            }
            -delta_at(d, g, z)
        },
        &[star.re, star.im],
        0.5 / STAR_RINGS as f64,
        400,
        1e-13,
    );
    if -res.value > values[i] + slack {
        star = C64::new(res.x[0], res.x[1]);
    }
    let mut out = g.clone();
    if star != C64::new(0.0, 0.0) {
        // A∘M with M(ζ) = (ζ + s)/(1 + s̄ζ); the new rotation is the phase of
        // its derivative at 0
        let u = C64::from_polar(1.0, g.rotation);
        let c = g.center;
        let one = C64::new(1.0, 0.0);
        let d_pre = u * (1.0 - c.norm_sqr()) / (one + c.conj() * u * star).powi(2);
        out.center = g.pre(star);
        out.rotation = (d_pre * (1.0 - star.norm_sqr())).arg();
    }
    out.normalized = true;
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EquicontinuityGrid {
    /// Base points: `rings` circles up to and including the unit circle.
    pub rings: usize,
    pub angles: usize,
    /// Offset directions per base point.
    pub directions: usize,
    /// Step sizes `t`, decreasing.
    pub steps: Vec<f64>,
}

impl Default for EquicontinuityGrid {
    fn default() -> Self {
        EquicontinuityGrid {
            rings: 24,
            angles: 96,
            directions: 16,
            steps: (1..=6).map(|k| 0.5f64.powi(k)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquicontinuityReport {
    pub steps: Vec<f64>,
    /// `ω(t)` over the whole family.
    pub modulus: Vec<f64>,
    /// `ω(t)` over the first half of the family.
    pub half_modulus: Vec<f64>,
    /// Least-squares slope of `log ω` against `log t`.
    pub exponent: f64,
    pub uniform: bool,
    pub members: usize,
}

fn member_modulus(g: &ComplexGeodesicDisc, grid: &EquicontinuityGrid) -> Vec<f64> {
    let mut base = vec![C64::new(0.0, 0.0)];
    for k in 1..=grid.rings {
        let r = k as f64 / grid.rings as f64;
        base.extend(
            (0..grid.angles).map(|j| C64::from_polar(r, std::f64::consts::TAU * j as f64 / grid.angles as f64)),
        );
    }
    let images: Vec<Point> = base.iter().map(|&z| g.eval(z)).collect();
    grid.steps
        .iter()
        .map(|&t| {
            let mut top: f64 = 0.0;
            for (z, fz) in base.iter().zip(&images) {
                for k in 0..grid.directions {
                    let mut other = z + C64::from_polar(t, std::f64::consts::TAU * k as f64 / grid.directions as f64);
                    // radial projection onto the closed disc is 1-Lipschitz
                    if other.norm() > 1.0 {
                        other /= other.norm();
                    }
                    top = top.max(g.eval(other).dist(fz));
                }
            }
            top
        })
        .collect()
}

fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    super::visibility::least_squares_slope(&pts)
}

/// Modulus of continuity `ω(t) = max |φ(ζ) − φ(ζ′)|` over `|ζ − ζ′| ≤ t` in
/// the closed disc, over a (∗)-normalized family. Uniform when `ω` decays
/// at least like `t^{1/4}` and the smallest-step value at most doubles
/// from the first half of the family to all of it.
pub fn equicontinuity_modulus(
    family: &[ComplexGeodesicDisc],
    grid: &EquicontinuityGrid,
) -> Result<EquicontinuityReport> {
    if family.is_empty() || grid.steps.is_empty() {
        return Err(Error::Input("need a nonempty family and at least one step".into()));
    }
    if let Some(i) = family.iter().position(|g| !g.normalized) {
        return Err(Error::Input(format!("family member {i} is not (∗)-normalized")));
    }
    let per: Vec<Vec<f64>> = family.par_iter().map(|g| member_modulus(g, grid)).collect();
    let fold = |rows: &[Vec<f64>]| -> Vec<f64> {
        (0..grid.steps.len())
            .map(|k| rows.iter().map(|r| r[k]).fold(0.0, f64::max))
            .collect()
    };
    let modulus = fold(&per);
    let half_modulus = fold(&per[..family.len().div_ceil(2)]);
    let exponent = log_slope(&grid.steps, &modulus);
    let last = grid.steps.len() - 1;
    let doubling_ok = modulus[last] <= 2.0 * half_modulus[last] + 1e-12;
    let decays = exponent >= 0.25 || modulus.iter().all(|&m| m == 0.0);
    Ok(EquicontinuityReport {
        steps: grid.steps.clone(),
        modulus,
        half_modulus,
        exponent,
        uniform: family.len() == 1 || (decays && doubling_ok),
        members: family.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryExtension {
    /// Distance from `φ(Δ̄)` to each target.
    pub distance_p: f64,
    pub distance_q: f64,
    /// Where the distances are attained.
    pub closest_p: C64,
    pub closest_q: C64,
    /// `max_θ max_j |φ(r_j e^{iθ}) − φ(e^{iθ})|` over the tail `j ≥ 30`.
    pub oscillation: f64,
}

impl BoundaryExtension {
    pub fn hits(&self, tol: f64) -> bool {
        self.distance_p <= tol && self.distance_q <= tol
    }
}

const EXTENSION_ANGLES: usize = 4096;
const EXTENSION_DEPTH: i32 = 40;
const EXTENSION_TAIL: i32 = 30;

/// Evaluates `φ` on the circles of radius `1 − 2^{−j}` and on the unit
/// circle; reports the radial oscillation near the boundary and how close
/// `φ(Δ̄)` comes to `p` and `q`.
pub fn boundary_extension_check(g: &ComplexGeodesicDisc, p: &Point, q: &Point) -> BoundaryExtension {
    let h = std::f64::consts::TAU / EXTENSION_ANGLES as f64;
    let radii: Vec<f64> = (1..=EXTENSION_DEPTH)
        .map(|j| 1.0 - 0.5f64.powi(j))
        .chain([1.0])
        .collect();
    let mut best = [(f64::INFINITY, C64::new(0.0, 0.0)), (f64::INFINITY, C64::new(0.0, 0.0))];
    let mut oscillation: f64 = 0.0;
    for k in 0..EXTENSION_ANGLES {
        let theta = h * k as f64;
        let edge = g.eval(C64::from_polar(1.0, theta));
        for (j, &r) in radii.iter().enumerate() {
            let zeta = C64::from_polar(r, theta);
            let v = if r == 1.0 { edge.clone() } else { g.eval(zeta) };
            if j as i32 + 1 >= EXTENSION_TAIL {
                oscillation = oscillation.max(v.dist(&edge));
            }
            for (slot, target) in best.iter_mut().zip([p, q]) {
                let dist = v.dist(target);
                if dist < slot.0 {
                    *slot = (dist, zeta);
                }
            }
        }
    }
    for (slot, target) in best.iter_mut().zip([p, q]) {
        if slot.0 == 0.0 {
            continue;
        }
        let (r, t0) = (slot.1.norm(), slot.1.arg());
        let (t, v) = golden_section(|t| g.eval(C64::from_polar(r, t)).dist(target), t0 - h, t0 + h, 1e-14);
        if v < slot.0 {
            *slot = (v, C64::from_polar(r, t));
        }
    }
    BoundaryExtension {
        distance_p: best[0].0,
        distance_q: best[1].0,
        closest_p: best[0].1,
        closest_q: best[1].1,
        oscillation,
    }
}
