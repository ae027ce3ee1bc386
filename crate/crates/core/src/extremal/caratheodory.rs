//! Lower bounds from bounded functionals: the Carathéodory distance and
//! metric.
//!
//! If `D ⊂ E` and `f ∈ O(E, Δ)` then `f|_D ∈ O(D, Δ)`, so every simple
//! domain containing `D` (a ball, a coordinate cylinder, a supporting
//! half-plane) contributes functionals whose values are exact lower bounds
//! with no discretization error. On the annulus a Laurent polynomial is
//! optimized and its sup-norm certified on the two boundary circles.

use rand::Rng as _;
use rand_distr::StandardNormal;

use super::functional::{ball_automorphism_differential, laurent_derivative, laurent_eval, ScalarFunctionalParam};
use super::{check_points, SolverConfig};
use crate::closed_forms::{ball_automorphism, HyperbolicValue};
use crate::domains::{rng_from_seed, DomainGeometry, DomainKind};
use crate::error::Result;
use crate::optim::{bfgs_with_gradient, golden_section, nelder_mead, BfgsOptions};
use crate::point::{norm, normalize, Point, Tangent, C64};

#[derive(Clone, Copy)]
enum Goal<'a> {
    /// Maximize `|f(w)|`.
    Point(&'a [C64]),
    /// Maximize `|f'(z)X|`.
    Tangent(&'a [C64]),
}

fn score(f: &ScalarFunctionalParam, goal: Goal) -> f64 {
    match goal {
        Goal::Point(w) => f.eval(&Point(w.to_vec())).norm(),
        Goal::Tangent(x) => f.derivative_at_base(x).norm(),
    }
}

/// Simple domains known to contain `D`.
enum Container {
    Ball { center: Vec<C64>, radius: f64 },
    Coordinate { index: usize, radius: f64 },
    HalfPlane { normal: Vec<C64>, offset: f64 },
    Annulus { inner_radius: f64 },
    AnnulusProper { inner_radius: f64 },
}

fn containers(kind: &DomainKind, n: usize, out: &mut Vec<Container>) {
    match kind {
        DomainKind::UnitDisc {} => out.push(Container::Ball {
            center: vec![C64::new(0.0, 0.0)],
            radius: 1.0,
        }),
        DomainKind::Ball { center, radius } => out.push(Container::Ball {
            center: center.0.clone(),
            radius: *radius,
        }),
        DomainKind::Polydisc { radii } => out.extend(
            radii
                .iter()
                .enumerate()
                .map(|(index, &radius)| Container::Coordinate { index, radius }),
        ),
        // |z_i|^{2m_i} < 1 forces |z_i| < 1
        DomainKind::ComplexEllipsoid { .. } => {
            out.extend((0..n).map(|index| Container::Coordinate { index, radius: 1.0 }))
        }
        DomainKind::HalfPlane { normal, offset } => out.push(Container::HalfPlane {
            normal: normal.clone(),
            offset: *offset,
        }),
        DomainKind::Annulus { inner_radius } => {
            out.push(Container::Coordinate { index: 0, radius: 1.0 });
            out.push(Container::Annulus {
                inner_radius: *inner_radius,
            });
            out.push(Container::AnnulusProper {
                inner_radius: *inner_radius,
            });
        }
        DomainKind::Intersection { base, window } => {
            containers(base, n, out);
            out.push(Container::Ball {
                center: window.center.0.clone(),
                radius: window.radius,
            });
        }
    }
}

/// Best member of a container's family for the goal.
fn container_functional(c: &Container, z: &[C64], goal: Goal, cfg: &SolverConfig) -> ScalarFunctionalParam {
    match c {
        Container::Ball { center, radius } => {
            let to_unit = |p: &[C64]| -> Vec<C64> { p.iter().zip(center).map(|(a, b)| (a - b) / radius).collect() };
            let a = to_unit(z);
            let image = match goal {
                Goal::Point(w) => ball_automorphism(&a, &to_unit(w)),
                Goal::Tangent(x) => {
                    let xs: Vec<C64> = x.iter().map(|v| v / radius).collect();
                    ball_automorphism_differential(&a, &xs)
                }
            };
            let direction = normalize(&image).unwrap_or_else(|| {
                let mut e = vec![C64::new(0.0, 0.0); z.len()];
                e[0] = C64::new(1.0, 0.0);
                e
            });
            ScalarFunctionalParam::BallAutomorphism {
                center: center.clone(),
                radius: *radius,
                base: z.to_vec(),
                direction,
            }
        }
        Container::Coordinate { index, radius } => ScalarFunctionalParam::CoordinateMobius {
            index: *index,
            radius: *radius,
            base: z.to_vec(),
        },
        Container::HalfPlane { normal, offset } => ScalarFunctionalParam::AffineProjection {
            normal: normal.clone(),
            support: *offset,
            base: z.to_vec(),
        },
        Container::Annulus { inner_radius } => laurent_search(*inner_radius, z[0], goal, cfg),
        Container::AnnulusProper { inner_radius } => proper_map_search(*inner_radius, z[0], goal),
    }
}

/// First boundary crossing of `z + t·u`, `t > 0`, by bisection.
fn ray_exit(d: &DomainGeometry, z: &[C64], u: &[C64]) -> Option<Vec<C64>> {
    if !d.is_bounded() {
        return None;
    }
    let (c, r) = d.bounding_ball();
    let hi = 2.0 * (r + Point(z.to_vec()).dist(&c)) / norm(u);
    let at = |t: f64| -> Vec<C64> { z.iter().zip(u).map(|(a, b)| a + b * t).collect() };
    let t = crate::optim::bisect_last_true(|t| d.is_inside(&at(t)), 0.0, hi, 1e-12 * hi);
    Some(at(t))
}

fn affine(d: &DomainGeometry, nu: &[C64], z: &[C64]) -> ScalarFunctionalParam {
    ScalarFunctionalParam::AffineProjection {
        normal: nu.to_vec(),
        support: d.support(nu),
        base: z.to_vec(),
    }
}

/// Maximizes over unit normals `ν` the half-plane functional for
/// `{Re <x, ν> < h_D(ν)} ⊃ D`.
fn half_plane_search(d: &DomainGeometry, z: &[C64], goal: Goal) -> Option<ScalarFunctionalParam> {
    half_plane_search_from(d, z, goal, direction_starts(d, z, goal))
}

/// Candidate normals: the chord or tangent direction, boundary normals
/// where that line exits `D`, and coordinate axes.
fn direction_starts(d: &DomainGeometry, z: &[C64], goal: Goal) -> Vec<Vec<C64>> {
    let n = z.len();
    let mut starts: Vec<Vec<C64>> = Vec::new();
    let dir = match goal {
        Goal::Point(w) => w.iter().zip(z).map(|(a, b)| a - b).collect::<Vec<_>>(),
        Goal::Tangent(x) => x.to_vec(),
    };
    if let Some(u) = normalize(&dir) {
        let neg: Vec<C64> = u.iter().map(|c| -c).collect();
        for v in [&u, &neg] {
            starts.push(v.clone());
            if let Some(p) = ray_exit(d, z, v) {
                starts.push(d.outward_normal(&p));
            }
        }
    }
    for i in 0..n.min(3) {
        for s in [1.0, -1.0] {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[i] = C64::new(s, 0.0);
            starts.push(e);
        }
    }
    starts
}

fn half_plane_search_from(
    d: &DomainGeometry,
    z: &[C64],
    goal: Goal,
    starts: Vec<Vec<C64>>,
) -> Option<ScalarFunctionalParam> {
    let value = |v: &[f64]| -> f64 {
        let nu: Vec<C64> = v.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
        let Some(nu) = normalize(&nu) else { return 0.0 };
        let f = affine(d, &nu, z);
        match &f {
            ScalarFunctionalParam::AffineProjection { support, .. } if support.is_finite() => -score(&f, goal),
            _ => 0.0,
        }
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for s in starts {
        let x0: Vec<f64> = s.iter().flat_map(|c| [c.re, c.im]).collect();
        let m = nelder_mead(value, &x0, 0.2, 150, 1e-9);
        if best.as_ref().map_or(true, |b| m.value < b.0) {
            best = Some((m.value, m.x));
        }
    }
    let (v, x) = best?;
    if v >= 0.0 {
        return None;
    }
    let nu: Vec<C64> = x.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
    Some(affine(d, &normalize(&nu)?, z))
}

/// Directions sampled around a projected domain.
const PROJECTION_DIRECTIONS: usize = 256;

/// Support values `h_D(e^{iθ_j} ν)` of `D` projected onto `ζ = <x, ν>`.
fn projected_support(d: &DomainGeometry, nu: &[C64]) -> Vec<f64> {
    (0..PROJECTION_DIRECTIONS)
        .map(|j| {
            let u = C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / PROJECTION_DIRECTIONS as f64);
            d.support(&nu.iter().map(|c| c * u).collect::<Vec<_>>())
        })
        .collect()
}

/// Radius of a disc around `c` containing the projection of `D`.
///
/// `<D, ν>` lies in `{ζ : Re(ζ e^{−iθ_j}) < h_j}` for every sampled `θ_j`,
/// a polygon; the answer is the largest vertex distance from `c`, so it is
/// an upper bound for the true projected radius, not a sample of it.
fn projected_radius(support: &[f64], c: C64) -> f64 {
    let m = support.len();
    let dir = |j: usize| C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / m as f64);
    let mut worst: f64 = 0.0;
    for j in 0..m {
        let (u1, u2) = (dir(j), dir((j + 1) % m));
        // lines Re(ζ ū) = h − Re(c ū) in coordinates centered at c
        let g1 = support[j] - (c * u1.conj()).re;
        let g2 = support[(j + 1) % m] - (c * u2.conj()).re;
        if !(g1 > 0.0 && g2 > 0.0) {
            return f64::INFINITY;
        }
        let det = u1.re * u2.im - u1.im * u2.re;
        let x = (g1 * u2.im - g2 * u1.im) / det;
        let y = (u1.re * g2 - u2.re * g1) / det;
        worst = worst.max(x.hypot(y));
    }
    worst
}

fn projection_functional(
    d: &DomainGeometry,
    nu: &[C64],
    z: &[C64],
    goal: Goal,
    start_center: C64,
) -> Option<ScalarFunctionalParam> {
    let nu = normalize(nu)?;
    let support = projected_support(d, &nu);
    if support.iter().any(|h| !h.is_finite()) {
        return None;
    }
    let make = |c: C64| ScalarFunctionalParam::ProjectionDisc {
        normal: nu.clone(),
        center: c,
        radius: projected_radius(&support, c),
        base: z.to_vec(),
    };
    let value = |v: &[f64]| {
        let f = make(C64::new(v[0], v[1]));
        match &f {
            ScalarFunctionalParam::ProjectionDisc { radius, .. } if radius.is_finite() => -score(&f, goal),
            _ => 0.0,
        }
    };
    let m = nelder_mead(value, &[start_center.re, start_center.im], 0.1, 80, 1e-10);
    let f = make(C64::new(m.x[0], m.x[1]));
    match &f {
        ScalarFunctionalParam::ProjectionDisc { radius, .. } if radius.is_finite() => Some(f),
        _ => None,
    }
}

/// Optimizes the projection direction `ν` (and, inside, the disc center)
/// for bounded convex domains.
fn projection_search(d: &DomainGeometry, z: &[C64], goal: Goal, starts: &[Vec<C64>]) -> Option<ScalarFunctionalParam> {
    // midpoint of the projection's extent along the real and imaginary axes
    let center_of = |nu: &[C64]| -> C64 {
        let h = |s: C64| d.support(&nu.iter().map(|c| c * s).collect::<Vec<_>>());
        let re = 0.5 * (h(C64::new(1.0, 0.0)) - h(C64::new(-1.0, 0.0)));
        let im = 0.5 * (h(C64::new(0.0, 1.0)) - h(C64::new(0.0, -1.0)));
        C64::new(re, im)
    };
    let value = |v: &[f64]| -> f64 {
        let nu: Vec<C64> = v.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
        let Some(nu) = normalize(&nu) else { return 0.0 };
        match projection_functional(d, &nu, z, goal, center_of(&nu)) {
            Some(f) => -score(&f, goal),
            None => 0.0,
        }
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for s in starts {
        let x0: Vec<f64> = s.iter().flat_map(|c| [c.re, c.im]).collect();
        let v0 = value(&x0);
        if best.as_ref().map_or(true, |b| v0 < b.0) {
            best = Some((v0, x0));
        }
    }
    let (_, x0) = best?;
    let m = nelder_mead(value, &x0, 0.1, 60 * x0.len(), 1e-9);
    let nu: Vec<C64> = m.x.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
    let nu = normalize(&nu)?;
    projection_functional(d, &nu, z, goal, center_of(&nu))
}

/// Maximizes the goal over the argument of the second zero of the proper
/// 2:1 maps: a grid followed by golden-section refinement.
fn proper_map_search(r: f64, z: C64, goal: Goal) -> ScalarFunctionalParam {
    let modulus = r / z.norm();
    let make = |theta: f64| ScalarFunctionalParam::AnnulusProperMap {
        inner_radius: r,
        base: z,
        second_zero: C64::from_polar(modulus, theta),
    };
    let value = |theta: f64| score(&make(theta), goal);
    let grid = 64;
    let h = std::f64::consts::TAU / grid as f64;
    let best = (0..grid)
        .map(|j| (value(h * j as f64), h * j as f64))
        .fold((f64::NEG_INFINITY, 0.0), |a, b| if b.0 > a.0 { b } else { a });
    let (t, v) = golden_section(|t| -value(t), best.1 - h, best.1 + h, 1e-10);
    let theta = if -v >= best.0 { t } else { best.1 };
    make(theta)
}

/// Verification samples per boundary circle for Laurent sup bounds.
const LAURENT_CERT_SAMPLES: usize = 4096;
const LAURENT_OPT_SAMPLES: usize = 256;

/// Maximizes `|f(w)|/sup|f|` (or `|f'(z)X|/sup|f|`) over Laurent
/// polynomials vanishing at `z`, then certifies the sup on both boundary
/// circles with a Lipschitz allowance.
fn laurent_search(r: f64, z: C64, goal: Goal, cfg: &SolverConfig) -> ScalarFunctionalParam {
    let deg = cfg.laurent_degree.max(1);
    let m = 2 * deg;
    let split = |a: &[C64]| (a[..deg].to_vec(), a[deg..].to_vec());
    let unit = |k: usize| {
        let mut a = vec![C64::new(0.0, 0.0); m];
        a[k] = C64::new(1.0, 0.0);
        a
    };
    let basis_at = |x: C64| -> Vec<C64> {
        (0..m)
            .map(|k| {
                let (p, q) = split(&unit(k));
                laurent_eval(r, z, &p, &q, x)
            })
            .collect()
    };
    let target: Vec<C64> = match goal {
        Goal::Point(w) => basis_at(w[0]),
        Goal::Tangent(x) => (0..m)
            .map(|k| {
                let (p, q) = split(&unit(k));
                laurent_derivative(r, z, &p, &q) * x[0]
            })
            .collect(),
    };
    let circle = |rho: f64, count: usize| -> Vec<C64> {
        (0..count)
            .map(|j| C64::from_polar(rho, std::f64::consts::TAU * j as f64 / count as f64))
            .collect()
    };
    let samples: Vec<Vec<C64>> = circle(1.0, LAURENT_OPT_SAMPLES)
        .into_iter()
        .chain(circle(r, LAURENT_OPT_SAMPLES))
        .map(basis_at)
        .collect();

    let coeffs = |v: &[f64]| -> Vec<C64> { v.chunks(2).map(|p| C64::new(p[0], p[1])).collect() };
    // −log|Σ a_k T_k| + (1/p) log mean |f_j|^p, with its exact gradient
    let oracle = |v: &[f64], p: f64, g: Option<&mut [f64]>| -> f64 {
        let a = coeffs(v);
        let fw: C64 = a.iter().zip(&target).map(|(x, y)| x * y).sum();
        let fj: Vec<C64> = samples
            .iter()
            .map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum())
            .collect();
        let top = fj.iter().map(|f| f.norm()).fold(0.0, f64::max);
        if fw.norm() == 0.0 || top == 0.0 {
            if let Some(g) = g {
                g.fill(0.0);
            }
            return f64::INFINITY;
        }
        let weights: Vec<f64> = fj.iter().map(|f| (f.norm() / top).powf(p)).collect();
        let total: f64 = weights.iter().sum();
        let value = -fw.norm().ln() + top.ln() + (total / fj.len() as f64).ln() / p;
        if let Some(g) = g {
            for k in 0..m {
                let t = fw.conj() * target[k] / fw.norm_sqr();
                let mut s = C64::new(0.0, 0.0);
                for (j, b) in samples.iter().enumerate() {
                    let fn2 = fj[j].norm_sqr();
                    if fn2 > 0.0 {
                        s += fj[j].conj() * b[k] * (weights[j] / fn2);
                    }
                }
                let s = s / total;
                g[2 * k] = -t.re + s.re;
                g[2 * k + 1] = t.im - s.im;
            }
        }
        value
    };

    let mut rng = rng_from_seed(cfg.seed ^ 0x5eed_1a57);
    let mut best: Option<(f64, Vec<C64>)> = None;
    let opts = BfgsOptions {
        max_iter: 300,
        grad_tol: 1e-10,
        f_tol: 1e-13,
        fd_step: 1e-6,
    };
    for restart in 0..cfg.restarts.clamp(1, 3) {
        let mut v = vec![0.0; 2 * m];
        v[0] = 1.0;
        if restart > 0 {
            for x in v.iter_mut() {
                *x += 0.3 * rng.sample::<f64, _>(StandardNormal);
            }
        }
        for p in [8.0, 32.0, 128.0, 512.0] {
            let res = bfgs_with_gradient(|x, g| oracle(x, p, g), &v, opts);
            if res.value.is_finite() {
                v = res.x;
            }
        }
        let a = coeffs(&v);
        let cert = laurent_sup_bound(r, z, &a[..deg], &a[deg..]);
        let fw: C64 = a.iter().zip(&target).map(|(x, y)| x * y).sum();
        let ratio = fw.norm() / cert;
        if best.as_ref().map_or(true, |b| ratio > b.0) {
            best = Some((ratio, a));
        }
    }
    let (_, a) = best.expect("at least one restart");
    let (positive, negative) = split(&a);
    let sup_bound = laurent_sup_bound(r, z, &positive, &negative);
    ScalarFunctionalParam::LaurentPolynomial {
        inner_radius: r,
        base: z,
        positive,
        negative,
        sup_bound,
    }
}

/// Upper bound for `sup |f|` over the closed annulus: the max over
/// samples on each boundary circle plus `h/2` times a bound on the angular
/// derivative there.
pub(crate) fn laurent_sup_bound(r: f64, z: C64, pos: &[C64], neg: &[C64]) -> f64 {
    let k = LAURENT_CERT_SAMPLES;
    let h = std::f64::consts::TAU / k as f64;
    let mut bound: f64 = 0.0;
    for rho in [1.0, r] {
        let lip: f64 = pos
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p.norm() * rho.powi(i as i32 + 1))
            .sum::<f64>()
            + neg
                .iter()
                .enumerate()
                .map(|(i, q)| (i + 1) as f64 * q.norm() * (r / rho).powi(i as i32 + 1))
                .sum::<f64>();
        let top = (0..k)
            .map(|j| laurent_eval(r, z, pos, neg, C64::from_polar(rho, h * j as f64)).norm())
            .fold(0.0, f64::max);
        bound = bound.max(top + 0.5 * h * lip);
    }
    bound
}

fn best_functional(d: &DomainGeometry, z: &[C64], goal: Goal, cfg: &SolverConfig) -> (f64, ScalarFunctionalParam) {
    let mut list = Vec::new();
    containers(d.kind(), d.dim(), &mut list);
    let mut cands: Vec<ScalarFunctionalParam> = list.iter().map(|c| container_functional(c, z, goal, cfg)).collect();
    // coordinate projections are already extremal on polydiscs
    let exact = matches!(
        d.kind(),
        DomainKind::UnitDisc {} | DomainKind::Ball { .. } | DomainKind::HalfPlane { .. } | DomainKind::Polydisc { .. }
    );
    if d.is_convex() && !exact {
        let hp = half_plane_search(d, z, goal);
        if d.is_bounded() {
            let mut starts = direction_starts(d, z, goal);
            if let Some(ScalarFunctionalParam::AffineProjection { normal, .. }) = &hp {
                starts.push(normal.clone());
            }
            cands.extend(projection_search(d, z, goal, &starts));
        }
        cands.extend(hp);
    }
    cands
        .into_iter()
        .map(|f| (score(&f, goal), f))
        .fold(
            (0.0, ScalarFunctionalParam::Zero),
            |best, c| if c.0 > best.0 { c } else { best },
        )
}

/// Certified lower bound for the Carathéodory distance `c_D(z, w)` and the
/// functional attaining it.
pub fn caratheodory_lower(
    d: &DomainGeometry,
    z: &Point,
    w: &Point,
    cfg: &SolverConfig,
) -> Result<(HyperbolicValue, ScalarFunctionalParam)> {
    check_points(d, &[z, w], cfg)?;
    if z == w {
        return Ok((HyperbolicValue::ZERO, ScalarFunctionalParam::Zero));
    }
    let (s, f) = best_functional(d, &z.0, Goal::Point(&w.0), cfg);
    Ok((HyperbolicValue::from_modulus(s.min(1.0 - f64::EPSILON)), f))
}

/// Certified lower bound for the Carathéodory metric `γ_D(z; X)`.
pub fn caratheodory_metric_lower(
    d: &DomainGeometry,
    t: &Tangent,
    cfg: &SolverConfig,
) -> Result<(f64, ScalarFunctionalParam)> {
    check_points(d, &[&t.base], cfg)?;
    d.check_dim(&t.direction)?;
    if t.norm() == 0.0 {
        return Ok((0.0, ScalarFunctionalParam::Zero));
    }
    Ok(best_functional(d, &t.base.0, Goal::Tangent(&t.direction), cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{model_distance, model_metric};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn exact_families_hit_oracles() {
        let cfg = SolverConfig::default();
        let disc = DomainGeometry::unit_disc();
        let (v, f) = caratheodory_lower(&disc, &Point::real(&[0.0]), &Point::real(&[0.5]), &cfg).unwrap();
        assert!((v.value() - 0.5 * 3f64.ln()).abs() < 1e-14);
        assert_eq!(f.family_name(), "ball_automorphism");
        let ball = DomainGeometry::unit_ball(2);
        let (v, _) = caratheodory_lower(&ball, &Point::zeros(2), &Point::real(&[0.5, 0.0]), &cfg).unwrap();
        assert!((v.value() - 0.549306).abs() < 1e-6);
        let z = Point(vec![c(0.3, -0.2), c(0.1, 0.5)]);
        let w = Point(vec![c(-0.4, 0.1), c(0.2, -0.3)]);
        let (v, _) = caratheodory_lower(&ball, &z, &w, &cfg).unwrap();
        let oracle = model_distance(&ball, &z, &w).unwrap().value();
        assert!(v.value() <= oracle + 1e-12 && v.value() > oracle - 1e-10);
        let poly = DomainGeometry::polydisc(&[1.0, 1.0]).unwrap();
        let (v, _) = caratheodory_lower(&poly, &Point::zeros(2), &Point::real(&[0.3, 0.7]), &cfg).unwrap();
        assert!(v.value() >= 0.867301 - 1e-6);
    }

    #[test]
    fn metric_examples() {
        let cfg = SolverConfig::default();
        let disc = DomainGeometry::unit_disc();
        let t = Tangent::new(Point::real(&[0.0]), vec![c(1.0, 0.0)]).unwrap();
        assert!((caratheodory_metric_lower(&disc, &t, &cfg).unwrap().0 - 1.0).abs() < 1e-15);
        let poly = DomainGeometry::polydisc(&[1.0, 1.0]).unwrap();
        let t = Tangent::new(Point::zeros(2), vec![c(0.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!((caratheodory_metric_lower(&poly, &t, &cfg).unwrap().0 - 2.0).abs() < 1e-15);
        let t = Tangent::new(Point::zeros(2), vec![c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(caratheodory_metric_lower(&poly, &t, &cfg).unwrap().0, 0.0);
        let ball = DomainGeometry::unit_ball(2);
        let t = Tangent::new(Point(vec![c(0.3, 0.1), c(-0.2, 0.4)]), vec![c(0.5, -1.0), c(0.2, 0.3)]).unwrap();
        let got = caratheodory_metric_lower(&ball, &t, &cfg).unwrap().0;
        let oracle = model_metric(&ball, &t).unwrap();
        assert!((got - oracle).abs() < 1e-12 * oracle);
    }

    #[test]
    fn annulus_families_beat_disc_and_stay_below() {
        let cfg = SolverConfig::default();
        let d = DomainGeometry::annulus(0.3).unwrap();
        let (z, w) = (Point::real(&[-0.6]), Point::real(&[0.6]));
        let (v, f) = caratheodory_lower(&d, &z, &w, &cfg).unwrap();
        let disc_only = crate::closed_forms::disc_distance(c(-0.6, 0.0), c(0.6, 0.0));
        let k = model_distance(&d, &z, &w).unwrap().value();
        assert!(v.value() > disc_only, "{} vs {}", v.value(), disc_only);
        assert!(v.value() < k, "{} vs {}", v.value(), k);
        assert_eq!(f.family_name(), "annulus_proper_map");
        let laurent = laurent_search(0.3, c(-0.6, 0.0), Goal::Point(&w.0), &cfg);
        assert!(score(&laurent, Goal::Point(&w.0)) <= score(&f, Goal::Point(&w.0)) + 1e-12);
        // certified sup really bounds |f| on a fresh grid
        for g in [&f, &laurent] {
            for j in 0..1000 {
                let th = 0.001 + j as f64 * 0.00628;
                for rho in [1.0, 0.3, 0.65] {
                    assert!(g.eval(&Point::scalar(C64::from_polar(rho, th))).norm() <= 1.0);
                }
            }
        }
    }

    #[test]
    fn ellipsoid_half_planes_are_sound() {
        let cfg = SolverConfig::default();
        let d = DomainGeometry::ellipsoid(&[1.0, 2.0]).unwrap();
        let z = Point(vec![c(0.2, 0.1), c(0.3, -0.2)]);
        let w = Point(vec![c(-0.5, 0.2), c(0.1, 0.4)]);
        let (lo, _) = caratheodory_lower(&d, &z, &w, &cfg).unwrap();
        let (hi, _) = super::super::lempert_upper(&d, &z, &w, &cfg).unwrap();
        assert!(lo.value() <= hi.value(), "{} > {}", lo.value(), hi.value());
        assert!(hi.value() - lo.value() < 0.1, "{} {}", lo.value(), hi.value());
    }
}
