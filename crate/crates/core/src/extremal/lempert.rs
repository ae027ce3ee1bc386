//! Upper bounds from analytic discs: the Lempert function and the
//! Kobayashi metric.
//!
//! A trial disc is `P(ζ) = Σ_{k≤N} c_k ζ^k` with a real base preimage `a`.
//! The free variables are `a`, one complex parameter (the target preimage
//! `b`, or the derivative scale `λ`) and `c_2..c_N`; `c_0` and `c_1` are
//! eliminated exactly from the interpolation conditions. Containment is a
//! quadratic penalty on the boundary circle, tightened by continuation, and
//! the final disc is certified by [`disc::best_scale`].

use rand::Rng as _;
use rand_distr::StandardNormal;

use super::disc::{best_scale, rescale, rotate, AnalyticDiscParam, DiscChart, Region, Strip};
use super::{check_points, SolverConfig};
use crate::closed_forms::{disc_distance, HyperbolicValue};
use crate::domains::{rng_from_seed, DomainGeometry, DomainKind};
use crate::error::{Error, Result};
use crate::optim::{bfgs_with_gradient, nelder_mead, BfgsOptions};
use crate::point::{normalize, Point, Tangent, C64};

const PENALTY_STAGES: [f64; 4] = [1e2, 1e4, 1e6, 1e8];

const STAGE_OPTIONS: BfgsOptions = BfgsOptions {
    max_iter: 120,
    grad_tol: 1e-8,
    f_tol: 1e-11,
    fd_step: 1e-6,
};

fn cz(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn squash(p: f64, q: f64) -> C64 {
    let r = p.hypot(q);
    let f = if r < 1e-12 { 1.0 } else { r.tanh() / r };
    cz(p * f, q * f)
}

fn unsquash(b: C64) -> (f64, f64) {
    let m = b.norm();
    if m < 1e-12 {
        return (b.re, b.im);
    }
    let f = m.min(1.0 - 1e-15).atanh() / m;
    (b.re * f, b.im * f)
}

/// Which interpolation conditions pin `c_0` and `c_1`.
#[derive(Clone, Copy)]
enum Problem<'a> {
    /// `P(a) = z`, `P(b) = w`.
    TwoPoint { z: &'a [C64], w: &'a [C64] },
    /// `P(a) = z`, `P'(a) = λ·x` with `x` a unit vector.
    Tangent { z: &'a [C64], x: &'a [C64] },
}

/// A trial disc in the solver's own coordinates.
#[derive(Clone, Debug)]
struct Trial {
    a: f64,
    /// Target preimage or derivative scale, depending on the problem.
    p: C64,
    coeffs: Vec<Vec<C64>>,
}

struct Setup<'a> {
    d: &'a dyn Region,
    problem: Problem<'a>,
    n: usize,
    degree: usize,
    /// `ζ_j^k` on the penalty circle.
    powers: Vec<Vec<C64>>,
}

impl<'a> Setup<'a> {
    fn new(d: &'a dyn Region, problem: Problem<'a>, cfg: &SolverConfig) -> Self {
        let m = cfg.boundary_samples;
        let degree = cfg.degree.max(1);
        let powers = (0..m)
            .map(|j| {
                let zeta = C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / m as f64);
                let mut acc = cz(1.0, 0.0);
                (0..=degree)
                    .map(|_| {
                        let v = acc;
                        acc *= zeta;
                        v
                    })
                    .collect()
            })
            .collect();
        Setup {
            d,
            problem,
            n: d.dim(),
            degree,
            powers,
        }
    }

    fn encode(&self, t: &Trial) -> Vec<f64> {
        let mut x = vec![t.a.clamp(-1.0 + 1e-15, 1.0 - 1e-15).atanh()];
        match self.problem {
            Problem::TwoPoint { .. } => {
                let (p, q) = unsquash(t.p);
                x.extend([p, q]);
            }
            Problem::Tangent { .. } => x.extend([t.p.norm().ln(), t.p.arg()]),
        }
        for k in 2..=self.degree {
            for i in 0..self.n {
                let c = t.coeffs.get(k).map_or(cz(0.0, 0.0), |ck| ck[i]);
                x.extend([c.re, c.im]);
            }
        }
        x
    }

    fn decode(&self, x: &[f64]) -> Option<Trial> {
        let n = self.n;
        let a = x[0].tanh();
        let p = match self.problem {
            Problem::TwoPoint { .. } => squash(x[1], x[2]),
            Problem::Tangent { .. } => C64::from_polar(x[1].exp(), x[2]),
        };
        let mut coeffs = vec![vec![cz(0.0, 0.0); n]; self.degree + 1];
        for k in 2..=self.degree {
            for i in 0..n {
                let o = 3 + 2 * (n * (k - 2) + i);
                coeffs[k][i] = cz(x[o], x[o + 1]);
            }
        }
        let ac = cz(a, 0.0);
        match self.problem {
            Problem::TwoPoint { z, w } => {
                let b = p;
                if (b - ac).norm() < 1e-12 {
                    return None;
                }
                for i in 0..n {
                    let mut tail = cz(0.0, 0.0);
                    for (k, ck) in coeffs.iter().enumerate().skip(2) {
                        tail += ck[i] * (b.powu(k as u32) - ac.powu(k as u32));
                    }
                    coeffs[1][i] = (w[i] - z[i] - tail) / (b - ac);
                }
            }
            Problem::Tangent { x: dir, .. } => {
                for i in 0..n {
                    let mut tail = cz(0.0, 0.0);
                    for (k, ck) in coeffs.iter().enumerate().skip(2) {
                        tail += ck[i] * k as f64 * ac.powu(k as u32 - 1);
                    }
                    coeffs[1][i] = p * dir[i] - tail;
                }
            }
        }
        let z = match self.problem {
            Problem::TwoPoint { z, .. } | Problem::Tangent { z, .. } => z,
        };
        for i in 0..n {
            let mut tail = coeffs[1][i] * a;
            for (k, ck) in coeffs.iter().enumerate().skip(2) {
                tail += ck[i] * ac.powu(k as u32);
            }
            coeffs[0][i] = z[i] - tail;
        }
        Some(Trial { a, p, coeffs })
    }

    /// Quantity minimized before the penalty: `k_Δ(a, b)` for two points,
    /// `−log(|λ|(1−a²))` for tangents. Both are increasing in the bound.
    fn core_value(&self, t: &Trial) -> f64 {
        match self.problem {
            Problem::TwoPoint { .. } => disc_distance(cz(t.a, 0.0), t.p),
            Problem::Tangent { .. } => -(t.p.norm().ln() + ((1.0 - t.a) * (1.0 + t.a)).ln()),
        }
    }

    fn penalty(&self, coeffs: &[Vec<C64>]) -> f64 {
        let mut total = 0.0;
        let mut p = vec![cz(0.0, 0.0); self.n];
        for row in &self.powers {
            for (i, pi) in p.iter_mut().enumerate() {
                *pi = cz(0.0, 0.0);
                for (ck, zk) in coeffs.iter().zip(row) {
                    *pi += ck[i] * zk;
                }
            }
            let v = self.d.penalty(&p);
            if v > 0.0 {
                total += v * v;
            }
        }
        total / self.powers.len() as f64
    }

    /// Objective with gradient. The three shape parameters are differenced
    /// numerically; for `c_2..c_N` the objective is the penalty composed
    /// with a map linear in the coefficients, so their gradient comes from
    /// the penalty gradient at the active boundary samples.
    fn oracle(&self, x: &[f64], mu: f64, g: Option<&mut [f64]>) -> f64 {
        let f = self.objective(x, mu);
        let Some(g) = g else { return f };
        g.fill(0.0);
        if !f.is_finite() {
            return f;
        }
        let mut xp = x.to_vec();
        for i in 0..3 {
            let h = 1e-6 * x[i].abs().max(1.0);
            xp[i] = x[i] + h;
            let fp = self.objective(&xp, mu);
            xp[i] = x[i] - h;
            let fm = self.objective(&xp, mu);
            xp[i] = x[i];
            g[i] = if fp.is_finite() && fm.is_finite() {
                (fp - fm) / (2.0 * h)
            } else {
                0.0
            };
        }
        let Some(t) = self.decode(x) else { return f };
        let n = self.n;
        let ac = cz(t.a, 0.0);
        let a_pow: Vec<C64> = (0..=self.degree).map(|k| ac.powu(k as u32)).collect();
        let b_pow: Vec<C64> = (0..=self.degree).map(|k| t.p.powu(k as u32)).collect();
        let scale = 2.0 * mu / self.powers.len() as f64;
        let mut p = vec![cz(0.0, 0.0); n];
        let mut grad_p = vec![cz(0.0, 0.0); n];
        for row in &self.powers {
            for (i, pi) in p.iter_mut().enumerate() {
                *pi = t.coeffs.iter().zip(row).map(|(ck, zk)| ck[i] * zk).sum();
            }
            let v = self.d.penalty(&p);
            if v <= 0.0 {
                continue;
            }
            for i in 0..n {
                let h = 1e-7 * p[i].norm().max(1.0);
                let orig = p[i];
                let mut diff = |dz: C64| {
                    p[i] = orig + dz;
                    let up = self.d.penalty(&p);
                    p[i] = orig - dz;
                    let dn = self.d.penalty(&p);
                    p[i] = orig;
                    (up - dn) / (2.0 * h)
                };
                grad_p[i] = cz(diff(cz(h, 0.0)), diff(cz(0.0, h)));
            }
            let zeta = row[1];
            for k in 2..=self.degree {
                let e = match self.problem {
                    Problem::TwoPoint { .. } => row[k] - a_pow[k] - (b_pow[k] - a_pow[k]) * (zeta - ac) / (t.p - ac),
                    Problem::Tangent { .. } => row[k] - a_pow[k] - a_pow[k - 1] * k as f64 * (zeta - ac),
                };
                for i in 0..n {
                    let q = grad_p[i].conj() * e * (scale * v);
                    let o = 3 + 2 * (n * (k - 2) + i);
                    g[o] += q.re;
                    g[o + 1] -= q.im;
                }
            }
        }
        f
    }

    fn objective(&self, x: &[f64], mu: f64) -> f64 {
        match self.decode(x) {
            Some(t) => self.core_value(&t) + mu * self.penalty(&t.coeffs),
            None => f64::INFINITY,
        }
    }

    /// Certified disc and the bound it proves, `None` if no scale works.
    fn certify(&self, t: &Trial) -> Option<(f64, AnalyticDiscParam)> {
        let s_min = match self.problem {
            Problem::TwoPoint { .. } => t.a.abs().max(t.p.norm()),
            Problem::Tangent { .. } => t.a.abs(),
        };
        let (s, margin) = best_scale(self.d, &t.coeffs, s_min)?;
        let a = t.a / s;
        let (value, target) = match self.problem {
            Problem::TwoPoint { .. } => {
                let b = t.p / s;
                (disc_distance(cz(a, 0.0), b), Some(b))
            }
            Problem::Tangent { .. } => (1.0 / (s * t.p.norm() * (1.0 - a) * (1.0 + a)), None),
        };
        if !value.is_finite() {
            return None;
        }
        Some((
            value,
            AnalyticDiscParam {
                dimension: self.n,
                coefficients: rescale(&t.coeffs, s),
                chart: DiscChart::Identity,
                base_preimage: cz(a, 0.0),
                target_preimage: target,
                boundary_samples: self.powers.len(),
                margin,
                certified: true,
            },
        ))
    }

    fn optimize(&self, start: &Trial) -> Trial {
        let mut x = self.encode(start);
        for mu in PENALTY_STAGES {
            let m = bfgs_with_gradient(|y, g| self.oracle(y, mu, g), &x, STAGE_OPTIONS);
            if m.value.is_finite() {
                x = m.x;
            }
        }
        self.decode(&x).unwrap_or_else(|| start.clone())
    }
}

/// Normalizes a trial so the base preimage is real and nonnegative.
fn with_real_base(a: C64, p: C64, coeffs: Vec<Vec<C64>>, tangent: bool) -> Trial {
    let phi = a.arg();
    let u = C64::from_polar(1.0, -phi);
    let coeffs = rotate(&coeffs, phi);
    // P̃(ζ) = P(e^{iφ}ζ): preimages rotate back, derivatives pick up e^{iφ}
    let p = if tangent { p / u } else { p * u };
    Trial { a: a.norm(), p, coeffs }
}

/// Largest radius `R ≤ r_max` with the circle `z + (c + R e^{iθ}) v` inside
/// `D` at 64 sample angles. Only used to seed the optimizer.
fn slice_radius(d: &dyn Region, z: &[C64], v: &[C64], c: C64, r_max: f64) -> f64 {
    let at = |lam: C64| -> Vec<C64> { z.iter().zip(v).map(|(a, b)| a + lam * b).collect() };
    if !d.is_inside(&at(c)) {
        return 0.0;
    }
    let ok =
        |r: f64| (0..64).all(|j| d.is_inside(&at(c + C64::from_polar(r, std::f64::consts::TAU * j as f64 / 64.0))));
    crate::optim::bisect_last_true(ok, 0.0, r_max, 1e-9 * r_max)
}

/// Score offset for slices that miss a pinned point; keeps the search
/// finite so it can walk back to feasible slices.
const INFEASIBLE: f64 = 1e6;

/// Affine discs in the complex line `z + C·v`: picks the center `c` and
/// radius `R` of a sampled-inside disc minimizing `score(c, R)`.
fn best_slice<F: Fn(C64, f64) -> f64>(
    d: &dyn Region,
    z: &[C64],
    v: &[C64],
    centers: &[C64],
    score: F,
) -> Option<(C64, f64)> {
    let vn = crate::point::norm(v);
    let r_max = match d.extent() {
        Some(r) => 4.0 * r / vn,
        None => 1e3 * (1.0 + crate::point::norm(z)) / vn,
    };
    let eval = |c: C64| {
        let r = slice_radius(d, z, v, c, r_max);
        if r > 0.0 {
            score(c, r)
        } else {
            f64::INFINITY
        }
    };
    let mut best = (f64::INFINITY, cz(0.0, 0.0));
    for &c in centers {
        let s = eval(c);
        if s < best.0 {
            best = (s, c);
        }
    }
    if !best.0.is_finite() {
        return None;
    }
    let m = nelder_mead(|x| eval(cz(x[0], x[1])), &[best.1.re, best.1.im], 0.05, 120, 1e-7);
    let c = if m.value < best.0 { cz(m.x[0], m.x[1]) } else { best.1 };
    Some((c, slice_radius(d, z, v, c, r_max)))
}

fn grid(re: (f64, f64, usize), im: (f64, f64, usize)) -> Vec<C64> {
    let lin = |(a, b, n): (f64, f64, usize), i: usize| a + (b - a) * i as f64 / (n - 1) as f64;
    (0..re.2)
        .flat_map(|i| (0..im.2).map(move |j| cz(lin(re, i), lin(im, j))))
        .collect()
}

fn two_point_starts(d: &dyn Region, z: &[C64], w: &[C64]) -> Vec<Trial> {
    let mut out = Vec::new();
    let v: Vec<C64> = w.iter().zip(z).map(|(a, b)| a - b).collect();
    let score = |c: C64, r: f64| {
        let (a, b) = (-c / r, (cz(1.0, 0.0) - c) / r);
        if a.norm() < 1.0 && b.norm() < 1.0 {
            disc_distance(a, b)
        } else {
            INFEASIBLE + a.norm().max(b.norm())
        }
    };
    if let Some((c, r)) = best_slice(d, z, &v, &grid((-1.0, 2.0, 13), (-0.5, 0.5, 5)), score) {
        let (a, b) = (-c / r, (cz(1.0, 0.0) - c) / r);
        if a.norm() < 1.0 && b.norm() < 1.0 {
            let c0: Vec<C64> = z.iter().zip(&v).map(|(a, b)| a + c * b).collect();
            let c1: Vec<C64> = v.iter().map(|b| b * r).collect();
            out.push(with_real_base(a, b, vec![c0, c1], false));
        }
    }
    out
}

fn tangent_starts(d: &dyn Region, z: &[C64], x: &[C64]) -> Vec<Trial> {
    let mut out = Vec::new();
    let score = |c: C64, r: f64| {
        let q = c.norm() / r;
        if q < 1.0 {
            1.0 / (r * (1.0 - q) * (1.0 + q))
        } else {
            INFEASIBLE + q
        }
    };
    if let Some((c, r)) =
        best_slice(d, z, x, &grid((-1.0, 1.0, 9), (-1.0, 1.0, 9)), score).filter(|(c, r)| c.norm() < *r)
    {
        let c0: Vec<C64> = z.iter().zip(x).map(|(a, b)| a + c * b).collect();
        let c1: Vec<C64> = x.iter().map(|b| b * r).collect();
        out.push(with_real_base(-c / r, cz(r, 0.0), vec![c0, c1], true));
    }
    out
}

/// Runs the multistart solve. Returns the best certified (value, disc) or a
/// solver error carrying the best infeasible objective. Trials are
/// re-interpolated and certified by `certifier`, which may pin slightly
/// different data than the setup being optimized.
fn solve(setup: &Setup, certifier: &Setup, starts: Vec<Trial>, cfg: &SolverConfig) -> Result<(f64, AnalyticDiscParam)> {
    if starts.is_empty() {
        return Err(Error::Solver {
            message: "no initial disc found".into(),
            best: None,
        });
    }
    let mut best: Option<(f64, AnalyticDiscParam)> = None;
    let mut best_infeasible = f64::INFINITY;
    let mut consider = |t: &Trial, best: &mut Option<(f64, AnalyticDiscParam)>| {
        let Some(t) = certifier.decode(&certifier.encode(t)) else {
            return;
        };
        let t = &t;
        if let Some((v, disc)) = certifier.certify(t) {
            if best.as_ref().map_or(true, |b| v < b.0) {
                *best = Some((v, disc));
            }
        } else {
            best_infeasible = best_infeasible.min(setup.core_value(t));
        }
    };
    let mut rng = rng_from_seed(cfg.seed);
    for r in 0..cfg.restarts {
        let base = &starts[r % starts.len()];
        let mut start = base.clone();
        if r >= starts.len() {
            let spread = 0.05 * crate::point::norm(&base.coeffs[1]).max(1e-3);
            let mut x = setup.encode(base);
            x[0] += 0.1 * rng.sample::<f64, _>(StandardNormal);
            x[1] += 0.1 * rng.sample::<f64, _>(StandardNormal);
            x[2] += 0.1 * rng.sample::<f64, _>(StandardNormal);
            for xi in x.iter_mut().skip(3) {
                *xi += spread * rng.sample::<f64, _>(StandardNormal);
            }
            match setup.decode(&x) {
                Some(t) => start = t,
                None => continue,
            }
        } else {
            let mut padded = start.coeffs.clone();
            padded.resize(setup.degree + 1, vec![cz(0.0, 0.0); setup.n]);
            padded.truncate(setup.degree + 1);
            start.coeffs = padded;
            consider(&start, &mut best);
        }
        let t = setup.optimize(&start);
        consider(&t, &mut best);
    }
    best.ok_or(Error::Solver {
        message: "no disc could be certified inside the domain".into(),
        best: best_infeasible.is_finite().then_some(best_infeasible),
    })
}

/// Degrees above this are warm-started from a solve at half the degree, so
/// raising the degree cannot make the certified value worse.
const WARM_DEGREE: usize = 8;

fn coarser(cfg: &SolverConfig) -> Option<SolverConfig> {
    (cfg.degree > WARM_DEGREE).then(|| SolverConfig {
        degree: (cfg.degree / 2).max(WARM_DEGREE),
        ..cfg.clone()
    })
}

fn two_point(
    d: &dyn Region,
    z: &[C64],
    w: &[C64],
    cfg: &SolverConfig,
    extra: Vec<Trial>,
) -> Result<(f64, AnalyticDiscParam)> {
    let setup = Setup::new(d, Problem::TwoPoint { z, w }, cfg);
    let mut starts = Vec::new();
    if let Some(coarse) = coarser(cfg) {
        if let Ok((_, disc)) = two_point(d, z, w, &coarse, extra.clone()) {
            let p = disc.target_preimage.unwrap_or_default();
            starts.push(Trial {
                a: disc.base_preimage.re,
                p,
                coeffs: disc.coefficients,
            });
        }
    }
    starts.extend(two_point_starts(d, z, w));
    starts.extend(extra);
    if starts.is_empty() {
        starts = continuation_starts(d, z, w, cfg);
    }
    solve(&setup, &setup, starts, cfg)
}

const CONTINUATION_STEPS: usize = 4;

/// Seeds for pairs whose complex line holds no round disc through both
/// points, as when the slice is a thin lens: solves for `w_t = z + t(w − z)`
/// with `t` growing toward 1, each step seeded by the previous disc.
fn continuation_starts(d: &dyn Region, z: &[C64], w: &[C64], cfg: &SolverConfig) -> Vec<Trial> {
    let at = |t: f64| -> Vec<C64> { z.iter().zip(w).map(|(a, b)| a + (b - a) * t).collect() };
    let mut t = 0.5;
    while two_point_starts(d, z, &at(t)).is_empty() {
        t *= 0.5;
        if t < 1e-3 {
            return Vec::new();
        }
    }
    let step = (1.0 - t) / CONTINUATION_STEPS as f64;
    let mut prev = Vec::new();
    for k in 0..CONTINUATION_STEPS {
        let wt = at(t + k as f64 * step);
        let setup = Setup::new(d, Problem::TwoPoint { z, w: &wt }, cfg);
        let mut starts = two_point_starts(d, z, &wt);
        starts.append(&mut prev);
        match solve(&setup, &setup, starts, cfg) {
            Ok((_, disc)) => {
                let p = disc.target_preimage.unwrap_or_default();
                prev.push(Trial {
                    a: disc.base_preimage.re,
                    p,
                    coeffs: disc.coefficients,
                });
            }
            Err(_) => return Vec::new(),
        }
    }
    prev
}

/// Starts for two points of the strip `lo < Re s < hi` from truncations of
/// the strip's Riemann map `ζ ↦ m + iT + i(2W'/π)·artanh(ρζ)`, run along
/// the imaginary axis. A narrower width `W'` leaves room for the overshoot
/// of the truncated series.
fn strip_starts(strip: &Strip, z: C64, w: C64, degree: usize) -> Vec<Trial> {
    let width = strip.hi - strip.lo;
    let mid = 0.5 * (strip.hi + strip.lo);
    let t = 0.5 * (z.im + w.im);
    let mut out = Vec::new();
    for shrink in [0.8, 0.9] {
        let wp = shrink * width;
        let k = 2.0 * wp / std::f64::consts::PI;
        let inverse = |s: C64| ((s - cz(mid, t)) / cz(0.0, k)).tanh();
        let (u, v) = (inverse(z), inverse(w));
        for rho in [0.9, 0.95, 0.98, 0.99] {
            let (a, b) = (u / rho, v / rho);
            if a.norm() >= 0.999 || b.norm() >= 0.999 {
                continue;
            }
            let mut coeffs = vec![vec![cz(mid, t)]];
            for j in 1..=degree {
                let c = if j % 2 == 1 {
                    cz(0.0, k) * (rho.powi(j as i32) / j as f64)
                } else {
                    cz(0.0, 0.0)
                };
                coeffs.push(vec![c]);
            }
            out.push(with_real_base(a, b, coeffs, false));
        }
    }
    out
}

/// Truncated Taylor series of the strip's Riemann map
/// `ζ ↦ m + iT + ik·artanh(ρζ)`, `k = 2σW/π`, which maps onto the centered
/// strip of width `σW`. These are certified analytically rather than on a
/// grid: the tail beyond degree `N` is at most `kρ^{N+1}/((N+1)(1−ρ))` on the
/// closed disc, so the degree can be large and `σ, ρ` close to 1. Points far
/// apart along the strip need preimages near the circle, out of reach of
/// low-degree discs.
fn covering_discs(strip: &Strip, z: C64, w: C64) -> Vec<(Trial, f64)> {
    let width = strip.hi - strip.lo;
    let mid = 0.5 * (strip.hi + strip.lo);
    let t = 0.5 * (z.im + w.im);
    // narrowest admissible width fraction
    let sigma_min = 2.0 * (z.re - mid).abs().max((w.re - mid).abs()) / width;
    let gap = 1.0 - sigma_min;
    let mut out = Vec::new();
    for sigma in [0.97, 0.99, 0.997, 1.0 - 0.5 * gap, 1.0 - 0.2 * gap] {
        if sigma <= sigma_min + 0.1 * gap {
            continue;
        }
        let k = 2.0 * sigma * width / std::f64::consts::PI;
        // half of the spare width goes to the tail, half to re-interpolation
        let room = 0.25 * (1.0 - sigma) * width;
        let inverse = |s: C64| ((s - cz(mid, t)) / cz(0.0, k)).tanh();
        let (u, v) = (inverse(z), inverse(w));
        for rho in [0.99, 0.995, 0.998, 0.999] {
            let (a, b) = (u / rho, v / rho);
            if a.norm() >= 0.9999 || b.norm() >= 0.9999 {
                continue;
            }
            let tail = |n: usize| k * rho.powi(n as i32 + 1) / ((n + 1) as f64 * (1.0 - rho));
            let Some(degree) = (1..=MAX_COVERING_DEGREE).step_by(2).find(|&n| tail(n) <= room) else {
                continue;
            };
            let mut coeffs = vec![vec![cz(mid, t)]];
            for j in 1..=degree {
                let c = if j % 2 == 1 {
                    cz(0.0, k) * (rho.powi(j as i32) / j as f64)
                } else {
                    cz(0.0, 0.0)
                };
                coeffs.push(vec![c]);
            }
            out.push((
                with_real_base(a, b, coeffs, false),
                0.5 * (1.0 - sigma) * width - tail(degree),
            ));
        }
    }
    out
}

const MAX_COVERING_DEGREE: usize = 8001;

/// Certifies [`covering_discs`]: after `c_0, c_1` are re-solved exactly the
/// disc stays in the strip when the changes `|Δc_0| + |Δc_1|` fit in the
/// spare width left by the tail.
fn certify_covering(strip: &Strip, z: C64, w: C64, cfg: &SolverConfig) -> Option<(f64, AnalyticDiscParam)> {
    let (zs, ws) = ([z], [w]);
    let mut best: Option<(f64, AnalyticDiscParam)> = None;
    for (trial, spare) in covering_discs(strip, z, w) {
        let local = SolverConfig {
            degree: trial.coeffs.len() - 1,
            boundary_samples: 8,
            ..cfg.clone()
        };
        let setup = Setup::new(strip, Problem::TwoPoint { z: &zs, w: &ws }, &local);
        let Some(t) = setup.decode(&setup.encode(&trial)) else {
            continue;
        };
        let shift = (t.coeffs[0][0] - trial.coeffs[0][0]).norm() + (t.coeffs[1][0] - trial.coeffs[1][0]).norm();
        if shift >= spare {
            continue;
        }
        let value = disc_distance(cz(t.a, 0.0), t.p);
        if best.as_ref().map_or(true, |b| value < b.0) {
            best = Some((
                value,
                AnalyticDiscParam {
                    dimension: 1,
                    coefficients: t.coeffs,
                    chart: DiscChart::Identity,
                    base_preimage: cz(t.a, 0.0),
                    target_preimage: Some(t.p),
                    boundary_samples: cfg.boundary_samples,
                    margin: spare - shift,
                    certified: true,
                },
            ));
        }
    }
    best
}

/// The optimizer sees `x` snapped to a 2^-32 grid, so directions that agree
/// up to rounding follow the same path; certification uses `x` itself.
fn tangent(d: &dyn Region, z: &[C64], x: &[C64], cfg: &SolverConfig) -> Result<(f64, AnalyticDiscParam)> {
    let snap = |v: f64| (v * 4294967296.0).round() / 4294967296.0;
    let snapped: Vec<C64> = x.iter().map(|c| cz(snap(c.re), snap(c.im))).collect();
    let setup = Setup::new(d, Problem::Tangent { z, x: &snapped }, cfg);
    let certifier = Setup::new(d, Problem::Tangent { z, x }, cfg);
    let mut starts = Vec::new();
    if let Some(coarse) = coarser(cfg) {
        if let Ok((_, disc)) = tangent(d, z, x, &coarse) {
            let p = crate::point::hdot(&disc.poly_derivative(disc.base_preimage), x);
            starts.push(Trial {
                a: disc.base_preimage.re,
                p,
                coeffs: disc.coefficients,
            });
        }
    }
    starts.extend(tangent_starts(d, z, &snapped));
    solve(&setup, &certifier, starts, cfg)
}

/// Certified upper bound for the Lempert function `l_D(z, w)` and the disc
/// proving it.
///
/// On the annulus the disc is built in logarithmic coordinates, where the
/// domain is a strip; the two lifts of `w` nearest to `log z` are tried.
pub fn lempert_upper(
    d: &DomainGeometry,
    z: &Point,
    w: &Point,
    cfg: &SolverConfig,
) -> Result<(HyperbolicValue, AnalyticDiscParam)> {
    check_points(d, &[z, w], cfg)?;
    if z == w {
        return Ok((
            HyperbolicValue::ZERO,
            AnalyticDiscParam::constant(z, cfg.boundary_samples),
        ));
    }
    let (v, disc) = match d.kind() {
        DomainKind::Annulus { inner_radius } => {
            let strip = Strip {
                lo: inner_radius.ln(),
                hi: 0.0,
            };
            let sz = z.0[0].ln();
            let sw = w.0[0].ln();
            let turn = (sz.im - sw.im) / std::f64::consts::TAU;
            let mut best: Result<(f64, AnalyticDiscParam)> = Err(Error::Solver {
                message: "no lift solved".into(),
                best: None,
            });
            for k in [turn.floor(), turn.ceil() + if turn.fract() == 0.0 { 1.0 } else { 0.0 }] {
                let lift = sw + C64::new(0.0, std::f64::consts::TAU * k);
                let extra = strip_starts(&strip, sz, lift, cfg.degree.max(1));
                let solved = two_point(&strip, &[sz], &[lift], cfg, extra).ok();
                for (v, mut disc) in solved.into_iter().chain(certify_covering(&strip, sz, lift, cfg)) {
                    disc.chart = DiscChart::Exp;
                    if best.as_ref().map_or(true, |b| v < b.0) {
                        best = Ok((v, disc));
                    }
                }
            }
            best?
        }
        _ => two_point(d, &z.0, &w.0, cfg, Vec::new())?,
    };
    Ok((HyperbolicValue::new(v)?, disc))
}

/// Fixes the phase of a unit vector so the result depends only on the
/// complex line it spans.
fn canonical_direction(x: &[C64]) -> Vec<C64> {
    let lead = x.iter().copied().fold(
        cz(0.0, 0.0),
        |m, c| if c.norm() > m.norm() * (1.0 + 1e-12) { c } else { m },
    );
    let u = lead.conj() / lead.norm();
    x.iter().map(|c| c * u).collect()
}

/// Certified upper bound for the Kobayashi metric `κ_D(z; X)`.
///
/// The solve only sees the unit direction with canonical phase, so the
/// result is exactly `|X|` times a function of the complex line of `X`.
pub fn kobayashi_metric_upper(d: &DomainGeometry, t: &Tangent, cfg: &SolverConfig) -> Result<(f64, AnalyticDiscParam)> {
    check_points(d, &[&t.base], cfg)?;
    d.check_dim(&t.direction)?;
    if normalize(&t.direction).is_none() {
        return Ok((0.0, AnalyticDiscParam::constant(&t.base, cfg.boundary_samples)));
    }
    match d.kind() {
        DomainKind::Annulus { inner_radius } => {
            // log chart: the direction becomes X/z
            let strip = Strip {
                lo: inner_radius.ln(),
                hi: 0.0,
            };
            let z = t.base.0[0];
            let (v, mut disc) = tangent(&strip, &[z.ln()], &[cz(1.0, 0.0)], cfg)?;
            disc.chart = DiscChart::Exp;
            Ok((t.norm() / z.norm() * v, disc))
        }
        _ => {
            let unit = canonical_direction(&normalize(&t.direction).unwrap());
            let (v, disc) = tangent(d, &t.base.0, &unit, cfg)?;
            Ok((t.norm() * v, disc))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_matches_differences() {
        let d = DomainGeometry::ellipsoid(&[1.0, 2.0]).unwrap();
        let cfg = SolverConfig {
            degree: 4,
            ..Default::default()
        };
        let z = [cz(0.1, 0.2), cz(-0.3, 0.1)];
        let w = [cz(0.5, -0.1), cz(0.2, 0.3)];
        let setup = Setup::new(&d, Problem::TwoPoint { z: &z, w: &w }, &cfg);
        let x: Vec<f64> = (0..3 + 2 * 2 * 3).map(|i| 0.3 * ((i as f64) * 1.7).sin()).collect();
        let mut g = vec![0.0; x.len()];
        let f = setup.oracle(&x, 1e3, Some(&mut g));
        assert!(f > 0.0);
        let mut xp = x.clone();
        for i in 3..x.len() {
            let h = 1e-6;
            xp[i] = x[i] + h;
            let fp = setup.objective(&xp, 1e3);
            xp[i] = x[i] - h;
            let fm = setup.objective(&xp, 1e3);
            xp[i] = x[i];
            let fd = (fp - fm) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-4 * (1.0 + fd.abs()), "{i}: {fd} vs {}", g[i]);
        }
    }
    use crate::closed_forms::{model_distance, model_metric};

    #[test]
    fn disc_and_ball_examples() {
        let cfg = SolverConfig::default();
        let disc = DomainGeometry::unit_disc();
        let (v, phi) = lempert_upper(&disc, &Point::real(&[0.0]), &Point::real(&[0.5]), &cfg).unwrap();
        assert!((v.value() - 0.549306).abs() < 1e-3);
        assert!(phi.certified);
        let ball = DomainGeometry::unit_ball(2);
        let (v, _) = lempert_upper(&ball, &Point::zeros(2), &Point::real(&[0.5, 0.0]), &cfg).unwrap();
        assert!((v.value() - 0.549306).abs() < 1e-3);
        let z = Point::real(&[0.3]);
        assert_eq!(lempert_upper(&disc, &z, &z, &cfg).unwrap().0.value(), 0.0);
    }

    #[test]
    fn sound_against_oracles() {
        let cfg = SolverConfig::default();
        // (domain, z, w, how close the bound must get)
        for (d, z, w, slack) in [
            (DomainGeometry::unit_disc(), vec![0.9, 0.0], vec![0.1, 0.9], 1e-3),
            (
                DomainGeometry::polydisc(&[1.0, 1.0]).unwrap(),
                vec![0.0, 0.0, 0.0, 0.0],
                vec![0.3, 0.0, 0.7, 0.0],
                1e-3,
            ),
            (
                DomainGeometry::annulus(0.3).unwrap(),
                vec![-0.6, 0.0],
                vec![0.6, 0.0],
                0.5,
            ),
        ] {
            let z = Point(z.chunks(2).map(|c| cz(c[0], c[1])).collect());
            let w = Point(w.chunks(2).map(|c| cz(c[0], c[1])).collect());
            let (v, disc) = lempert_upper(&d, &z, &w, &cfg).unwrap();
            let oracle = model_distance(&d, &z, &w).unwrap().value();
            assert!(
                v.value() >= oracle - 1e-12 && v.value() <= oracle + slack,
                "{}: {} vs {oracle}",
                d.name(),
                v
            );
            assert!(disc.eval(disc.base_preimage).dist(&z) < 1e-9);
            assert!(disc.eval(disc.target_preimage.unwrap()).dist(&w) < 1e-9);
        }
        for (d, z, x) in [
            (DomainGeometry::unit_disc(), 0.5, vec![cz(1.0, 0.0)]),
            (DomainGeometry::annulus(0.3).unwrap(), 0.6, vec![cz(0.0, 1.0)]),
        ] {
            let t = Tangent::new(Point::real(&[z]), x).unwrap();
            let (v, _) = kobayashi_metric_upper(&d, &t, &cfg).unwrap();
            let oracle = model_metric(&d, &t).unwrap();
            assert!(
                v >= oracle - 1e-12 && v <= oracle + 0.1,
                "{}: {v} vs {oracle}",
                d.name()
            );
        }
    }
}
