//! Geometry of the complex ellipsoid `{ sum |z_i|^(2 m_i) < 1 }`, `m_i >= 1`.
//!
//! All quantities reduce to the moduli `a_i = |z_i|` because the domain is
//! invariant under independent rotations of each coordinate.

use crate::optim::{golden_section, nelder_mead};
use crate::point::C64;

pub(crate) fn defining(moduli: &[f64], exps: &[f64]) -> f64 {
    moduli.iter().zip(exps).map(|(a, m)| a.powf(2.0 * m)).sum::<f64>() - 1.0
}

/// Minkowski gauge: the `t > 0` with `sum (a_i / t)^(2 m_i) = 1`.
///
/// The ellipsoid contains the unit ball, so `1 - gauge` is a lower bound
/// for the boundary distance of interior points.
pub(crate) fn gauge(moduli: &[f64], exps: &[f64]) -> f64 {
    if moduli.iter().all(|&a| a == 0.0) {
        return 0.0;
    }
    let phi = |t: f64| -> f64 { moduli.iter().zip(exps).map(|(a, m)| (a / t).powf(2.0 * m)).sum::<f64>() - 1.0 };
    // phi is decreasing in t
    let amax = moduli.iter().cloned().fold(0.0, f64::max);
    let mut lo = amax * 0.5f64.max(1e-300);
    let mut hi = amax * (moduli.len() as f64).sqrt().max(1.0) + 1e-300;
    while phi(lo) < 0.0 {
        lo *= 0.5;
    }
    while phi(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Distance along a nonnegative unit direction `u` from moduli `a` to the
/// boundary; Newton from above on the convex increasing radial function.
fn ray_hit(a: &[f64], u: &[f64], exps: &[f64]) -> f64 {
    let f = |r: f64| -> (f64, f64) {
        let mut v = -1.0;
        let mut d = 0.0;
        for i in 0..a.len() {
            let x = a[i] + r * u[i];
            let p = 2.0 * exps[i];
            if x > 0.0 {
                v += x.powf(p);
                d += p * x.powf(p - 1.0) * u[i];
            }
        }
        (v, d)
    };
    let mut r = 2.0 * (a.len() as f64).sqrt() + 1.0;
    while f(r).0 <= 0.0 {
        r *= 2.0;
    }
    for _ in 0..200 {
        let (v, d) = f(r);
        if d <= 0.0 {
            break;
        }
        let step = v / d;
        r -= step;
        if step.abs() <= 1e-16 * r.max(1e-300) {
            break;
        }
    }
    // bisection fallback guards against Newton stalling near flat directions
    let (v, _) = f(r);
    if !(v.abs() < 1e-13) {
        let (mut lo, mut hi) = (0.0, 2.0 * (a.len() as f64).sqrt() + 1.0);
        while f(hi).0 <= 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid).0 > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        r = 0.5 * (lo + hi);
    }
    r
}

fn direction_from_angles(angles: &[f64]) -> Vec<f64> {
    let n = angles.len() + 1;
    let mut u = vec![0.0; n];
    let mut prod = 1.0;
    for (i, &t) in angles.iter().enumerate() {
        u[i] = prod * t.cos().abs();
        prod *= t.sin().abs();
    }
    u[n - 1] = prod;
    u
}

/// Euclidean distance from an interior point (given by its moduli) to the
/// ellipsoid boundary.
pub(crate) fn boundary_distance(moduli: &[f64], exps: &[f64]) -> f64 {
    let n = moduli.len();
    if n == 1 {
        return 1.0 - moduli[0];
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    if n == 2 {
        let grid = 256;
        let h = half_pi / grid as f64;
        let eval = |t: f64| ray_hit(moduli, &direction_from_angles(&[t]), exps);
        let (mut best_k, mut best) = (0, f64::INFINITY);
        for k in 0..=grid {
            let v = eval(k as f64 * h);
            if v < best {
                best = v;
                best_k = k;
            }
        }
        let lo = (best_k as f64 - 1.0).max(0.0) * h;
        let hi = ((best_k as f64 + 1.0) * h).min(half_pi);
        let (_, v) = golden_section(eval, lo, hi, 1e-11);
        return v.min(best);
    }
    let dims = n - 1;
    let side = ((4096f64).powf(1.0 / dims as f64).floor() as usize).max(3);
    let h = half_pi / (side - 1) as f64;
    let mut best = (f64::INFINITY, vec![0.0; dims]);
    let mut idx = vec![0usize; dims];
    loop {
        let ang: Vec<f64> = idx.iter().map(|&k| k as f64 * h).collect();
        let v = ray_hit(moduli, &direction_from_angles(&ang), exps);
        if v < best.0 {
            best = (v, ang);
        }
        let mut k = 0;
        while k < dims {
            idx[k] += 1;
            if idx[k] < side {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == dims {
            break;
        }
    }
    let m = nelder_mead(
        |ang| ray_hit(moduli, &direction_from_angles(ang), exps),
        &best.1,
        h,
        2000,
        1e-12,
    );
    m.value.min(best.0)
}

/// `sup_{x in D} Re <x, nu>` with `a_i = |nu_i|`, via the KKT system
/// `a_i = 2 m_i lambda t_i^(2 m_i - 1)` and a bisection on `lambda`.
pub(crate) fn support(nu_moduli: &[f64], exps: &[f64]) -> f64 {
    if nu_moduli.iter().all(|&a| a == 0.0) {
        return 0.0;
    }
    let t_of = |lambda: f64, i: usize| -> f64 {
        let m = exps[i];
        (nu_moduli[i] / (2.0 * m * lambda)).powf(1.0 / (2.0 * m - 1.0))
    };
    let constraint = |lambda: f64| -> f64 {
        (0..nu_moduli.len())
            .map(|i| t_of(lambda, i).powf(2.0 * exps[i]))
            .sum::<f64>()
            - 1.0
    };
    let (mut lo, mut hi) = (1e-12f64, 1.0f64);
    while constraint(hi) > 0.0 {
        hi *= 2.0;
    }
    while constraint(lo) < 0.0 {
        lo *= 0.5;
    }
    for _ in 0..300 {
        let mid = (lo * hi).sqrt();
        if constraint(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-15 {
            break;
        }
    }
    let lambda = (lo * hi).sqrt();
    (0..nu_moduli.len()).map(|i| nu_moduli[i] * t_of(lambda, i)).sum()
}

/// `d rho / d zbar` for `rho = sum |z_i|^(2 m_i) - 1`.
pub(crate) fn complex_gradient(z: &[C64], exps: &[f64]) -> Vec<C64> {
    z.iter()
        .zip(exps)
        .map(|(zi, m)| {
            let a = zi.norm();
            if a == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                zi * (m * a.powf(2.0 * m - 2.0))
            }
        })
        .collect()
}
