//! Bounded holomorphic functionals `f : D → Δ` with `f(z) = 0`.

use serde::{Deserialize, Serialize};

use crate::closed_forms::{ball_automorphism, mobius};
use crate::error::Result;
use crate::point::{hdot, Point, C64};

/// A member of one of the admissible families. Each variant maps `D` into
/// the unit disc by construction (or by a certified sup-norm bound for the
/// Laurent family) and vanishes at `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ScalarFunctionalParam {
    /// The zero map, for the degenerate inputs `z = w` and `X = 0`.
    Zero,
    /// Projection onto the half-plane `Re <x, ν> < support` followed by its
    /// Cayley map: with `s(x) = support − <x, ν>`,
    /// `f(x) = (s(x) − s(z)) / (s(x) + conj s(z))`.
    AffineProjection {
        normal: Vec<C64>,
        support: f64,
        base: Vec<C64>,
    },
    /// `x ↦ <φ_a((x − c)/R), u>` with `φ_a` the ball automorphism swapping
    /// `a = (z − c)/R` and the origin; valid whenever `D ⊂ B(c, R)`.
    BallAutomorphism {
        center: Vec<C64>,
        radius: f64,
        base: Vec<C64>,
        direction: Vec<C64>,
    },
    /// Möbius map of one coordinate, valid whenever `|x_i| < radius` on `D`.
    CoordinateMobius { index: usize, radius: f64, base: Vec<C64> },
    /// Möbius map of the projection `ζ(x) = (<x, ν> − c)/R`; valid when the
    /// projection of `D` lies in the disc `|<x, ν> − c| < R`.
    ProjectionDisc {
        normal: Vec<C64>,
        center: C64,
        radius: f64,
        base: Vec<C64>,
    },
    /// `Σ_{k=1..N₊} p_k (x^k − z^k) + Σ_{k=1..N₋} q_k ((r/x)^k − (r/z)^k)` on
    /// the annulus `r < |x| < 1`, scaled so its certified sup is at most 1.
    LaurentPolynomial {
        inner_radius: f64,
        base: C64,
        positive: Vec<C64>,
        negative: Vec<C64>,
        sup_bound: f64,
    },
    /// Proper 2:1 map of the annulus onto `Δ` with zeros `base` and
    /// `second_zero`, `|base·second_zero| = r`:
    /// `f(x) = (r/x) Π_j P(x/a_j)/P(x·ā_j)` with the prime function
    /// `P(x) = (1 − x) Π_{k≥1} (1 − r^{2k} x)(1 − r^{2k}/x)`. `|f| = 1` on both
    /// boundary circles; the truncated product is divided by a bound on the
    /// truncation error.
    AnnulusProperMap {
        inner_radius: f64,
        base: C64,
        second_zero: C64,
    },
}

impl ScalarFunctionalParam {
    pub fn family_name(&self) -> &'static str {
        match self {
            ScalarFunctionalParam::Zero => "zero",
            ScalarFunctionalParam::AffineProjection { .. } => "affine_projection",
            ScalarFunctionalParam::BallAutomorphism { .. } => "ball_automorphism",
            ScalarFunctionalParam::CoordinateMobius { .. } => "coordinate_mobius",
            ScalarFunctionalParam::ProjectionDisc { .. } => "projection_disc",
            ScalarFunctionalParam::LaurentPolynomial { .. } => "laurent_polynomial",
            ScalarFunctionalParam::AnnulusProperMap { .. } => "annulus_proper_map",
        }
    }

    pub fn eval(&self, x: &Point) -> C64 {
        let x = &x.0;
        match self {
            ScalarFunctionalParam::Zero => C64::new(0.0, 0.0),
            ScalarFunctionalParam::AffineProjection { normal, support, base } => {
                let s = |p: &[C64]| C64::new(*support, 0.0) - hdot(p, normal);
                let (sx, sz) = (s(x), s(base));
                (sx - sz) / (sx + sz.conj())
            }
            ScalarFunctionalParam::BallAutomorphism {
                center,
                radius,
                base,
                direction,
            } => {
                let to_unit = |p: &[C64]| -> Vec<C64> { p.iter().zip(center).map(|(a, c)| (a - c) / radius).collect() };
                hdot(&ball_automorphism(&to_unit(base), &to_unit(x)), direction)
            }
            ScalarFunctionalParam::CoordinateMobius { index, radius, base } => {
                mobius(base[*index] / radius, x[*index] / radius)
            }
            ScalarFunctionalParam::ProjectionDisc {
                normal,
                center,
                radius,
                base,
            } => {
                let zeta = |p: &[C64]| (hdot(p, normal) - center) / radius;
                mobius(zeta(base), zeta(x))
            }
            ScalarFunctionalParam::LaurentPolynomial {
                inner_radius,
                base,
                positive,
                negative,
                sup_bound,
            } => laurent_eval(*inner_radius, *base, positive, negative, x[0]) / sup_bound,
            ScalarFunctionalParam::AnnulusProperMap {
                inner_radius,
                base,
                second_zero,
            } => {
                let pm = PrimeFunction::new(*inner_radius);
                let x = x[0];
                pm.ratio(x, *base) * pm.ratio(x, *second_zero) * (*inner_radius / x) / pm.safety
            }
        }
    }

    /// `f'(base)·X`.
    pub fn derivative_at_base(&self, x: &[C64]) -> C64 {
        match self {
            ScalarFunctionalParam::Zero => C64::new(0.0, 0.0),
            ScalarFunctionalParam::AffineProjection { normal, support, base } => {
                let sz = C64::new(*support, 0.0) - hdot(base, normal);
                -hdot(x, normal) / (2.0 * sz.re)
            }
            ScalarFunctionalParam::BallAutomorphism {
                center,
                radius,
                base,
                direction,
            } => {
                let a: Vec<C64> = base.iter().zip(center).map(|(b, c)| (b - c) / radius).collect();
                let xs: Vec<C64> = x.iter().map(|v| v / radius).collect();
                hdot(&ball_automorphism_differential(&a, &xs), direction)
            }
            ScalarFunctionalParam::CoordinateMobius { index, radius, base } => {
                let a = base[*index] / radius;
                (x[*index] / radius) / (1.0 - a.norm_sqr())
            }
            ScalarFunctionalParam::ProjectionDisc {
                normal,
                center,
                radius,
                base,
            } => {
                let a = (hdot(base, normal) - center) / radius;
                (hdot(x, normal) / radius) / (1.0 - a.norm_sqr())
            }
            ScalarFunctionalParam::LaurentPolynomial {
                inner_radius,
                base,
                positive,
                negative,
                sup_bound,
            } => laurent_derivative(*inner_radius, *base, positive, negative) * x[0] / sup_bound,
            ScalarFunctionalParam::AnnulusProperMap {
                inner_radius,
                base,
                second_zero,
            } => {
                let pm = PrimeFunction::new(*inner_radius);
                pm.derivative_factor(*base) * pm.ratio(*base, *second_zero) * x[0] / pm.safety
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// `dφ_a(a)·X = −(P_a X + sqrt(1−|a|²) Q_a X)/(1 − |a|²)`.
pub(crate) fn ball_automorphism_differential(a: &[C64], x: &[C64]) -> Vec<C64> {
    let an2: f64 = a.iter().map(|c| c.norm_sqr()).sum();
    let q = 1.0 - an2;
    if an2 == 0.0 {
        return x.iter().map(|c| -c).collect();
    }
    let proj = hdot(x, a) / an2;
    let s = q.sqrt();
    a.iter()
        .zip(x)
        .map(|(ai, xi)| {
            let p = proj * ai;
            -(p + (xi - p) * s) / q
        })
        .collect()
}

/// The truncated prime function of the annulus `r < |x| < 1`.
pub(crate) struct PrimeFunction {
    r: f64,
    /// `r^{2k}` for `k = 1..K`.
    powers: Vec<f64>,
    /// `1 + ` a bound on the relative error of the truncated `f`.
    pub(crate) safety: f64,
}

impl PrimeFunction {
    pub(crate) fn new(r: f64) -> Self {
        // every argument y has r² < |y| < 1/r², so each dropped tail changes
        // log|P| by at most 3 r^{2K−2}/(1 − r²); four such tails per value
        let q = r * r;
        let mut powers = vec![q];
        while 12.0 * powers.last().unwrap() / q / (1.0 - q) > 1e-16 {
            powers.push(powers.last().unwrap() * q);
        }
        PrimeFunction {
            r,
            powers,
            safety: 1.0 + 1e-12,
        }
    }

    fn tail(&self, y: C64) -> C64 {
        let one = C64::new(1.0, 0.0);
        self.powers
            .iter()
            .fold(one, |acc, &p| acc * (one - y * p) * (one - p / y))
    }

    fn eval(&self, y: C64) -> C64 {
        (C64::new(1.0, 0.0) - y) * self.tail(y)
    }

    /// `P(x/a)/P(x·ā)`, vanishing at `x = a`.
    pub(crate) fn ratio(&self, x: C64, a: C64) -> C64 {
        self.eval(x / a) / self.eval(x * a.conj())
    }

    /// Derivative at `x = a` of `(r/x)·P(x/a)/P(x·ā)`.
    pub(crate) fn derivative_factor(&self, a: C64) -> C64 {
        // d/dx P(x/a) at a is −tail(1)/a
        -(self.r / a) * self.tail(C64::new(1.0, 0.0)) / a / self.eval(C64::new(a.norm_sqr(), 0.0))
    }
}

pub(crate) fn laurent_eval(r: f64, z: C64, pos: &[C64], neg: &[C64], x: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    let (mut xp, mut zp) = (x, z);
    for p in pos {
        acc += p * (xp - zp);
        xp *= x;
        zp *= z;
    }
    let (u, v) = (r / x, r / z);
    let (mut up, mut vp) = (u, v);
    for q in neg {
        acc += q * (up - vp);
        up *= u;
        vp *= v;
    }
    acc
}

pub(crate) fn laurent_derivative(r: f64, z: C64, pos: &[C64], neg: &[C64]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    let mut zp = C64::new(1.0, 0.0);
    for (k, p) in pos.iter().enumerate() {
        acc += p * zp * (k + 1) as f64;
        zp *= z;
    }
    // d/dz (r/z)^k = −k (r/z)^k / z
    let v = r / z;
    let mut vp = v;
    for (k, q) in neg.iter().enumerate() {
        acc -= q * vp * (k + 1) as f64 / z;
        vp *= v;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn check_derivative(f: &ScalarFunctionalParam, base: &[C64], x: &[C64]) {
        let h = 1e-6;
        let plus = Point(base.iter().zip(x).map(|(b, v)| b + v * h).collect());
        let minus = Point(base.iter().zip(x).map(|(b, v)| b - v * h).collect());
        let fd = (f.eval(&plus) - f.eval(&minus)) / (2.0 * h);
        let an = f.derivative_at_base(x);
        assert!(
            (fd - an).norm() < 1e-7 * (1.0 + an.norm()),
            "{}: {fd} vs {an}",
            f.family_name()
        );
        assert!(f.eval(&Point(base.to_vec())).norm() < 1e-14);
    }

    #[test]
    fn derivatives_match_differences() {
        let base = vec![c(0.2, 0.1), c(-0.3, 0.2)];
        let x = vec![c(0.5, -0.4), c(0.1, 0.7)];
        let fams = [
            ScalarFunctionalParam::AffineProjection {
                normal: vec![c(0.6, 0.0), c(0.0, 0.8)],
                support: 1.0,
                base: base.clone(),
            },
            ScalarFunctionalParam::BallAutomorphism {
                center: vec![c(0.1, 0.0), c(0.0, 0.0)],
                radius: 1.5,
                base: base.clone(),
                direction: vec![c(0.0, 0.6), c(0.8, 0.0)],
            },
            ScalarFunctionalParam::CoordinateMobius {
                index: 1,
                radius: 2.0,
                base: base.clone(),
            },
            ScalarFunctionalParam::ProjectionDisc {
                normal: vec![c(0.6, 0.0), c(0.0, 0.8)],
                center: c(0.1, -0.1),
                radius: 1.7,
                base: base.clone(),
            },
        ];
        for f in &fams {
            check_derivative(f, &base, &x);
        }
        let lf = ScalarFunctionalParam::LaurentPolynomial {
            inner_radius: 0.3,
            base: c(0.5, 0.2),
            positive: vec![c(1.0, 0.0), c(0.2, -0.1)],
            negative: vec![c(0.3, 0.3), c(0.0, 0.1)],
            sup_bound: 2.0,
        };
        check_derivative(&lf, &[c(0.5, 0.2)], &[c(0.3, -0.2)]);
        let base = c(0.5, 0.2);
        let pm = ScalarFunctionalParam::AnnulusProperMap {
            inner_radius: 0.3,
            base,
            second_zero: C64::from_polar(0.3 / base.norm(), 1.1),
        };
        check_derivative(&pm, &[base], &[c(0.3, -0.2)]);
    }

    #[test]
    fn proper_map_is_inner_on_both_circles() {
        for r in [0.05, 0.3, 0.8] {
            let base = C64::from_polar(0.5 * (1.0 + r), 0.4);
            let f = ScalarFunctionalParam::AnnulusProperMap {
                inner_radius: r,
                base,
                second_zero: C64::from_polar(r / base.norm(), -2.0),
            };
            for j in 0..200 {
                for rho in [1.0, r] {
                    let v = f.eval(&Point::scalar(C64::from_polar(rho, 0.0314 * j as f64))).norm();
                    assert!(v <= 1.0 && v > 1.0 - 1e-10, "r {r}: {v}");
                }
            }
        }
    }
}
