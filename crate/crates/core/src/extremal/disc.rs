//! Polynomial analytic discs and their containment certificates.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::domains::DomainGeometry;
use crate::error::Result;
use crate::optim::bisect_last_true;
use crate::point::{norm, Point, C64};

/// How the polynomial part maps to the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscChart {
    /// `φ = P`.
    Identity,
    /// `φ = exp ∘ P`; used on the annulus, where `P` lives in the strip
    /// `log r < Re s < 0`.
    Exp,
}

/// A holomorphic disc `φ(ζ) = Σ c_k ζ^k` into `D` (or `exp` of one, see
/// [`DiscChart`]).
///
/// The base point is attained exactly at `base_preimage` (`φ(base_preimage) = z`
/// holds by construction, not by penalty); for two-point problems the target
/// is attained exactly at `target_preimage`. `certified` is set once the
/// closed disc has been verified to lie in `D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticDiscParam {
    pub dimension: usize,
    /// `coefficients[k]` is the vector `c_k ∈ C^n`.
    pub coefficients: Vec<Vec<C64>>,
    pub chart: DiscChart,
    pub base_preimage: C64,
    pub target_preimage: Option<C64>,
    pub boundary_samples: usize,
    /// Smallest certified boundary margin `−ρ(φ(e^{iθ}))` minus the
    /// discretization allowance.
    pub margin: f64,
    pub certified: bool,
}

impl AnalyticDiscParam {
    /// The constant disc at `z`.
    pub fn constant(z: &Point, boundary_samples: usize) -> Self {
        AnalyticDiscParam {
            dimension: z.dim(),
            coefficients: vec![z.0.clone()],
            chart: DiscChart::Identity,
            base_preimage: C64::new(0.0, 0.0),
            target_preimage: Some(C64::new(0.0, 0.0)),
            boundary_samples,
            margin: f64::INFINITY,
            certified: true,
        }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, zeta: C64) -> Point {
        let p = horner(&self.coefficients, zeta);
        match self.chart {
            DiscChart::Identity => Point(p),
            DiscChart::Exp => Point(p.into_iter().map(|c| c.exp()).collect()),
        }
    }

    pub fn derivative(&self, zeta: C64) -> Vec<C64> {
        let dp = self.poly_derivative(zeta);
        match self.chart {
            DiscChart::Identity => dp,
            DiscChart::Exp => {
                let p = horner(&self.coefficients, zeta);
                dp.iter().zip(p).map(|(d, c)| d * c.exp()).collect()
            }
        }
    }

    pub(crate) fn poly_derivative(&self, zeta: C64) -> Vec<C64> {
        let n = self.dimension;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for k in (1..self.coefficients.len()).rev() {
            for i in 0..n {
                out[i] = out[i] * zeta + self.coefficients[k][i] * k as f64;
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// What the disc solver needs to know about a target region.
pub(crate) trait Region {
    fn dim(&self) -> usize;
    /// Cheap function, positive outside; drives the penalty.
    fn penalty(&self, p: &[C64]) -> f64;
    /// Lower bound for the boundary distance, negative outside.
    fn margin(&self, p: &[C64]) -> f64;
    fn is_inside(&self, p: &[C64]) -> bool {
        self.margin(p) > 0.0
    }
    fn convex(&self) -> bool;
    /// Containment needs a winding check around the origin.
    fn has_hole(&self) -> bool;
    /// Scale used to bound line searches; `None` when unbounded.
    fn extent(&self) -> Option<f64>;
}

impl Region for DomainGeometry {
    fn dim(&self) -> usize {
        DomainGeometry::dim(self)
    }
    fn penalty(&self, p: &[C64]) -> f64 {
        DomainGeometry::penalty(self, p)
    }
    fn margin(&self, p: &[C64]) -> f64 {
        self.margin_fast(p)
    }
    fn is_inside(&self, p: &[C64]) -> bool {
        DomainGeometry::is_inside(self, p)
    }
    fn convex(&self) -> bool {
        self.is_convex()
    }
    fn has_hole(&self) -> bool {
        DomainGeometry::has_hole(self)
    }
    fn extent(&self) -> Option<f64> {
        self.is_bounded().then(|| self.bounding_ball().1)
    }
}

/// The strip `lo < Re s < hi`, the annulus in logarithmic coordinates.
pub(crate) struct Strip {
    pub lo: f64,
    pub hi: f64,
}

impl Region for Strip {
    fn dim(&self) -> usize {
        1
    }
    fn penalty(&self, p: &[C64]) -> f64 {
        -self.margin(p)
    }
    fn margin(&self, p: &[C64]) -> f64 {
        (p[0].re - self.lo).min(self.hi - p[0].re)
    }
    fn convex(&self) -> bool {
        true
    }
    fn has_hole(&self) -> bool {
        false
    }
    fn extent(&self) -> Option<f64> {
        None
    }
}

pub(crate) fn horner(c: &[Vec<C64>], zeta: C64) -> Vec<C64> {
    let n = c[0].len();
    let mut out = vec![C64::new(0.0, 0.0); n];
    for ck in c.iter().rev() {
        for i in 0..n {
            out[i] = out[i] * zeta + ck[i];
        }
    }
    out
}

/// `P(sζ)` as a coefficient list.
pub(crate) fn rescale(c: &[Vec<C64>], s: f64) -> Vec<Vec<C64>> {
    let mut f = 1.0;
    c.iter()
        .map(|ck| {
            let out = ck.iter().map(|x| x * f).collect();
            f *= s;
            out
        })
        .collect()
}

/// `P(e^{iφ}ζ)` as a coefficient list.
pub(crate) fn rotate(c: &[Vec<C64>], phi: f64) -> Vec<Vec<C64>> {
    c.iter()
        .enumerate()
        .map(|(k, ck)| {
            let u = C64::from_polar(1.0, k as f64 * phi);
            ck.iter().map(|x| x * u).collect()
        })
        .collect()
}

/// `Σ k^p |c_k| s^k`, a bound on the `p`-th angular derivative of
/// `θ ↦ P(s e^{iθ})`.
fn derivative_bound(c: &[Vec<C64>], s: f64, p: i32) -> f64 {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, ck)| (k as f64).powi(p) * norm(ck) * s.powi(k as i32))
        .sum()
}

/// Verification grid size for the a-posteriori containment check.
pub(crate) fn certification_grid(d: &dyn Region) -> usize {
    if d.convex() {
        4096
    } else {
        16384
    }
}

/// Certified margin of `P(s·)` on the closed unit disc, or `None` if the
/// check fails.
///
/// Convex domains: the boundary curve stays within `h²·sup|γ''|/8` of its
/// sampled chords, chords stay in `D` because `δ` is concave, and the
/// interior lies in the convex hull of the boundary curve. Other domains:
/// a Lipschitz bound `h·sup|γ'|/2` covers the gaps, and a zero winding
/// number around the hole rules out zeros of `P` inside the disc, so the
/// maximum principle applies to both `P` and `1/P`.
pub(crate) fn certify(d: &dyn Region, c: &[Vec<C64>], s: f64) -> Option<f64> {
    let k = certification_grid(d);
    let h = TAU / k as f64;
    let allowance = if d.convex() {
        h * h * derivative_bound(c, s, 2) / 8.0
    } else {
        0.5 * h * derivative_bound(c, s, 1)
    };
    let scaled = rescale(c, s);
    let hole = d.has_hole();
    let mut worst = f64::INFINITY;
    let mut winding = 0.0;
    let mut prev: Option<C64> = None;
    let mut first: Option<C64> = None;
    for j in 0..k {
        let zeta = C64::from_polar(1.0, j as f64 * h);
        let p = horner(&scaled, zeta);
        let m = d.margin(&p);
        if !(m > allowance) {
            return None;
        }
        worst = worst.min(m);
        if hole {
            let u = p[0];
            if let Some(q) = prev {
                winding += (u / q).arg();
            } else {
                first = Some(u);
            }
            prev = Some(u);
        }
    }
    if hole {
        if let (Some(q), Some(u)) = (prev, first) {
            winding += (u / q).arg();
        }
        if winding.abs() > 1.0 {
            return None;
        }
    }
    Some(worst - allowance)
}

/// Largest scale `s ∈ (s_min, 2]` at which `P(s·)` certifies, searched by
/// bisection (expanding past 1 when the disc has room).
pub(crate) fn best_scale(d: &dyn Region, c: &[Vec<C64>], s_min: f64) -> Option<(f64, f64)> {
    let ok = |s: f64| certify(d, c, s).is_some();
    let s = if ok(1.0) {
        bisect_last_true(ok, 1.0, 2.0, 1e-9)
    } else {
        let lo = (s_min + 1e-9).max(1e-6);
        if lo >= 1.0 {
            return None;
        }
        if !ok(lo) {
            // not necessarily monotone: try a coarse ladder before giving up
            let mut found = None;
            for i in 1..32 {
                let t = lo + (1.0 - lo) * i as f64 / 32.0;
                if ok(t) {
                    found = Some(t);
                }
            }
            let t = found?;
            bisect_last_true(ok, t, 1.0, 1e-9)
        } else {
            bisect_last_true(ok, lo, 1.0, 1e-9)
        }
    };
    certify(d, c, s).map(|m| (s, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_disc_certifies_just_below_one() {
        let d = DomainGeometry::unit_disc();
        let id = vec![vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]];
        assert!(certify(&d, &id, 1.0).is_none());
        let (s, m) = best_scale(&d, &id, 0.0).unwrap();
        assert!(s < 1.0 && s > 1.0 - 1e-5, "{s}");
        assert!(m >= 0.0);
    }

    #[test]
    fn annulus_rejects_winding_loop() {
        let d = DomainGeometry::annulus(0.3).unwrap();
        // circle of radius 0.6 around the hole stays in the annulus but
        // does not bound a disc in it
        let loop_ = vec![vec![c(0.0, 0.0)], vec![c(0.6, 0.0)]];
        assert!(certify(&d, &loop_, 1.0).is_none());
        let off = vec![vec![c(0.65, 0.0)], vec![c(0.2, 0.0)]];
        assert!(certify(&d, &off, 1.0).is_some());
    }

    #[test]
    fn rotation_and_scale_compose() {
        let p = vec![vec![c(0.1, 0.2)], vec![c(0.3, -0.1)], vec![c(0.0, 0.4)]];
        let z = c(0.2, 0.5);
        let u = C64::from_polar(1.0, 0.8);
        let a = horner(&rotate(&rescale(&p, 0.7), 0.8), z);
        let b = horner(&p, 0.7 * u * z);
        assert!((a[0] - b[0]).norm() < 1e-15);
    }
}
