//! The global, local and classical inequality suites.

use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{f_bound, g_bound, ComparisonReport, InequalityId, RawRow};
use crate::closed_forms::{model_distance, model_metric};
use crate::domains::{check_connected, rng_from_seed, sample_point_with, DomainGeometry, DomainKind, Rng, Window};
use crate::error::{Error, Result};
use crate::extremal::{
    caratheodory_lower, caratheodory_metric_lower, kobayashi_distance_upper, kobayashi_metric_upper, lempert_upper,
    SolverConfig,
};
use crate::point::{Point, Tangent, C64};

/// One-sided values of the invariant functions on `d`. Closed forms are
/// used where they are exact for the quantity asked for: `k` and `κ` on
/// every closed-form model, `l` also on planar ones, `c` and `γ` only on
/// convex ones (where they coincide with `k`, `κ`).
struct Sides<'a> {
    d: &'a DomainGeometry,
    cfg: &'a SolverConfig,
}

impl Sides<'_> {
    fn exact_all(&self) -> bool {
        self.d.has_closed_form() && self.d.is_convex()
    }

    fn c_lower(&self, z: &Point, w: &Point) -> Result<f64> {
        if self.exact_all() {
            return Ok(model_distance(self.d, z, w)?.value());
        }
        Ok(caratheodory_lower(self.d, z, w, self.cfg)?.0.value())
    }

    fn l_upper(&self, z: &Point, w: &Point) -> Result<f64> {
        // on a planar model every disc lifts to the universal cover, so l = k
        if self.exact_all() || (self.d.has_closed_form() && self.d.dim() == 1) {
            return Ok(model_distance(self.d, z, w)?.value());
        }
        Ok(lempert_upper(self.d, z, w, self.cfg)?.0.value())
    }

    fn k_upper(&self, z: &Point, w: &Point) -> Result<f64> {
        if self.d.has_closed_form() {
            return Ok(model_distance(self.d, z, w)?.value());
        }
        Ok(kobayashi_distance_upper(self.d, z, w, self.cfg)?.value.value())
    }

    fn k_lower(&self, z: &Point, w: &Point) -> Result<f64> {
        if self.d.has_closed_form() {
            return Ok(model_distance(self.d, z, w)?.value());
        }
        Ok(caratheodory_lower(self.d, z, w, self.cfg)?.0.value())
    }

    fn kappa_upper(&self, t: &Tangent) -> Result<f64> {
        if self.d.has_closed_form() {
            return model_metric(self.d, t);
        }
        Ok(kobayashi_metric_upper(self.d, t, self.cfg)?.0)
    }

    fn kappa_lower(&self, t: &Tangent) -> Result<f64> {
        if self.d.has_closed_form() {
            return model_metric(self.d, t);
        }
        Ok(caratheodory_metric_lower(self.d, t, self.cfg)?.0)
    }

    fn gamma_lower(&self, t: &Tangent) -> Result<f64> {
        if self.exact_all() {
            return model_metric(self.d, t);
        }
        Ok(caratheodory_metric_lower(self.d, t, self.cfg)?.0)
    }
}

fn pair_row(z: &Point, w: &Point, dz: f64, dw: f64, lhs: f64, shape: f64) -> RawRow {
    RawRow {
        z: z.clone(),
        w: Some(w.clone()),
        direction: None,
        delta_z: dz,
        delta_w: Some(dw),
        lhs,
        shape,
        alt_shape: None,
    }
}

fn tangent_row(t: &Tangent, dz: f64, lhs: f64, shape: f64) -> RawRow {
    RawRow {
        z: t.base.clone(),
        w: None,
        direction: Some(t.direction.clone()),
        delta_z: dz,
        delta_w: None,
        lhs,
        shape,
        alt_shape: None,
    }
}

/// Evaluates `eval` on every item concurrently; `Err` items are counted as
/// dropped. Each item may produce rows for several reports at once.
fn evaluate<T: Sync, F>(items: &[T], reports: usize, eval: F) -> (Vec<Vec<RawRow>>, usize)
where
    F: Fn(&T) -> Result<Vec<Option<RawRow>>> + Sync,
{
    let results: Vec<Result<Vec<Option<RawRow>>>> = items.par_iter().map(&eval).collect();
    let mut out = vec![Vec::new(); reports];
    let mut dropped = 0;
    for r in results {
        match r {
            Ok(rows) => {
                for (slot, row) in out.iter_mut().zip(rows) {
                    slot.extend(row);
                }
            }
            Err(_) => dropped += 1,
        }
    }
    (out, dropped)
}

fn check_inputs(d: &DomainGeometry, pairs: &[(Point, Point)], tangents: &[Tangent]) -> Result<()> {
    for p in pairs
        .iter()
        .flat_map(|(z, w)| [z, w])
        .chain(tangents.iter().map(|t| &t.base))
    {
        d.boundary_distance(p)?;
    }
    for t in tangents {
        d.check_dim(&t.direction)?;
    }
    Ok(())
}

/// Global comparison: reports for (zero) `l/c ≤ 1 + C f_D`, (lip-global)
/// `l − c ≤ C g_D`, the metric inequality `κ/γ ≤ 1 + Cδ²|X|` taken
/// verbatim, and its weaker form `κ − γ ≤ Cδ|X|`, in that order.
///
/// Pairs with `z = w` are left out of the ratio reports and give zero rows
/// in the difference reports; likewise `X = 0`.
pub fn check_theorem_global(
    d: &DomainGeometry,
    pairs: &[(Point, Point)],
    tangents: &[Tangent],
    cfg: &SolverConfig,
) -> Result<Vec<ComparisonReport>> {
    check_inputs(d, pairs, tangents)?;
    let sides = Sides { d, cfg };
    let (pair_rows, pair_dropped) = evaluate(pairs, 2, |(z, w)| {
        let (dz, dw) = (d.boundary_distance(z)?, d.boundary_distance(w)?);
        let (c, l) = (sides.c_lower(z, w)?, sides.l_upper(z, w)?);
        let zero = (z != w).then(|| pair_row(z, w, dz, dw, l / c, f_bound(d, z, w).map(|f| f.value).unwrap_or(0.0)));
        Ok(vec![zero, Some(pair_row(z, w, dz, dw, l - c, g_bound(d, z, w)?))])
    });
    let (tan_rows, tan_dropped) = evaluate(tangents, 2, |t| {
        let dz = d.boundary_distance(&t.base)?;
        let x = t.norm();
        let (kappa, gamma) = (sides.kappa_upper(t)?, sides.gamma_lower(t)?);
        let ratio = (x > 0.0).then(|| tangent_row(t, dz, kappa / gamma, dz * dz * x));
        Ok(vec![ratio, Some(tangent_row(t, dz, kappa - gamma, dz * x))])
    });
    let mut pair_rows = pair_rows.into_iter();
    let mut tan_rows = tan_rows.into_iter();
    Ok(vec![
        ComparisonReport::build(InequalityId::Zero, pair_rows.next().unwrap(), pair_dropped, cfg.seed)?,
        ComparisonReport::build(
            InequalityId::LipGlobal,
            pair_rows.next().unwrap(),
            pair_dropped,
            cfg.seed,
        )?,
        ComparisonReport::build(
            InequalityId::MetricGlobal,
            tan_rows.next().unwrap(),
            tan_dropped,
            cfg.seed,
        )?,
        ComparisonReport::build(
            InequalityId::MetricGlobalWeak,
            tan_rows.next().unwrap(),
            tan_dropped,
            cfg.seed,
        )?,
    ])
}

/// Boundary point `p` of `D` with windows `V ⋐ U` around it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationSetup {
    pub domain: DomainGeometry,
    pub window: Window,
    pub cfg: SolverConfig,
    /// `D ∩ U`.
    #[serde(skip)]
    local: Option<DomainGeometry>,
}

const LOCAL_SAMPLE_TRIES: usize = 1000;

/// Grid side of the connectivity check on `D ∩ U`.
const CONNECTIVITY_GRID: usize = 24;

impl LocalizationSetup {
    /// Validates the window (`r_V ≤ 0.9 r_U`, `p ∈ ∂D`) and checks that
    /// `D ∩ U` is connected on a grid.
    pub fn new(
        domain: DomainGeometry,
        p: Point,
        outer_radius: f64,
        inner_radius: f64,
        cfg: SolverConfig,
    ) -> Result<Self> {
        domain.check_dim(&p.0)?;
        let window = Window::new(p.clone(), outer_radius, inner_radius)?;
        if inner_radius > 0.9 * outer_radius {
            return Err(Error::Setup(format!(
                "need a radius gap of at least 10% of r_U: r_V={inner_radius}, r_U={outer_radius}"
            )));
        }
        let rho = domain.defining(&p.0);
        if !(rho.abs() <= 1e-9) {
            return Err(Error::Setup(format!(
                "{:?} is not a boundary point of {} (ρ = {rho:e})",
                p.0,
                domain.name()
            )));
        }
        let local = DomainGeometry::intersection(&domain, window.outer_ball())?;
        check_connected(&local, CONNECTIVITY_GRID)?;
        Ok(LocalizationSetup {
            domain,
            window,
            cfg,
            local: Some(local),
        })
    }

    /// `D ∩ U`.
    pub fn local_domain(&self) -> Result<DomainGeometry> {
        match &self.local {
            Some(d) => Ok(d.clone()),
            None => DomainGeometry::intersection(&self.domain, self.window.outer_ball()),
        }
    }

    /// `count` seeded pairs in `D ∩ V` with `δ_D ≥ delta_min`.
    pub fn sample_pairs(&self, count: usize, delta_min: f64, seed: u64) -> Result<Vec<(Point, Point)>> {
        let mut rng = rng_from_seed(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let z = self.sample_in_v(delta_min, &mut rng)?;
            let w = self.sample_in_v(delta_min, &mut rng)?;
            if z.dist(&w) > 1e-12 {
                out.push((z, w));
            }
        }
        Ok(out)
    }

    /// `count` seeded unit tangents based in `D ∩ V` with `δ_D ≥ delta_min`.
    pub fn sample_tangents(&self, count: usize, delta_min: f64, seed: u64) -> Result<Vec<Tangent>> {
        let mut rng = rng_from_seed(seed);
        let n = self.domain.dim();
        (0..count)
            .map(|_| {
                let z = self.sample_in_v(delta_min, &mut rng)?;
                let x: Vec<C64> = (0..n)
                    .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect();
                let len = crate::point::norm(&x);
                Tangent::new(z, x.into_iter().map(|c| c / len).collect())
            })
            .collect()
    }

    fn sample_in_v(&self, delta_min: f64, rng: &mut Rng) -> Result<Point> {
        let r_v = self.window.inner_radius;
        for _ in 0..LOCAL_SAMPLE_TRIES {
            let z = sample_point_with(&self.domain, Some(&self.window.center), delta_min, r_v, rng)?;
            if self.window.in_inner(&z) {
                return Ok(z);
            }
        }
        Err(Error::Sampling(format!("no point of D ∩ V with δ ≥ {delta_min}")))
    }

    fn check_in_v(&self, z: &Point) -> Result<()> {
        if !self.domain.contains(z)? || !self.window.in_inner(z) {
            return Err(Error::Input(format!("{:?} is not in D ∩ V", z.0)));
        }
        Ok(())
    }
}

fn is_real(p: &Point) -> bool {
    p.0.iter().all(|c| c.im == 0.0)
}

/// Local comparison on `D ∩ V`: (quo) `k_{D∩U}/c_D ≤ 1 + C f_D`, (lip)
/// `k_{D∩U} − c_D ≤ C g_D`, (met) `κ_{D∩U}/γ_D ≤ 1 + Cδ²`, then the weaker
/// `k_{D∩U} − k_D ≤ C|z−w|^{1/2}` and `κ_{D∩U}/κ_D ≤ 1 + Cδ`, in that order.
///
/// The (lip) report carries a sharpness value: the least `lhs/shape` over
/// pairs with real coordinates, positive when the opposite inequality
/// holds there.
pub fn check_localization(
    setup: &LocalizationSetup,
    pairs: &[(Point, Point)],
    tangents: &[Tangent],
) -> Result<Vec<ComparisonReport>> {
    let d = &setup.domain;
    let cfg = &setup.cfg;
    for p in pairs
        .iter()
        .flat_map(|(z, w)| [z, w])
        .chain(tangents.iter().map(|t| &t.base))
    {
        setup.check_in_v(p)?;
    }
    check_inputs(d, pairs, tangents)?;
    let local = setup.local_domain()?;
    let (global, near) = (Sides { d, cfg }, Sides { d: &local, cfg });
    let (pair_rows, pair_dropped) = evaluate(pairs, 3, |(z, w)| {
        let (dz, dw) = (d.boundary_distance(z)?, d.boundary_distance(w)?);
        let k_local = near.k_upper(z, w)?;
        let (c, k) = (global.c_lower(z, w)?, global.k_lower(z, w)?);
        let quo = (z != w).then(|| {
            pair_row(
                z,
                w,
                dz,
                dw,
                k_local / c,
                f_bound(d, z, w).map(|f| f.value).unwrap_or(0.0),
            )
        });
        Ok(vec![
            quo,
            Some(pair_row(z, w, dz, dw, k_local - c, g_bound(d, z, w)?)),
            Some(pair_row(z, w, dz, dw, k_local - k, z.dist(w).sqrt())),
        ])
    });
    let (tan_rows, tan_dropped) = evaluate(tangents, 2, |t| {
        let dz = d.boundary_distance(&t.base)?;
        if t.norm() == 0.0 {
            return Ok(vec![None, None]);
        }
        let kappa_local = near.kappa_upper(t)?;
        let (gamma, kappa) = (global.gamma_lower(t)?, global.kappa_lower(t)?);
        Ok(vec![
            Some(tangent_row(t, dz, kappa_local / gamma, dz * dz)),
            Some(tangent_row(t, dz, kappa_local / kappa, dz)),
        ])
    });
    let mut pair_rows = pair_rows.into_iter();
    let mut tan_rows = tan_rows.into_iter();
    let quo = ComparisonReport::build(InequalityId::Quo, pair_rows.next().unwrap(), pair_dropped, cfg.seed)?;
    let mut lip = ComparisonReport::build(InequalityId::Lip, pair_rows.next().unwrap(), pair_dropped, cfg.seed)?;
    lip.sharpness = lip
        .rows
        .iter()
        .filter(|r| is_real(&r.z) && r.w.as_ref().is_some_and(is_real) && r.shape > 0.0)
        .map(|r| r.lhs / r.shape)
        .reduce(f64::min);
    let lip_weak = ComparisonReport::build(InequalityId::LipWeak, pair_rows.next().unwrap(), pair_dropped, cfg.seed)?;
    let met = ComparisonReport::build(InequalityId::Met, tan_rows.next().unwrap(), tan_dropped, cfg.seed)?;
    let met_weak = ComparisonReport::build(InequalityId::MetWeak, tan_rows.next().unwrap(), tan_dropped, cfg.seed)?;
    Ok(vec![quo, lip, met, lip_weak, met_weak])
}

fn smooth_boundary(d: &DomainGeometry) -> bool {
    matches!(
        d.kind(),
        DomainKind::UnitDisc { .. }
            | DomainKind::Ball { .. }
            | DomainKind::Annulus { .. }
            | DomainKind::HalfPlane { .. }
            | DomainKind::ComplexEllipsoid { .. }
    )
}

fn half_log_inv(x: f64) -> f64 {
    -0.5 * x.ln()
}

/// One classical inequality. Capability error when it does not apply to `d`:
/// (low) and (vis) need a convex domain, (dini) a smooth boundary.
pub fn classical_report(
    id: InequalityId,
    d: &DomainGeometry,
    pairs: &[(Point, Point)],
    tangents: &[Tangent],
    cfg: &SolverConfig,
) -> Result<ComparisonReport> {
    check_inputs(d, pairs, tangents)?;
    let sides = Sides { d, cfg };
    let needs_convex = matches!(id, InequalityId::Low | InequalityId::Vis);
    if needs_convex && !d.is_convex() {
        return Err(Error::Capability(format!(
            "{} needs a convex domain, {} is not",
            id.name(),
            d.name()
        )));
    }
    if id == InequalityId::Dini && !smooth_boundary(d) {
        return Err(Error::Capability(format!(
            "dini needs a smooth boundary, {} has corners",
            d.name()
        )));
    }
    let (rows, dropped) = match id {
        InequalityId::Rt => evaluate(tangents, 1, |t| {
            let dz = d.boundary_distance(&t.base)?;
            Ok(vec![Some(tangent_row(
                t,
                dz,
                sides.kappa_upper(t)? - sides.gamma_lower(t)?,
                t.norm(),
            ))])
        }),
        InequalityId::Root | InequalityId::Dini | InequalityId::Low | InequalityId::Vis | InequalityId::RemarkB => {
            evaluate(pairs, 1, |(z, w)| {
                let (dz, dw) = (d.boundary_distance(z)?, d.boundary_distance(w)?);
                let row = match id {
                    InequalityId::Root => {
                        let lhs = sides.l_upper(z, w)? - sides.c_lower(z, w)?;
                        let mut row = pair_row(z, w, dz, dw, lhs, z.dist(w).sqrt());
                        row.alt_shape = Some(g_bound(d, z, w)?);
                        row
                    }
                    InequalityId::Dini => {
                        let x = z.dist(w) / (dz * dw).sqrt();
                        pair_row(z, w, dz, dw, sides.k_upper(z, w)?.exp_m1(), x)
                    }
                    InequalityId::Low => pair_row(z, w, dz, dw, 0.5 * (dz / dw).ln().abs(), sides.k_lower(z, w)?),
                    InequalityId::Vis => {
                        let lhs = half_log_inv(dz) + half_log_inv(dw) - sides.k_lower(z, w)?;
                        pair_row(z, w, dz, dw, lhs, 1.0)
                    }
                    _ => {
                        let lhs = sides.l_upper(z, w)? - half_log_inv(dz) - half_log_inv(dw);
                        pair_row(z, w, dz, dw, lhs, 1.0)
                    }
                };
                Ok(vec![Some(row)])
            })
        }
        other => {
            return Err(Error::Input(format!("{} is not a classical inequality", other.name())));
        }
    };
    ComparisonReport::build(id, rows.into_iter().next().unwrap(), dropped, cfg.seed)
}

/// The classical suite: (root), (rt), (dini), (low), (vis) and the
/// boundary-distance upper bound for `l`, each included when it applies
/// to `d`.
pub fn verify_classical(
    d: &DomainGeometry,
    pairs: &[(Point, Point)],
    tangents: &[Tangent],
    cfg: &SolverConfig,
) -> Result<Vec<ComparisonReport>> {
    let ids = [
        InequalityId::Root,
        InequalityId::Rt,
        InequalityId::Dini,
        InequalityId::Low,
        InequalityId::Vis,
        InequalityId::RemarkB,
    ];
    let mut out = Vec::new();
    for id in ids {
        match classical_report(id, d, pairs, tangents, cfg) {
            Ok(r) => out.push(r),
            Err(Error::Capability(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
