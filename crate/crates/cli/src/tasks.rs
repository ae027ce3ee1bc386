//! One runner per task. Each returns CSV text and a JSON results object;
//! rows are computed in parallel and written in input order.

use holodist::bounds::{
    check_localization, check_theorem_global, verify_classical, ComparisonReport, LocalizationSetup,
};
use holodist::closed_forms::{model_distance, model_metric};
use holodist::domains::{m_convexity_probe, sample_pair_near, sample_tangent_near};
use holodist::extremal::{
    caratheodory_lower, caratheodory_metric_lower, kobayashi_distance_upper_with_disc, kobayashi_metric_upper,
    lempert_upper, sandwich,
};
use holodist::geodesics::{
    complex_geodesic, real_geodesic, sample_boundary_pairs, strong_completeness_probe, visibility_classify,
    GromovVerdict, Visibility,
};
use holodist::{DomainGeometry, Error, Point, Tangent, C64};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Resolved, Task};

/// Fixed CSV header of each task.
pub fn columns(task: Task) -> &'static [&'static str] {
    const REPORT: &[&str] = &[
        "inequality",
        "z",
        "w",
        "direction",
        "delta_z",
        "delta_w",
        "lhs",
        "shape",
        "required_c",
        "margin",
    ];
    match task {
        Task::Metric => &[
            "index",
            "kind",
            "z",
            "w",
            "direction",
            "lower",
            "middle",
            "middle_error",
            "upper",
            "oracle",
            "status",
        ],
        Task::Sandwich => &[
            "index",
            "z",
            "w",
            "lower",
            "upper",
            "width",
            "lower_family",
            "disc_degree",
            "oracle",
            "status",
        ],
        Task::Theorem1 | Task::Localize | Task::Classical => REPORT,
        Task::Visibility => &["p", "q", "j", "delta", "gromov", "slope", "verdict"],
        Task::Completeness => &["p", "j", "delta", "gromov", "lower", "upper", "depth"],
        Task::Geodesic => &[
            "index",
            "z",
            "w",
            "route",
            "defect",
            "certified_defect",
            "tol",
            "length",
            "status",
        ],
        Task::Mconvex => &["shell", "delta", "max_ratio"],
    }
}

pub struct Outcome {
    pub csv: String,
    /// Rows attempted and rows that failed or broke an invariant.
    pub rows: usize,
    pub failures: usize,
    /// Unboundable or unstable constants.
    pub flags: Vec<String>,
    pub results: Value,
}

pub fn run(r: &Resolved) -> holodist::Result<Outcome> {
    match r.task {
        Task::Metric => metric(r),
        Task::Sandwich => sandwich_task(r),
        Task::Theorem1 => {
            let (pairs, tangents) = interior_samples(r)?;
            suite(
                r,
                check_theorem_global(&r.cfg.domain, &pairs, &tangents, &r.cfg.solver)?,
            )
        }
        Task::Localize => {
            let lp = r.cfg.localize.as_ref().expect("checked on resolve");
            let setup = LocalizationSetup::new(
                r.cfg.domain.clone(),
                lp.p.clone(),
                lp.outer_radius,
                lp.inner_radius,
                r.cfg.solver.clone(),
            )?;
            let s = &r.cfg.samples;
            let pairs = setup.sample_pairs(s.pairs, s.delta_min, r.seed)?;
            let tangents = setup.sample_tangents(s.tangents, s.delta_min, tangent_seed(r.seed))?;
            suite(r, check_localization(&setup, &pairs, &tangents)?)
        }
        Task::Classical => {
            let (pairs, tangents) = interior_samples(r)?;
            suite(r, verify_classical(&r.cfg.domain, &pairs, &tangents, &r.cfg.solver)?)
        }
        Task::Visibility => visibility(r),
        Task::Completeness => completeness(r),
        Task::Geodesic => geodesic(r),
        Task::Mconvex => mconvex(r),
    }
}

/// Coordinates as `re+imi` entries separated by `;`, floats in shortest
/// round-trip form.
pub fn fmt_vector(v: &[C64]) -> String {
    v.iter()
        .map(|c| format!("{}{:+}i", c.re, c.im))
        .collect::<Vec<_>>()
        .join(";")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| v.to_string())
}

fn csv_text(task: Task, rows: impl IntoIterator<Item = Vec<String>>) -> holodist::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns(task))?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

// pair i uses seed + i; tangents are offset so the two streams differ
fn tangent_seed(seed: u64) -> u64 {
    seed.wrapping_add(1 << 32)
}

fn interior_pairs(r: &Resolved) -> holodist::Result<Vec<(Point, Point)>> {
    if let Some(points) = &r.cfg.points {
        return Ok(points.clone());
    }
    let s = &r.cfg.samples;
    (0..s.pairs as u64)
        .map(|i| sample_pair_near(&r.cfg.domain, None, s.delta_min, s.delta_max, r.seed.wrapping_add(i)))
        .collect()
}

fn interior_samples(r: &Resolved) -> holodist::Result<(Vec<(Point, Point)>, Vec<Tangent>)> {
    let s = &r.cfg.samples;
    let base = tangent_seed(r.seed);
    let tangents = (0..s.tangents as u64)
        .map(|i| sample_tangent_near(&r.cfg.domain, None, s.delta_min, s.delta_max, base.wrapping_add(i)))
        .collect::<holodist::Result<_>>()?;
    Ok((interior_pairs(r)?, tangents))
}

fn status(ok: bool) -> String {
    if ok { "ok" } else { "violation" }.to_string()
}

fn failed(e: &Error) -> String {
    match e {
        Error::Solver { .. } | Error::Rejected { .. } => "failed".to_string(),
        other => format!("error: {other}"),
    }
}

fn metric(r: &Resolved) -> holodist::Result<Outcome> {
    let d = &r.cfg.domain;
    let cfg = &r.cfg.solver;
    let (pairs, tangents) = interior_samples(r)?;
    let oracle = |z: &Point, w: &Point| d.has_closed_form().then(|| model_distance(d, z, w).map(|v| v.value()));
    let pair_rows: Vec<(Vec<String>, bool)> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (z, w))| {
            let head = vec![
                i.to_string(),
                "pair".into(),
                fmt_vector(&z.0),
                fmt_vector(&w.0),
                String::new(),
            ];
            let values = (|| -> holodist::Result<_> {
                let c = caratheodory_lower(d, z, w, cfg)?.0.value();
                let (l, disc) = lempert_upper(d, z, w, cfg)?;
                let k = kobayashi_distance_upper_with_disc(d, z, w, cfg, Some(&disc))?;
                Ok((
                    c,
                    k.value.value(),
                    k.error_estimate,
                    l.value(),
                    oracle(z, w).transpose()?,
                ))
            })();
            match values {
                Ok((c, k, err, l, o)) => {
                    // the path value is an upper bound up to its quadrature error
                    let slack = cfg.tol + err;
                    let chain = c <= k + slack && k <= l + slack;
                    let bracket = o.is_none_or(|o| c <= o + cfg.tol && o <= l + cfg.tol);
                    let ok = chain && bracket;
                    let tail = [
                        c.to_string(),
                        k.to_string(),
                        err.to_string(),
                        l.to_string(),
                        fmt_opt(o),
                        status(ok),
                    ];
                    (head.into_iter().chain(tail).collect(), ok)
                }
                Err(e) => {
                    let blank = std::iter::repeat_n(String::new(), 5);
                    (head.into_iter().chain(blank).chain([failed(&e)]).collect(), false)
                }
            }
        })
        .collect();
    let tangent_rows: Vec<(Vec<String>, bool)> = tangents
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let head = vec![
                i.to_string(),
                "tangent".into(),
                fmt_vector(&t.base.0),
                String::new(),
                fmt_vector(&t.direction),
            ];
            let values = (|| -> holodist::Result<_> {
                let gamma = caratheodory_metric_lower(d, t, cfg)?.0;
                let kappa = kobayashi_metric_upper(d, t, cfg)?.0;
                Ok((
                    gamma,
                    kappa,
                    d.has_closed_form().then(|| model_metric(d, t)).transpose()?,
                ))
            })();
            match values {
                Ok((gamma, kappa, o)) => {
                    let slack = cfg.tol * (1.0 + kappa);
                    let ok = gamma <= kappa + slack && o.is_none_or(|o| gamma <= o + slack && o <= kappa + slack);
                    let tail = [
                        gamma.to_string(),
                        String::new(),
                        String::new(),
                        kappa.to_string(),
                        fmt_opt(o),
                        status(ok),
                    ];
                    (head.into_iter().chain(tail).collect(), ok)
                }
                Err(e) => {
                    let blank = std::iter::repeat_n(String::new(), 5);
                    (head.into_iter().chain(blank).chain([failed(&e)]).collect(), false)
                }
            }
        })
        .collect();
    let total = pair_rows.len() + tangent_rows.len();
    let failures = pair_rows.iter().chain(&tangent_rows).filter(|(_, ok)| !ok).count();
    let results = json!({
        "pairs": pair_rows.len(),
        "tangents": tangent_rows.len(),
        "oracle": d.has_closed_form(),
        "tol": cfg.tol,
    });
    let csv = csv_text(
        Task::Metric,
        pair_rows.into_iter().chain(tangent_rows).map(|(row, _)| row),
    )?;
    Ok(Outcome {
        csv,
        rows: total,
        failures,
        flags: Vec::new(),
        results,
    })
}

fn sandwich_task(r: &Resolved) -> holodist::Result<Outcome> {
    let d = &r.cfg.domain;
    let cfg = &r.cfg.solver;
    let pairs = interior_pairs(r)?;
    let rows: Vec<(Vec<String>, Option<f64>)> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (z, w))| {
            let head = vec![i.to_string(), fmt_vector(&z.0), fmt_vector(&w.0)];
            let values = sandwich(d, z, w, cfg).and_then(|b| {
                let o = d
                    .has_closed_form()
                    .then(|| model_distance(d, z, w).map(|v| v.value()))
                    .transpose()?;
                Ok((b, o))
            });
            match values {
                Ok((b, o)) => {
                    let (lo, up) = (b.lower.value(), b.upper.value());
                    let ok = b.is_consistent() && o.is_none_or(|o| lo <= o + cfg.tol && o <= up + cfg.tol);
                    let tail = [
                        lo.to_string(),
                        up.to_string(),
                        b.width().to_string(),
                        b.meta.lower_family.clone(),
                        b.meta.disc_degree.to_string(),
                        fmt_opt(o),
                        status(ok),
                    ];
                    (head.into_iter().chain(tail).collect(), ok.then(|| b.width()))
                }
                Err(e) => {
                    let blank = std::iter::repeat_n(String::new(), 6);
                    (head.into_iter().chain(blank).chain([failed(&e)]).collect(), None)
                }
            }
        })
        .collect();
    let widths: Vec<f64> = rows.iter().filter_map(|(_, w)| *w).collect();
    let failures = rows.len() - widths.len();
    let max_width = widths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let results = json!({
        "pairs": rows.len(),
        "max_width": if widths.is_empty() { Value::Null } else { json!(max_width) },
        "mean_width": if widths.is_empty() { Value::Null } else { json!(widths.iter().sum::<f64>() / widths.len() as f64) },
        "tol": cfg.tol,
    });
    let csv = csv_text(Task::Sandwich, rows.into_iter().map(|(row, _)| row))?;
    Ok(Outcome {
        csv,
        rows: pairs.len(),
        failures,
        flags: Vec::new(),
        results,
    })
}

fn suite(r: &Resolved, reports: Vec<ComparisonReport>) -> holodist::Result<Outcome> {
    let limit = r.cfg.limits.stability;
    let mut flags = Vec::new();
    let mut csv = String::new();
    let mut rows = 0;
    let mut failures = 0;
    for rep in &reports {
        let name = rep.inequality.name();
        if !rep.rows.is_empty() {
            if rep.unboundable > 0 || !rep.constant.is_finite() {
                flags.push(format!("{name}: unboundable ({} rows)", rep.unboundable));
            }
            if !(rep.stability <= limit) {
                flags.push(format!("{name}: stability {} exceeds {limit}", rep.stability));
            }
        }
        let attempted = rep.rows.len() + rep.dropped;
        if attempted > rows {
            rows = attempted;
        }
        failures = failures.max(rep.dropped);
        let text = rep.to_csv_string()?;
        // one header for the whole file
        let body = if csv.is_empty() {
            text.as_str()
        } else {
            text.split_once('\n').map_or("", |(_, b)| b)
        };
        csv.push_str(body);
    }
    if csv.is_empty() {
        csv = csv_text(r.task, std::iter::empty())?;
    }
    let summaries: Vec<_> = reports.iter().map(ComparisonReport::summary).collect();
    let results = json!({ "reports": summaries, "stability_limit": limit });
    Ok(Outcome {
        csv,
        rows,
        failures,
        flags,
        results,
    })
}

fn visibility_name(v: &Visibility) -> &'static str {
    match v {
        Visibility::VisibleEvidence => "visible-evidence",
        Visibility::NotVisible { .. } => "not-visible",
        Visibility::Inconclusive => "inconclusive",
    }
}

fn visibility(r: &Resolved) -> holodist::Result<Outcome> {
    let d = &r.cfg.domain;
    let pairs = match &r.cfg.boundary_pairs {
        Some(p) => p.clone(),
        None => sample_boundary_pairs(d, r.cfg.samples.pairs, r.cfg.min_separation, r.seed)?,
    };
    let report = visibility_classify(d, &pairs, &r.cfg.approach)?;
    let witness = match report.overall {
        Visibility::NotVisible { witness } => {
            let pv = &report.pairs[witness];
            json!({ "index": witness, "p": pv.p, "q": pv.q, "slope": pv.slope, "depth_slope": pv.depth_slope })
        }
        _ => Value::Null,
    };
    let per_pair: Vec<Value> = report
        .pairs
        .iter()
        .map(|pv| {
            let detail = match pv.verdict {
                GromovVerdict::Bounded { sup } => json!(sup),
                GromovVerdict::Divergent { slope } => json!(slope),
                GromovVerdict::Inconclusive { width } => json!(width),
            };
            json!({ "verdict": pv.verdict.name(), "value": detail, "slope": pv.slope, "depth_slope": pv.depth_slope })
        })
        .collect();
    let results = json!({
        "verdict": visibility_name(&report.overall),
        "witness": witness,
        "source": r.cfg.approach.source.name(),
        "pairs": per_pair,
    });
    let rows = report.pairs.iter().map(|p| p.records.len()).sum();
    Ok(Outcome {
        csv: report.to_csv_string()?,
        rows,
        failures: 0,
        flags: Vec::new(),
        results,
    })
}

fn completeness(r: &Resolved) -> holodist::Result<Outcome> {
    let d = &r.cfg.domain;
    let points = r.cfg.boundary_points.as_deref().unwrap_or_default();
    let reports = points
        .par_iter()
        .map(|p| strong_completeness_probe(d, p, &r.cfg.approach))
        .collect::<holodist::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for rep in &reports {
        for rec in &rep.records {
            rows.push(vec![
                fmt_vector(&rep.p.0),
                rec.j.to_string(),
                rec.delta.to_string(),
                rec.gromov.to_string(),
                rec.lower.to_string(),
                rec.upper.to_string(),
                rec.depth.to_string(),
            ]);
        }
    }
    let per_point: Vec<Value> = reports
        .iter()
        .map(|rep| {
            json!({
                "p": rep.p,
                "slope": rep.slope,
                "first_slope": rep.first_slope,
                "second_slope": rep.second_slope,
                "divergent": rep.divergent,
                "inconclusive": rep.inconclusive,
            })
        })
        .collect();
    let results = json!({
        "all_divergent": reports.iter().all(|rep| rep.divergent),
        "source": r.cfg.approach.source.name(),
        "points": per_point,
    });
    let n = rows.len();
    Ok(Outcome {
        csv: csv_text(Task::Completeness, rows)?,
        rows: n,
        failures: 0,
        flags: Vec::new(),
        results,
    })
}

fn geodesic_row(d: &DomainGeometry, z: &Point, w: &Point, r: &Resolved) -> holodist::Result<[String; 6]> {
    let cfg = &r.cfg.geodesic;
    if d.is_convex() {
        let g = complex_geodesic(d, z, w, cfg)?;
        let origin = serde_json::to_value(g.origin)?.as_str().unwrap_or_default().to_string();
        Ok([
            format!("complex:{origin}"),
            g.defect.to_string(),
            g.certified_defect.to_string(),
            g.tol.to_string(),
            String::new(),
            status(true),
        ])
    } else {
        let path = real_geodesic(d, z, w, cfg)?;
        Ok([
            "real:variational".to_string(),
            path.defect.to_string(),
            path.certified_defect.to_string(),
            path.tol.to_string(),
            path.length().to_string(),
            status(true),
        ])
    }
}

fn geodesic(r: &Resolved) -> holodist::Result<Outcome> {
    let d = &r.cfg.domain;
    if !d.is_convex() && !d.has_closed_form() {
        return Err(Error::Capability(format!(
            "geodesics on {} need convexity or a closed form",
            d.name()
        )));
    }
    let pairs = interior_pairs(r)?;
    let rows: Vec<(Vec<String>, bool)> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (z, w))| {
            let head = vec![i.to_string(), fmt_vector(&z.0), fmt_vector(&w.0)];
            match geodesic_row(d, z, w, r) {
                Ok(tail) => (head.into_iter().chain(tail).collect(), true),
                Err(Error::Rejected { defect, tol }) => {
                    let tail = [
                        String::new(),
                        defect.to_string(),
                        String::new(),
                        tol.to_string(),
                        String::new(),
                        "rejected".into(),
                    ];
                    (head.into_iter().chain(tail).collect(), false)
                }
                Err(e) => {
                    let blank = std::iter::repeat_n(String::new(), 5);
                    (head.into_iter().chain(blank).chain([failed(&e)]).collect(), false)
                }
            }
        })
        .collect();
    let failures = rows.iter().filter(|(_, ok)| !ok).count();
    let results = json!({
        "pairs": rows.len(),
        "accepted": rows.len() - failures,
        "tol": r.cfg.geodesic.tol,
        "convex": d.is_convex(),
    });
    let csv = csv_text(Task::Geodesic, rows.into_iter().map(|(row, _)| row))?;
    Ok(Outcome {
        csv,
        rows: pairs.len(),
        failures,
        flags: Vec::new(),
        results,
    })
}

fn mconvex(r: &Resolved) -> holodist::Result<Outcome> {
    let params = r.cfg.mconvex.as_ref().expect("checked on resolve");
    let rep = m_convexity_probe(&r.cfg.domain, params.m, params.samples, r.seed)?;
    let rows = rep
        .shells
        .iter()
        .enumerate()
        .map(|(i, (delta, ratio))| vec![i.to_string(), delta.to_string(), ratio.to_string()]);
    let csv = csv_text(Task::Mconvex, rows)?;
    let mut flags = Vec::new();
    if !rep.bounded {
        flags.push(format!("m = {}: ratio grows toward the boundary", params.m));
    }
    let results = json!({
        "m": rep.m,
        "max_ratio": rep.max_ratio,
        "worst_point": rep.worst_point,
        "bounded": rep.bounded,
    });
    Ok(Outcome {
        csv,
        rows: rep.shells.len(),
        failures: 0,
        flags,
        results,
    })
}
