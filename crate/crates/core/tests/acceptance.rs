//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any fails. Pass criterion numbers as arguments to run a
//! subset, e.g. `cargo test --test acceptance -- 1 7`.
//!
//! Reference values come from the closed forms written out below, not from
//! the library's own oracles.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;

use holodist::bounds::{check_localization, check_theorem_global, classical_report, InequalityId, LocalizationSetup};
use holodist::closed_forms::disc_gromov_lower;
use holodist::domains::{disc_free_certificate, sample_pair_near, DiscVerdict};
use holodist::extremal::{
    caratheodory_lower, kobayashi_distance_upper_with_disc, lempert_upper, sandwich, SolverConfig,
};
use holodist::geodesics::{
    boundary_extension_check, complex_geodesic, normalize_star, sample_boundary_pairs, strong_completeness_probe,
    visibility_classify, ApproachConfig, ComplexGeodesicDisc, GeodesicConfig, GromovVerdict, Visibility,
};
use holodist::{DomainGeometry, Point, C64};

type Outcome = Result<String, String>;

// ---- reference formulas ----

fn poincare(a: C64, b: C64) -> f64 {
    ((a - b).norm() / (C64::new(1.0, 0.0) - b.conj() * a).norm()).atanh()
}

fn ball_oracle(z: &[C64], w: &[C64]) -> f64 {
    let zz: f64 = z.iter().map(|x| x.norm_sqr()).sum();
    let ww: f64 = w.iter().map(|x| x.norm_sqr()).sum();
    let zw: C64 = z.iter().zip(w).map(|(a, b)| a * b.conj()).sum();
    let s = 1.0 - (1.0 - zz) * (1.0 - ww) / (C64::new(1.0, 0.0) - zw).norm_sqr();
    s.max(0.0).sqrt().atanh()
}

fn polydisc_oracle(radii: &[f64], z: &[C64], w: &[C64]) -> f64 {
    radii
        .iter()
        .zip(z.iter().zip(w))
        .map(|(r, (a, b))| poincare(a / r, b / r))
        .fold(0.0, f64::max)
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pairs(d: &DomainGeometry, n: usize, lo: f64, hi: f64, seed: u64) -> Vec<(Point, Point)> {
    (0..n as u64)
        .map(|i| sample_pair_near(d, None, lo, hi, seed + i).expect("sampling"))
        .collect()
}

// ---- criteria ----

fn disc_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let cfg = SolverConfig::default();
    let d = DomainGeometry::unit_disc();
    let (mut over, mut under) = (0.0f64, 0.0f64);
    for (z, w) in pairs(&d, 100, 0.05, 0.95, 0) {
        let exact = poincare(z.0[0], w.0[0]);
        let up = lempert_upper(&d, &z, &w, &cfg).map_err(|e| e.to_string())?.0.value();
        let lo = caratheodory_lower(&d, &z, &w, &cfg)
            .map_err(|e| e.to_string())?
            .0
            .value();
        check(up >= exact - 1e-12 && up <= exact + 1e-3, || {
            format!("upper {up} vs {exact} at {z:?}, {w:?}")
        })?;
        check(lo <= exact + 1e-12 && lo >= exact - 1e-3, || {
            format!("lower {lo} vs {exact} at {z:?}, {w:?}")
        })?;
        over = over.max(up - exact);
        under = under.max(exact - lo);
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 120.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "100 pairs, upper excess {over:.1e}, lower deficit {under:.1e}, {secs:.1} s"
    ))
}

fn ball_sandwich_width() -> Outcome {
    let cfg = SolverConfig::default();
    let d = DomainGeometry::unit_ball(2);
    let brackets: Vec<_> = pairs(&d, 100, 0.05, 0.95, 0)
        .par_iter()
        .map(|(z, w)| sandwich(&d, z, w, &cfg).map(|b| (b, ball_oracle(&z.0, &w.0))))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut widest = 0.0f64;
    for (b, exact) in &brackets {
        check(b.is_consistent(), || format!("inconsistent bracket {b:?}"))?;
        check(
            b.lower.value() <= exact + 1e-12 && b.upper.value() >= exact - 1e-12,
            || format!("bracket [{}, {}] misses {exact}", b.lower, b.upper),
        )?;
        widest = widest.max(b.width());
    }
    check(widest <= 1e-2, || format!("widest bracket {widest:.2e}"))?;
    Ok(format!("100 pairs, widest bracket {widest:.2e}"))
}

fn chain_inequality() -> Outcome {
    let cfg = SolverConfig::default();
    let domains = [
        (DomainGeometry::unit_disc(), 150),
        (DomainGeometry::unit_ball(2), 110),
        (DomainGeometry::annulus(0.3).unwrap(), 110),
        (DomainGeometry::polydisc(&[1.0, 0.7]).unwrap(), 80),
        (DomainGeometry::ellipsoid(&[1.0, 2.0]).unwrap(), 50),
    ];
    let mut total = 0;
    let mut notes = Vec::new();
    for (d, n) in &domains {
        let rows: Vec<_> = pairs(d, *n, 0.05, 0.6, 100)
            .par_iter()
            .map(|(z, w)| -> Result<(f64, f64, f64, f64), String> {
                let c = caratheodory_lower(d, z, w, &cfg).map_err(|e| e.to_string())?.0.value();
                let (l, disc) = lempert_upper(d, z, w, &cfg).map_err(|e| e.to_string())?;
                let k = kobayashi_distance_upper_with_disc(d, z, w, &cfg, Some(&disc)).map_err(|e| e.to_string())?;
                Ok((c, k.value.value(), k.error_estimate, l.value()))
            })
            .collect::<Result<_, _>>()
            .map_err(|e| format!("{}: {e}", d.name()))?;
        let mut worst = f64::NEG_INFINITY;
        for &(c, k, err, l) in &rows {
            let slack = cfg.tol + err;
            check(c <= k + slack && k <= l + slack, || {
                format!("{}: c {c}, k {k} (±{err:.1e}), l {l}", d.name())
            })?;
            worst = worst.max((c - k).max(k - l));
        }
        total += rows.len();
        notes.push(format!("{} {} worst {worst:.1e}", d.name(), rows.len()));
    }
    check(total >= 500, || format!("only {total} pairs"))?;
    Ok(format!("{total} pairs, no violations ({})", notes.join(", ")))
}

fn stable(r: &holodist::bounds::ComparisonReport, limit: f64) -> Result<String, String> {
    let name = r.inequality.name();
    check(r.constant.is_finite(), || format!("{name}: constant {}", r.constant))?;
    check(r.stability <= limit, || format!("{name}: stability {}", r.stability))?;
    check(r.unboundable == 0 && r.dropped == 0, || {
        format!("{name}: {} unboundable, {} dropped rows", r.unboundable, r.dropped)
    })?;
    Ok(format!("{name} C={:.3} s={:.2}", r.constant, r.stability))
}

fn annulus_global_constants() -> Outcome {
    let mut cfg = SolverConfig::default();
    cfg.seed = 1000;
    let d = DomainGeometry::annulus(0.3).unwrap();
    let reports = check_theorem_global(&d, &pairs(&d, 200, 0.02, 0.35, 1000), &[], &cfg).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for id in [InequalityId::Zero, InequalityId::LipGlobal] {
        let r = reports.iter().find(|r| r.inequality == id).ok_or("missing report")?;
        check(r.rows.len() == 200, || format!("{}: {} rows", id.name(), r.rows.len()))?;
        notes.push(stable(r, 1.5)?);
    }
    Ok(format!("200 pairs, {}", notes.join(", ")))
}

fn ball_localization() -> Outcome {
    let start = Instant::now();
    let mut cfg = SolverConfig::default();
    cfg.seed = 7;
    let ball = DomainGeometry::unit_ball(2);
    let setup = LocalizationSetup::new(ball, Point::real(&[1.0, 0.0]), 0.5, 0.25, cfg).map_err(|e| e.to_string())?;
    let pairs = setup.sample_pairs(100, 0.01, 7).map_err(|e| e.to_string())?;
    let tangents = setup.sample_tangents(50, 0.01, 7).map_err(|e| e.to_string())?;
    let reports = check_localization(&setup, &pairs, &tangents).map_err(|e| e.to_string())?;
    let wanted = [
        InequalityId::Quo,
        InequalityId::Lip,
        InequalityId::Met,
        InequalityId::LipWeak,
        InequalityId::MetWeak,
    ];
    let mut notes = Vec::new();
    for id in wanted {
        let r = reports
            .iter()
            .find(|r| r.inequality == id)
            .ok_or_else(|| format!("no {} report", id.name()))?;
        notes.push(stable(r, 1.5)?);
    }
    Ok(format!(
        "100 pairs, 50 tangents, {}, {:.0} s",
        notes.join(", "),
        start.elapsed().as_secs_f64()
    ))
}

fn zero_constant_inequalities() -> Outcome {
    let cfg = SolverConfig::default();
    let radii = [1.0, 0.7];
    let cases = [
        (DomainGeometry::unit_ball(2), None),
        (DomainGeometry::polydisc(&radii).unwrap(), Some(radii)),
    ];
    let mut notes = Vec::new();
    for (d, poly) in &cases {
        let ps = pairs(d, 1000, 1e-3, 0.9, 0);
        let r = classical_report(InequalityId::Low, d, &ps, &[], &cfg).map_err(|e| e.to_string())?;
        check(r.rows.len() == 1000, || format!("{}: {} rows", d.name(), r.rows.len()))?;
        let margin = r.min_margin();
        check(margin >= -1e-9, || format!("{}: margin {margin:e}", d.name()))?;
        // the same inequality against the reference distance
        for (z, w) in &ps {
            let k = match poly {
                Some(radii) => polydisc_oracle(radii, &z.0, &w.0),
                None => ball_oracle(&z.0, &w.0),
            };
            let (dz, dw) = (d.boundary_distance(z).unwrap(), d.boundary_distance(w).unwrap());
            let lhs = 0.5 * (dz / dw).ln().abs();
            check(lhs <= k + 1e-9, || {
                format!("{}: ½|log δ ratio| {lhs} > k {k}", d.name())
            })?;
        }
        notes.push(format!("{} margin {margin:.1e}", d.name()));
    }
    let disc = DomainGeometry::unit_disc();
    let mut worst = f64::INFINITY;
    for (z, w) in pairs(&disc, 10_000, 1e-4, 0.999, 0) {
        let (a, b) = (z.0[0], w.0[0]);
        let margin = poincare(a, b) - disc_gromov_lower(a, b).map_err(|e| e.to_string())?.value();
        worst = worst.min(margin);
    }
    check(worst >= -1e-12, || format!("disc Gromov bound margin {worst:e}"))?;
    notes.push(format!("disc Gromov bound over 10^4 pairs margin {worst:.1e}"));
    Ok(notes.join(", "))
}

fn visibility_dichotomy() -> Outcome {
    let cfg = ApproachConfig::default();
    let poly = DomainGeometry::polydisc(&[1.0, 1.0]).unwrap();
    let (p, q) = (Point::real(&[1.0, 0.2]), Point::real(&[1.0, -0.2]));
    let r = visibility_classify(&poly, &[(p, q)], &cfg).map_err(|e| e.to_string())?;
    check(matches!(r.overall, Visibility::NotVisible { witness: 0 }), || {
        format!("polydisc: {:?}", r.overall)
    })?;
    let depth_slope = r.pairs[0].depth_slope;
    check(depth_slope >= 1.8, || {
        format!("polydisc slope against depth {depth_slope}")
    })?;

    let ball = DomainGeometry::unit_ball(2);
    let sampled = sample_boundary_pairs(&ball, 20, 2f64.sqrt(), 0).map_err(|e| e.to_string())?;
    let r = visibility_classify(&ball, &sampled, &cfg).map_err(|e| e.to_string())?;
    check(r.overall == Visibility::VisibleEvidence, || {
        format!("ball: {:?}", r.overall)
    })?;
    let mut sup = f64::NEG_INFINITY;
    for pair in &r.pairs {
        match pair.verdict {
            GromovVerdict::Bounded { sup: s } if s <= 1.0 => sup = sup.max(s),
            ref v => return Err(format!("ball pair {:?}, {:?}: {v:?}", pair.p, pair.q)),
        }
    }

    // the certificate must agree: no boundary disc on the ball, and on the
    // polydisc a disc whose face carries a divergent pair
    check(
        disc_free_certificate(&ball, 256, 0.05, 0) == DiscVerdict::NoDiscFound,
        || "ball disc found".into(),
    )?;
    let DiscVerdict::DiscFound(face) = disc_free_certificate(&poly, 256, 0.05, 0) else {
        return Err("no boundary disc on the polydisc".into());
    };
    let (a, b) = (face.at(C64::new(0.5, 0.0)), face.at(C64::new(-0.5, 0.0)));
    let r = visibility_classify(&poly, &[(a, b)], &cfg).map_err(|e| e.to_string())?;
    check(matches!(r.overall, Visibility::NotVisible { .. }), || {
        format!("face pair: {:?}", r.overall)
    })?;
    Ok(format!(
        "polydisc depth slope {depth_slope:.3}, 20 ball pairs with sup {sup:.2e}, certificates agree"
    ))
}

fn strong_completeness() -> Outcome {
    let start = Instant::now();
    let cfg = ApproachConfig {
        steps: 20,
        delta0: 0.5,
        ..ApproachConfig::default()
    };
    let mut notes = Vec::new();
    for (d, p) in [
        (DomainGeometry::unit_disc(), Point::real(&[1.0])),
        (DomainGeometry::unit_ball(2), Point::real(&[1.0, 0.0])),
    ] {
        let r = strong_completeness_probe(&d, &p, &cfg).map_err(|e| e.to_string())?;
        let last = r.records.last().unwrap().delta;
        check(last <= 2f64.powi(-20), || format!("{}: deepest δ {last}", d.name()))?;
        check(r.divergent && (r.slope - 1.0).abs() <= 0.2, || {
            format!("{}: slope {}", d.name(), r.slope)
        })?;
        notes.push(format!("{} slope {:.4}", d.name(), r.slope));
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 10.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{}, {secs:.2} s", notes.join(", ")))
}

/// `max |k_Δ(ζ,η) − k_D(φ(ζ),φ(η))|` over a polar grid, with `k_D` given.
fn isometry_defect(g: &ComplexGeodesicDisc, k: impl Fn(&Point, &Point) -> f64) -> f64 {
    let grid: Vec<C64> = (1..=6)
        .flat_map(|i| (0..12).map(move |j| C64::from_polar(0.15 * i as f64, 0.5236 * j as f64)))
        .chain([C64::new(0.0, 0.0)])
        .collect();
    let mut worst = 0.0f64;
    for (i, &a) in grid.iter().enumerate() {
        for &b in &grid[i + 1..] {
            worst = worst.max((poincare(a, b) - k(&g.eval(a), &g.eval(b))).abs());
        }
    }
    worst
}

fn geodesic_verification() -> Outcome {
    let cfg = GeodesicConfig::default();
    let err = |e: holodist::Error| e.to_string();
    let disc = DomainGeometry::unit_disc();
    let ball = DomainGeometry::unit_ball(2);
    let poly = DomainGeometry::polydisc(&[1.0, 1.0]).unwrap();

    let slice = complex_geodesic(&ball, &Point::zeros(2), &Point::real(&[0.5, 0.0]), &cfg).map_err(err)?;
    let ball_defect = isometry_defect(&slice, |z, w| ball_oracle(&z.0, &w.0));
    check(slice.defect <= 1e-6 && ball_defect <= 1e-6, || {
        format!("ball slice {} / {ball_defect}", slice.defect)
    })?;
    let off = C64::new(0.3, 0.2);
    check(slice.eval(off).0[1].norm() < 1e-12, || {
        "ball geodesic leaves the slice".into()
    })?;

    let diag = complex_geodesic(&poly, &Point::zeros(2), &Point::real(&[0.9, 0.45]), &cfg).map_err(err)?;
    let poly_defect = isometry_defect(&diag, |z, w| polydisc_oracle(&[1.0, 1.0], &z.0, &w.0));
    check(diag.defect <= 1e-6 && poly_defect <= 1e-6, || {
        format!("polydisc diagonal {} / {poly_defect}", diag.defect)
    })?;
    let x = diag.eval(off);
    check((x.0[1] - x.0[0] / 2.0).norm() < 1e-12, || {
        format!("not the diagonal ζ ↦ (ζ, ζ/2): {x:?}")
    })?;

    // normalization: a second pass may move the center by less than the
    // (∗) search grid spacing
    let grid_tol = 1.0 / 40.0;
    let tilted = complex_geodesic(
        &ball,
        &Point::real(&[0.3, 0.4]),
        &Point(vec![C64::new(0.5, 0.0), C64::new(-0.2, 0.1)]),
        &cfg,
    )
    .map_err(err)?;
    let mut moved = 0.0f64;
    for (d, g) in [(&ball, &slice), (&poly, &diag), (&ball, &tilted)] {
        let once = normalize_star(g, d);
        let twice = normalize_star(&once, d);
        moved = moved.max((twice.center - once.center).norm());
        let peak = d.boundary_distance(&once.eval(C64::new(0.0, 0.0))).map_err(err)?;
        let elsewhere = d.boundary_distance(&once.eval(C64::new(0.2, -0.1))).map_err(err)?;
        check(peak >= elsewhere, || format!("{}: δ∘φ not peaked at 0", d.name()))?;
    }
    check(moved < grid_tol, || {
        format!("second normalization moved the center by {moved}")
    })?;

    let ident = complex_geodesic(&disc, &Point::zeros(1), &Point::real(&[0.5]), &cfg).map_err(err)?;
    let hits = [
        boundary_extension_check(&slice, &Point::real(&[1.0, 0.0]), &Point::real(&[-1.0, 0.0])),
        boundary_extension_check(&ident, &Point::real(&[1.0]), &Point::real(&[-1.0])),
        boundary_extension_check(&diag, &Point::real(&[1.0, 0.5]), &Point::real(&[-1.0, -0.5])),
    ];
    let mut miss = 0.0f64;
    for h in &hits {
        check(h.hits(1e-12), || format!("boundary targets missed: {h:?}"))?;
        miss = miss.max(h.distance_p.max(h.distance_q));
    }
    Ok(format!(
        "defects {ball_defect:.1e} (ball), {poly_defect:.1e} (polydisc), renormalization moves {moved:.1e}, target miss {miss:.1e}"
    ))
}

fn determinism() -> Outcome {
    let cfg = SolverConfig::default();
    let poly = DomainGeometry::polydisc(&[1.0, 0.7]).unwrap();
    let ann = DomainGeometry::annulus(0.3).unwrap();
    let run = || -> Result<Vec<String>, String> {
        let mut out = Vec::new();
        for r in check_theorem_global(&poly, &pairs(&poly, 6, 0.05, 0.5, 3), &[], &cfg).map_err(|e| e.to_string())? {
            out.push(r.to_csv_string().map_err(|e| e.to_string())?);
        }
        let r = classical_report(InequalityId::Root, &ann, &pairs(&ann, 6, 0.02, 0.35, 3), &[], &cfg)
            .map_err(|e| e.to_string())?;
        out.push(r.to_csv_string().map_err(|e| e.to_string())?);
        let ball = DomainGeometry::unit_ball(2);
        let bp = sample_boundary_pairs(&ball, 4, 1.0, 3).map_err(|e| e.to_string())?;
        let v = visibility_classify(&ball, &bp, &ApproachConfig::default()).map_err(|e| e.to_string())?;
        out.push(v.to_csv_string().map_err(|e| e.to_string())?);
        Ok(out)
    };
    let (a, b) = (run()?, run()?);
    check(a == b, || "CSV output differs between runs".into())?;
    let bytes: usize = a.iter().map(String::len).sum();
    Ok(format!("{} CSV files, {bytes} bytes, identical", a.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("disc oracle equivalence", disc_oracle_equivalence),
        ("ball sandwich width", ball_sandwich_width),
        ("chain inequality", chain_inequality),
        ("annulus global constants", annulus_global_constants),
        ("ball localization", ball_localization),
        ("zero-constant inequalities", zero_constant_inequalities),
        ("visibility dichotomy", visibility_dichotomy),
        ("strong completeness", strong_completeness),
        ("geodesic verification", geodesic_verification),
        ("determinism", determinism),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n} ({name}): PASS [{secs:.1} s] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL [{secs:.1} s] {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
