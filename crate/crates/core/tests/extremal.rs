use holodist::closed_forms::{model_distance, model_metric};
use holodist::domains::{sample_pair_near, BallWindow};
use holodist::extremal::{
    caratheodory_lower, caratheodory_metric_lower, kobayashi_distance_upper_with_disc, kobayashi_metric_upper,
    lempert_upper, sandwich, SolverConfig,
};
use holodist::{DomainGeometry, Point, Tangent, C64};

fn oracle_domains() -> Vec<DomainGeometry> {
    vec![
        DomainGeometry::unit_disc(),
        DomainGeometry::unit_ball(2),
        DomainGeometry::polydisc(&[1.0, 0.7]).unwrap(),
        DomainGeometry::annulus(0.3).unwrap(),
    ]
}

#[test]
fn bounds_are_sound_and_chained() {
    let cfg = SolverConfig::default();
    for d in oracle_domains() {
        for seed in 0..3 {
            let (z, w) = sample_pair_near(&d, None, 0.05, 0.6, seed).unwrap();
            let oracle = model_distance(&d, &z, &w).unwrap().value();
            let (lo, _) = caratheodory_lower(&d, &z, &w, &cfg).unwrap();
            let (hi, disc) = lempert_upper(&d, &z, &w, &cfg).unwrap();
            let k = kobayashi_distance_upper_with_disc(&d, &z, &w, &cfg, Some(&disc)).unwrap();
            assert!(lo.value() <= oracle + 1e-12, "{}: c {} > {oracle}", d.name(), lo);
            assert!(hi.value() >= oracle - 1e-12, "{}: l {} < {oracle}", d.name(), hi);
            assert!(lo.value() <= k.value.value() + cfg.tol, "{}", d.name());
            assert!(
                k.value.value() <= hi.value() + cfg.tol,
                "{}: k {} l {}",
                d.name(),
                k.value,
                hi
            );
            assert!(
                (k.value.value() - oracle).abs() <= 1e-2,
                "{}: k {} vs {oracle}",
                d.name(),
                k.value
            );
        }
    }
}

#[test]
fn metric_bounds_are_sound() {
    let cfg = SolverConfig::default();
    let cases = [
        (
            DomainGeometry::unit_ball(2),
            Point::real(&[0.2, -0.3]),
            vec![C64::new(0.5, 1.0), C64::new(-0.3, 0.2)],
        ),
        (
            DomainGeometry::polydisc(&[1.0, 0.7]).unwrap(),
            Point::real(&[0.1, 0.2]),
            vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)],
        ),
        (
            DomainGeometry::annulus(0.3).unwrap(),
            Point::real(&[0.5]),
            vec![C64::new(1.0, 1.0)],
        ),
    ];
    for (d, z, x) in cases {
        let t = Tangent::new(z, x).unwrap();
        let oracle = model_metric(&d, &t).unwrap();
        let (lo, _) = caratheodory_metric_lower(&d, &t, &cfg).unwrap();
        let (hi, _) = kobayashi_metric_upper(&d, &t, &cfg).unwrap();
        assert!(
            lo <= oracle + 1e-12 && oracle <= hi + 1e-12,
            "{}: {lo} {oracle} {hi}",
            d.name()
        );
    }
}

#[test]
fn metric_upper_is_homogeneous() {
    let cfg = SolverConfig::default();
    let z = Point(vec![C64::new(0.1, 0.2), C64::new(-0.2, 0.1)]);
    let x = vec![C64::new(0.4, -0.1), C64::new(0.2, 0.7)];
    for d in [
        DomainGeometry::unit_ball(2),
        DomainGeometry::ellipsoid(&[1.0, 2.0]).unwrap(),
    ] {
        let (base, _) = kobayashi_metric_upper(&d, &Tangent::new(z.clone(), x.clone()).unwrap(), &cfg).unwrap();
        for lam in [C64::new(2.5, 0.0), C64::new(-0.3, 1.1), C64::new(0.0, -7.0)] {
            let scaled: Vec<C64> = x.iter().map(|c| c * lam).collect();
            let (v, _) = kobayashi_metric_upper(&d, &Tangent::new(z.clone(), scaled).unwrap(), &cfg).unwrap();
            assert!(
                (v - lam.norm() * base).abs() <= 1e-9 * (1.0 + v),
                "{}: {v} vs {}",
                d.name(),
                lam.norm() * base
            );
        }
    }
}

#[test]
fn lempert_is_monotone_under_inclusion() {
    let cfg = SolverConfig::default();
    let ball = DomainGeometry::unit_ball(2);
    let window = BallWindow {
        center: Point::real(&[0.5, 0.0]),
        radius: 0.7,
    };
    let small = DomainGeometry::intersection(&ball, window).unwrap();
    for (z, w) in [
        (Point::real(&[0.3, 0.0]), Point::real(&[0.6, 0.1])),
        (Point::real(&[0.2, 0.2]), Point::real(&[0.5, -0.2])),
    ] {
        let (big_l, _) = lempert_upper(&ball, &z, &w, &cfg).unwrap();
        let (small_l, _) = lempert_upper(&small, &z, &w, &cfg).unwrap();
        assert!(small_l.value() >= big_l.value() - cfg.tol, "{} < {}", small_l, big_l);
    }
}

#[test]
fn doubling_the_degree_is_stable() {
    let cfg = SolverConfig::default();
    let doubled = SolverConfig {
        degree: 2 * cfg.degree,
        ..cfg.clone()
    };
    for d in &oracle_domains()[..3] {
        let (z, w) = sample_pair_near(d, None, 0.1, 0.6, 7).unwrap();
        let a = lempert_upper(d, &z, &w, &cfg).unwrap().0.value();
        let b = lempert_upper(d, &z, &w, &doubled).unwrap().0.value();
        assert!((a - b).abs() < cfg.tol, "{}: {a} vs {b}", d.name());
    }
}

#[test]
fn ball_bracket_is_narrow_and_annulus_bracket_is_not() {
    let cfg = SolverConfig::default();
    let ball = DomainGeometry::unit_ball(2);
    let (z, w) = sample_pair_near(&ball, None, 0.05, 0.9, 3).unwrap();
    let b = sandwich(&ball, &z, &w, &cfg).unwrap();
    assert!(b.is_consistent() && b.width() <= 1e-2, "{b:?}");
    let ann = DomainGeometry::annulus(0.3).unwrap();
    let b = sandwich(&ann, &Point::real(&[-0.6]), &Point::real(&[0.6]), &cfg).unwrap();
    assert!(b.is_consistent() && b.width() > 0.1, "{b:?}");
}

#[test]
fn near_boundary_points_are_refused() {
    let cfg = SolverConfig::default();
    let d = DomainGeometry::unit_disc();
    let z = Point::real(&[1.0 - 1e-6]);
    assert!(lempert_upper(&d, &Point::real(&[0.0]), &z, &cfg).is_err());
    assert!(caratheodory_lower(&d, &Point::real(&[0.0]), &z, &cfg).is_err());
}

#[test]
fn config_json_round_trip() {
    let cfg = SolverConfig {
        degree: 12,
        seed: 42,
        tol: 5e-4,
        ..SolverConfig::default()
    };
    let text = serde_json::to_string(&cfg).unwrap();
    let back: SolverConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cfg);
    let partial: SolverConfig = serde_json::from_str(r#"{"degree": 6, "restarts": 3}"#).unwrap();
    assert_eq!(partial.degree, 6);
    assert_eq!(partial.restarts, 3);
    assert_eq!(partial.boundary_samples, SolverConfig::default().boundary_samples);
}

#[test]
fn discs_and_functionals_export_json() {
    let cfg = SolverConfig::default();
    let d = DomainGeometry::unit_ball(2);
    let (z, w) = (Point::real(&[0.1, 0.0]), Point::real(&[0.0, 0.4]));
    let (_, disc) = lempert_upper(&d, &z, &w, &cfg).unwrap();
    let (_, f) = caratheodory_lower(&d, &z, &w, &cfg).unwrap();
    let dj: serde_json::Value = serde_json::from_str(&disc.to_json().unwrap()).unwrap();
    assert!(dj["coefficients"].is_array());
    let fj: serde_json::Value = serde_json::from_str(&f.to_json().unwrap()).unwrap();
    assert_eq!(fj["family"], f.family_name());
}
