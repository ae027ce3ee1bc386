use holodist::closed_forms::{disc_distance, disc_gromov_lower, mobius, model_distance};
use holodist::{DomainGeometry, Point, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn disc_point() -> impl Strategy<Value = C64> {
    (0.0f64..0.999, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn sample_in(d: &DomainGeometry, rng: &mut ChaCha8Rng) -> Point {
    let (center, radius) = d.bounding_ball();
    let r = radius.min(4.0);
    loop {
        let p = Point(
            center
                .0
                .iter()
                .map(|c| c + C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * r)
                .collect(),
        );
        if d.is_inside(&p.0) {
            return p;
        }
    }
}

fn models() -> Vec<(DomainGeometry, f64)> {
    vec![
        (DomainGeometry::unit_disc(), 1e-12),
        (DomainGeometry::unit_ball(2), 1e-12),
        (
            DomainGeometry::ball(Point::real(&[0.5, -0.2, 0.0]), 2.0).unwrap(),
            1e-12,
        ),
        (DomainGeometry::polydisc(&[1.0, 2.0]).unwrap(), 1e-12),
        (
            DomainGeometry::half_plane(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)], 0.5).unwrap(),
            1e-12,
        ),
        (DomainGeometry::annulus(0.3).unwrap(), 1e-8),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn mobius_invariance(a in disc_point(), z in disc_point(), w in disc_point(), t in 0.0f64..6.3) {
        prop_assume!(a.norm() < 0.99);
        let rot = C64::from_polar(1.0, t);
        let before = disc_distance(z, w);
        let after = disc_distance(rot * mobius(a, z), rot * mobius(a, w));
        prop_assert!((before - after).abs() <= 1e-12 * (1.0 + before).max(1.0 / (1.0 - z.norm().max(w.norm()))));
    }

    #[test]
    fn polydisc_is_max_of_factors(z in (disc_point(), disc_point()), w in (disc_point(), disc_point())) {
        let d = DomainGeometry::polydisc(&[1.0, 1.0]).unwrap();
        let v = model_distance(&d, &Point(vec![z.0, z.1]), &Point(vec![w.0, w.1])).unwrap().value();
        let factor = |a: C64, b: C64| ((a - b) / (C64::new(1.0, 0.0) - a.conj() * b)).norm().atanh();
        let oracle = factor(z.0, w.0).max(factor(z.1, w.1));
        prop_assert!((v - oracle).abs() <= 1e-9 * (1.0 + oracle));
    }
}

#[test]
fn gromov_lower_never_exceeds_poincare() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = 0;
    for _ in 0..10_000 {
        let mut pick = || {
            let r: f64 = 1.0 - 10f64.powf(-rng.gen_range(0.0..6.0));
            C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
        };
        let (z, w) = (pick(), pick());
        let lower = disc_gromov_lower(z, w).unwrap().value();
        if lower > disc_distance(z, w) + 1e-12 {
            violations += 1;
        }
    }
    assert_eq!(violations, 0);
}

#[test]
fn symmetry_and_triangle_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (d, tol) in models() {
        let dist = |a: &Point, b: &Point| model_distance(&d, a, b).unwrap().value();
        for _ in 0..1000 {
            let (x, y, z) = (
                sample_in(&d, &mut rng),
                sample_in(&d, &mut rng),
                sample_in(&d, &mut rng),
            );
            let (xy, yx, yz, xz) = (dist(&x, &y), dist(&y, &x), dist(&y, &z), dist(&x, &z));
            assert!(
                (xy - yx).abs() <= tol * (1.0 + xy),
                "{}: asymmetry {xy} vs {yx}",
                d.name()
            );
            assert!(
                xz <= xy + yz + tol * (1.0 + xz),
                "{}: triangle {xz} > {xy} + {yz}",
                d.name()
            );
        }
    }
}
