use std::f64::consts::PI;

use proptest::prelude::*;

use isoperim_core::conformal::{self, DEFAULT_SERIES_ORDER};
use isoperim_core::geometry::{self, InversionOptions};
use isoperim_core::greens;
use isoperim_core::hardy_sobolev::{self, Profile, TestFunction};
use isoperim_core::measures::{self, DEFAULT_ORDER};
use isoperim_core::random::{self, StarSampler};
use isoperim_core::report;
use isoperim_core::search::{self, ScanOptions};
use isoperim_core::{Domain, Execution, Point};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn origin_star(seed: u64) -> Domain {
    random::origin_star(&mut random::stream(seed, 0), &StarSampler::default())
}

fn mild_star(seed: u64) -> Domain {
    random::origin_star(&mut random::stream(seed, 1), &StarSampler::mild())
}

fn origin_free(seed: u64) -> Domain {
    random::origin_free(&mut random::stream(seed, 2), &StarSampler::default())
}

fn any_domain(seed: u64, kind: u8) -> Domain {
    match kind % 3 {
        0 => origin_star(seed),
        1 => origin_free(seed),
        _ => random::star_polygon(&mut random::stream(seed, 3), Point::new(0.0, 0.0)),
    }
}

fn test_function(seed: u64, knots: usize) -> TestFunction {
    hardy_sobolev::random_test_function(&mut random::stream(seed, 4), &StarSampler::default(), knots)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn area_scales_quadratically(seed in any::<u64>(), kind in any::<u8>(), idx in 0usize..3) {
        let d = any_domain(seed, kind);
        let lambda = [0.5, 2.0, 7.0][idx];
        let tol = if matches!(d, Domain::FourierStar(_)) { 1e-8 } else { 1e-10 };
        prop_assert!(rel(d.scaled(lambda).unwrap().area(), lambda * lambda * d.area()) < tol);
    }

    #[test]
    fn measures_scale_covariantly(seed in any::<u64>(), kind in any::<u8>(), big in any::<bool>(), p in 0.0f64..2.0, q in -1.5f64..2.0) {
        let d = any_domain(seed, kind);
        let lambda = if big { 2.0 } else { 0.5 };
        let s = d.scaled(lambda).unwrap();
        let wp = measures::weighted_perimeter(&d, p, DEFAULT_ORDER).unwrap();
        let wps = measures::weighted_perimeter(&s, p, DEFAULT_ORDER).unwrap();
        prop_assert!(rel(wps, lambda.powf(p + 1.0) * wp) < 1e-8);
        let wv = measures::weighted_volume(&d, q, DEFAULT_ORDER).unwrap();
        let wvs = measures::weighted_volume(&s, q, DEFAULT_ORDER).unwrap();
        prop_assert!(rel(wvs, lambda.powf(q + 2.0) * wv) < 1e-8);
    }

    #[test]
    fn measures_are_rotation_invariant(seed in any::<u64>(), kind in any::<u8>(), angle in 0.0f64..(2.0 * PI), p in 0.0f64..2.0, q in -1.5f64..2.0) {
        let d = any_domain(seed, kind);
        let r = d.rotated(angle);
        let a = measures::weighted_perimeter(&d, p, DEFAULT_ORDER).unwrap();
        let b = measures::weighted_perimeter(&r, p, DEFAULT_ORDER).unwrap();
        prop_assert!(rel(b, a) < 1e-8);
        let a = measures::weighted_volume(&d, q, DEFAULT_ORDER).unwrap();
        let b = measures::weighted_volume(&r, q, DEFAULT_ORDER).unwrap();
        prop_assert!(rel(b, a) < 1e-8);
    }

    #[test]
    fn boundary_weights_converge(seed in any::<u64>()) {
        let d = origin_star(seed);
        let coarse = geometry::boundary_nodes(&d, DEFAULT_ORDER).unwrap();
        let fine = geometry::boundary_nodes(&d, 2 * DEFAULT_ORDER).unwrap();
        prop_assert!(coarse.nodes.iter().all(|n| n.weight > 0.0));
        prop_assert!(rel(coarse.total_length, fine.total_length) < 1e-8);
    }

    #[test]
    fn inversion_of_disks(r in 0.1f64..10.0, cx in -0.9f64..0.9, cy in -0.9f64..0.9) {
        let centered = Domain::ball(r).unwrap();
        let once = geometry::invert_complement(&centered, InversionOptions::default()).unwrap().domain;
        let twice = geometry::invert_complement(&once, InversionOptions::default()).unwrap().domain;
        match (&once, &twice) {
            (Domain::Disk(a), Domain::Disk(b)) => {
                prop_assert!((a.radius() - 1.0 / r).abs() < 1e-12 * (1.0 / r).max(1.0));
                prop_assert!((b.radius() - r).abs() < 1e-12 * r.max(1.0));
            }
            _ => prop_assert!(false, "disk inverted to a non-disk"),
        }

        let shifted = Domain::disk(Point::new(cx, cy) * (r / std::f64::consts::SQRT_2), r).unwrap();
        let image = geometry::invert_complement(&shifted, InversionOptions::default()).unwrap().domain;
        prop_assert!(matches!(image, Domain::Disk(_)));
        prop_assert!(image.contains(Point::new(0.0, 0.0)));
    }

    #[test]
    fn main_inequality_for_origin_stars(seed in any::<u64>(), idx in 0usize..6) {
        let p = [-1.0, -0.5, 0.0, 0.5, 1.0, 2.0][idx];
        let r = measures::deficit(&origin_star(seed), p, 1e-7, DEFAULT_ORDER).unwrap();
        prop_assert!(r.in_hypothesis());
        prop_assert!(r.deficit >= -1e-7, "deficit {}", r.deficit);
    }

    #[test]
    fn main_inequality_away_from_origin(seed in any::<u64>(), idx in 0usize..4) {
        let p = [0.0, 0.5, 1.0, 2.0][idx];
        let r = measures::deficit(&origin_free(seed), p, 1e-7, DEFAULT_ORDER).unwrap();
        prop_assert!(r.in_hypothesis());
        prop_assert!(r.deficit >= -1e-7, "deficit {}", r.deficit);
    }

    #[test]
    fn zero_weight_is_classical(seed in any::<u64>(), kind in any::<u8>()) {
        let d = any_domain(seed, kind);
        let r = measures::deficit(&d, 0.0, 1e-9, DEFAULT_ORDER).unwrap();
        let length = geometry::boundary_nodes(&d, DEFAULT_ORDER).unwrap().total_length;
        prop_assert!((r.deficit - (length / (2.0 * PI) - (d.area() / PI).sqrt())).abs() < 1e-9);
        prop_assert!(r.deficit >= -1e-9);
    }

    #[test]
    fn jensen_chain_is_monotone(seed in any::<u64>(), idx in 0usize..3) {
        let p = [1.0, 1.5, 3.0][idx];
        let chain = measures::jensen_chain(&origin_star(seed), p).unwrap();
        prop_assert!(chain.is_monotone(1e-9), "{chain:?}");
    }

    #[test]
    fn verdict_matches_tolerance(seed in any::<u64>(), kind in any::<u8>(), tol in -0.5f64..0.5) {
        let r = measures::deficit(&any_domain(seed, kind), 1.0, tol, DEFAULT_ORDER).unwrap();
        let holds = r.verdict == measures::Verdict::Holds;
        prop_assert_eq!(holds, r.deficit >= -tol);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn step_bounds_on_mapped_stars(seed in any::<u64>(), idx in 0usize..4) {
        let p = [-0.5, 0.0, 0.5, 1.0][idx];
        let r = conformal::replay_proof(&mild_star(seed), p, DEFAULT_SERIES_ORDER).unwrap();
        let lambda = r.lambda.norm();
        prop_assert!(r.area_direct <= PI * lambda * lambda + 1e-6);
        prop_assert!(lambda.powf(p + 1.0) <= r.perimeter_limit / (2.0 * PI) + 1e-6);
        prop_assert!(rel(r.perimeter_limit, r.perimeter_direct) < 1e-5);
        prop_assert!(r.chain_is_monotone(1e-6), "{:?}", r.chain);
    }

    #[test]
    fn tail_grows_with_radius(seed in any::<u64>()) {
        let inv = geometry::invert_complement(&mild_star(seed), InversionOptions::default()).unwrap();
        let cd = conformal::riemann_map(&inv.domain, DEFAULT_SERIES_ORDER, conformal::DEFAULT_MAP_TOL).unwrap();
        let tails: Vec<f64> = (1..=19).map(|k| conformal::tail_sum(&cd, k as f64 / 20.0)).collect();
        prop_assert!(tails.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn tail_energy_detects_disks(r in 0.3f64..3.0, cx in -0.8f64..0.8, seed in any::<u64>()) {
        let disk = Domain::disk(Point::new(cx * r, 0.0), r).unwrap();
        let cd = conformal::replay_proof(&disk, 0.5, DEFAULT_SERIES_ORDER).unwrap();
        prop_assert!(cd.tail_energy < 1e-8);
        let star = mild_star(seed);
        if let Domain::FourierStar(s) = &star {
            // a lone first harmonic is a shifted disk to first order
            let higher = s.cos().iter().skip(1).chain(s.sin().iter().skip(1));
            if higher.fold(0.0f64, |m, c| m.max(c.abs())) > 1e-2 * s.a0() {
                let cd = conformal::replay_proof(&star, 0.5, DEFAULT_SERIES_ORDER).unwrap();
                prop_assert!(cd.tail_energy >= 1e-8);
            }
        }
    }

    #[test]
    fn green_identities_on_stars(seed in any::<u64>()) {
        let g = greens::star_green(&mild_star(seed), DEFAULT_SERIES_ORDER).unwrap();
        for id in greens::level_identities(&g, &[0.0, 0.1, 0.5, 1.0]).unwrap() {
            prop_assert!((id.flux - 1.0).abs() <= 1e-7);
            prop_assert!((id.energy - id.t).abs() <= 1e-6);
        }
        prop_assert!(greens::boundary_residual(&g, DEFAULT_ORDER).unwrap() < 1e-9);
    }

    #[test]
    fn flucher_bound_holds(seed in any::<u64>(), idx in 0usize..5) {
        let beta = [-1.0, 0.0, 0.5, 1.0, 2.0][idx];
        let g = greens::star_green(&mild_star(seed), DEFAULT_SERIES_ORDER).unwrap();
        let f = greens::flucher_bound(&g, beta).unwrap();
        prop_assert!(f.lhs <= f.rhs + 1e-7, "{f:?}");
        prop_assert!(greens::holder_chain(&g, beta).unwrap().is_monotone(1e-9));
    }

    #[test]
    fn flucher_on_disks(r in 0.2f64..4.0, fx in -0.9f64..0.9, fy in -0.9f64..0.9, idx in 0usize..5) {
        let beta = [-1.0, 0.0, 0.5, 1.0, 2.0][idx];
        let x = Point::new(fx, fy) * (r / std::f64::consts::SQRT_2);
        let f = greens::flucher_bound(&greens::disk_green(r, x).unwrap(), beta).unwrap();
        prop_assert!(f.lhs <= f.rhs + 1e-7);
        let centered = greens::flucher_bound(&greens::disk_green(r, Point::new(0.0, 0.0)).unwrap(), beta).unwrap();
        prop_assert!((centered.rhs - centered.lhs).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hs_ratio_bounded(seed in any::<u64>(), p in prop_oneof![Just(0.0), Just(0.25), Just(0.5), Just(0.75), Just(1.0), -0.95f64..0.0]) {
        let u = test_function(seed, 3);
        let h = hardy_sobolev::hs_ratio(&u, p).unwrap();
        prop_assert!(h.ratio <= 1.0 + 1e-7, "{h:?}");
    }

    #[test]
    fn coarea_and_layer_cake(seed in any::<u64>(), knots in 1usize..6, p in 0.0f64..1.0) {
        let u = test_function(seed, knots);
        let c = hardy_sobolev::coarea_check(&u, p, 256).unwrap();
        prop_assert!(c.relative_gap() <= 1e-6, "{c:?}");
        let l = hardy_sobolev::layer_cake_check(&u, p, 256).unwrap();
        prop_assert!(l.is_ordered(-1e-7) || l.is_ordered(1e-7), "{l:?}");
        prop_assert!(l.minkowski - l.lhs >= -1e-7 && l.perimeter - l.minkowski >= -1e-7);
    }

    #[test]
    fn hs_ratio_is_dilation_invariant(seed in any::<u64>(), lambda in 0.1f64..10.0, p in -0.9f64..1.0) {
        let u = test_function(seed, 3);
        let a = hardy_sobolev::hs_ratio(&u, p).unwrap().ratio;
        let b = hardy_sobolev::hs_ratio(&u.dilated(lambda).unwrap(), p).unwrap().ratio;
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn exponent_map_matches_range(p in -0.5f64..2.0, q in -1.0f64..4.0) {
        if let Ok(e) = hardy_sobolev::exponent_map(p, q) {
            prop_assert_eq!(hardy_sobolev::ckn_admissible(e), hardy_sobolev::isoperimetric_range(p, q));
        } else {
            prop_assert!(!hardy_sobolev::isoperimetric_range(p, q));
        }
    }

    #[test]
    fn profiles_stay_monotone(seed in any::<u64>(), knots in 0usize..8) {
        let profile = Profile::new(random::profile_breakpoints(&mut random::stream(seed, 5), knots)).unwrap();
        let s = profile.support();
        prop_assert!(profile.max() > 0.0 && profile.eval(s) == 0.0);
        let values: Vec<f64> = (0..=200).map(|i| profile.eval(s * i as f64 / 200.0)).collect();
        prop_assert!(values.windows(2).all(|w| w[1] <= w[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn scans_keep_area_fixed(seed in any::<u64>(), harmonics in 1usize..6, amp in 0.0f64..0.15) {
        let mut rng = random::stream(seed, 0);
        let d = search::perturbed_disk(&mut rng, harmonics, amp).unwrap();
        prop_assert!((d.area() - PI).abs() < 1e-9);
    }

    #[test]
    fn scans_are_reproducible(seed in any::<u64>(), p in -0.5f64..2.0) {
        let run = |exec| {
            let opts = ScanOptions { exec, ..ScanOptions::default() };
            let s = search::perturbation_scan(p, 4, 0.1, 12, seed, opts).unwrap();
            (report::to_json(&s.summary).unwrap(), s.to_csv())
        };
        let a = run(Execution::Parallel);
        prop_assert_eq!(&a, &run(Execution::Parallel));
        prop_assert_eq!(&a, &run(Execution::Sequential));
    }

    #[test]
    fn in_hypothesis_scans_hold(seed in any::<u64>(), idx in 0usize..3) {
        let p = [-0.5, 0.5, 1.0][idx];
        let s = search::perturbation_scan(p, 4, 0.1, 24, seed, ScanOptions::default()).unwrap();
        prop_assert!(!s.summary.violation);
        prop_assert!(s.summary.min_deficit >= -1e-7);
    }
}

#[test]
fn threshold_scales_with_radius() {
    let one = search::two_ball_threshold(1.0, -0.5, DEFAULT_ORDER).unwrap();
    let two = search::two_ball_threshold(2.0, -0.5, DEFAULT_ORDER).unwrap();
    assert!(rel(two.separation, 2.0 * one.separation) < 1e-5);
}

#[test]
fn tent_on_unit_disk() {
    let u = TestFunction::new(Domain::ball(1.0).unwrap(), Profile::tent()).unwrap();
    let h = hardy_sobolev::hs_ratio(&u, 0.0).unwrap();
    assert!((h.ratio - 2.0 / 6f64.sqrt()).abs() < 1e-9);
}
