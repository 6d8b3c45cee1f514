use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use so2zeros::empirical::{merge_density, run_density_trials, Binning, Coordinate, DensityConfig, ScanMode};
use so2zeros::ensembles::CoefficientDistribution;
use so2zeros::limit::{bivariate_abs_product, kernel_entries};
use so2zeros::roots::{scan_and_refine, ScanPlan};
use so2zeros::weights::{build_limit_weights, build_weights};

fn law(k: u8) -> CoefficientDistribution {
    match k % 3 {
        0 => CoefficientDistribution::gaussian(),
        1 => CoefficientDistribution::uniform(),
        _ => CoefficientDistribution::quartic(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weight_identities_hold(n in 1usize..3000, theta in -1.55f64..1.55) {
        let w = build_weights(n, theta).unwrap();
        prop_assert!(w.identity_sums().max_deviation() < 1e-12);
        prop_assert!(w.mu.iter().chain(&w.lambda).all(|v| v.is_finite()));
    }

    #[test]
    fn limit_weight_sums_are_within_the_tail_bound(y in -6.0f64..6.0) {
        let t = build_limit_weights(y, 1e-14).unwrap();
        let (mm, ll, ml) = t.sums();
        prop_assert!((mm - 1.0).abs() <= t.tail_bound + 1e-12);
        prop_assert!((ll - 1.0).abs() <= t.tail_bound + 1e-12);
        prop_assert!(ml.abs() <= t.tail_bound + 1e-12);
    }

    #[test]
    fn zero_count_parity_and_residuals(seed in any::<u64>(), n in 1usize..200, k in any::<u8>()) {
        let c = law(k).sample(n + 1, seed).unwrap();
        let z = scan_and_refine(&c, n, 20).unwrap();
        let plan = ScanPlan::new(n, 20).unwrap();
        let ends_differ = (plan.eval(&c, -FRAC_PI_2) >= 0.0) != (plan.eval(&c, FRAC_PI_2) >= 0.0);
        prop_assert_eq!(z.count() % 2 == 1, ends_differ);
        prop_assert!(z.residuals.iter().all(|r| *r < 1e-10));
        prop_assert!(z.zeros_theta.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(z.count() <= n);
    }

    #[test]
    fn zeros_are_invariant_under_scaling(seed in any::<u64>(), n in 2usize..120, s in 0.01f64..100.0) {
        let c = CoefficientDistribution::gaussian().sample(n + 1, seed).unwrap();
        let scaled: Vec<f64> = c.iter().map(|v| -s * v).collect();
        let a = scan_and_refine(&c, n, 20).unwrap();
        let b = scan_and_refine(&scaled, n, 20).unwrap();
        prop_assert_eq!(a.count(), b.count());
        for (x, y) in a.zeros_theta.iter().zip(&b.zeros_theta) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn window_scan_matches_full_scan(seed in any::<u64>(), n in 4usize..300, lo in -1.5f64..1.4, len in 0.01f64..1.0) {
        let c = CoefficientDistribution::uniform().sample(n + 1, seed).unwrap();
        let plan = ScanPlan::new(n, 20).unwrap();
        let hi = (lo + len).min(1.5);
        let full: Vec<f64> = plan.scan(&c).unwrap().zeros_theta.into_iter().filter(|t| *t >= lo && *t <= hi).collect();
        let part: Vec<f64> = plan.scan_range(&c, lo, hi).unwrap().zeros_theta.into_iter().filter(|t| *t >= lo && *t <= hi).collect();
        prop_assert_eq!(full, part);
    }

    #[test]
    fn characteristic_functions_are_bounded_and_hermitian(s in -80.0f64..80.0, k in any::<u8>()) {
        let d = law(k);
        let v = d.char_fn(s, 0).unwrap();
        let w = d.char_fn(-s, 0).unwrap();
        prop_assert!(v.norm() <= 1.0 + 1e-12);
        prop_assert!((v - w.conj()).norm() < 1e-12);
        prop_assert!(v.im.abs() < 1e-12);
        prop_assert!((d.char_fn_even(s) - v.re).abs() < 1e-12);
    }

    #[test]
    fn finite_kernel_approaches_the_limit(d in -3.0f64..3.0, n in 50usize..5000) {
        let (a, b, c) = kernel_entries(d, 0.0, None);
        let (an, bn, cn) = kernel_entries(d, 0.0, Some(n));
        let (am, bm, cm) = kernel_entries(d, 0.0, Some(4 * n));
        let gap = |x: f64, y: f64| (x - y).abs();
        prop_assert!(gap(am, a) <= gap(an, a) + 1e-13);
        prop_assert!(gap(bm, b) <= gap(bn, b) + 1e-13);
        prop_assert!(gap(cm, c) <= gap(cn, c) + 1e-13);
        let (ar, br, _) = kernel_entries(0.0, d, None);
        prop_assert!((ar - a).abs() < 1e-15 && (br + b).abs() < 1e-15);
    }

    #[test]
    fn absolute_product_is_symmetric_and_grows_with_correlation(
        s1 in 0.1f64..3.0, s2 in 0.1f64..3.0, r in 0.0f64..0.99,
    ) {
        let v = bivariate_abs_product(s1, s2, r);
        prop_assert!((v - bivariate_abs_product(s2, s1, r)).abs() < 1e-14 * v.max(1.0));
        prop_assert!((v - bivariate_abs_product(s1, s2, -r)).abs() < 1e-14 * v.max(1.0));
        prop_assert!(v >= 2.0 / PI * s1 * s2 * (1.0 - 1e-14));
        prop_assert!(v <= s1 * s2 * (1.0 + 1e-14));
        prop_assert!(bivariate_abs_product(s1, s2, (r + 0.005).min(0.999)) >= v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn merges_equal_single_runs(seed in any::<u64>(), cut_a in 1u64..150, cut_b in 1u64..150) {
        let (p, q) = (cut_a.min(cut_b), cut_a.max(cut_b) + 1);
        let d = CoefficientDistribution::quartic();
        let config = DensityConfig {
            distribution: "quartic".into(),
            n: 20,
            master_seed: seed,
            binning: Binning::uniform(Coordinate::Theta, -1.5, 1.5, 6).unwrap(),
            scan: ScanMode::Full,
            grid_factor: 20,
        };
        let whole = run_density_trials(&d, &config, 0..200).unwrap();
        let parts = [
            run_density_trials(&d, &config, q..200).unwrap(),
            run_density_trials(&d, &config, 0..p).unwrap(),
            run_density_trials(&d, &config, p..q).unwrap(),
        ];
        prop_assert_eq!(merge_density(&parts).unwrap(), whole);
    }
}
