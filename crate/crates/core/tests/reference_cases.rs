//! Hand-computed and statistical reference cases for each module.

use std::f64::consts::{FRAC_PI_4, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use so2zeros::empirical::{
    run_density_experiment, run_pair_correlation_experiment, trial_coefficients, Binning, Coordinate,
};
use so2zeros::ensembles::{uniform_s_grid, verify_conditions, CoefficientDistribution, Decay};
use so2zeros::kacrice::{
    build_spectral_grid, crossover_density, decay_audit, density_at_origin, invert_to_density_slice,
};
use so2zeros::limit::{limit_correlation, sample_limit_zeros, CorrelationMethod};
use so2zeros::roots::audit_missed_roots;
use so2zeros::weights::{build_limit_weights, build_weights, theta_rate};

#[test]
fn condition_report_per_law() {
    let grid = uniform_s_grid(200.0, 8001);
    let g = verify_conditions(&CoefficientDistribution::gaussian(), &grid).unwrap();
    assert!(g.cross0_holds && g.c1_holds);
    assert!(g.decay.iter().all(|d| *d == Decay::SuperPolynomial));
    let u = verify_conditions(&CoefficientDistribution::uniform(), &grid).unwrap();
    assert!(u.c1_holds);
    let q_u = u.c1_q.unwrap();
    assert!((q_u - 0.5).abs() < 0.05, "q = {q_u}");
    assert!(!u.cross0_holds);
    let q = verify_conditions(&CoefficientDistribution::quartic(), &grid).unwrap();
    assert!(q.cross0_holds);
}

#[test]
fn degree_two_hand_values() {
    let w = build_weights(2, FRAC_PI_4).unwrap();
    let h = 0.5f64.sqrt();
    let (g, d) = w.evaluate_scaled(&[1.0, 0.0, -1.0]).unwrap();
    assert!(g.abs() < 1e-15);
    assert!((d + 2f64.sqrt()).abs() < 1e-14);
    let dense: Vec<f64> = (0..3)
        .map(|k| if k >= w.offset && k < w.offset + w.mu.len() { w.mu[k - w.offset] } else { 0.0 })
        .collect();
    for (a, b) in dense.iter().zip([0.5, h, 0.5]) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn large_degree_is_normalized() {
    let w = build_weights(1000, 0.7).unwrap();
    let s: f64 = w.mu.iter().map(|m| m * m).sum();
    assert!((s - 1.0).abs() < 1e-12);
}

#[test]
fn value_and_derivative_are_uncorrelated_unit_variables() {
    let w = build_weights(64, 0.7).unwrap();
    let d = CoefficientDistribution::gaussian();
    let mut rng = ChaCha8Rng::seed_from_u64(142);
    let mut c = vec![0.0; 65];
    let (mut gg, mut hh, mut gh) = (0.0, 0.0, 0.0);
    let m = 100_000;
    for _ in 0..m {
        d.fill(&mut rng, &mut c);
        let (g, h) = w.evaluate_scaled(&c).unwrap();
        gg += g * g;
        hh += h * h;
        gh += g * h;
    }
    let m = m as f64;
    assert!((gg / m - 1.0).abs() < 0.02);
    assert!((hh / m - 1.0).abs() < 0.02);
    assert!((gh / m).abs() < 0.02);
}

#[test]
fn rate_function_minimum_and_convexity() {
    let (v, d2) = theta_rate(0.5, 1.0).unwrap();
    assert!(v.abs() < 1e-15);
    assert!((d2 - 4.0).abs() < 1e-12);
    for x in [0.1f64, 1.0, 10.0] {
        let u0 = x * x / (1.0 + x * x);
        assert!((theta_rate(u0, x).unwrap().1 - (1.0 + x * x).powi(2) / (x * x)).abs() < 1e-6 * (1.0 + 1.0 / (x * x)).powi(2));
        for i in 1..1000 {
            let u = i as f64 / 1000.0;
            assert!(theta_rate(u, x).unwrap().1 > 0.0);
            assert!(theta_rate(u, x).unwrap().0 >= -1e-12);
        }
    }
}

#[test]
fn limit_weight_at_unit_y() {
    let t = build_limit_weights(1.0, 1e-15).unwrap();
    assert!((t.m[1] - (-0.5f64).exp()).abs() < 1e-15);
}

#[test]
fn coarse_and_fine_grids_rarely_disagree() {
    let d = CoefficientDistribution::gaussian();
    let mut c = Vec::new();
    let mut flagged = 0;
    for trial in 0..1000 {
        trial_coefficients(&d, 64, 214, trial, &mut c);
        if audit_missed_roots(&c, 64, 20).unwrap().flagged() {
            flagged += 1;
        }
    }
    assert!(flagged == 0, "{flagged} of 1000 trials disagree");
}

#[test]
fn decay_audits_on_full_grids() {
    let w = build_weights(256, 0.7).unwrap();
    let u = CoefficientDistribution::uniform();
    let grid = build_spectral_grid(&w, &u, 12.0, 512).unwrap();
    let audit = decay_audit(&grid, &[0]).unwrap();
    assert!(audit.holds_on_grid && audit.a0 > 0.0);
    let slice = invert_to_density_slice(&grid).unwrap();
    let tail = slice.tail_fit(5.0, 20.0);
    assert!(tail.is_finite() && tail < 10.0, "{tail}");

    let q = CoefficientDistribution::quartic();
    let grid = build_spectral_grid(&w, &q, 12.0, 512).unwrap();
    let audit = decay_audit(&grid, &[1, 2]).unwrap();
    assert!(audit.passes());
    assert!(audit.derivatives.iter().all(|b| b.constant.is_finite() && b.constant > 0.0));
}

#[test]
fn quartic_origin_density_is_self_consistent() {
    let q = CoefficientDistribution::quartic();
    let m = q.moments();
    let r0 = q.density(0.0);
    let v = density_at_origin(100, &q);
    assert!((v - r0 * m.abs_first_moment).abs() < 1e-8);
    assert!((crossover_density(0.0, &q, 1e-12).unwrap().value - v).abs() < 1e-15);
    let u = CoefficientDistribution::uniform();
    assert!((u.moments().abs_first_moment - 3f64.sqrt() / 2.0).abs() < 1e-10);
}

#[test]
fn limit_zeros_have_intensity_one_over_pi() {
    let g = CoefficientDistribution::gaussian();
    let trials = 20_000u64;
    let counts: Vec<f64> = (0..trials)
        .map(|s| sample_limit_zeros((0.0, 5.0), &g, 1e-14, 377 + s).unwrap().zeros.len() as f64)
        .collect();
    let mean = counts.iter().sum::<f64>() / trials as f64;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (trials as f64 - 1.0);
    let se = (var / trials as f64).sqrt();
    assert!((mean - 5.0 / PI).abs() < 3.0 * se, "{mean} ± {se}");
}

#[test]
fn pair_correlation_vanishes_at_coincidence() {
    let values: Vec<f64> = [0.5, 0.2, 0.1, 0.05]
        .iter()
        .map(|&d| limit_correlation(&[0.0, d], CorrelationMethod::ClosedFormM2).unwrap().value)
        .collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]));
    assert!(values[3] < 0.01);
    let mc = limit_correlation(&[0.0, 0.2], CorrelationMethod::ConditionedMc { samples: 200_000, seed: 384 }).unwrap();
    assert!((mc.value - values[1]).abs() < 4.0 * mc.std_error);
}

#[test]
fn quarter_of_gaussian_zeros_lie_in_the_unit_interval() {
    let g = CoefficientDistribution::gaussian();
    let b = Binning::new(Coordinate::X, vec![-1e9, 0.0, 1.0, 1e9]).unwrap();
    let est = run_density_experiment(&g, 64, 20_000, b, 420).unwrap();
    let f = est.mass_fraction(0.0, 1.0).unwrap();
    assert!(f.z_score(0.25) < 3.0, "{f:?}");
    assert!(est.mean_count().z_score(8.0) < 3.0);
}

#[test]
fn gaussian_pair_correlation_is_rotation_invariant() {
    let g = CoefficientDistribution::gaussian();
    let a = run_pair_correlation_experiment(&g, 256, 0.5, &[(0.0, 1.0)], 0.4, 50_000, 431).unwrap().estimate(0);
    let b = run_pair_correlation_experiment(&g, 256, 0.8, &[(0.0, 1.0)], 0.4, 50_000, 432).unwrap().estimate(0);
    let combined = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
    assert!((a.value - b.value).abs() < 3.0 * combined);
}
