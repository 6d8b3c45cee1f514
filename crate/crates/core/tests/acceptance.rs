//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use so2zeros::empirical::{
    run_density_trials, run_pair_correlation_experiment, Binning, Coordinate, DensityConfig, Estimate, ScanMode,
};
use so2zeros::ensembles::CoefficientDistribution;
use so2zeros::kacrice::{
    build_spectral_grid, crossover_density, crossover_density_grid, decay_audit, density, density_at_origin,
    invert_to_density_slice, GridOptions,
};
use so2zeros::limit::{kernel_entries, limit_correlation, CorrelationMethod};
use so2zeros::quadrature::GaussLegendre;
use so2zeros::roots::DEFAULT_GRID_FACTOR;
use so2zeros::weights::build_weights;

const SEED: u64 = 20_240_601;

type Outcome = Result<(bool, String), String>;

fn density_run(
    dist: &CoefficientDistribution,
    n: usize,
    trials: u64,
    binning: Binning,
    scan: ScanMode,
    seed: u64,
) -> so2zeros::Result<so2zeros::empirical::DensityEstimate> {
    let config = DensityConfig {
        distribution: dist.label().into(),
        n,
        master_seed: seed,
        binning,
        scan,
        grid_factor: DEFAULT_GRID_FACTOR,
    };
    run_density_trials(dist, &config, 0..trials)
}

fn e(err: so2zeros::Error) -> String {
    err.to_string()
}

fn c1() -> Outcome {
    let start = Instant::now();
    let g = CoefficientDistribution::gaussian();
    let b = Binning::uniform(Coordinate::Theta, -PI / 2.0, PI / 2.0, 1).map_err(e)?;
    let est = density_run(&g, 64, 20_000, b, ScanMode::Full, SEED).map_err(e)?;
    let m = est.mean_count();
    let secs = start.elapsed().as_secs_f64();
    let z = m.z_score(8.0);
    Ok((
        z < 3.0 && secs < 120.0,
        format!("mean {:.4} ± {:.4} ({z:.2} SE from 8), {secs:.1} s", m.value, m.std_error),
    ))
}

fn c2() -> Outcome {
    let g = CoefficientDistribution::gaussian();
    let mut worst = 0.0f64;
    for x in [0.25f64, 0.5, 1.0, 2.0] {
        let d = density(32, x.atan(), &g).map_err(e)?;
        worst = worst.max((d.value * PI * (1.0 + x * x) - 1.0).abs());
    }
    Ok((worst < 1e-3, format!("max relative error {worst:.2e}")))
}

fn c3() -> Outcome {
    let u = CoefficientDistribution::uniform();
    let formula = density_at_origin(1024, &u);
    let b = Binning::new(Coordinate::ScaledY { theta0: 0.0 }, vec![-0.5, 0.5]).map_err(e)?;
    let est = density_run(&u, 1024, 100_000, b, ScanMode::BinsOnly, SEED + 3).map_err(e)?;
    let mc = est.bin_density(0);
    let from_pi = mc.z_score(1.0 / PI);
    let nearer = (mc.value - 0.25).abs() < (mc.value - 1.0 / PI).abs();
    Ok((
        (formula - 0.25).abs() < 1e-8 && from_pi > 3.0 && nearer,
        format!(
            "formula {formula:.10}; origin bin |y| < 1/2: {:.5} ± {:.5}, {from_pi:.1} SE from 1/π",
            mc.value, mc.std_error
        ),
    ))
}

fn kac_rice_bin_average(n: usize, lo: f64, hi: f64, dist: &CoefficientDistribution) -> so2zeros::Result<f64> {
    let rule = GaussLegendre::new(4);
    let mut err = None;
    let v = rule.integrate(lo, hi, |x| match density(n, x.atan(), dist) {
        Ok(d) => d.value,
        Err(x) => {
            err = Some(x);
            f64::NAN
        }
    });
    match err {
        Some(x) => Err(x),
        None => Ok(v / (hi - lo)),
    }
}

fn c4() -> Outcome {
    let u = CoefficientDistribution::uniform();
    let target = 1.0 / (2.0 * PI);
    let mut gaps = Vec::new();
    let mut mc_ok = true;
    let mut notes = Vec::new();
    for (k, n) in [64usize, 256, 1024].into_iter().enumerate() {
        let d = density(n, 1.0f64.atan(), &u).map_err(e)?;
        gaps.push((d.value - target).abs());
        let b = Binning::new(Coordinate::X, vec![0.9, 1.1]).map_err(e)?;
        let est = density_run(&u, n, 40_000, b, ScanMode::BinsOnly, SEED + 40 + k as u64).map_err(e)?;
        let mc = est.normalized_bin_density(0);
        let avg = kac_rice_bin_average(n, 0.9, 1.1, &u).map_err(e)?;
        let z = mc.z_score(avg);
        mc_ok &= z < 3.0;
        notes.push(format!("n={n}: gap {:.2e}, MC {z:.2} SE", gaps[k]));
    }
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    Ok((decreasing && gaps[2] < 0.02 && mc_ok, notes.join("; ")))
}

fn c5() -> Outcome {
    let q = CoefficientDistribution::quartic();
    let m = q.moments();
    let r0_abs = m.density_at_zero * m.abs_first_moment;
    let at0 = crossover_density_grid(0.0, &q, 1e-14, &GridOptions::default()).map_err(e)?;
    let at4 = crossover_density(4.0, &q, 1e-14).map_err(e)?;
    let g = CoefficientDistribution::gaussian();
    let mut gauss = 0.0f64;
    for y in [0.0, 1.0, 2.0, 4.0] {
        let v = crossover_density_grid(y, &g, 1e-14, &GridOptions::default()).map_err(e)?;
        gauss = gauss.max((v.value - 1.0 / PI).abs());
    }
    let d0 = (at0.value - r0_abs).abs();
    let d4 = (at4.value - 1.0 / PI).abs();
    Ok((
        d0 < 1e-3 && d4 < 0.03 && gauss < 1e-3,
        format!("quartic |p̂(0) - r(0)E|c|| = {d0:.1e}, |p̂(4) - 1/π| = {d4:.2e}; Gaussian max {gauss:.1e}"),
    ))
}

fn c6() -> Outcome {
    let u = CoefficientDistribution::uniform();
    let b = Binning::uniform(Coordinate::Theta, -PI / 2.0, PI / 2.0, 1).map_err(e)?;
    let est = density_run(&u, 1024, 20_000, b, ScanMode::Full, SEED + 6).map_err(e)?;
    let m = est.mean_count();
    let ratio = m.value / 32.0;
    Ok((
        (0.95..=1.05).contains(&ratio),
        format!("mean {:.3} ± {:.3}, ratio to √n {ratio:.4}", m.value, m.std_error),
    ))
}

fn c7() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in [2usize, 64, 1024, 4096] {
        for k in 0..20 {
            let theta = -1.5 + 3.0 * k as f64 / 19.0;
            let w = build_weights(n, theta).map_err(e)?;
            worst = worst.max(w.identity_sums().max_deviation());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((worst < 1e-12 && secs < 10.0, format!("max deviation {worst:.1e}, {secs:.2} s")))
}

fn c8() -> Outcome {
    let (a, b, c) = kernel_entries(1.0, 0.0, None);
    let ns = [100usize, 200, 400, 800, 1600];
    let errs: Vec<[f64; 3]> = ns
        .iter()
        .map(|&n| {
            let (an, bn, cn) = kernel_entries(1.0, 0.0, Some(n));
            [(an - a).abs(), (bn - b).abs(), (cn - c).abs()]
        })
        .collect();
    let mut ok = true;
    let mut ratios = Vec::new();
    for w in errs.windows(2) {
        for k in 0..3 {
            let r = w[0][k] / w[1][k];
            ok &= (r - 2.0).abs() <= 0.3;
            ratios.push(r);
        }
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    Ok((ok, format!("ratios in [{lo:.4}, {hi:.4}] over n = 100..1600")))
}

fn c9() -> Outcome {
    let closed = limit_correlation(&[0.0, 1.0], CorrelationMethod::ClosedFormM2).map_err(e)?.value;
    let mc = limit_correlation(
        &[0.0, 1.0],
        CorrelationMethod::ConditionedMc {
            samples: 1_000_000,
            seed: SEED,
        },
    )
    .map_err(e)?;
    let z_mc = (mc.value - closed).abs() / mc.std_error;
    let g = run_pair_correlation_experiment(
        &CoefficientDistribution::gaussian(),
        256,
        0.7,
        &[(0.0, 1.0)],
        0.4,
        100_000,
        SEED + 9,
    )
    .map_err(e)?
    .estimate(0);
    let u = run_pair_correlation_experiment(
        &CoefficientDistribution::uniform(),
        1024,
        0.7,
        &[(0.0, 1.0)],
        0.4,
        100_000,
        SEED + 10,
    )
    .map_err(e)?
    .estimate(0);
    let (zg, zu) = (g.z_score(closed), u.z_score(closed));
    Ok((
        z_mc < 3.0 && zg < 3.0 && zu < 3.0,
        format!(
            "K_2(1) = {closed:.5}; conditioned MC {z_mc:.2} SE; Gaussian {:.4} ({zg:.2} SE); uniform {:.4} ({zu:.2} SE)",
            g.value, u.value
        ),
    ))
}

fn c10() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for dist in [CoefficientDistribution::uniform(), CoefficientDistribution::quartic()] {
        for n in [64usize, 256] {
            let w = build_weights(n, PI / 4.0).map_err(e)?;
            let grid = build_spectral_grid(&w, &dist, 12.0, 512).map_err(e)?;
            let audit = decay_audit(&grid, &[0]).map_err(e)?;
            let slice = invert_to_density_slice(&grid).map_err(e)?;
            let h = slice.half_range();
            let fitted = slice
                .eta
                .iter()
                .zip(&slice.values)
                .filter(|(t, _)| t.abs() <= 0.5 * h)
                .map(|(t, v)| v.abs() * (1.0 + t.abs()).powi(3))
                .fold(0.0, f64::max);
            let holds = slice
                .eta
                .iter()
                .zip(&slice.values)
                .all(|(t, v)| v.abs() <= fitted / (1.0 + t.abs()).powi(3));
            ok &= audit.holds_on_grid && holds;
            notes.push(format!(
                "{} n={n}: a0 {:.3}, C {fitted:.3}{}",
                dist.label(),
                audit.a0,
                if audit.holds_on_grid && holds { "" } else { " FAILED" }
            ));
        }
    }
    Ok((ok, notes.join("; ")))
}

fn c11() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (k, dist) in [CoefficientDistribution::gaussian(), CoefficientDistribution::uniform()]
        .into_iter()
        .enumerate()
    {
        let b = Binning::new(Coordinate::X, vec![0.5, 1.0, 2.0]).map_err(e)?;
        let est = density_run(&dist, 256, 20_000, b, ScanMode::BinsOnly, SEED + 11 + k as u64).map_err(e)?;
        let diff: Estimate = est.paired_mass_difference((0.5, 1.0), (1.0, 2.0)).map_err(e)?;
        let z = diff.value.abs() / diff.std_error;
        ok &= z < 3.0;
        notes.push(format!("{}: difference {:+.4} ± {:.4} ({z:.2} SE)", dist.label(), diff.value, diff.std_error));
    }
    Ok((ok, notes.join("; ")))
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(|entry| entry.ok())
                .map(|entry| entry.path())
                .filter(|p| p.extension().is_some_and(|x| x == "csv"))
                .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
                .collect()
        })
        .unwrap_or_default();
    out.sort();
    out
}

fn c12() -> Outcome {
    let commands: [&[&str]; 6] = [
        &["density", "--n", "16,24", "--trials", "700", "--bins", "6"],
        &["count", "--dist", "uniform", "--n", "32", "--trials", "900"],
        &["pair-corr", "--n", "64", "--trials", "800", "--y", "0.6,1.2"],
        &["crossover", "--y", "0,1.5"],
        &["kacrice", "--dist", "quartic", "--n", "48"],
        &["validate"],
    ];
    let tmp = tempfile::tempdir().map_err(|x| x.to_string())?;
    let mut mismatched = Vec::new();
    for cmd in commands {
        let mut reference: Option<Vec<(String, Vec<u8>)>> = None;
        for workers in ["1", "2", "3"] {
            let out = tmp.path().join(format!("{}-{workers}", cmd[0]));
            let mut args = vec!["so2zeros"];
            args.extend_from_slice(cmd);
            let out_str = out.to_string_lossy().into_owned();
            args.extend(["--seed", "77", "--workers", workers, "--out", &out_str]);
            let code = Command::new(env!("CARGO_BIN_EXE_so2zeros"))
                .args(&args[1..])
                .output()
                .map_err(|x| x.to_string())?
                .status
                .code()
                .unwrap_or(-1);
            if code != 0 {
                return Ok((false, format!("{} exited with {code}", cmd[0])));
            }
            let files = csv_files(&out);
            match &reference {
                None => reference = Some(files),
                Some(r) if *r != files => mismatched.push(format!("{} (workers {workers})", cmd[0])),
                _ => {}
            }
        }
    }
    Ok((
        mismatched.is_empty(),
        if mismatched.is_empty() {
            "all six commands byte-identical for --workers 1, 2, 3".into()
        } else {
            format!("differences: {}", mismatched.join(", "))
        },
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("gaussian mean zero count at n = 64", c1),
        ("gaussian Kac-Rice density is exactly Cauchy", c2),
        ("uniform density at the origin", c3),
        ("uniform density at x = 1 converges", c4),
        ("crossover near the origin", c5),
        ("uniform mean zero count at n = 1024", c6),
        ("weight sum identities", c7),
        ("finite-n kernel converges at rate 1/n", c8),
        ("limit pair correlation", c9),
        ("characteristic function decay audits", c10),
        ("reciprocal symmetry of zero mass", c11),
        ("CLI determinism across worker counts", c12),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match f() {
            Ok(r) => r,
            Err(msg) => (false, format!("error: {msg}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} [{:>2}] {name}: {detail} [{:.1} s]",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 12 criteria pass", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
