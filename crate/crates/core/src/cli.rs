//! The `so2zeros` experiment runner.
//!
//! Every subcommand writes its tables, a `manifest.json` and a `summary.txt`
//! into `--out`, followed by long-format `plot_*.csv` files. Exit codes: 0 on
//! success, 1 for failed validation or I/O errors, 2 for usage and
//! configuration errors (nothing is written), 3 for numeric failures.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::empirical::{
    merge_density, run_density_trials, run_pair_trials, Binning, Coordinate, DensityConfig, PairConfig, ScanMode,
};
use crate::ensembles::{uniform_s_grid, verify_conditions, CoefficientDistribution};
use crate::error::{Error, Result};
use crate::kacrice::{crossover_density, density, density_at_origin};
use crate::limit::{kernel_entries, limit_correlation, CorrelationMethod, LimitKernel};
use crate::output::{config_hash, emit_plot_data, write_manifest, Manifest, SCHEMA_VERSION};
use crate::roots::{scan_and_refine, DEFAULT_GRID_FACTOR};
use crate::weights::{build_limit_weights, build_weights, theta_rate};

#[derive(Debug, Parser)]
#[command(name = "so2zeros", version, about = "Zeros of SO(2) random polynomials: Kac-Rice densities and Monte Carlo")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Empirical zero density in x next to the Kac-Rice and Cauchy curves.
    Density(Flags),
    /// Scaled density p̂(y) near the origin.
    Crossover(Flags),
    /// Empirical pair correlation at θ⁰ against the limiting K_2.
    PairCorr(Flags),
    /// Mean number of real zeros against √n.
    Count(Flags),
    /// Semi-analytic p_n(x)/√n on a θ grid.
    Kacrice(Flags),
    /// Run the invariant suites of all modules.
    Validate(Flags),
    /// Rebuild the plot tables of an existing result directory.
    Plot(Flags),
}

#[derive(Debug, Args, Default)]
struct Flags {
    /// gaussian | uniform | quartic | custom:<path.csv>
    #[arg(long)]
    dist: Option<String>,
    /// Degree(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Reference angle(s), comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta0: Option<Vec<f64>>,
    /// Scaled coordinate(s), comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y: Option<Vec<f64>>,
    #[arg(long)]
    bins: Option<usize>,
    /// Pair-correlation bin width in y units.
    #[arg(long)]
    bin_width: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// JSON file with any of the above; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Settings read from `--config`; every field optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub dist: Option<String>,
    pub n: Option<Vec<usize>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub theta0: Option<Vec<f64>>,
    pub y: Option<Vec<f64>>,
    pub bins: Option<usize>,
    pub bin_width: Option<f64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub dist: String,
    pub n: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub theta0: Vec<f64>,
    pub y: Vec<f64>,
    pub bins: usize,
    pub bin_width: f64,
    pub out: PathBuf,
    pub workers: usize,
}

/// The part of the configuration that determines the results.
#[derive(Serialize)]
struct Reproducible<'a> {
    command: &'a str,
    dist: &'a str,
    n: &'a [usize],
    trials: u64,
    seed: u64,
    theta0: &'a [f64],
    y: &'a [f64],
    bins: usize,
    bin_width: f64,
}

impl ExperimentConfig {
    fn reproducible(&self) -> Reproducible<'_> {
        Reproducible {
            command: &self.command,
            dist: &self.dist,
            n: &self.n,
            trials: self.trials,
            seed: self.seed,
            theta0: &self.theta0,
            y: &self.y,
            bins: self.bins,
            bin_width: self.bin_width,
        }
    }

    fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.n.is_empty() || self.n.iter().any(|&n| n == 0 || n > 1 << 20) {
            return cfg(format!("degrees must lie in 1..=2^20, got {:?}", self.n));
        }
        if self.bins == 0 || self.bins > 100_000 {
            return cfg(format!("bins must lie in 1..=100000, got {}", self.bins));
        }
        if self.workers == 0 || self.workers > 1024 {
            return cfg(format!("workers must lie in 1..=1024, got {}", self.workers));
        }
        if self.theta0.iter().any(|t| !(t.abs() < PI / 2.0)) {
            return cfg("reference angles must lie in (-π/2, π/2)".into());
        }
        if self.y.iter().any(|y| !y.is_finite()) {
            return cfg("y values must be finite".into());
        }
        if !(self.bin_width > 0.0 && self.bin_width.is_finite()) {
            return cfg("bin width must be positive".into());
        }
        let monte_carlo = matches!(self.command.as_str(), "density" | "count" | "pair-corr");
        if monte_carlo && self.trials < 100 {
            return cfg(format!("at least 100 trials are required, got {}", self.trials));
        }
        Ok(())
    }
}

fn resolve(command: &str, flags: Flags) -> Result<ExperimentConfig> {
    let file = match &flags.config {
        Some(path) => {
            if !path.exists() {
                return Err(Error::MissingInput(path.clone()));
            }
            let text = fs::read_to_string(path)?;
            serde_json::from_str::<ConfigFile>(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => ConfigFile::default(),
    };
    let default_n = match command {
        "pair-corr" => vec![256],
        "crossover" => vec![],
        _ => vec![64],
    };
    let default_theta0 = match command {
        "pair-corr" => vec![0.7],
        "kacrice" => [0.0f64, 0.25, 0.5, 1.0, 2.0].iter().map(|x| x.atan()).collect(),
        _ => vec![],
    };
    let default_y = match command {
        "pair-corr" => vec![0.5, 1.0, 2.0],
        _ => vec![0.0, 0.5, 1.0, 2.0, 4.0],
    };
    let mut n = flags.n.or(file.n).unwrap_or(default_n);
    if n.is_empty() {
        n = vec![1];
    }
    Ok(ExperimentConfig {
        command: command.to_string(),
        dist: flags.dist.or(file.dist).unwrap_or_else(|| "gaussian".into()),
        n,
        trials: flags.trials.or(file.trials).unwrap_or(10_000),
        seed: flags.seed.or(file.seed).unwrap_or(1),
        theta0: flags.theta0.or(file.theta0).unwrap_or(default_theta0),
        y: flags.y.or(file.y).unwrap_or(default_y),
        bins: flags.bins.or(file.bins).unwrap_or(20),
        bin_width: flags.bin_width.or(file.bin_width).unwrap_or(0.4),
        out: flags.out.or(file.out).unwrap_or_else(|| PathBuf::from("results")),
        workers: flags.workers.or(file.workers).unwrap_or(1),
    })
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Domain(_) | Error::Contract(_) | Error::Degenerate(_) | Error::MissingInput(_) => 2,
        Error::Numeric { .. } => 3,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
    }
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (name, flags) = match cli.command {
        Command::Density(f) => ("density", f),
        Command::Crossover(f) => ("crossover", f),
        Command::PairCorr(f) => ("pair-corr", f),
        Command::Count(f) => ("count", f),
        Command::Kacrice(f) => ("kacrice", f),
        Command::Validate(f) => ("validate", f),
        Command::Plot(f) => ("plot", f),
    };
    match execute(name, flags) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("so2zeros {name}: {e}");
            exit_code(&e)
        }
    }
}

struct Report {
    files: Vec<(String, Vec<u8>)>,
    summary: String,
    passed: bool,
}

fn execute(name: &str, flags: Flags) -> Result<i32> {
    let config = resolve(name, flags)?;
    config.validate()?;
    if name == "plot" {
        let written = emit_plot_data(&config.out)?;
        for p in written {
            println!("{}", p.display());
        }
        return Ok(0);
    }
    let dist = CoefficientDistribution::from_name(&config.dist).map_err(|e| match e {
        Error::Io(io) if io.kind() == std::io::ErrorKind::NotFound => {
            Error::MissingInput(PathBuf::from(config.dist.trim_start_matches("custom:")))
        }
        Error::Csv(c) if matches!(c.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::NotFound) => {
            Error::MissingInput(PathBuf::from(config.dist.trim_start_matches("custom:")))
        }
        other => other,
    })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let report = pool.install(|| match name {
        "density" => cmd_density(&config, &dist),
        "crossover" => cmd_crossover(&config, &dist),
        "pair-corr" => cmd_pair(&config, &dist),
        "count" => cmd_count(&config, &dist),
        "kacrice" => cmd_kacrice(&config, &dist),
        "validate" => cmd_validate(&config, &dist),
        other => Err(Error::Config(format!("unknown command {other}"))),
    })?;
    persist(&config, &report)?;
    print!("{}", report.summary);
    Ok(if report.passed { 0 } else { 1 })
}

fn persist(config: &ExperimentConfig, report: &Report) -> Result<()> {
    let dir = &config.out;
    fs::create_dir_all(dir)?;
    let mut names = Vec::new();
    for (file, bytes) in &report.files {
        fs::write(dir.join(file), bytes)?;
        names.push(file.clone());
    }
    fs::write(dir.join("summary.txt"), &report.summary)?;
    names.push("summary.txt".into());
    if let Ok(plots) = emit_plot_data(dir) {
        for p in plots {
            if let Some(f) = p.file_name() {
                names.push(f.to_string_lossy().into_owned());
            }
        }
    }
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        tool: env!("CARGO_PKG_NAME"),
        tool_version: env!("CARGO_PKG_VERSION"),
        command: &config.command,
        master_seed: config.seed,
        config_hash: config_hash(&config.reproducible())?,
        config,
        files: names,
    };
    write_manifest(dir, &manifest)
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn s(v: impl ToString) -> String {
    v.to_string()
}

const DENSITY_RANGE: f64 = 4.0;

fn cmd_density(config: &ExperimentConfig, dist: &CoefficientDistribution) -> Result<Report> {
    let mut rows = Vec::new();
    let mut summary = format!("density: {} coefficients, {} trials per degree\n", dist.label(), config.trials);
    for &n in &config.n {
        let binning = Binning::uniform(Coordinate::X, -DENSITY_RANGE, DENSITY_RANGE, config.bins)?;
        let dc = DensityConfig {
            distribution: dist.label().into(),
            n,
            master_seed: config.seed,
            binning: binning.clone(),
            scan: ScanMode::Full,
            grid_factor: DEFAULT_GRID_FACTOR,
        };
        let est = merge_density(&[run_density_trials(dist, &dc, 0..config.trials)?])?;
        let counts = est.counts();
        let mut worst = 0.0f64;
        for i in 0..binning.bins() {
            let c = binning.center(i);
            let e = est.normalized_bin_density(i);
            let kr = density(n, c.atan(), dist)?;
            let cauchy = 1.0 / (PI * (1.0 + c * c));
            worst = worst.max((e.value - kr.value).abs() / e.std_error.max(1e-300));
            rows.push(vec![
                s(n),
                s(binning.edges[i]),
                s(binning.edges[i + 1]),
                s(c),
                s(counts[i]),
                s(e.value),
                s(e.std_error),
                s(kr.value),
                s(kr.error_estimate),
                s(cauchy),
            ]);
        }
        let mean = est.mean_count();
        let _ = writeln!(
            summary,
            "n = {n}: mean zero count {:.4} ± {:.4}; largest |empirical - Kac-Rice| = {:.2} SE (bin averages vs centre values)",
            mean.value, mean.std_error, worst
        );
    }
    let header = [
        "n", "bin_lo", "bin_hi", "center", "count", "empirical", "std_error", "kacrice", "kacrice_error", "cauchy",
    ];
    Ok(Report {
        files: vec![("density.csv".into(), csv_bytes(&header, &rows)?)],
        summary,
        passed: true,
    })
}

fn cmd_crossover(config: &ExperimentConfig, dist: &CoefficientDistribution) -> Result<Report> {
    let mut rows = Vec::new();
    let mut summary = format!(
        "crossover: {} coefficients, r(0)E|c| = {:.6}, 1/π = {:.6}\n",
        dist.label(),
        density_at_origin(0, dist),
        1.0 / PI
    );
    for &y in &config.y {
        let d = crossover_density(y, dist, 1e-14)?;
        rows.push(vec![s(y), s(d.value), s(d.error_estimate), s(1.0 / PI), s(d.cutoff)]);
        let _ = writeln!(summary, "y = {y}: p̂ = {:.6} (estimated error {:.1e})", d.value, d.error_estimate);
    }
    Ok(Report {
        files: vec![(
            "crossover.csv".into(),
            csv_bytes(&["y", "p_hat", "error_estimate", "one_over_pi", "cutoff"], &rows)?,
        )],
        summary,
        passed: true,
    })
}

fn cmd_pair(config: &ExperimentConfig, dist: &CoefficientDistribution) -> Result<Report> {
    let mut seps: Vec<f64> = config.y.iter().copied().filter(|y| *y > 0.0).collect();
    seps.sort_by(f64::total_cmp);
    seps.dedup();
    if seps.is_empty() {
        return Err(Error::Config("pair-corr needs positive separations in --y".into()));
    }
    let width = config.bin_width.min(0.5 * seps[0]);
    let pairs: Vec<(f64, f64)> = seps.iter().map(|&d| (0.0, d)).collect();
    let mut rows = Vec::new();
    let mut summary = format!(
        "pair-corr: {} coefficients, {} trials, bin width {width}\n",
        dist.label(),
        config.trials
    );
    for &n in &config.n {
        for &theta0 in &config.theta0 {
            let pc = PairConfig {
                distribution: dist.label().into(),
                n,
                master_seed: config.seed,
                theta0,
                pairs: pairs.clone(),
                bin_width: width,
                grid_factor: DEFAULT_GRID_FACTOR,
            };
            let est = run_pair_trials(dist, &pc, 0..config.trials)?;
            for (p, &(a, b)) in pairs.iter().enumerate() {
                let e = est.estimate(p);
                let limit = limit_correlation(&[a, b], CorrelationMethod::ClosedFormM2)?.value;
                rows.push(vec![
                    s(n),
                    s(theta0),
                    s(a),
                    s(b),
                    s(b - a),
                    s(est.pair_count(p)),
                    s(e.value),
                    s(e.std_error),
                    s(est.single_intensity(p, 0).value),
                    s(est.single_intensity(p, 1).value),
                    s(limit),
                ]);
                let _ = writeln!(
                    summary,
                    "n = {n}, θ⁰ = {theta0}, separation {}: K̂_2 = {:.5} ± {:.5}, limit {:.5} ({:.2} SE)",
                    b - a,
                    e.value,
                    e.std_error,
                    limit,
                    e.z_score(limit)
                );
            }
        }
    }
    let header = [
        "n", "theta0", "y1", "y2", "separation", "pairs", "k2", "std_error", "k1_first", "k1_second", "limit_k2",
    ];
    Ok(Report {
        files: vec![("pair_corr.csv".into(), csv_bytes(&header, &rows)?)],
        summary,
        passed: true,
    })
}

fn cmd_count(config: &ExperimentConfig, dist: &CoefficientDistribution) -> Result<Report> {
    let mut rows = Vec::new();
    let mut summary = format!("count: {} coefficients, {} trials\n", dist.label(), config.trials);
    for &n in &config.n {
        let dc = DensityConfig {
            distribution: dist.label().into(),
            n,
            master_seed: config.seed,
            binning: Binning::uniform(Coordinate::Theta, -PI / 2.0, PI / 2.0, 1)?,
            scan: ScanMode::Full,
            grid_factor: DEFAULT_GRID_FACTOR,
        };
        let est = run_density_trials(dist, &dc, 0..config.trials)?;
        let m = est.mean_count();
        let root = (n as f64).sqrt();
        let z = m.z_score(root);
        rows.push(vec![
            s(n),
            s(config.trials),
            s(m.value),
            s(m.std_error),
            s(root),
            s(m.value / root),
            s(z),
        ]);
        let _ = writeln!(
            summary,
            "n = {n}: mean count {:.4} ± {:.4}; √n = {:.4}; |mean - √n| = {:.2} standard errors",
            m.value, m.std_error, root, z
        );
    }
    let header = ["n", "trials", "mean_count", "std_error", "sqrt_n", "ratio", "z_vs_sqrt_n"];
    Ok(Report {
        files: vec![("count.csv".into(), csv_bytes(&header, &rows)?)],
        summary,
        passed: true,
    })
}

fn cmd_kacrice(config: &ExperimentConfig, dist: &CoefficientDistribution) -> Result<Report> {
    let mut rows = Vec::new();
    let mut summary = format!("kacrice: {} coefficients\n", dist.label());
    for &n in &config.n {
        for &theta in &config.theta0 {
            let x = theta.tan();
            let d = density(n, theta, dist)?;
            let cauchy = 1.0 / (PI * (1.0 + x * x));
            rows.push(vec![
                s(n),
                s(theta),
                s(x),
                s(d.value),
                s(d.error_estimate),
                s(cauchy),
                s(d.cutoff),
                s(d.size),
            ]);
            let _ = writeln!(
                summary,
                "n = {n}, x = {x:.4}: p_n/√n = {:.6}, Cauchy {:.6}, difference {:+.2e}",
                d.value,
                cauchy,
                d.value - cauchy
            );
        }
    }
    let header = ["n", "theta", "x", "value", "error_estimate", "cauchy", "cutoff", "size"];
    Ok(Report {
        files: vec![("kacrice.csv".into(), csv_bytes(&header, &rows)?)],
        summary,
        passed: true,
    })
}

struct Check {
    module: &'static str,
    name: String,
    value: f64,
    tolerance: f64,
    passed: bool,
}

fn check(out: &mut Vec<Check>, module: &'static str, name: impl Into<String>, value: f64, tolerance: f64) {
    out.push(Check {
        module,
        name: name.into(),
        value,
        tolerance,
        passed: value.abs() <= tolerance,
    });
}

fn flag(out: &mut Vec<Check>, module: &'static str, name: impl Into<String>, ok: bool) {
    out.push(Check {
        module,
        name: name.into(),
        value: if ok { 0.0 } else { 1.0 },
        tolerance: 0.0,
        passed: ok,
    });
}

/// The cross-module invariant suite behind `validate`.
fn invariant_suite(extra: &CoefficientDistribution) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut laws = vec![
        CoefficientDistribution::gaussian(),
        CoefficientDistribution::uniform(),
        CoefficientDistribution::quartic(),
    ];
    if extra.label() == "custom" {
        laws.push(extra.clone());
    }
    let grid = uniform_s_grid(60.0, 3001);
    for d in &laws {
        let l = d.label();
        let m = d.moments();
        check(&mut out, "coefficient_ensembles", format!("{l}: mass - 1"), m.mass - 1.0, 1e-10);
        check(&mut out, "coefficient_ensembles", format!("{l}: mean"), m.mean, 1e-8);
        check(&mut out, "coefficient_ensembles", format!("{l}: variance - 1"), m.variance - 1.0, 1e-8);
        check(&mut out, "coefficient_ensembles", format!("{l}: φ(0) - 1"), (d.char_fn(0.0, 0)? - 1.0).norm(), 1e-6);
        check(&mut out, "coefficient_ensembles", format!("{l}: φ'(0)"), d.char_fn(0.0, 1)?.norm(), 1e-6);
        check(&mut out, "coefficient_ensembles", format!("{l}: φ''(0) + 1"), (d.char_fn(0.0, 2)? + 1.0).norm(), 1e-6);
        let report = verify_conditions(d, &grid)?;
        flag(&mut out, "coefficient_ensembles", format!("{l}: |φ| ≤ 1 on grid"), report.max_abs_phi <= 1.0 + 1e-12);
        let mut herm = 0.0f64;
        for &sv in grid.iter().step_by(37) {
            herm = herm.max((d.char_fn(-sv, 0)? - d.char_fn(sv, 0)?.conj()).norm());
        }
        check(&mut out, "coefficient_ensembles", format!("{l}: Hermitian symmetry"), herm, 1e-12);
    }

    for n in [2usize, 64, 1024] {
        for theta in [-1.2, -0.3, 0.4, 0.785, 1.3] {
            let w = build_weights(n, theta)?;
            check(
                &mut out,
                "so2_polynomial",
                format!("n = {n}, θ = {theta}: sum identities"),
                w.identity_sums().max_deviation(),
                1e-12,
            );
        }
    }
    for x in [0.1f64, 1.0, 10.0] {
        let u0 = x * x / (1.0 + x * x);
        check(&mut out, "so2_polynomial", format!("Θ(u0; {x})"), theta_rate(u0, x)?.0, 1e-12);
    }
    for y in [0.0, 1.0, 3.0] {
        let t = build_limit_weights(y, 1e-14)?;
        let (mm, ll, ml) = t.sums();
        let dev = (mm - 1.0).abs().max((ll - 1.0).abs()).max(ml.abs());
        check(&mut out, "so2_polynomial", format!("limit weights at y = {y}"), dev, t.tail_bound + 1e-12);
    }

    let z = scan_and_refine(&[1.0, 1.0], 1, 4)?;
    flag(
        &mut out,
        "real_root_engine",
        "f = 1 + x has its zero at θ = -π/4",
        z.count() == 1 && (z.zeros_theta[0] + PI / 4.0).abs() < 1e-12,
    );
    let coeffs = CoefficientDistribution::gaussian().sample(65, 3)?;
    let forward = scan_and_refine(&coeffs, 64, DEFAULT_GRID_FACTOR)?;
    let reversed: Vec<f64> = coeffs.iter().rev().copied().collect();
    let backward = scan_and_refine(&reversed, 64, DEFAULT_GRID_FACTOR)?;
    let mut inv: Vec<f64> = backward.zeros_x.iter().filter(|x| **x != 0.0).map(|x| 1.0 / x).collect();
    inv.sort_by(f64::total_cmp);
    let mut fwd: Vec<f64> = forward.zeros_x.iter().filter(|x| **x != 0.0).copied().collect();
    fwd.sort_by(f64::total_cmp);
    let matched = inv.len() == fwd.len()
        && inv.iter().zip(&fwd).all(|(a, b)| (a - b).abs() <= 1e-8 * (1.0 + b.abs()));
    flag(&mut out, "real_root_engine", "zeros of reversed coefficients are reciprocals", matched);
    flag(
        &mut out,
        "real_root_engine",
        "residuals below 1e-10",
        forward.residuals.iter().all(|r| *r < 1e-10),
    );

    let gauss = CoefficientDistribution::gaussian();
    for x in [0.5f64, 1.0, 2.0] {
        let d = density(32, x.atan(), &gauss)?;
        let exact = 1.0 / (PI * (1.0 + x * x));
        check(&mut out, "kac_rice_evaluator", format!("Gaussian p_32({x})/√32 relative error"), d.value / exact - 1.0, 1e-3);
    }
    check(
        &mut out,
        "kac_rice_evaluator",
        "uniform origin density - 1/4",
        density_at_origin(1, &CoefficientDistribution::uniform()) - 0.25,
        1e-8,
    );

    let k = LimitKernel::new(&[0.0, 0.6, 1.7], None)?;
    flag(&mut out, "limit_field", "Δ positive definite", k.min_eigenvalue > 0.0);
    let (a, b, c) = kernel_entries(1.0, 0.0, None);
    let e = (-0.5f64).exp();
    check(&mut out, "limit_field", "kernel at unit separation", (a - e).abs().max((b - e).abs()).max(c.abs()), 1e-15);
    let far = limit_correlation(&[0.0, 8.0], CorrelationMethod::ClosedFormM2)?.value;
    check(&mut out, "limit_field", "K_2 at separation 8 - 1/π²", far - 1.0 / (PI * PI), 1e-3);

    let dc = DensityConfig {
        distribution: "gaussian".into(),
        n: 16,
        master_seed: 9,
        binning: Binning::uniform(Coordinate::X, -2.0, 2.0, 4)?,
        scan: ScanMode::Full,
        grid_factor: DEFAULT_GRID_FACTOR,
    };
    let p = run_density_trials(&gauss, &dc, 0..64)?;
    let q = run_density_trials(&gauss, &dc, 64..160)?;
    let r = run_density_trials(&gauss, &dc, 160..200)?;
    let left = merge_density(&[merge_density(&[p.clone(), q.clone()])?, r.clone()])?;
    let right = merge_density(&[p, merge_density(&[q, r])?])?;
    let whole = run_density_trials(&gauss, &dc, 0..200)?;
    flag(&mut out, "empirical_statistics", "merge is associative", left == right);
    flag(&mut out, "empirical_statistics", "merged runs equal a single run", left == whole);
    Ok(out)
}

fn cmd_validate(_config: &ExperimentConfig, dist: &CoefficientDistribution) -> Result<Report> {
    let checks = invariant_suite(dist)?;
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| vec![s(c.module), c.name.clone(), s(c.value), s(c.tolerance), s(c.passed)])
        .collect();
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.passed).collect();
    let mut summary = format!("validate: {} checks, {} failed\n", checks.len(), failed.len());
    for c in &failed {
        let _ = writeln!(summary, "FAILED [{}] {}: {} (tolerance {})", c.module, c.name, c.value, c.tolerance);
    }
    Ok(Report {
        files: vec![(
            "validate.csv".into(),
            csv_bytes(&["module", "check", "value", "tolerance", "passed"], &rows)?,
        )],
        summary,
        passed: failed.is_empty(),
    })
}

/// Parse and resolve without running; used to check configuration round trips.
pub fn resolve_config(args: &[&str]) -> Result<ExperimentConfig> {
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Config(e.to_string()))?;
    let (name, flags) = match cli.command {
        Command::Density(f) => ("density", f),
        Command::Crossover(f) => ("crossover", f),
        Command::PairCorr(f) => ("pair-corr", f),
        Command::Count(f) => ("count", f),
        Command::Kacrice(f) => ("kacrice", f),
        Command::Validate(f) => ("validate", f),
        Command::Plot(f) => ("plot", f),
    };
    let config = resolve(name, flags)?;
    config.validate()?;
    Ok(config)
}
