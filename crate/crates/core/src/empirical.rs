//! Monte Carlo estimates of zero densities, zero counts and pair correlations.
//!
//! Trial `i` of a run with master seed `s` always draws its coefficients from
//! the stream seeded by [`trial_seed`]`(s, i)`, so a run is a pure function of
//! its configuration and trial range. Partial results hold integer counts only
//! and merge by addition, which makes every reduction order give the same bits.
//!
//! Error bars use batch means: trial `i` belongs to batch `i mod 32`.

use std::f64::consts::FRAC_PI_2;
use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::CoefficientDistribution;
use crate::error::{Error, Result};
use crate::roots::{ScanPlan, DEFAULT_GRID_FACTOR};

pub const BATCHES: usize = 32;
const CHUNK: u64 = 256;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index` under `master`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

/// Coefficients of trial `index`.
pub fn trial_coefficients(dist: &CoefficientDistribution, n: usize, master: u64, index: u64, out: &mut Vec<f64>) {
    out.resize(n + 1, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(master, index));
    dist.fill(&mut rng, out);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coordinate {
    X,
    Theta,
    /// `y = √n (θ - θ⁰)`; θ⁰ = 0 gives the scaling window at the origin.
    ScaledY { theta0: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Binning {
    pub coordinate: Coordinate,
    pub edges: Vec<f64>,
}

impl Binning {
    pub fn new(coordinate: Coordinate, edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Contract("bin edges must be strictly increasing, at least two".into()));
        }
        Ok(Self { coordinate, edges })
    }

    /// `count` equal bins on `[lo, hi]`.
    pub fn uniform(coordinate: Coordinate, lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count == 0 || !(hi > lo) {
            return Err(Error::Contract("need at least one bin and hi > lo".into()));
        }
        let edges = (0..=count).map(|i| lo + (hi - lo) * i as f64 / count as f64).collect();
        Self::new(coordinate, edges)
    }

    pub fn bins(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn center(&self, i: usize) -> f64 {
        0.5 * (self.edges[i] + self.edges[i + 1])
    }

    pub fn width(&self, i: usize) -> f64 {
        self.edges[i + 1] - self.edges[i]
    }

    fn locate(&self, v: f64) -> Option<usize> {
        if !(v >= self.edges[0] && v < self.edges[self.edges.len() - 1]) {
            return None;
        }
        Some(self.edges.partition_point(|&e| e <= v) - 1)
    }

    fn coordinate_of(&self, theta: f64, x: f64, n: usize) -> f64 {
        match self.coordinate {
            Coordinate::X => x,
            Coordinate::Theta => theta,
            Coordinate::ScaledY { theta0 } => (n as f64).sqrt() * (theta - theta0),
        }
    }

    /// θ range covered by the bins.
    fn theta_range(&self, n: usize) -> (f64, f64) {
        let (lo, hi) = (self.edges[0], self.edges[self.edges.len() - 1]);
        match self.coordinate {
            Coordinate::X => (lo.atan(), hi.atan()),
            Coordinate::Theta => (lo, hi),
            Coordinate::ScaledY { theta0 } => {
                let s = (n as f64).sqrt();
                (theta0 + lo / s, theta0 + hi / s)
            }
        }
    }

    /// Factor turning a per-trial density in this coordinate into `p_n(x)/√n` at `v`.
    pub fn to_normalized_density(&self, v: f64, n: usize) -> f64 {
        let s = (n as f64).sqrt();
        match self.coordinate {
            Coordinate::X => 1.0 / s,
            Coordinate::Theta => {
                let x = v.tan();
                1.0 / (s * (1.0 + x * x))
            }
            Coordinate::ScaledY { theta0 } => {
                let x = (theta0 + v / s).tan();
                1.0 / (1.0 + x * x)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    /// Scan the whole circle, so per-trial zero counts are exact.
    Full,
    /// Scan only the θ range under the bins.
    BinsOnly,
}

/// Batch-organized integer counters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
struct Batches {
    trials: Vec<u64>,
    /// `counts[b][k]`
    counts: Vec<Vec<u64>>,
}

impl Batches {
    fn new(width: usize) -> Self {
        Self {
            trials: vec![0; BATCHES],
            counts: vec![vec![0; width]; BATCHES],
        }
    }

    fn add(&mut self, other: &Self) {
        for b in 0..BATCHES {
            self.trials[b] += other.trials[b];
            for (x, y) in self.counts[b].iter_mut().zip(&other.counts[b]) {
                *x += y;
            }
        }
    }

    fn total(&self, k: usize) -> u64 {
        self.counts.iter().map(|c| c[k]).sum()
    }

    fn trials(&self) -> u64 {
        self.trials.iter().sum()
    }

    /// Mean and batch-means standard error of `statistic(batch)`, weighting batches by trials.
    fn batch_mean<F: Fn(usize) -> Option<f64>>(&self, pooled: f64, statistic: F) -> (f64, f64) {
        let values: Vec<(f64, f64)> = (0..BATCHES)
            .filter(|&b| self.trials[b] > 0)
            .filter_map(|b| statistic(b).map(|v| (v, self.trials[b] as f64)))
            .collect();
        let k = values.len() as f64;
        if values.len() < 2 {
            return (pooled, f64::NAN);
        }
        let wsum: f64 = values.iter().map(|v| v.1).sum();
        let wbar = wsum / k;
        // Weighted squared deviations from the pooled estimate, scaled to a per-batch variance.
        let ss: f64 = values.iter().map(|(v, w)| (w / wbar).powi(2) * (v - pooled).powi(2)).sum();
        (pooled, (ss / (k * (k - 1.0))).sqrt())
    }
}

fn coalesce(mut ranges: Vec<(u64, u64)>) -> Result<Vec<(u64, u64)>> {
    ranges.sort();
    let mut out: Vec<(u64, u64)> = Vec::with_capacity(ranges.len());
    for (a, b) in ranges {
        if let Some(last) = out.last_mut() {
            if a < last.1 {
                return Err(Error::Contract(format!("trial ranges overlap at {a}")));
            }
            if a == last.1 {
                last.1 = b;
                continue;
            }
        }
        out.push((a, b));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityConfig {
    pub distribution: String,
    pub n: usize,
    pub master_seed: u64,
    pub binning: Binning,
    pub scan: ScanMode,
    pub grid_factor: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub config: DensityConfig,
    /// Disjoint half-open ranges of global trial indices included.
    pub trial_ranges: Vec<(u64, u64)>,
    /// Per batch: one counter per bin, then out-of-range zeros, then all zeros found.
    batches: Batches,
    /// Σ over trials of (zeros found)².
    pub zeros_sq: u64,
}

/// A value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    /// |value - target| in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.value - target).abs() / self.std_error
    }
}

impl DensityEstimate {
    fn empty(config: DensityConfig) -> Self {
        let width = config.binning.bins() + 2;
        Self {
            config,
            trial_ranges: Vec::new(),
            batches: Batches::new(width),
            zeros_sq: 0,
        }
    }

    pub fn trials(&self) -> u64 {
        self.batches.trials()
    }

    pub fn counts(&self) -> Vec<u64> {
        (0..self.config.binning.bins()).map(|k| self.batches.total(k)).collect()
    }

    pub fn out_of_range(&self) -> u64 {
        self.batches.total(self.config.binning.bins())
    }

    pub fn total_zeros(&self) -> u64 {
        self.batches.total(self.config.binning.bins() + 1)
    }

    /// Zeros per trial per unit coordinate in bin `i`.
    pub fn bin_density(&self, i: usize) -> Estimate {
        let w = self.config.binning.width(i);
        let pooled = self.batches.total(i) as f64 / (self.trials() as f64 * w);
        let b = &self.batches;
        let (value, std_error) =
            b.batch_mean(pooled, |k| Some(b.counts[k][i] as f64 / (b.trials[k] as f64 * w)));
        Estimate { value, std_error }
    }

    /// Bin density converted to `p_n(x)/√n` at the bin centre.
    pub fn normalized_bin_density(&self, i: usize) -> Estimate {
        let e = self.bin_density(i);
        let f = self
            .config
            .binning
            .to_normalized_density(self.config.binning.center(i), self.config.n);
        Estimate {
            value: e.value * f,
            std_error: e.std_error * f,
        }
    }

    /// Mean number of zeros found per trial, with the i.i.d. standard error.
    pub fn mean_count(&self) -> Estimate {
        let t = self.trials() as f64;
        let mean = self.total_zeros() as f64 / t;
        let var = (self.zeros_sq as f64 / t - mean * mean) * t / (t - 1.0);
        Estimate {
            value: mean,
            std_error: (var / t).sqrt(),
        }
    }

    fn bins_within(&self, lo: f64, hi: f64) -> Result<Vec<usize>> {
        let edges = &self.config.binning.edges;
        let on_edge = |v: f64| edges.iter().any(|e| (e - v).abs() <= 1e-12 * (1.0 + v.abs()));
        if !on_edge(lo) || !on_edge(hi) {
            return Err(Error::Contract(format!("[{lo}, {hi}] does not align with bin edges")));
        }
        Ok((0..self.config.binning.bins())
            .filter(|&i| edges[i] >= lo - 1e-12 && edges[i + 1] <= hi + 1e-12)
            .collect())
    }

    /// Expected number of zeros per trial in `[lo, hi]` (must align with bin edges).
    pub fn mass_per_trial(&self, lo: f64, hi: f64) -> Result<Estimate> {
        let bins = self.bins_within(lo, hi)?;
        let b = &self.batches;
        let sum = |k: usize| bins.iter().map(|&i| b.counts[k][i]).sum::<u64>() as f64;
        let pooled = bins.iter().map(|&i| b.total(i)).sum::<u64>() as f64 / self.trials() as f64;
        let (value, std_error) = b.batch_mean(pooled, |k| Some(sum(k) / b.trials[k] as f64));
        Ok(Estimate { value, std_error })
    }

    /// Fraction of all zeros found that fall in `[lo, hi]`.
    pub fn mass_fraction(&self, lo: f64, hi: f64) -> Result<Estimate> {
        let bins = self.bins_within(lo, hi)?;
        let b = &self.batches;
        let all = self.config.binning.bins() + 1;
        let sum = |k: usize| bins.iter().map(|&i| b.counts[k][i]).sum::<u64>() as f64;
        let pooled = bins.iter().map(|&i| b.total(i)).sum::<u64>() as f64 / self.total_zeros() as f64;
        let (value, std_error) = b.batch_mean(pooled, |k| {
            let total = b.counts[k][all];
            (total > 0).then(|| sum(k) / total as f64)
        });
        Ok(Estimate { value, std_error })
    }

    /// Per-trial mass in `first` minus mass in `second`, with a paired batch error.
    pub fn paired_mass_difference(&self, first: (f64, f64), second: (f64, f64)) -> Result<Estimate> {
        let a = self.bins_within(first.0, first.1)?;
        let c = self.bins_within(second.0, second.1)?;
        let b = &self.batches;
        let diff = |k: usize| {
            let x: u64 = a.iter().map(|&i| b.counts[k][i]).sum();
            let y: u64 = c.iter().map(|&i| b.counts[k][i]).sum();
            x as f64 - y as f64
        };
        let pooled = (0..BATCHES).map(diff).sum::<f64>() / self.trials() as f64;
        let (value, std_error) = b.batch_mean(pooled, |k| Some(diff(k) / b.trials[k] as f64));
        Ok(Estimate { value, std_error })
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bin_lo", "bin_hi", "center", "count", "density", "std_error", "normalized", "normalized_std_error"])?;
        let bin = &self.config.binning;
        for i in 0..bin.bins() {
            let d = self.bin_density(i);
            let nd = self.normalized_bin_density(i);
            w.write_record([
                bin.edges[i].to_string(),
                bin.edges[i + 1].to_string(),
                bin.center(i).to_string(),
                self.batches.total(i).to_string(),
                d.value.to_string(),
                d.std_error.to_string(),
                nd.value.to_string(),
                nd.std_error.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Combine estimates of the same configuration over disjoint trial ranges.
pub fn merge_density(estimates: &[DensityEstimate]) -> Result<DensityEstimate> {
    let first = estimates
        .first()
        .ok_or_else(|| Error::Contract("nothing to merge".into()))?;
    let mut out = DensityEstimate::empty(first.config.clone());
    let mut ranges = Vec::new();
    for e in estimates {
        if e.config != first.config {
            return Err(Error::Contract("estimates have different configurations".into()));
        }
        out.batches.add(&e.batches);
        out.zeros_sq += e.zeros_sq;
        ranges.extend(e.trial_ranges.iter().copied());
    }
    out.trial_ranges = coalesce(ranges)?;
    Ok(out)
}

fn check_config(dist: &CoefficientDistribution, config: &DensityConfig) -> Result<()> {
    if config.distribution != dist.label() {
        return Err(Error::Contract(format!(
            "configuration names `{}` but the distribution is `{}`",
            config.distribution,
            dist.label()
        )));
    }
    Ok(())
}

/// Run trials `range` of a density experiment.
pub fn run_density_trials(
    dist: &CoefficientDistribution,
    config: &DensityConfig,
    range: Range<u64>,
) -> Result<DensityEstimate> {
    check_config(dist, config)?;
    if range.is_empty() {
        return Err(Error::Contract("empty trial range".into()));
    }
    let plan = ScanPlan::new(config.n, config.grid_factor)?;
    let (lo, hi) = match config.scan {
        ScanMode::Full => (-FRAC_PI_2, FRAC_PI_2),
        ScanMode::BinsOnly => config.binning.theta_range(config.n),
    };
    let chunks: Vec<Range<u64>> = (range.start..range.end)
        .step_by(CHUNK as usize)
        .map(|s| s..(s + CHUNK).min(range.end))
        .collect();
    let bins = config.binning.bins();
    let partials: Vec<DensityEstimate> = chunks
        .into_par_iter()
        .map(|chunk| -> Result<DensityEstimate> {
            let mut est = DensityEstimate::empty(config.clone());
            let mut coeffs = Vec::new();
            for trial in chunk {
                trial_coefficients(dist, config.n, config.master_seed, trial, &mut coeffs);
                let zeros = plan.scan_range(&coeffs, lo, hi)?;
                let b = (trial % BATCHES as u64) as usize;
                let row = &mut est.batches.counts[b];
                let mut found = 0u64;
                for (&t, &x) in zeros.zeros_theta.iter().zip(&zeros.zeros_x) {
                    if t < lo || t > hi {
                        continue;
                    }
                    found += 1;
                    let v = config.binning.coordinate_of(t, x, config.n);
                    match config.binning.locate(v) {
                        Some(i) => row[i] += 1,
                        None => row[bins] += 1,
                    }
                }
                row[bins + 1] += found;
                est.batches.trials[b] += 1;
                est.zeros_sq += found * found;
            }
            Ok(est)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = merge_density(&partials)?;
    out.trial_ranges = vec![(range.start, range.end)];
    Ok(out)
}

/// Full-scan density experiment over trials `0..trials`.
pub fn run_density_experiment(
    dist: &CoefficientDistribution,
    n: usize,
    trials: u64,
    binning: Binning,
    seed: u64,
) -> Result<DensityEstimate> {
    if trials < 100 {
        return Err(Error::Contract("at least 100 trials are required".into()));
    }
    let config = DensityConfig {
        distribution: dist.label().to_string(),
        n,
        master_seed: seed,
        binning,
        scan: ScanMode::Full,
        grid_factor: DEFAULT_GRID_FACTOR,
    };
    run_density_trials(dist, &config, 0..trials)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairConfig {
    pub distribution: String,
    pub n: usize,
    pub master_seed: u64,
    pub theta0: f64,
    /// `(y_1, y_2)` with `y_1 < y_2`.
    pub pairs: Vec<(f64, f64)>,
    pub bin_width: f64,
    pub grid_factor: usize,
}

/// Smallest allowed distance of the reference angle from 0 and π/2.
pub const THETA0_MARGIN: f64 = 0.1;

impl PairConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta0 > THETA0_MARGIN && self.theta0 < FRAC_PI_2 - THETA0_MARGIN) {
            return Err(Error::Contract(format!(
                "reference angle {} outside ({THETA0_MARGIN}, π/2 - {THETA0_MARGIN})",
                self.theta0
            )));
        }
        if self.pairs.is_empty() || !(self.bin_width > 0.0) {
            return Err(Error::Contract("need at least one pair and a positive bin width".into()));
        }
        for &(a, b) in &self.pairs {
            if !(b > a) {
                return Err(Error::Contract(format!("pair ({a}, {b}) is not increasing")));
            }
            if b - a < self.bin_width {
                return Err(Error::Contract(format!("bins around {a} and {b} overlap")));
            }
            if self.bin_width > 0.5 * (b - a) {
                return Err(Error::Contract(format!(
                    "bin width {} exceeds half the separation of ({a}, {b})",
                    self.bin_width
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCorrelationEstimate {
    pub config: PairConfig,
    pub trial_ranges: Vec<(u64, u64)>,
    /// Per batch: for each pair, the pair count, then the two single-bin counts.
    batches: Batches,
}

impl PairCorrelationEstimate {
    fn empty(config: PairConfig) -> Self {
        let width = 3 * config.pairs.len();
        Self {
            config,
            trial_ranges: Vec::new(),
            batches: Batches::new(width),
        }
    }

    pub fn trials(&self) -> u64 {
        self.batches.trials()
    }

    pub fn pair_count(&self, p: usize) -> u64 {
        self.batches.total(3 * p)
    }

    /// Two-point intensity in scaled coordinates: pairs / (trials · w²).
    pub fn estimate(&self, p: usize) -> Estimate {
        let w2 = self.config.bin_width * self.config.bin_width;
        let b = &self.batches;
        let pooled = b.total(3 * p) as f64 / (self.trials() as f64 * w2);
        let (value, std_error) = b.batch_mean(pooled, |k| Some(b.counts[k][3 * p] as f64 / (b.trials[k] as f64 * w2)));
        Estimate { value, std_error }
    }

    /// One-point intensity in the bin around `y_1` (`side = 0`) or `y_2` (`side = 1`).
    pub fn single_intensity(&self, p: usize, side: usize) -> Estimate {
        let w = self.config.bin_width;
        let idx = 3 * p + 1 + side.min(1);
        let b = &self.batches;
        let pooled = b.total(idx) as f64 / (self.trials() as f64 * w);
        let (value, std_error) = b.batch_mean(pooled, |k| Some(b.counts[k][idx] as f64 / (b.trials[k] as f64 * w)));
        Estimate { value, std_error }
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["y1", "y2", "separation", "pairs", "k2", "std_error", "k1_first", "k1_second"])?;
        for (p, &(a, b)) in self.config.pairs.iter().enumerate() {
            let e = self.estimate(p);
            w.write_record([
                a.to_string(),
                b.to_string(),
                (b - a).to_string(),
                self.pair_count(p).to_string(),
                e.value.to_string(),
                e.std_error.to_string(),
                self.single_intensity(p, 0).value.to_string(),
                self.single_intensity(p, 1).value.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn merge_pairs(estimates: &[PairCorrelationEstimate]) -> Result<PairCorrelationEstimate> {
    let first = estimates
        .first()
        .ok_or_else(|| Error::Contract("nothing to merge".into()))?;
    let mut out = PairCorrelationEstimate::empty(first.config.clone());
    let mut ranges = Vec::new();
    for e in estimates {
        if e.config != first.config {
            return Err(Error::Contract("estimates have different configurations".into()));
        }
        out.batches.add(&e.batches);
        ranges.extend(e.trial_ranges.iter().copied());
    }
    out.trial_ranges = coalesce(ranges)?;
    Ok(out)
}

pub fn run_pair_trials(
    dist: &CoefficientDistribution,
    config: &PairConfig,
    range: Range<u64>,
) -> Result<PairCorrelationEstimate> {
    config.validate()?;
    if config.distribution != dist.label() {
        return Err(Error::Contract("configuration and distribution disagree".into()));
    }
    if range.is_empty() {
        return Err(Error::Contract("empty trial range".into()));
    }
    let plan = ScanPlan::new(config.n, config.grid_factor)?;
    let sqrt_n = (config.n as f64).sqrt();
    let half = 0.5 * config.bin_width;
    let y_lo = config.pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min) - half;
    let y_hi = config.pairs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max) + half;
    let (lo, hi) = (config.theta0 + y_lo / sqrt_n, config.theta0 + y_hi / sqrt_n);
    let chunks: Vec<Range<u64>> = (range.start..range.end)
        .step_by(CHUNK as usize)
        .map(|s| s..(s + CHUNK).min(range.end))
        .collect();
    let partials: Vec<PairCorrelationEstimate> = chunks
        .into_par_iter()
        .map(|chunk| -> Result<PairCorrelationEstimate> {
            let mut est = PairCorrelationEstimate::empty(config.clone());
            let mut coeffs = Vec::new();
            let mut ys = Vec::new();
            for trial in chunk {
                trial_coefficients(dist, config.n, config.master_seed, trial, &mut coeffs);
                let zeros = plan.scan_range(&coeffs, lo, hi)?;
                ys.clear();
                ys.extend(zeros.zeros_theta.iter().map(|t| sqrt_n * (t - config.theta0)));
                let b = (trial % BATCHES as u64) as usize;
                let row = &mut est.batches.counts[b];
                for (p, &(y1, y2)) in config.pairs.iter().enumerate() {
                    let inside = |c: f64| ys.iter().filter(|&&y| y >= c - half && y < c + half).count() as u64;
                    let (n1, n2) = (inside(y1), inside(y2));
                    row[3 * p] += n1 * n2;
                    row[3 * p + 1] += n1;
                    row[3 * p + 2] += n2;
                }
                est.batches.trials[b] += 1;
            }
            Ok(est)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = merge_pairs(&partials)?;
    out.trial_ranges = vec![(range.start, range.end)];
    Ok(out)
}

/// Pair-correlation experiment over trials `0..trials`.
#[allow(clippy::too_many_arguments)]
pub fn run_pair_correlation_experiment(
    dist: &CoefficientDistribution,
    n: usize,
    theta0: f64,
    y_pairs: &[(f64, f64)],
    bin_width: f64,
    trials: u64,
    seed: u64,
) -> Result<PairCorrelationEstimate> {
    let config = PairConfig {
        distribution: dist.label().to_string(),
        n,
        master_seed: seed,
        theta0,
        pairs: y_pairs.to_vec(),
        bin_width,
        grid_factor: DEFAULT_GRID_FACTOR,
    };
    run_pair_trials(dist, &config, 0..trials)
}
