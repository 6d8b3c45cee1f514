//! Coefficient laws for the random polynomial.
//!
//! A [`CoefficientDistribution`] is immutable once built and can be shared
//! freely between worker threads. Sampling always takes an explicit seed or
//! RNG, so the distribution itself carries no mutable state.
//!
//! Three laws are built in (standard Gaussian, uniform on `[-√3, √3]`, and the
//! smooth quartic-exponential law `Z⁻¹ e^{-β t⁴}`); arbitrary densities can be
//! supplied as a table of `(t, r(t))` pairs, which is renormalized and
//! recentred to mean 0 and variance 1.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{GaussLegendre, Panels};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Highest derivative stored in a characteristic-function table.
const TABLE_ORDERS: usize = 9;
const TABLE_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    Gaussian,
    UniformSymmetric,
    QuarticExponential,
    CustomDensity,
}

/// Moments every coefficient law must satisfy, plus the two numbers the origin
/// density needs (`r(0)` and `E|c|`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentCache {
    pub mass: f64,
    pub mean: f64,
    pub variance: f64,
    pub abs_first_moment: f64,
    pub density_at_zero: f64,
}

/// How draws are produced. Every variant is deterministic given the RNG stream.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerSpec {
    /// Ziggurat standard normal.
    StandardNormal,
    /// Uniform on `[-half_width, half_width)`.
    Uniform { half_width: f64 },
    /// Rejection from a standard normal envelope with log acceptance bound `log_bound`.
    RejectionFromNormal { log_bound: f64 },
    /// Exact inversion of the piecewise-linear CDF.
    InverseCdf { knots: usize },
}

/// The affine map applied to a user table: `t' = (t - shift) / scale`, `r' = r * scale / mass`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineCorrection {
    pub mass: f64,
    pub shift: f64,
    pub scale: f64,
}

#[derive(Debug, Clone)]
pub struct CoefficientDistribution {
    kind: DistributionKind,
    law: Law,
    moments: MomentCache,
    sampler: SamplerSpec,
    correction: Option<AffineCorrection>,
}

#[derive(Debug, Clone)]
enum Law {
    Gaussian,
    Uniform { half_width: f64 },
    Quartic(Arc<QuarticLaw>),
    Tabulated(Arc<TabulatedLaw>),
}

#[derive(Debug)]
struct QuarticLaw {
    beta: f64,
    norm: f64,
    cutoff: f64,
    table: CharTable,
}

#[derive(Debug)]
struct TabulatedLaw {
    knots: Vec<f64>,
    values: Vec<f64>,
    cdf: Vec<f64>,
    table: CharTable,
}

impl CoefficientDistribution {
    pub fn gaussian() -> Self {
        Self {
            kind: DistributionKind::Gaussian,
            law: Law::Gaussian,
            moments: MomentCache {
                mass: 1.0,
                mean: 0.0,
                variance: 1.0,
                abs_first_moment: (2.0 / PI).sqrt(),
                density_at_zero: 1.0 / (2.0 * PI).sqrt(),
            },
            sampler: SamplerSpec::StandardNormal,
            correction: None,
        }
    }

    /// Uniform law on `[-√3, √3]` (the symmetric uniform law of unit variance).
    pub fn uniform() -> Self {
        let w = SQRT_3;
        Self {
            kind: DistributionKind::UniformSymmetric,
            law: Law::Uniform { half_width: w },
            moments: MomentCache {
                mass: 1.0,
                mean: 0.0,
                variance: 1.0,
                abs_first_moment: w / 2.0,
                density_at_zero: 1.0 / (2.0 * w),
            },
            sampler: SamplerSpec::Uniform { half_width: w },
            correction: None,
        }
    }

    /// `r(t) = Z⁻¹ exp(-β t⁴)` with β and Z fixed by quadrature so that the variance is 1.
    pub fn quartic() -> Self {
        static LAW: OnceLock<Arc<QuarticLaw>> = OnceLock::new();
        let law = LAW.get_or_init(|| Arc::new(QuarticLaw::build())).clone();
        let moments = numeric_moments(&|t| law.density(t), &law.breakpoints());
        let log_bound = 1.0 / (16.0 * law.beta);
        Self {
            kind: DistributionKind::QuarticExponential,
            law: Law::Quartic(law),
            moments,
            sampler: SamplerSpec::RejectionFromNormal { log_bound },
            correction: None,
        }
    }

    /// Build a law from a tabulated density. The table is interpolated linearly,
    /// normalized, and mapped to mean 0 and variance 1.
    pub fn from_table(t: &[f64], r: &[f64]) -> Result<Self> {
        if t.len() != r.len() {
            return Err(Error::Config(format!(
                "density table columns differ in length ({} vs {})",
                t.len(),
                r.len()
            )));
        }
        if t.len() < 2 {
            return Err(Error::Config("density table needs at least two rows".into()));
        }
        if t.iter().chain(r).any(|v| !v.is_finite()) {
            return Err(Error::Config("density table contains non-finite values".into()));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("density abscissae must be strictly increasing".into()));
        }
        if r.iter().any(|&v| v < 0.0) {
            return Err(Error::Config("density values must be nonnegative".into()));
        }
        let raw = piecewise_moments(t, r);
        if !(raw[0] > 0.0) {
            return Err(Error::Config("density is not normalizable (zero mass)".into()));
        }
        let mass = raw[0];
        let shift = raw[1] / mass;
        let variance = raw[2] / mass - shift * shift;
        if !(variance > 0.0) {
            return Err(Error::Config("density has zero variance".into()));
        }
        let scale = variance.sqrt();
        let knots: Vec<f64> = t.iter().map(|v| (v - shift) / scale).collect();
        let values: Vec<f64> = r.iter().map(|v| v * scale / mass).collect();

        let mut cdf = Vec::with_capacity(knots.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for i in 1..knots.len() {
            acc += 0.5 * (values[i] + values[i - 1]) * (knots[i] - knots[i - 1]);
            cdf.push(acc);
        }
        let total = acc;
        for c in &mut cdf {
            *c /= total;
        }

        let density = |x: f64| interpolate(&knots, &values, x);
        let table = CharTable::build(&density, &knots, false, 48.0);
        let moments = numeric_moments(&density, &with_zero(&knots));
        let law = TabulatedLaw {
            knots,
            values,
            cdf,
            table,
        };
        Ok(Self {
            kind: DistributionKind::CustomDensity,
            sampler: SamplerSpec::InverseCdf {
                knots: law.knots.len(),
            },
            law: Law::Tabulated(Arc::new(law)),
            moments,
            correction: Some(AffineCorrection { mass, shift, scale }),
        })
    }

    /// Read a two-column `t,r(t)` CSV (an optional header row is skipped).
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path.as_ref())?;
        let mut t = Vec::new();
        let mut r = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() < 2 {
                return Err(Error::Config(format!("row {row}: expected two columns")));
            }
            match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
                (Ok(a), Ok(b)) => {
                    t.push(a);
                    r.push(b);
                }
                _ if row == 0 => continue,
                _ => return Err(Error::Config(format!("row {row}: not a number"))),
            }
        }
        Self::from_table(&t, &r)
    }

    /// Parse a distribution name as used on the command line.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "gaussian" | "normal" => Ok(Self::gaussian()),
            "uniform" | "uniform_symmetric" => Ok(Self::uniform()),
            "quartic" | "quartic_exponential" => Ok(Self::quartic()),
            other => match other.strip_prefix("custom:") {
                Some(path) => Self::from_csv(path),
                None => Err(Error::Config(format!("unknown distribution `{other}`"))),
            },
        }
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            DistributionKind::Gaussian => "gaussian",
            DistributionKind::UniformSymmetric => "uniform",
            DistributionKind::QuarticExponential => "quartic",
            DistributionKind::CustomDensity => "custom",
        }
    }

    pub fn moments(&self) -> &MomentCache {
        &self.moments
    }

    pub fn sampler_spec(&self) -> &SamplerSpec {
        &self.sampler
    }

    /// The affine correction applied to a custom table, if any.
    pub fn correction(&self) -> Option<AffineCorrection> {
        self.correction
    }

    /// Whether r(t) = r(-t), in which case φ is real and even.
    pub fn is_symmetric(&self) -> bool {
        !matches!(self.law, Law::Tabulated(_))
    }

    pub fn density(&self, t: f64) -> f64 {
        match &self.law {
            Law::Gaussian => (-0.5 * t * t).exp() / (2.0 * PI).sqrt(),
            Law::Uniform { half_width } => {
                if t.abs() <= *half_width {
                    0.5 / half_width
                } else {
                    0.0
                }
            }
            Law::Quartic(q) => q.density(t),
            Law::Tabulated(tab) => interpolate(&tab.knots, &tab.values, t),
        }
    }

    /// Breakpoints and support used for quadrature of the density.
    pub fn support_breakpoints(&self) -> Vec<f64> {
        match &self.law {
            Law::Gaussian => vec![-40.0, 0.0, 40.0],
            Law::Uniform { half_width } => vec![-half_width, 0.0, *half_width],
            Law::Quartic(q) => q.breakpoints(),
            Law::Tabulated(tab) => with_zero(&tab.knots),
        }
    }

    /// The j-th derivative of φ(s) = E e^{isc}, for j in 0..=3.
    pub fn char_fn(&self, s: f64, derivative_order: usize) -> Result<Complex64> {
        if derivative_order > 3 {
            return Err(Error::Contract(format!(
                "characteristic-function derivative order {derivative_order} not in 0..=3"
            )));
        }
        self.char_fn_any(s, derivative_order)
    }

    pub(crate) fn char_fn_any(&self, s: f64, j: usize) -> Result<Complex64> {
        match &self.law {
            Law::Gaussian => Ok(Complex64::new(gaussian_char_derivative(s, j), 0.0)),
            Law::Uniform { half_width } => {
                let w = *half_width;
                Ok(Complex64::new(w.powi(j as i32) * sinc_derivative(w * s, j), 0.0))
            }
            Law::Quartic(q) => match q.table.eval(s, j) {
                Some(v) => Ok(v),
                None => direct_char_fn(&|t| q.density(t), &q.breakpoints(), s, j),
            },
            Law::Tabulated(tab) => match tab.table.eval(s, j) {
                Some(v) => Ok(v),
                None => direct_char_fn(
                    &|t| interpolate(&tab.knots, &tab.values, t),
                    &tab.knots,
                    s,
                    j,
                ),
            },
        }
    }

    /// φ(s) for a symmetric law, as a real number. This is the inner loop of the
    /// spectral grids, so it never fails: beyond the tabulated range the value
    /// is obtained by direct quadrature.
    #[inline]
    pub fn char_fn_even(&self, s: f64) -> f64 {
        match &self.law {
            Law::Gaussian => (-0.5 * s * s).exp(),
            Law::Uniform { half_width } => sinc(half_width * s),
            Law::Quartic(q) => match q.table.eval_re0(s) {
                Some(v) => v,
                None => direct_char_fn(&|t| q.density(t), &q.breakpoints(), s, 0)
                    .map(|c| c.re)
                    .unwrap_or(0.0),
            },
            Law::Tabulated(_) => self.char_fn_any(s, 0).map(|c| c.re).unwrap_or(0.0),
        }
    }

    /// φ(s) as a complex number; never fails (see [`Self::char_fn_even`]).
    #[inline]
    pub fn char_fn_complex(&self, s: f64) -> Complex64 {
        match &self.law {
            Law::Tabulated(tab) => match tab.table.eval(s, 0) {
                Some(v) => v,
                None => direct_char_fn(
                    &|t| interpolate(&tab.knots, &tab.values, t),
                    &tab.knots,
                    s,
                    0,
                )
                .unwrap_or(Complex64::new(0.0, 0.0)),
            },
            _ => Complex64::new(self.char_fn_even(s), 0.0),
        }
    }

    /// Draw one coefficient.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.law {
            Law::Gaussian => rng.sample(StandardNormal),
            Law::Uniform { half_width } => rng.random_range(-half_width..*half_width),
            Law::Quartic(q) => {
                let log_bound = 1.0 / (16.0 * q.beta);
                loop {
                    let t: f64 = rng.sample(StandardNormal);
                    let log_ratio = -q.beta * t.powi(4) + 0.5 * t * t - log_bound;
                    let u: f64 = rng.random();
                    if u.ln() < log_ratio {
                        return t;
                    }
                }
            }
            Law::Tabulated(tab) => tab.inverse_cdf(rng.random()),
        }
    }

    /// Fill `out` with i.i.d. draws.
    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = self.draw(rng);
        }
    }

    /// `count` i.i.d. draws, bit-identical for a given `(distribution, count, seed)`.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(Error::Contract("sample count must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = vec![0.0; count];
        self.fill(&mut rng, &mut out);
        Ok(out)
    }
}

impl QuarticLaw {
    fn build() -> Self {
        // Variance of exp(-t⁴)/Z₁ fixes β: scaling t → β^{-1/4} t divides the variance by √β.
        let unit = |t: f64| (-t.powi(4)).exp();
        let bp = [-7.0, 0.0, 7.0];
        let panels = Panels::new(&bp, 0.05);
        let rule = GaussLegendre::ten();
        let z1 = panels.integrate(rule, unit);
        let m2 = panels.integrate(rule, |t| t * t * unit(t));
        let beta = (m2 / z1).powi(2);
        // exp(-β t⁴) < 1e-320 beyond this point.
        let cutoff = (740.0 / beta).powf(0.25);
        let bp = [-cutoff, 0.0, cutoff];
        let norm = Panels::new(&bp, 0.05).integrate(rule, |t| (-beta * t.powi(4)).exp());
        let density = |t: f64| (-beta * t.powi(4)).exp() / norm;
        let table = CharTable::build(&density, &bp, true, 64.0);
        Self {
            beta,
            norm,
            cutoff,
            table,
        }
    }

    fn density(&self, t: f64) -> f64 {
        (-self.beta * t.powi(4)).exp() / self.norm
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![-self.cutoff, 0.0, self.cutoff]
    }
}

impl TabulatedLaw {
    fn inverse_cdf(&self, u: f64) -> f64 {
        let i = match self.cdf.binary_search_by(|c| c.total_cmp(&u)) {
            Ok(i) => return self.knots[i],
            Err(i) => i.clamp(1, self.knots.len() - 1) - 1,
        };
        let h = self.knots[i + 1] - self.knots[i];
        let total = self.cdf_total_mass();
        // Mass to cover inside the segment, in the density's own units.
        let target = (u - self.cdf[i]) * total;
        let r0 = self.values[i];
        let slope = (self.values[i + 1] - r0) / h;
        let disc = (r0 * r0 + 2.0 * slope * target).max(0.0);
        let d = if r0 + disc.sqrt() > 0.0 {
            2.0 * target / (r0 + disc.sqrt())
        } else {
            0.5 * h
        };
        self.knots[i] + d.clamp(0.0, h)
    }

    fn cdf_total_mass(&self) -> f64 {
        let mut acc = 0.0;
        for i in 1..self.knots.len() {
            acc += 0.5 * (self.values[i] + self.values[i - 1]) * (self.knots[i] - self.knots[i - 1]);
        }
        acc
    }
}

fn interpolate(knots: &[f64], values: &[f64], t: f64) -> f64 {
    if t < knots[0] || t > knots[knots.len() - 1] {
        return 0.0;
    }
    let i = knots.partition_point(|&k| k <= t).clamp(1, knots.len() - 1);
    let (a, b) = (knots[i - 1], knots[i]);
    let w = (t - a) / (b - a);
    values[i - 1] * (1.0 - w) + values[i] * w
}

fn with_zero(knots: &[f64]) -> Vec<f64> {
    let mut out = knots.to_vec();
    if knots[0] < 0.0 && knots[knots.len() - 1] > 0.0 && !knots.contains(&0.0) {
        let i = knots.partition_point(|&k| k < 0.0);
        out.insert(i, 0.0);
    }
    out
}

/// Exact [mass, first, second] moments of a piecewise-linear density.
fn piecewise_moments(t: &[f64], r: &[f64]) -> [f64; 3] {
    let rule = GaussLegendre::ten();
    let mut m = [0.0; 3];
    for i in 1..t.len() {
        let (a, b) = (t[i - 1], t[i]);
        let f = |x: f64| r[i - 1] + (r[i] - r[i - 1]) * (x - a) / (b - a);
        m[0] += rule.integrate(a, b, f);
        m[1] += rule.integrate(a, b, |x| x * f(x));
        m[2] += rule.integrate(a, b, |x| x * x * f(x));
    }
    m
}

fn numeric_moments(density: &dyn Fn(f64) -> f64, breakpoints: &[f64]) -> MomentCache {
    let panels = Panels::new(breakpoints, 0.05);
    let rule = GaussLegendre::ten();
    let mass = panels.integrate(rule, density);
    let mean = panels.integrate(rule, |t| t * density(t));
    let second = panels.integrate(rule, |t| t * t * density(t));
    let abs_first_moment = panels.integrate(rule, |t| t.abs() * density(t));
    MomentCache {
        mass,
        mean,
        variance: second - mean * mean,
        abs_first_moment,
        density_at_zero: density(0.0),
    }
}

fn gaussian_char_derivative(s: f64, j: usize) -> f64 {
    let e = (-0.5 * s * s).exp();
    match j {
        0 => e,
        1 => -s * e,
        2 => (s * s - 1.0) * e,
        3 => (3.0 * s - s * s * s) * e,
        // Hermite recurrence for higher orders: φ^{(j)} = (-1)^j He_j(s) e^{-s²/2}.
        _ => {
            let (mut h0, mut h1) = (1.0, s);
            for k in 1..j {
                let h2 = s * h1 - k as f64 * h0;
                h0 = h1;
                h1 = h2;
            }
            if j % 2 == 0 {
                h1 * e
            } else {
                -h1 * e
            }
        }
    }
}

#[inline]
fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// d^j/dz^j of sin z / z.
fn sinc_derivative(z: f64, j: usize) -> f64 {
    if z.abs() < 1.0 {
        // Σ (-1)^m z^{2m} / (2m+1)!, differentiated term by term.
        let mut sum = 0.0;
        let mut inv_fact = 1.0; // 1/(2m+1)!
        for m in 0..20usize {
            if m > 0 {
                inv_fact /= ((2 * m) * (2 * m + 1)) as f64;
            }
            let p = 2 * m;
            if p < j {
                continue;
            }
            let mut falling = 1.0;
            for q in 0..j {
                falling *= (p - q) as f64;
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * falling * inv_fact * z.powi((p - j) as i32);
        }
        return sum;
    }
    let (s, c) = z.sin_cos();
    match j {
        0 => s / z,
        1 => c / z - s / (z * z),
        2 => -s / z - 2.0 * c / (z * z) + 2.0 * s / (z * z * z),
        3 => -c / z + 3.0 * s / (z * z) + 6.0 * c / (z * z * z) - 6.0 * s / z.powi(4),
        _ => {
            // Leibniz on sin(z) * z^{-1}.
            let mut sum = 0.0;
            for k in 0..=j {
                let dsin = match k % 4 {
                    0 => s,
                    1 => c,
                    2 => -s,
                    _ => -c,
                };
                let m = j - k;
                let mut coef = if m % 2 == 0 { 1.0 } else { -1.0 };
                for q in 1..=m {
                    coef *= q as f64;
                }
                sum += binomial(j, k) * dsin * coef / z.powi(m as i32 + 1);
            }
            sum
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// φ^{(j)}(s) by direct quadrature of (it)^j r(t) e^{its}, with panels no wider
/// than half an oscillation period, checked against a twice finer partition.
fn direct_char_fn(
    density: &dyn Fn(f64) -> f64,
    breakpoints: &[f64],
    s: f64,
    j: usize,
) -> Result<Complex64> {
    let rule = GaussLegendre::ten();
    let base = if s == 0.0 { 0.1 } else { (PI / s.abs()).min(0.1) };
    let eval = |width: f64| {
        let panels = Panels::new(breakpoints, width);
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, w) in panels.nodes(rule) {
            let r = density(t);
            if r == 0.0 {
                continue;
            }
            let (sin, cos) = (s * t).sin_cos();
            let power = Complex64::new(0.0, t).powu(j as u32);
            acc += power * Complex64::new(cos, sin) * (w * r);
        }
        acc
    };
    let mut width = base;
    let mut coarse = eval(width);
    for _ in 0..6 {
        width *= 0.5;
        let fine = eval(width);
        let residual = (fine - coarse).norm();
        if residual <= 1e-11 * (1.0 + fine.norm()) {
            return Ok(fine);
        }
        coarse = fine;
    }
    let residual = (eval(width * 0.5) - coarse).norm();
    Err(Error::numeric(
        format!("characteristic function quadrature did not converge at s = {s}"),
        residual,
    ))
}

/// Derivatives 0..TABLE_ORDERS of φ tabulated on `[0, s_max]`; evaluation by
/// Taylor expansion about the nearest node.
#[derive(Debug)]
struct CharTable {
    s_max: f64,
    symmetric: bool,
    /// Row i holds φ^{(m)}(i·h), m = 0..TABLE_ORDERS.
    rows: Vec<[Complex64; TABLE_ORDERS]>,
    /// Real parts of φ at the nodes, paired with the derivatives, for the hot even path.
    re: Vec<[f64; TABLE_ORDERS]>,
}

impl CharTable {
    fn build(density: &dyn Fn(f64) -> f64, breakpoints: &[f64], symmetric: bool, s_max: f64) -> Self {
        let rule = GaussLegendre::ten();
        let width = (PI / s_max).min(0.05);
        let count = (s_max / TABLE_STEP).round() as usize + 1;
        let lo = breakpoints[0];
        let hi = breakpoints[breakpoints.len() - 1];
        let bp: Vec<f64> = if symmetric {
            vec![0.0, hi.max(-lo)]
        } else {
            breakpoints.to_vec()
        };
        let nodes: Vec<(f64, f64)> = Panels::new(&bp, width)
            .nodes(rule)
            .into_iter()
            .map(|(t, w)| (t, w * density(t)))
            .filter(|&(_, w)| w != 0.0)
            .collect();
        // Mass under this very rule, so that φ(0) = 1 holds to the last bit.
        let mass: f64 = nodes.iter().map(|&(_, w)| w).sum::<f64>() * if symmetric { 2.0 } else { 1.0 };
        let mut rows = vec![[Complex64::new(0.0, 0.0); TABLE_ORDERS]; count];
        let mut phasor: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); nodes.len()];
        let steps: Vec<Complex64> = nodes
            .iter()
            .map(|&(t, _)| {
                let (s, c) = (TABLE_STEP * t).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        for (i, row) in rows.iter_mut().enumerate() {
            let s = i as f64 * TABLE_STEP;
            if i % 64 == 0 {
                for (p, &(t, _)) in phasor.iter_mut().zip(&nodes) {
                    let (sn, cs) = (s * t).sin_cos();
                    *p = Complex64::new(cs, sn);
                }
            }
            let mut acc = [Complex64::new(0.0, 0.0); TABLE_ORDERS];
            for (p, &(t, w)) in phasor.iter().zip(&nodes) {
                let mut tp = w;
                for a in acc.iter_mut() {
                    *a += *p * tp;
                    tp *= t;
                }
            }
            for (m, a) in acc.iter().enumerate() {
                // (it)^m = i^m t^m
                let im = match m % 4 {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, 1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, -1.0),
                };
                let v = if !symmetric {
                    im * *a
                } else if m % 2 == 0 {
                    // Half-line integral a: full = i^m (a + (-1)^m conj a).
                    im * Complex64::new(2.0 * a.re, 0.0)
                } else {
                    im * Complex64::new(0.0, 2.0 * a.im)
                };
                row[m] = v / mass;
            }
            for p in phasor.iter_mut().zip(&steps) {
                *p.0 *= *p.1;
            }
        }
        let re = rows.iter().map(|r| std::array::from_fn(|m| r[m].re)).collect();
        Self {
            s_max,
            symmetric,
            rows,
            re,
        }
    }

    fn eval(&self, s: f64, j: usize) -> Option<Complex64> {
        let a = s.abs();
        if a > self.s_max || j >= TABLE_ORDERS {
            return None;
        }
        let i = (a / TABLE_STEP).round() as usize;
        let d = a - i as f64 * TABLE_STEP;
        let row = &self.rows[i];
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = 1.0;
        for m in 0..(TABLE_ORDERS - j) {
            if m > 0 {
                term *= d / m as f64;
            }
            sum += row[j + m] * term;
        }
        if s < 0.0 {
            // φ^{(j)}(-s) = (-1)^j conj φ^{(j)}(s)
            sum = sum.conj();
            if j % 2 == 1 {
                sum = -sum;
            }
        }
        if self.symmetric {
            sum.im = 0.0;
        }
        Some(sum)
    }

    #[inline]
    fn eval_re0(&self, s: f64) -> Option<f64> {
        let a = s.abs();
        if a > self.s_max {
            return None;
        }
        let i = (a / TABLE_STEP).round() as usize;
        let d = a - i as f64 * TABLE_STEP;
        let r = &self.re[i];
        // Horner on Σ r[m] d^m / m!
        let mut acc = r[TABLE_ORDERS - 1];
        for m in (0..TABLE_ORDERS - 1).rev() {
            acc = r[m] + acc * d / (m + 1) as f64;
        }
        Some(acc)
    }
}

/// Tail decay of `|φ^{(j)}|` on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decay {
    /// Faster than any power we can resolve on the grid.
    SuperPolynomial,
    /// `|f(s)| ~ s^{-p}` on the upper part of the grid.
    Power(f64),
}

impl Decay {
    pub fn at_least(&self, p: f64) -> bool {
        match self {
            Decay::SuperPolynomial => true,
            Decay::Power(q) => *q >= p,
        }
    }
}

/// Outcome of checking the decay conditions on φ over a grid of s values.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub s_max: f64,
    /// sup over s ≠ 0 of |φ(s)|; must not exceed 1.
    pub max_abs_phi: f64,
    /// Tail decay of |φ|, |φ'|, |φ''|, |φ'''|.
    pub decay: [Decay; 4],
    /// Exponent q of the bound |φ(s)| ≤ (1 + a s²)^{-q}; `None` when any q works.
    pub c1_q: Option<f64>,
    /// Exponent at which `c1_a` was fitted (the decay-derived q, or 3 when any q works).
    pub c1_q_tested: f64,
    pub c1_a: f64,
    pub c1_holds: bool,
    /// sup |φ''| and sup |φ'''| over the grid.
    pub c2_bounds: [f64; 2],
    /// |φ^{(j)}(s)| ≤ A (1 + a|s|)^{-6}, j = 0..3, with power-six tail decay.
    pub cross0_holds: bool,
    /// (a, A) used for the crossover bound, a = 1.
    pub cross0_constants: (f64, f64),
}

/// Values of |φ^{(j)}| below this are treated as unresolved quadrature noise.
const DECAY_FLOOR: f64 = 1e-12;

/// Check the characteristic-function decay conditions on a grid covering [0, S], S ≥ 50.
pub fn verify_conditions(dist: &CoefficientDistribution, s_grid: &[f64]) -> Result<ConditionReport> {
    let mut grid: Vec<f64> = s_grid.iter().map(|s| s.abs()).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let s_max = grid.last().copied().unwrap_or(0.0);
    if grid.len() < 16 || s_max < 50.0 || grid[0] > 0.5 {
        return Err(Error::Contract(
            "s grid must cover [0, S] with S >= 50 and at least 16 points".into(),
        ));
    }
    let mut values = vec![[0.0f64; 4]; grid.len()];
    for (row, &s) in values.iter_mut().zip(&grid) {
        for (j, v) in row.iter_mut().enumerate() {
            *v = dist.char_fn(s, j)?.norm();
        }
    }
    let max_abs_phi = grid
        .iter()
        .zip(&values)
        .filter(|(s, _)| **s > 0.0)
        .map(|(_, v)| v[0])
        .fold(0.0, f64::max);
    let decay: [Decay; 4] = std::array::from_fn(|j| {
        let column: Vec<f64> = values.iter().map(|v| v[j]).collect();
        fit_decay(&grid, &column)
    });

    let (c1_q, c1_q_tested) = match decay[0] {
        Decay::SuperPolynomial => (None, 3.0),
        Decay::Power(p) if p > 6.0 => (None, 3.0),
        Decay::Power(p) => (Some(0.5 * p), 0.5 * p),
    };
    let mut c1_a = f64::INFINITY;
    for (&s, v) in grid.iter().zip(&values) {
        if s == 0.0 || v[0] == 0.0 {
            continue;
        }
        let bound = (v[0].powf(-1.0 / c1_q_tested) - 1.0) / (s * s);
        c1_a = c1_a.min(bound);
    }
    let c1_holds = c1_q_tested > 0.0 && c1_a > 0.0 && c1_a.is_finite() && max_abs_phi <= 1.0 + 1e-12;

    let c2_bounds = [
        values.iter().map(|v| v[2]).fold(0.0, f64::max),
        values.iter().map(|v| v[3]).fold(0.0, f64::max),
    ];
    let a = 1.0;
    let big_a = grid
        .iter()
        .zip(&values)
        .map(|(&s, v)| v.iter().fold(0.0f64, |m, &x| m.max(x)) * (1.0 + a * s).powi(6))
        .fold(0.0, f64::max);
    let cross0_holds = decay.iter().all(|d| d.at_least(6.0)) && big_a.is_finite();

    Ok(ConditionReport {
        s_max,
        max_abs_phi,
        decay,
        c1_q,
        c1_q_tested,
        c1_a,
        c1_holds,
        c2_bounds,
        cross0_holds,
        cross0_constants: (a, big_a),
    })
}

/// Least-squares slope of log(envelope) against log(s) over [S/8, S], where the
/// envelope is the running maximum from the right.
fn fit_decay(grid: &[f64], values: &[f64]) -> Decay {
    let s_max = grid[grid.len() - 1];
    let mut envelope = vec![0.0; values.len()];
    let mut running = 0.0f64;
    for i in (0..values.len()).rev() {
        running = running.max(values[i]);
        envelope[i] = running;
    }
    let points: Vec<(f64, f64)> = grid
        .iter()
        .zip(&envelope)
        .filter(|(s, e)| **s >= s_max / 8.0 && **e > DECAY_FLOOR)
        .map(|(s, e)| (s.ln(), e.ln()))
        .collect();
    if points.len() < 5 {
        return Decay::SuperPolynomial;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Decay::SuperPolynomial;
    }
    let p = -sxy / sxx;
    if p > 30.0 {
        Decay::SuperPolynomial
    } else {
        Decay::Power(p)
    }
}

/// Uniform s grid on [0, s_max].
pub fn uniform_s_grid(s_max: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| s_max * i as f64 / (points - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn char_fn_at_zero_is_one() {
        for d in [
            CoefficientDistribution::gaussian(),
            CoefficientDistribution::uniform(),
            CoefficientDistribution::quartic(),
        ] {
            assert_eq!(d.char_fn(0.0, 0).unwrap(), Complex64::new(1.0, 0.0), "{:?}", d.kind());
        }
    }

    #[test]
    fn gaussian_char_fn_value() {
        let g = CoefficientDistribution::gaussian();
        assert!(close(g.char_fn(1.0, 0).unwrap().re, (-0.5f64).exp(), 1e-15));
    }

    #[test]
    fn uniform_char_fn_closed_form() {
        let u = CoefficientDistribution::uniform();
        let v = u.char_fn(1.0, 0).unwrap();
        assert!(close(v.re, SQRT_3.sin() / SQRT_3, 1e-15));
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn sinc_derivatives_match_on_both_branches() {
        for j in 0..4 {
            let below = sinc_derivative(0.999_999, j);
            let above = sinc_derivative(1.000_001, j);
            assert!(close(below, above, 1e-5), "order {j}: {below} vs {above}");
        }
    }

    #[test]
    fn derivative_order_above_three_is_rejected() {
        let g = CoefficientDistribution::gaussian();
        assert!(matches!(g.char_fn(0.3, 4), Err(Error::Contract(_))));
    }

    #[test]
    fn zero_count_sample_is_rejected() {
        assert!(CoefficientDistribution::uniform().sample(0, 1).is_err());
    }

    #[test]
    fn uniform_draws_stay_inside_support() {
        let u = CoefficientDistribution::uniform();
        let xs = u.sample(20_000, 3).unwrap();
        assert!(xs.iter().all(|x| x.abs() <= SQRT_3));
    }

    #[test]
    fn samples_are_reproducible() {
        for d in [CoefficientDistribution::gaussian(), CoefficientDistribution::quartic()] {
            let a = d.sample(1000, 99).unwrap();
            let b = d.sample(1000, 99).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, d.sample(1000, 100).unwrap());
        }
    }

    #[test]
    fn non_normalizable_table_is_a_config_error() {
        let err = CoefficientDistribution::from_table(&[0.0, 1.0, 2.0], &[0.0, 0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let err = CoefficientDistribution::from_table(&[0.0, 1.0], &[1.0, -1.0]).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn table_is_recentred_and_rescaled() {
        // Triangle density on [1, 5] with unnormalized height 3.
        let t = [1.0, 3.0, 5.0];
        let r = [0.0, 3.0, 0.0];
        let d = CoefficientDistribution::from_table(&t, &r).unwrap();
        let corr = d.correction().unwrap();
        assert!(close(corr.mass, 6.0, 1e-12));
        assert!(close(corr.shift, 3.0, 1e-12));
        // Variance of the triangle on [1,5] is 4²/24.
        assert!(close(corr.scale, (16.0f64 / 24.0).sqrt(), 1e-12));
        let m = d.moments();
        assert!(close(m.mass, 1.0, 1e-10));
        assert!(close(m.mean, 0.0, 1e-10));
        assert!(close(m.variance, 1.0, 1e-10));
    }

    #[test]
    fn unknown_name_is_config_error() {
        assert!(matches!(
            CoefficientDistribution::from_name("nosuch"),
            Err(Error::Config(_))
        ));
    }
}
