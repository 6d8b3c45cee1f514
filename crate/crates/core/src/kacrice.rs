//! Semi-analytic zero densities by characteristic-function inversion.
//!
//! For a weight pair (a, b) the joint characteristic function of
//! `(g, h) = (Σ a_k c_k, Σ b_k c_k)` is
//!
//! ```text
//! Φ(α, β) = Π_k φ(a_k α + b_k β).
//! ```
//!
//! The density of `(g, h)` on the slice `g = 0` is recovered by integrating out
//! α with the trapezoid rule and then inverting in β with an FFT. The zero
//! density is `∫|η| D(0, η) dη`, scaled by `1/(1+x²)` for finite n.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::ensembles::CoefficientDistribution;
use crate::error::{Error, Result};
use crate::weights::{build_limit_weights, build_weights, LimitWeightTable, WeightTable};

/// Φ at the grid boundary must fall below this.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Terms with (a_k² + b_k²) Γ² below this contribute exactly 1 to the product.
const NEGLIGIBLE_TERM: f64 = 1e-16;
const MAX_SIZE: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralSource {
    FiniteN { n: usize, theta: f64 },
    Limit { y: f64 },
}

/// The two weight vectors defining (g, h).
#[derive(Debug, Clone)]
pub struct WeightPair {
    pub source: SpectralSource,
    pub value: Vec<f64>,
    pub slope: Vec<f64>,
}

impl From<&WeightTable> for WeightPair {
    fn from(w: &WeightTable) -> Self {
        Self {
            source: SpectralSource::FiniteN {
                n: w.n,
                theta: w.theta,
            },
            value: w.mu.clone(),
            slope: w.lambda.clone(),
        }
    }
}

impl From<&LimitWeightTable> for WeightPair {
    fn from(w: &LimitWeightTable) -> Self {
        Self {
            source: SpectralSource::Limit { y: w.y },
            value: w.m.clone(),
            slope: w.l.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridOptions {
    /// Initial half-width Γ of the (α, β) box.
    pub cutoff: f64,
    /// Points per axis; a power of two, at least 128.
    pub size: usize,
    /// How many times Γ may be doubled when Φ has not decayed at the boundary.
    pub max_doublings: usize,
    /// Zero-padding factor of the β transform.
    pub padding: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            cutoff: 12.0,
            size: 512,
            max_doublings: 3,
            padding: 4,
        }
    }
}

/// Φ sampled on `α_i = -Γ + iΔ`, `β_j = -Γ + jΔ`, `Δ = 2Γ/N`, stored row-major in i.
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    pub source: SpectralSource,
    pub cutoff: f64,
    pub size: usize,
    pub values: Vec<Complex64>,
    /// Number of times the cutoff was doubled.
    pub doublings: usize,
    pub boundary_max: f64,
    weights: WeightPair,
    dist: CoefficientDistribution,
}

impl SpectralGrid {
    pub fn spacing(&self) -> f64 {
        2.0 * self.cutoff / self.size as f64
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.cutoff + i as f64 * self.spacing()
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.size + j]
    }

    /// Φ(α, β) evaluated directly from the weights.
    pub fn evaluate(&self, alpha: f64, beta: f64) -> Complex64 {
        let active = active_terms(&self.weights, alpha.abs().max(beta.abs()));
        phi_product(&self.dist, &active, alpha, beta)
    }

    /// Index of the node at γ = 0.
    pub fn origin_index(&self) -> usize {
        self.size / 2
    }

    /// Largest `|Φ(γ) - conj Φ(-γ)|` over the grid.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.size;
        let mut worst = 0.0f64;
        for i in 1..n {
            for j in 1..n {
                let d = (self.at(i, j) - self.at(n - i, n - j).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }
}

fn active_terms(weights: &WeightPair, cutoff: f64) -> Vec<(f64, f64)> {
    let mut terms: Vec<(f64, f64)> = weights
        .value
        .iter()
        .zip(&weights.slope)
        .map(|(&a, &b)| (a, b))
        .filter(|(a, b)| (a * a + b * b) * cutoff * cutoff >= NEGLIGIBLE_TERM)
        .collect();
    // Large weights first, so that underflow ends the product early.
    terms.sort_by(|x, y| (y.0 * y.0 + y.1 * y.1).total_cmp(&(x.0 * x.0 + x.1 * x.1)));
    terms
}

#[inline]
fn phi_product(dist: &CoefficientDistribution, terms: &[(f64, f64)], alpha: f64, beta: f64) -> Complex64 {
    if dist.is_symmetric() {
        let mut p = 1.0;
        for &(a, b) in terms {
            p *= dist.char_fn_even(a * alpha + b * beta);
            if p.abs() < 1e-300 {
                return Complex64::new(0.0, 0.0);
            }
        }
        Complex64::new(p, 0.0)
    } else {
        let mut p = Complex64::new(1.0, 0.0);
        for &(a, b) in terms {
            p *= dist.char_fn_complex(a * alpha + b * beta);
            if p.norm() < 1e-300 {
                return Complex64::new(0.0, 0.0);
            }
        }
        p
    }
}

fn fill_grid(weights: &WeightPair, dist: &CoefficientDistribution, cutoff: f64, size: usize) -> Vec<Complex64> {
    let delta = 2.0 * cutoff / size as f64;
    let terms = active_terms(weights, cutoff);
    let coord = |i: usize| -cutoff + i as f64 * delta;
    let half = size / 2;
    let mut values = vec![Complex64::new(0.0, 0.0); size * size];
    // Rows 0..=N/2 directly; the rest from Φ(-γ) = conj Φ(γ), except column 0
    // whose mirror lies outside the grid.
    let (lower, upper) = values.split_at_mut((half + 1) * size);
    lower.par_chunks_mut(size).enumerate().for_each(|(i, row)| {
        let alpha = coord(i);
        for (j, v) in row.iter_mut().enumerate() {
            *v = phi_product(dist, &terms, alpha, coord(j));
        }
    });
    let lower: &[Complex64] = lower;
    upper.par_chunks_mut(size).enumerate().for_each(|(r, row)| {
        let i = half + 1 + r;
        let mirror = &lower[(size - i) * size..(size - i + 1) * size];
        row[0] = phi_product(dist, &terms, coord(i), coord(0));
        for j in 1..size {
            row[j] = mirror[size - j].conj();
        }
    });
    values
}

fn boundary_max(values: &[Complex64], size: usize) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..size {
        for idx in [k, (size - 1) * size + k, k * size, k * size + size - 1] {
            worst = worst.max(values[idx].norm());
        }
    }
    worst
}

/// Sample Φ on a square grid, doubling the cutoff (up to three times) until Φ
/// has decayed below 1e-12 on the boundary.
pub fn build_spectral_grid(
    weights: impl Into<WeightPair>,
    dist: &CoefficientDistribution,
    cutoff: f64,
    size: usize,
) -> Result<SpectralGrid> {
    let options = GridOptions {
        cutoff,
        size,
        ..GridOptions::default()
    };
    build_spectral_grid_with(weights.into(), dist, &options)
}

pub fn build_spectral_grid_with(
    weights: WeightPair,
    dist: &CoefficientDistribution,
    options: &GridOptions,
) -> Result<SpectralGrid> {
    if !(options.cutoff > 0.0) {
        return Err(Error::Contract("cutoff must be positive".into()));
    }
    if options.size < 128 || !options.size.is_power_of_two() {
        return Err(Error::Contract(format!(
            "grid size must be a power of two >= 128, got {}",
            options.size
        )));
    }
    let mut cutoff = options.cutoff;
    let mut size = options.size;
    let mut doublings = 0;
    loop {
        let values = fill_grid(&weights, dist, cutoff, size);
        let edge = boundary_max(&values, size);
        if edge < BOUNDARY_TOL {
            return Ok(SpectralGrid {
                source: weights.source,
                cutoff,
                size,
                values,
                doublings,
                boundary_max: edge,
                weights,
                dist: dist.clone(),
            });
        }
        if doublings == options.max_doublings {
            return Err(Error::numeric(
                format!("characteristic function has not decayed at cutoff {cutoff}"),
                edge,
            ));
        }
        doublings += 1;
        cutoff *= 2.0;
        size = (2 * size).min(MAX_SIZE);
    }
}

/// `D(0, η)` on a symmetric η grid.
#[derive(Debug, Clone, Serialize)]
pub struct JointDensitySlice {
    pub eta: Vec<f64>,
    pub values: Vec<f64>,
    pub imag_residual: f64,
    /// `max |D(0,η)| (1+|η|)³` over the outer half of the η range.
    pub tail_constant: f64,
    pub spacing: f64,
}

impl JointDensitySlice {
    pub fn index_of_zero(&self) -> usize {
        self.eta.len() / 2
    }

    pub fn at_zero(&self) -> f64 {
        self.values[self.index_of_zero()]
    }

    pub fn half_range(&self) -> f64 {
        *self.eta.last().unwrap_or(&0.0)
    }

    /// `max |D| (1+|η|)³` over `lo ≤ |η| ≤ hi`.
    pub fn tail_fit(&self, lo: f64, hi: f64) -> f64 {
        self.eta
            .iter()
            .zip(&self.values)
            .filter(|(e, _)| e.abs() >= lo && e.abs() <= hi)
            .map(|(e, v)| v.abs() * (1.0 + e.abs()).powi(3))
            .fold(0.0, f64::max)
    }

    /// `∫|η| D(0,η) dη`: trapezoid with the end correction for the kink of |η|
    /// at 0, plus the analytic tail of `C/(1+|η|)³` beyond the grid.
    pub fn abs_moment(&self) -> (f64, f64) {
        let h = self.spacing;
        let mid = self.index_of_zero();
        let trapezoid: f64 = self.eta.iter().zip(&self.values).map(|(e, v)| e.abs() * v).sum::<f64>() * h;
        let d0 = self.values[mid];
        let d2 = (self.values[mid + 1] - 2.0 * d0 + self.values[mid - 1]) / (h * h);
        let kink = h * h * d0 / 6.0 - h.powi(4) * d2 / 120.0;
        let big_h = self.half_range();
        let tail = 2.0 * self.tail_constant * (1.0 / (1.0 + big_h) - 0.5 / (1.0 + big_h).powi(2));
        (trapezoid + kink + tail, tail)
    }
}

/// Invert Φ to the slice `D(0, η) = (2π)⁻² ∬ Φ(α,β) e^{-iβη} dα dβ`.
pub fn invert_to_density_slice(grid: &SpectralGrid) -> Result<JointDensitySlice> {
    invert_with_padding(grid, GridOptions::default().padding)
}

pub fn invert_with_padding(grid: &SpectralGrid, padding: usize) -> Result<JointDensitySlice> {
    let n = grid.size;
    let delta = grid.spacing();
    let len = padding.max(1) * n;
    let mut chi = vec![Complex64::new(0.0, 0.0); len];
    for i in 0..n {
        let row = &grid.values[i * n..(i + 1) * n];
        for (c, v) in chi.iter_mut().zip(row) {
            *c += *v;
        }
    }
    let scale = delta / (2.0 * PI);
    for c in chi.iter_mut().take(n) {
        *c *= scale;
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut chi);

    let d_eta = 2.0 * PI / (len as f64 * delta);
    let half = len / 2;
    let mut eta = Vec::with_capacity(len - 1);
    let mut values = Vec::with_capacity(len - 1);
    let mut imag_residual = 0.0f64;
    // η_m for m = -(L/2 - 1) ..= L/2 - 1
    for m in -(half as i64 - 1)..=(half as i64 - 1) {
        let e = m as f64 * d_eta;
        let idx = m.rem_euclid(len as i64) as usize;
        let (s, c) = (grid.cutoff * e).sin_cos();
        let v = chi[idx] * Complex64::new(c, s) * scale;
        imag_residual = imag_residual.max(v.im.abs());
        eta.push(e);
        values.push(v.re);
    }
    if imag_residual > 1e-6 {
        return Err(Error::numeric("density slice has a large imaginary part", imag_residual));
    }
    let big_h = eta[eta.len() - 1];
    let mut slice = JointDensitySlice {
        eta,
        values,
        imag_residual,
        tail_constant: 0.0,
        spacing: d_eta,
    };
    slice.tail_constant = slice.tail_fit(0.5 * big_h, big_h);
    Ok(slice)
}

/// A Kac-Rice density value with its diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct DensityValue {
    pub value: f64,
    /// Change under doubled zero padding plus the size of the tail correction.
    pub error_estimate: f64,
    pub cutoff: f64,
    pub size: usize,
    pub imag_residual: f64,
    pub tail_constant: f64,
}

/// `∫|η| D(0,η) dη` for the given weight pair.
pub fn kac_rice_integral(
    weights: WeightPair,
    dist: &CoefficientDistribution,
    options: &GridOptions,
) -> Result<DensityValue> {
    let grid = build_spectral_grid_with(weights, dist, options)?;
    let slice = invert_with_padding(&grid, options.padding)?;
    let (value, tail) = slice.abs_moment();
    let (fine, _) = invert_with_padding(&grid, 2 * options.padding)?.abs_moment();
    Ok(DensityValue {
        value,
        error_estimate: (fine - value).abs() + tail.abs(),
        cutoff: grid.cutoff,
        size: grid.size,
        imag_residual: slice.imag_residual,
        tail_constant: slice.tail_constant,
    })
}

/// `p_n(x)/√n` at `x = tan θ`. θ = 0 is answered by [`density_at_origin`].
pub fn density(n: usize, theta: f64, dist: &CoefficientDistribution) -> Result<DensityValue> {
    density_with(n, theta, dist, &GridOptions::default())
}

pub fn density_with(
    n: usize,
    theta: f64,
    dist: &CoefficientDistribution,
    options: &GridOptions,
) -> Result<DensityValue> {
    if theta == 0.0 {
        return Ok(DensityValue {
            value: density_at_origin(n, dist),
            error_estimate: 0.0,
            cutoff: 0.0,
            size: 0,
            imag_residual: 0.0,
            tail_constant: 0.0,
        });
    }
    let w = build_weights(n, theta)?;
    let x = theta.tan();
    let mut out = kac_rice_integral(WeightPair::from(&w), dist, options)?;
    out.value /= 1.0 + x * x;
    out.error_estimate /= 1.0 + x * x;
    Ok(out)
}

/// `p_n(0)/√n = r(0) E|c|`: at the origin g = c_0 and h = c_1 are independent.
pub fn density_at_origin(_n: usize, dist: &CoefficientDistribution) -> f64 {
    let m = dist.moments();
    m.density_at_zero * m.abs_first_moment
}

/// Scaled zero density p̂(y) near the origin.
pub fn crossover_density(y: f64, dist: &CoefficientDistribution, tolerance: f64) -> Result<DensityValue> {
    if !(tolerance > 0.0) {
        return Err(Error::Contract("tolerance must be positive".into()));
    }
    if y == 0.0 {
        // Φ factorizes as φ(α)φ(β), so D(0,η) = r(0) r(η) exactly.
        return Ok(DensityValue {
            value: density_at_origin(0, dist),
            error_estimate: 0.0,
            cutoff: 0.0,
            size: 0,
            imag_residual: 0.0,
            tail_constant: 0.0,
        });
    }
    crossover_density_grid(y, dist, tolerance, &GridOptions::default())
}

/// p̂(y) through the spectral grid, including at y = 0.
pub fn crossover_density_grid(
    y: f64,
    dist: &CoefficientDistribution,
    tolerance: f64,
    options: &GridOptions,
) -> Result<DensityValue> {
    let w = build_limit_weights(y, tolerance)?;
    kac_rice_integral(WeightPair::from(&w), dist, options)
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivativeBound {
    pub order: usize,
    /// `max |D^k Φ(γ)| (1 + a_0|γ|²)^L` over the grid interior.
    pub constant: f64,
    /// The same maximum over `|γ|∞ ≤ Γ/2`.
    pub inner_constant: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayAudit {
    pub exponent: f64,
    /// a_0 from ray samples, halved for safety.
    pub a0: f64,
    /// Whether `|Φ(γ)| ≤ (1 + a_0|γ|²)^{-L}` holds at every grid node.
    pub holds_on_grid: bool,
    /// Smallest slack `(1 + a_0|γ|²)^{-L} - |Φ(γ)|` over the grid.
    pub min_slack: f64,
    pub derivatives: Vec<DerivativeBound>,
}

impl DecayAudit {
    pub fn passes(&self) -> bool {
        self.holds_on_grid && self.derivatives.iter().all(|d| d.holds)
    }
}

const AUDIT_EXPONENT: f64 = 2.0;

/// Fit `|D^k Φ(γ)| ≤ C_k (1 + a_0|γ|²)^{-L}` with L = 2.
pub fn decay_audit(grid: &SpectralGrid, derivative_orders: &[usize]) -> Result<DecayAudit> {
    if let Some(&bad) = derivative_orders.iter().find(|&&k| k > 2) {
        return Err(Error::Contract(format!("derivative order {bad} not in 0..=2")));
    }
    let l = AUDIT_EXPONENT;
    let mut a0_ray = f64::INFINITY;
    for ray in 0..32 {
        let psi = 2.0 * PI * ray as f64 / 32.0;
        let (s, c) = psi.sin_cos();
        for step in 1..=64 {
            let r = grid.cutoff * step as f64 / 64.0;
            let v = grid.evaluate(r * c, r * s).norm();
            if v > 0.0 {
                a0_ray = a0_ray.min((v.powf(-1.0 / l) - 1.0) / (r * r));
            }
        }
    }
    let a0 = 0.5 * a0_ray;
    let n = grid.size;
    let bound = |i: usize, j: usize| {
        let (a, b) = (grid.coordinate(i), grid.coordinate(j));
        (1.0 + a0 * (a * a + b * b)).powf(-l)
    };
    let mut min_slack = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            min_slack = min_slack.min(bound(i, j) - grid.at(i, j).norm());
        }
    }
    let holds_on_grid = a0 > 0.0 && a0.is_finite() && min_slack >= 0.0;

    let h = grid.spacing();
    let mut derivatives = Vec::new();
    for &order in derivative_orders.iter().filter(|&&k| k > 0) {
        let mut constant = 0.0f64;
        let mut inner_constant = 0.0f64;
        let quarter = n / 4;
        for i in 1..n - 1 {
            for j in 1..n - 1 {
                let d = match order {
                    1 => {
                        let da = (grid.at(i + 1, j) - grid.at(i - 1, j)).norm() / (2.0 * h);
                        let db = (grid.at(i, j + 1) - grid.at(i, j - 1)).norm() / (2.0 * h);
                        da.max(db)
                    }
                    _ => {
                        let c = grid.at(i, j) * 2.0;
                        let daa = (grid.at(i + 1, j) + grid.at(i - 1, j) - c).norm() / (h * h);
                        let dbb = (grid.at(i, j + 1) + grid.at(i, j - 1) - c).norm() / (h * h);
                        let dab = (grid.at(i + 1, j + 1) - grid.at(i + 1, j - 1) - grid.at(i - 1, j + 1)
                            + grid.at(i - 1, j - 1))
                        .norm()
                            / (4.0 * h * h);
                        daa.max(dbb).max(dab)
                    }
                };
                let scaled = d / bound(i, j);
                constant = constant.max(scaled);
                if i.abs_diff(n / 2) <= quarter && j.abs_diff(n / 2) <= quarter {
                    inner_constant = inner_constant.max(scaled);
                }
            }
        }
        derivatives.push(DerivativeBound {
            order,
            constant,
            inner_constant,
            holds: constant.is_finite(),
        });
    }
    Ok(DecayAudit {
        exponent: l,
        a0,
        holds_on_grid,
        min_slack,
        derivatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_grid_is_exact() {
        let w = build_weights(32, 0.6).unwrap();
        let g = build_spectral_grid(&w, &CoefficientDistribution::gaussian(), 12.0, 128).unwrap();
        for i in (0..128).step_by(7) {
            for j in (0..128).step_by(5) {
                let (a, b) = (g.coordinate(i), g.coordinate(j));
                let exact = (-0.5 * (a * a + b * b)).exp();
                assert!((g.at(i, j).re - exact).abs() < 1e-12);
            }
        }
        assert_eq!(g.at(64, 64), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn gaussian_slice_at_zero() {
        let w = build_weights(32, 0.6).unwrap();
        let g = build_spectral_grid(&w, &CoefficientDistribution::gaussian(), 12.0, 512).unwrap();
        let s = invert_to_density_slice(&g).unwrap();
        assert!((s.at_zero() - 1.0 / (2.0 * PI)).abs() < 1e-8);
    }

    #[test]
    fn bad_grid_size_is_rejected() {
        let w = build_weights(8, 0.6).unwrap();
        let d = CoefficientDistribution::gaussian();
        assert!(build_spectral_grid(&w, &d, 12.0, 100).is_err());
        assert!(build_spectral_grid(&w, &d, 12.0, 64).is_err());
    }

    #[test]
    fn origin_formula() {
        let g = density_at_origin(10, &CoefficientDistribution::gaussian());
        assert!((g - 1.0 / PI).abs() < 1e-15);
        let u = density_at_origin(10, &CoefficientDistribution::uniform());
        assert!((u - 0.25).abs() < 1e-15);
    }
}
