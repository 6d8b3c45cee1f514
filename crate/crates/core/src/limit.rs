//! The limiting Gaussian field `g(y) = e^{-y²/2} Σ y^k c_k/√k!`, `h = g'`, and
//! the correlation functions of its zeros.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::ensembles::CoefficientDistribution;
use crate::error::{Error, Result};

/// Points closer than this are refused: the covariance of the field becomes singular.
pub const MIN_SEPARATION: f64 = 1e-3;

/// `(a, b, c) = (E g_i g_j, E g_i h_j, E h_i h_j)` at separation `d = y_i - y_j`,
/// for the limit field or, given n, for the finite-degree polynomial.
pub fn kernel_entries(y_i: f64, y_j: f64, n: Option<usize>) -> (f64, f64, f64) {
    let d = y_i - y_j;
    match n {
        None => {
            let a = (-0.5 * d * d).exp();
            (a, d * a, (1.0 - d * d) * a)
        }
        Some(n) => {
            let nf = n as f64;
            let t = d / nf.sqrt();
            let tan = t.tan();
            let half = (0.5 * t).sin();
            // cos^n t without the cancellation in cos t ≈ 1.
            let a = (nf * (-2.0 * half * half).ln_1p()).exp();
            (a, nf.sqrt() * tan * a, (1.0 - (nf - 1.0) * tan * tan) * a)
        }
    }
}

/// Covariance blocks of `(g(y_1..y_m), h(y_1..y_m))`.
#[derive(Debug, Clone)]
pub struct LimitKernel {
    pub points: Vec<f64>,
    pub n: Option<usize>,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    /// `[[A, B], [Bᵀ, C]]`.
    pub delta: DMatrix<f64>,
    pub min_eigenvalue: f64,
}

impl LimitKernel {
    pub fn new(points: &[f64], n: Option<usize>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Contract("at least one point is required".into()));
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Contract("points must be strictly increasing".into()));
        }
        if let Some(w) = points.windows(2).find(|w| w[1] - w[0] < MIN_SEPARATION) {
            return Err(Error::Degenerate(format!(
                "points {} and {} are closer than {MIN_SEPARATION}",
                w[0], w[1]
            )));
        }
        let m = points.len();
        let mut a = DMatrix::zeros(m, m);
        let mut b = DMatrix::zeros(m, m);
        let mut c = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                let (x, y, z) = kernel_entries(points[i], points[j], n);
                a[(i, j)] = x;
                b[(i, j)] = y;
                c[(i, j)] = z;
            }
        }
        let mut delta = DMatrix::zeros(2 * m, 2 * m);
        delta.view_mut((0, 0), (m, m)).copy_from(&a);
        delta.view_mut((0, m), (m, m)).copy_from(&b);
        delta.view_mut((m, 0), (m, m)).copy_from(&b.transpose());
        delta.view_mut((m, m), (m, m)).copy_from(&c);
        let min_eigenvalue = delta
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if !(min_eigenvalue > 0.0) {
            return Err(Error::Degenerate(format!(
                "covariance is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})"
            )));
        }
        Ok(Self {
            points: points.to_vec(),
            n,
            a,
            b,
            c,
            delta,
            min_eigenvalue,
        })
    }

    /// Covariance of h given g = 0: `C - Bᵀ A⁻¹ B`, and the density of g at 0.
    pub fn conditioned(&self) -> Result<(DMatrix<f64>, f64)> {
        let m = self.points.len();
        let chol = self
            .a
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Degenerate("A is not positive definite".into()))?;
        let solved = chol.solve(&self.b);
        let schur = &self.c - self.b.transpose() * solved;
        let det_a: f64 = chol.l().diagonal().iter().map(|v| v * v).product();
        let g_density = (2.0 * PI).powf(-0.5 * m as f64) / det_a.sqrt();
        Ok((0.5 * (&schur + schur.transpose()), g_density))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CorrelationMethod {
    ClosedFormM1,
    ClosedFormM2,
    ConditionedMc { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationValue {
    pub value: f64,
    /// Zero for the closed forms; the Monte Carlo standard error otherwise.
    pub std_error: f64,
}

/// `E|Z_1 Z_2|` for a centred bivariate normal with standard deviations σ_1, σ_2 and correlation ρ.
pub fn bivariate_abs_product(sigma1: f64, sigma2: f64, rho: f64) -> f64 {
    let rho = rho.clamp(-1.0, 1.0);
    2.0 / PI * sigma1 * sigma2 * ((1.0 - rho * rho).sqrt() + rho * rho.asin())
}

/// The limiting m-point correlation function of the zeros at `points`.
pub fn limit_correlation(points: &[f64], method: CorrelationMethod) -> Result<CorrelationValue> {
    let kernel = LimitKernel::new(points, None)?;
    match method {
        CorrelationMethod::ClosedFormM1 => {
            if points.len() != 1 {
                return Err(Error::Contract("closed form m = 1 needs exactly one point".into()));
            }
            Ok(CorrelationValue {
                value: 1.0 / PI,
                std_error: 0.0,
            })
        }
        CorrelationMethod::ClosedFormM2 => {
            if points.len() != 2 {
                return Err(Error::Contract("closed form m = 2 needs exactly two points".into()));
            }
            let (cov, g_density) = kernel.conditioned()?;
            let s1 = cov[(0, 0)].max(0.0).sqrt();
            let s2 = cov[(1, 1)].max(0.0).sqrt();
            let rho = if s1 > 0.0 && s2 > 0.0 {
                cov[(0, 1)] / (s1 * s2)
            } else {
                0.0
            };
            Ok(CorrelationValue {
                value: g_density * bivariate_abs_product(s1, s2, rho),
                std_error: 0.0,
            })
        }
        CorrelationMethod::ConditionedMc { samples, seed } => {
            if samples < 2 {
                return Err(Error::Contract("Monte Carlo needs at least two samples".into()));
            }
            let (cov, g_density) = kernel.conditioned()?;
            let m = points.len();
            let l = cov
                .cholesky()
                .ok_or_else(|| Error::Degenerate("conditional covariance is singular".into()))?
                .l();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut z = DVector::zeros(m);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..samples {
                for v in z.iter_mut() {
                    *v = StandardNormal.sample(&mut rng);
                }
                let h = &l * &z;
                let p = h.iter().map(|v: &f64| v.abs()).product::<f64>();
                sum += p;
                sum_sq += p * p;
            }
            let k = samples as f64;
            let mean = sum / k;
            let var = (sum_sq / k - mean * mean) * k / (k - 1.0);
            Ok(CorrelationValue {
                value: g_density * mean,
                std_error: g_density * (var / k).sqrt(),
            })
        }
    }
}

/// Zeros of one realization of the truncated limit series in `window`.
#[derive(Debug, Clone, Serialize)]
pub struct LimitZeros {
    pub seed: u64,
    pub truncation: usize,
    pub zeros: Vec<f64>,
    /// Largest displacement of any zero when the truncation index is doubled.
    pub truncation_shift: f64,
}

const SCAN_STEP: f64 = 0.05;
const REFINE_TOL: f64 = 1e-10;

/// Sample `c_0, c_1, ...` from `dist` and locate the zeros of g in `window`.
pub fn sample_limit_zeros(
    window: (f64, f64),
    dist: &CoefficientDistribution,
    tolerance: f64,
    seed: u64,
) -> Result<LimitZeros> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::Contract(format!("bad window [{lo}, {hi}]")));
    }
    if !(tolerance > 0.0) {
        return Err(Error::Contract("tolerance must be positive".into()));
    }
    let reach = lo.abs().max(hi.abs());
    let k = crate::weights::build_limit_weights(reach, tolerance)?.k_max;
    let k2 = 2 * k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![0.0; k2 + 1];
    dist.fill(&mut rng, &mut coeffs);

    let base = &coeffs[..=k];
    let zeros = scan_limit(base, lo, hi);
    let fine = scan_limit(&coeffs, lo, hi);
    if fine.len() != zeros.len() {
        return Err(Error::numeric(
            format!(
                "doubling the truncation changed the zero count ({} vs {})",
                zeros.len(),
                fine.len()
            ),
            (fine.len() as f64 - zeros.len() as f64).abs(),
        ));
    }
    let shift = zeros
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if shift > 1e-8 {
        return Err(Error::numeric("zeros moved when the truncation was doubled", shift));
    }
    Ok(LimitZeros {
        seed,
        truncation: k,
        zeros,
        truncation_shift: shift,
    })
}

/// `g(y) = Σ m_k(y) c_k` with the weights generated outward from the mode k ≈ y².
pub fn limit_field_value(coeffs: &[f64], y: f64) -> f64 {
    let kmax = coeffs.len() - 1;
    if y == 0.0 {
        return coeffs[0];
    }
    let mode = ((y * y).round() as usize).min(kmax);
    let ay = y.abs();
    let kf = mode as f64;
    let log_peak = kf * ay.ln() - 0.5 * y * y - 0.5 * libm::lgamma(kf + 1.0);
    let sign = |k: usize| if y < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
    let mut sum = coeffs[mode] * sign(mode);
    let mut w = 1.0;
    for k in mode..kmax {
        w *= ay / ((k + 1) as f64).sqrt();
        if w < 1e-18 {
            break;
        }
        sum += w * coeffs[k + 1] * sign(k + 1);
    }
    w = 1.0;
    for k in (0..mode).rev() {
        w *= ((k + 1) as f64).sqrt() / ay;
        if w < 1e-18 {
            break;
        }
        sum += w * coeffs[k] * sign(k);
    }
    sum * log_peak.exp()
}

fn scan_limit(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let steps = ((hi - lo) / SCAN_STEP).ceil() as usize;
    let node = |i: usize| if i == steps { hi } else { lo + i as f64 * SCAN_STEP };
    let f = |y: f64| limit_field_value(coeffs, y);
    let mut zeros = Vec::new();
    let mut a = node(0);
    let mut fa = f(a);
    for i in 1..=steps {
        let b = node(i);
        let fb = f(b);
        if (fa >= 0.0) != (fb >= 0.0) {
            let (mut x0, mut x1, mut f0) = (a, b, fa);
            while x1 - x0 > REFINE_TOL {
                let mid = 0.5 * (x0 + x1);
                if mid <= x0 || mid >= x1 {
                    break;
                }
                let fm = f(mid);
                if (fm >= 0.0) == (f0 >= 0.0) {
                    x0 = mid;
                    f0 = fm;
                } else {
                    x1 = mid;
                }
            }
            zeros.push(0.5 * (x0 + x1));
        }
        a = b;
        fa = fb;
    }
    zeros
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coincident_entries() {
        assert_eq!(kernel_entries(0.3, 0.3, None), (1.0, 0.0, 1.0));
        let (a, b, c) = kernel_entries(0.3, 0.3, Some(100));
        assert!((a - 1.0).abs() < 1e-15 && b.abs() < 1e-15 && (c - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unit_separation() {
        let (a, b, c) = kernel_entries(1.0, 0.0, None);
        let e = (-0.5f64).exp();
        assert!((a - e).abs() < 1e-15 && (b - e).abs() < 1e-15 && c.abs() < 1e-15);
    }

    #[test]
    fn kernel_blocks_have_expected_structure() {
        let k = LimitKernel::new(&[0.0, 0.7, 1.9], None).unwrap();
        for i in 0..3 {
            assert_eq!(k.a[(i, i)], 1.0);
            assert_eq!(k.c[(i, i)], 1.0);
            assert_eq!(k.b[(i, i)], 0.0);
            for j in 0..3 {
                assert_eq!(k.b[(i, j)], -k.b[(j, i)]);
            }
        }
        assert!(k.min_eigenvalue > 0.0);
    }

    #[test]
    fn close_points_are_degenerate() {
        assert!(matches!(
            limit_correlation(&[0.0, 5e-4], CorrelationMethod::ClosedFormM2),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn one_point_is_one_over_pi() {
        let v = limit_correlation(&[0.4], CorrelationMethod::ClosedFormM1).unwrap();
        assert_eq!(v.value, 1.0 / PI);
    }

    #[test]
    fn far_points_factorize() {
        let v = limit_correlation(&[0.0, 8.0], CorrelationMethod::ClosedFormM2).unwrap();
        assert!((v.value - 1.0 / (PI * PI)).abs() < 1e-3);
    }

    #[test]
    fn field_value_matches_direct_sum() {
        let coeffs: Vec<f64> = (0..120).map(|k| ((k * 31) % 7) as f64 - 3.0).collect();
        for y in [-2.5f64, -0.3, 0.8, 3.0] {
            let mut direct = 0.0;
            let mut w = (-0.5 * y * y).exp();
            for (k, c) in coeffs.iter().enumerate() {
                if k > 0 {
                    w *= y / (k as f64).sqrt();
                }
                direct += w * c;
            }
            assert!((limit_field_value(&coeffs, y) - direct).abs() < 1e-12 * (1.0 + direct.abs()));
        }
    }
}
