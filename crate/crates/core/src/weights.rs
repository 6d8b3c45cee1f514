//! Orthonormal weight systems of the SO(2) polynomial.
//!
//! For `f_n(x) = Σ √C(n,k) c_k x^k` and `x = tan θ` the normalized value and
//! derivative are
//!
//! ```text
//! g_n = Σ μ_k c_k,   μ_k = √C(n,k) sin^k θ cos^{n-k} θ
//! h_n = Σ λ_k c_k,   λ_k = μ_k (k - n sin²θ) / (√n sin θ cos θ)
//! ```
//!
//! Both weight vectors are unit vectors and orthogonal to each other. Weights
//! are generated by exact ratio recurrences outward from the binomial mode, so
//! nothing overflows even for n in the tens of thousands.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative magnitude below which a weight is dropped from the support window.
pub const SUPPORT_CUTOFF: f64 = 1e-18;

#[derive(Debug, Clone)]
pub struct WeightTable {
    pub n: usize,
    pub theta: f64,
    /// Index of `mu[0]` in the full sequence 0..=n.
    pub offset: usize,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub lambda: Vec<f64>,
    /// ln σ_n with σ_n² = Σ C(n,k) x^{2k} = (1+x²)^n.
    pub log_sigma: f64,
    /// ln ζ_n with ζ_n² = Σ k² C(n,k) x^{2k-2}.
    pub log_zeta: f64,
    pub tau: f64,
    pub inner_mu_nu: f64,
}

/// The five sums that must equal their closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentitySums {
    pub mu_mu: f64,
    pub nu_nu: f64,
    pub lambda_lambda: f64,
    pub mu_lambda: f64,
    pub mu_nu: f64,
    pub expected_mu_nu: f64,
}

impl IdentitySums {
    /// Largest deviation from (1, 1, 1, 0, (ν,μ)).
    pub fn max_deviation(&self) -> f64 {
        [
            (self.mu_mu - 1.0).abs(),
            (self.nu_nu - 1.0).abs(),
            (self.lambda_lambda - 1.0).abs(),
            self.mu_lambda.abs(),
            (self.mu_nu - self.expected_mu_nu).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl WeightTable {
    pub fn x(&self) -> f64 {
        self.theta.tan()
    }

    /// Index range `offset..offset + len` outside which weights are dropped.
    pub fn support_window(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.mu.len()
    }

    pub fn identity_sums(&self) -> IdentitySums {
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        IdentitySums {
            mu_mu: dot(&self.mu, &self.mu),
            nu_nu: dot(&self.nu, &self.nu),
            lambda_lambda: dot(&self.lambda, &self.lambda),
            mu_lambda: dot(&self.mu, &self.lambda),
            mu_nu: dot(&self.mu, &self.nu),
            expected_mu_nu: self.inner_mu_nu,
        }
    }

    pub fn max_abs_mu(&self) -> f64 {
        self.mu.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max|μ_k| · n^{1/4} |x|^{1/2} / (1+x²)^{1/2}`; bounded in n for fixed x ≠ 0.
    pub fn bound_constant(&self) -> f64 {
        let x = self.x();
        self.max_abs_mu() * (self.n as f64).powf(0.25) * x.abs().sqrt() / (1.0 + x * x).sqrt()
    }

    /// `(g, h) = (Σ μ_k c_k, Σ λ_k c_k)`.
    pub fn evaluate_scaled(&self, coeffs: &[f64]) -> Result<(f64, f64)> {
        if coeffs.len() != self.n + 1 {
            return Err(Error::Contract(format!(
                "expected {} coefficients, got {}",
                self.n + 1,
                coeffs.len()
            )));
        }
        let window = &coeffs[self.support_window()];
        let mut g = 0.0;
        let mut h = 0.0;
        for ((c, m), l) in window.iter().zip(&self.mu).zip(&self.lambda) {
            g += m * c;
            h += l * c;
        }
        Ok((g, h))
    }

    /// Columns `k, mu, nu, lambda` over the support window.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "mu", "nu", "lambda"])?;
        for i in 0..self.mu.len() {
            w.write_record([
                (self.offset + i).to_string(),
                self.mu[i].to_string(),
                self.nu[i].to_string(),
                self.lambda[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Build the weight system at `x = tan θ`.
pub fn build_weights(n: usize, theta: f64) -> Result<WeightTable> {
    if n < 1 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    if !theta.is_finite() || theta.abs() >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::Domain(format!("θ = {theta} is outside (-π/2, π/2)")));
    }
    let nf = n as f64;
    let (s, c) = theta.sin_cos();
    let x = s / c;
    let log_sigma = -nf * c.ln();

    if theta == 0.0 {
        // g(0) = c_0 and h(0) = c_1.
        let mut mu = vec![1.0, 0.0];
        let mut e1 = vec![0.0, 1.0];
        mu.truncate(n + 1);
        e1.truncate(n + 1);
        return Ok(WeightTable {
            n,
            theta,
            offset: 0,
            nu: e1.clone(),
            lambda: e1,
            mu,
            log_sigma: 0.0,
            log_zeta: 0.5 * nf.ln(),
            tau: 1.0,
            inner_mu_nu: 0.0,
        });
    }

    let (offset, mu) = binomial_amplitudes(n, s, c);
    let s2 = s * s;
    let q = (c * c + nf * s2).sqrt();
    let lambda_scale = 1.0 / (nf.sqrt() * s * c);
    let nu_scale = 1.0 / (nf.sqrt() * s * q);
    let mean = nf * s2;
    let mut nu = Vec::with_capacity(mu.len());
    let mut lambda = Vec::with_capacity(mu.len());
    for (i, &m) in mu.iter().enumerate() {
        let k = (offset + i) as f64;
        nu.push(m * k * nu_scale);
        lambda.push(m * (k - mean) * lambda_scale);
    }
    // ζ_n² = n (1+x²)^{n-2} (1 + n x²)
    let log_zeta = 0.5 * (nf.ln() - (nf - 2.0) * 2.0 * c.ln() + (1.0 + nf * x * x).ln());
    Ok(WeightTable {
        n,
        theta,
        offset,
        mu,
        nu,
        lambda,
        log_sigma,
        log_zeta,
        tau: c / q,
        inner_mu_nu: nf.sqrt() * s / q,
    })
}

/// Unit-norm amplitudes `√C(n,k) s^k c^{n-k}` over their support window.
fn binomial_amplitudes(n: usize, s: f64, c: f64) -> (usize, Vec<f64>) {
    let nf = n as f64;
    let mode = ((nf * s * s).round() as usize).min(n);
    let up = s / c;
    let down = c / s;
    let sign0 = if s < 0.0 && mode % 2 == 1 { -1.0 } else { 1.0 };
    let stop = SUPPORT_CUTOFF * 1e-2;

    let mut upper = Vec::new();
    let mut v = sign0;
    let mut k = mode;
    while k < n {
        v *= ((n - k) as f64 / (k + 1) as f64).sqrt() * up;
        k += 1;
        if v.abs() < stop {
            break;
        }
        upper.push(v);
    }
    let mut lower = Vec::new();
    let mut v = sign0;
    let mut k = mode;
    while k > 0 {
        v *= (k as f64 / (n - k + 1) as f64).sqrt() * down;
        k -= 1;
        if v.abs() < stop {
            break;
        }
        lower.push(v);
    }
    let offset = mode - lower.len();
    let mut w: Vec<f64> = lower.into_iter().rev().collect();
    w.push(sign0);
    w.extend(upper);

    let peak = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let first = w.iter().position(|v| v.abs() >= SUPPORT_CUTOFF * peak).unwrap_or(0);
    let last = w.iter().rposition(|v| v.abs() >= SUPPORT_CUTOFF * peak).unwrap_or(w.len() - 1);
    let mut w = w[first..=last].to_vec();
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut w {
        *v /= norm;
    }
    (offset + first, w)
}

/// The rate function Θ(u; x) = u ln u + (1-u) ln(1-u) + ln(1+x²) - u ln x² and Θ''(u; x).
pub fn theta_rate(u: f64, x: f64) -> Result<(f64, f64)> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("u = {u} is outside (0, 1)")));
    }
    if x == 0.0 || !x.is_finite() {
        return Err(Error::Domain("Θ(u; x) needs a finite nonzero x".into()));
    }
    let x2 = x * x;
    let value = u * u.ln() + (1.0 - u) * (1.0 - u).ln() + x2.ln_1p() - u * x2.ln();
    Ok((value, 1.0 / (u * (1.0 - u))))
}

/// Limiting weights `m_k(y) = y^k e^{-y²/2} / √k!` and `l_k(y) = m_k(y)(k - y²)/y`.
#[derive(Debug, Clone)]
pub struct LimitWeightTable {
    pub y: f64,
    /// Last retained index.
    pub k_max: usize,
    pub m: Vec<f64>,
    pub l: Vec<f64>,
    /// Dropped mass of Σ m_k² + Σ l_k² beyond `k_max`.
    pub tail_bound: f64,
}

impl LimitWeightTable {
    pub fn sums(&self) -> (f64, f64, f64) {
        let mm = self.m.iter().map(|v| v * v).sum();
        let ll = self.l.iter().map(|v| v * v).sum();
        let ml = self.m.iter().zip(&self.l).map(|(a, b)| a * b).sum();
        (mm, ll, ml)
    }

    /// `(g(y), h(y))` for coefficients `c_0, c_1, ...` (at least `k_max + 1` of them).
    pub fn evaluate(&self, coeffs: &[f64]) -> Result<(f64, f64)> {
        if coeffs.len() < self.m.len() {
            return Err(Error::Contract(format!(
                "need {} coefficients, got {}",
                self.m.len(),
                coeffs.len()
            )));
        }
        let g = self.m.iter().zip(coeffs).map(|(a, b)| a * b).sum();
        let h = self.l.iter().zip(coeffs).map(|(a, b)| a * b).sum();
        Ok((g, h))
    }
}

/// Default truncation index for the limit series at `y`.
pub fn default_truncation(y: f64) -> usize {
    (y * y + 12.0 * y.abs() + 40.0).ceil() as usize
}

pub fn build_limit_weights(y: f64, tolerance: f64) -> Result<LimitWeightTable> {
    if !(tolerance > 0.0) {
        return Err(Error::Contract("tolerance must be positive".into()));
    }
    if !y.is_finite() {
        return Err(Error::Domain("y must be finite".into()));
    }
    let m_all = limit_amplitudes(y);
    let l_all: Vec<f64> = if y == 0.0 {
        let mut l = vec![0.0; m_all.len()];
        l[1] = 1.0;
        l
    } else {
        m_all
            .iter()
            .enumerate()
            .map(|(k, m)| m * (k as f64 - y * y) / y)
            .collect()
    };
    let tail_from = |k: usize| -> f64 {
        m_all[k + 1..].iter().map(|v| v * v).sum::<f64>()
            + l_all[k + 1..].iter().map(|v| v * v).sum::<f64>()
    };
    let mut k_max = default_truncation(y).min(m_all.len() - 2);
    while tail_from(k_max) > tolerance && k_max + 2 < m_all.len() {
        k_max += 1;
    }
    Ok(LimitWeightTable {
        y,
        k_max,
        m: m_all[..=k_max].to_vec(),
        l: l_all[..=k_max].to_vec(),
        tail_bound: tail_from(k_max),
    })
}

/// m_k(y) for k far beyond the default truncation, computed by ratios from the mode.
fn limit_amplitudes(y: f64) -> Vec<f64> {
    let len = 2 * default_truncation(y) + 16;
    let mut m = vec![0.0; len];
    if y == 0.0 {
        m[0] = 1.0;
        return m;
    }
    let mode = ((y * y).round() as usize).min(len - 1);
    let kf = mode as f64;
    let log_peak = kf * y.abs().ln() - 0.5 * y * y - 0.5 * libm::lgamma(kf + 1.0);
    let sign = |k: usize| if y < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
    let peak = log_peak.exp();
    m[mode] = peak * sign(mode);
    let mut v = peak;
    for k in mode..len - 1 {
        v *= y.abs() / ((k + 1) as f64).sqrt();
        m[k + 1] = v * sign(k + 1);
    }
    let mut v = peak;
    for k in (0..mode).rev() {
        v *= ((k + 1) as f64).sqrt() / y.abs();
        m[k] = v * sign(k);
    }
    m
}

/// `max_k |μ_k(y/√n) - m_k(y)|`, the finite-n weight error at scaled coordinate y.
pub fn limit_weight_gap(n: usize, y: f64) -> Result<f64> {
    let theta = (y / (n as f64).sqrt()).atan();
    let w = build_weights(n, theta)?;
    let lim = build_limit_weights(y, 1e-30)?;
    let upper = (w.offset + w.mu.len()).max(lim.m.len());
    let mut gap = 0.0f64;
    for k in 0..upper {
        let a = if k >= w.offset && k < w.offset + w.mu.len() {
            w.mu[k - w.offset]
        } else {
            0.0
        };
        let b = lim.m.get(k).copied().unwrap_or(0.0);
        gap = gap.max((a - b).abs());
    }
    Ok(gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    #[test]
    fn degree_two_at_x_one() {
        let w = build_weights(2, FRAC_PI_4).unwrap();
        assert_eq!(w.offset, 0);
        let mu = [0.5, SQRT_2 / 2.0, 0.5];
        let la = [-SQRT_2 / 2.0, 0.0, SQRT_2 / 2.0];
        for k in 0..3 {
            assert!((w.mu[k] - mu[k]).abs() < 1e-15);
            assert!((w.lambda[k] - la[k]).abs() < 1e-15);
        }
        assert!(w.identity_sums().max_deviation() < 1e-15);
        let (g, h) = w.evaluate_scaled(&[1.0, 0.0, -1.0]).unwrap();
        assert!(g.abs() < 1e-15);
        assert!((h + SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn endpoints_are_domain_errors() {
        assert!(matches!(build_weights(8, FRAC_PI_2), Err(Error::Domain(_))));
        assert!(matches!(build_weights(8, -FRAC_PI_2), Err(Error::Domain(_))));
    }

    #[test]
    fn length_mismatch_is_contract_error() {
        let w = build_weights(4, 0.3).unwrap();
        assert!(matches!(w.evaluate_scaled(&[1.0; 4]), Err(Error::Contract(_))));
    }

    #[test]
    fn large_degree_stays_finite() {
        let w = build_weights(4096, 0.1).unwrap();
        assert!(w.mu.iter().chain(&w.lambda).chain(&w.nu).all(|v| v.is_finite()));
        let width = w.mu.len() as f64;
        let scale = (4096f64 * 4096f64.ln()).sqrt();
        assert!(width < 4.0 * scale, "window {width}");
        assert!(w.identity_sums().max_deviation() < 1e-12);
    }

    #[test]
    fn negative_theta_mirrors_signs() {
        let a = build_weights(9, 0.4).unwrap();
        let b = build_weights(9, -0.4).unwrap();
        for i in 0..a.mu.len() {
            let k = a.offset + i;
            let parity = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a.mu[i] * parity - b.mu[i]).abs() < 1e-15);
            assert!((a.lambda[i] * parity + b.lambda[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn rate_function_vanishes_at_u0() {
        for x in [0.1, 1.0, 10.0] {
            let u0 = x * x / (1.0 + x * x);
            let (v, d2) = theta_rate(u0, x).unwrap();
            assert!(v.abs() < 1e-14);
            assert!((d2 - (1.0 + x * x).powi(2) / (x * x)).abs() < 1e-9 * d2);
        }
        assert!(theta_rate(0.0, 1.0).is_err());
        assert!(theta_rate(1.0, 1.0).is_err());
    }

    #[test]
    fn limit_weights_at_zero_and_one() {
        let t = build_limit_weights(0.0, 1e-14).unwrap();
        assert_eq!(t.m[0], 1.0);
        assert!(t.m[1..].iter().all(|&v| v == 0.0));
        assert_eq!(t.l[1], 1.0);
        assert_eq!(t.l[0], 0.0);
        let t = build_limit_weights(1.0, 1e-14).unwrap();
        assert!((t.m[1] - (-0.5f64).exp()).abs() < 1e-15);
        let (mm, ll, ml) = t.sums();
        assert!((mm - 1.0).abs() < 1e-12 && (ll - 1.0).abs() < 1e-12 && ml.abs() < 1e-12);
    }
}
