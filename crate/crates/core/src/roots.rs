//! Real zeros of one realization of the polynomial.
//!
//! Zeros are located in θ = arctan x, where the normalized function
//! `g_n(θ) = Σ μ_k(θ) c_k` has unit variance and a bounded range. A uniform grid
//! of step `π/(G√n)` brackets sign changes, and each bracket is refined by the
//! Illinois variant of regula falsi with a bisection fallback. Local minima of
//! |g| between grid nodes are probed for pairs of zeros closer than one step.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_GRID_FACTOR: usize = 20;
const WIDTH_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-11;
const MAX_ITERATIONS: usize = 200;
/// Terms below this fraction of the leading weight are skipped.
const TERM_CUTOFF: f64 = 1e-18;

#[derive(Debug, Clone, Serialize)]
pub struct ZeroSample {
    pub n: usize,
    pub seed: Option<u64>,
    pub zeros_theta: Vec<f64>,
    pub zeros_x: Vec<f64>,
    pub residuals: Vec<f64>,
    pub scan_grid_step: f64,
    /// True when the leading coefficient vanishes, i.e. a zero sits at x = ∞.
    pub zero_at_infinity: bool,
}

impl ZeroSample {
    pub fn count(&self) -> usize {
        self.zeros_theta.len()
    }

    /// Columns `trial, theta, x, residual`.
    pub fn write_csv<W: std::io::Write>(&self, trial: u64, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["trial", "theta", "x", "residual"])?;
        for i in 0..self.count() {
            w.write_record([
                trial.to_string(),
                self.zeros_theta[i].to_string(),
                self.zeros_x[i].to_string(),
                self.residuals[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Precomputed binomial ratios and grid geometry for a fixed degree.
#[derive(Debug, Clone)]
pub struct ScanPlan {
    n: usize,
    grid_factor: usize,
    steps: usize,
    step: f64,
    /// √((n-k)/(k+1)): ratio μ_{k+1}/μ_k without the tan θ factor.
    up: Vec<f64>,
    /// √(k/(n-k+1)): ratio μ_{k-1}/μ_k without the cot θ factor.
    down: Vec<f64>,
}

impl ScanPlan {
    pub fn new(n: usize, grid_factor: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::Contract("degree must be at least 1".into()));
        }
        if grid_factor < 4 {
            return Err(Error::Contract(format!(
                "grid factor must be at least 4, got {grid_factor}"
            )));
        }
        let nf = n as f64;
        let steps = (grid_factor as f64 * nf.sqrt()).ceil() as usize;
        let up = (0..=n)
            .map(|k| if k < n { ((n - k) as f64 / (k + 1) as f64).sqrt() } else { 0.0 })
            .collect();
        let down = (0..=n)
            .map(|k| if k > 0 { (k as f64 / (n - k + 1) as f64).sqrt() } else { 0.0 })
            .collect();
        Ok(Self {
            n,
            grid_factor,
            steps,
            step: PI / steps as f64,
            up,
            down,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid_factor(&self) -> usize {
        self.grid_factor
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    fn node(&self, i: usize) -> f64 {
        if i == self.steps {
            FRAC_PI_2
        } else {
            -FRAC_PI_2 + i as f64 * self.step
        }
    }

    /// g_n(θ) for θ in [-π/2, π/2].
    pub fn eval(&self, coeffs: &[f64], theta: f64) -> f64 {
        let n = self.n;
        if theta >= FRAC_PI_2 {
            return coeffs[n];
        }
        if theta <= -FRAC_PI_2 {
            return if n % 2 == 0 { coeffs[n] } else { -coeffs[n] };
        }
        let (s, c) = theta.sin_cos();
        let mode = ((n as f64 * s * s).round() as usize).min(n);
        let t = s / c;
        let mut sum = coeffs[mode];
        let mut norm = 1.0;
        let mut w = 1.0;
        for k in mode..n {
            w *= self.up[k] * t;
            if w.abs() < TERM_CUTOFF {
                break;
            }
            sum += w * coeffs[k + 1];
            norm += w * w;
        }
        if mode > 0 {
            let ct = c / s;
            w = 1.0;
            for k in (1..=mode).rev() {
                w *= self.down[k] * ct;
                if w.abs() < TERM_CUTOFF {
                    break;
                }
                sum += w * coeffs[k - 1];
                norm += w * w;
            }
        }
        // The mode weight carries the sign of sin^mode θ.
        let sign = if s < 0.0 && mode % 2 == 1 { -1.0 } else { 1.0 };
        sign * sum / norm.sqrt()
    }

    fn check(&self, coeffs: &[f64]) -> Result<()> {
        if coeffs.len() != self.n + 1 {
            return Err(Error::Contract(format!(
                "expected {} coefficients, got {}",
                self.n + 1,
                coeffs.len()
            )));
        }
        Ok(())
    }

    /// All real zeros.
    pub fn scan(&self, coeffs: &[f64]) -> Result<ZeroSample> {
        self.scan_range(coeffs, -FRAC_PI_2, FRAC_PI_2)
    }

    /// Zeros inside the grid cells that intersect `[lo, hi]`. The grid is the
    /// same global grid as for [`Self::scan`], so a window scan finds exactly
    /// the zeros a full scan would find there.
    ///
    /// Besides sign changes, every interior node where |g| has a discrete local
    /// minimum without a sign change is searched over its two cells for a dip
    /// through zero, which catches a pair of zeros sharing one cell.
    pub fn scan_range(&self, coeffs: &[f64], lo: f64, hi: f64) -> Result<ZeroSample> {
        self.check(coeffs)?;
        let first = (((lo.max(-FRAC_PI_2) + FRAC_PI_2) / self.step).floor() as usize).min(self.steps);
        let last = (((hi.min(FRAC_PI_2) + FRAC_PI_2) / self.step).ceil() as usize).min(self.steps);
        let lo_node = first.saturating_sub(1);
        let hi_node = (last + 1).min(self.steps);
        let values: Vec<f64> = (lo_node..=hi_node).map(|i| self.eval(coeffs, self.node(i))).collect();
        let f = |i: usize| values[i - lo_node];
        let positive = |v: f64| v >= 0.0;

        let mut found: Vec<(f64, f64)> = Vec::new();
        for i in first + 1..=last {
            let (fa, fb) = (f(i - 1), f(i));
            if positive(fa) != positive(fb) {
                found.push(self.refine(coeffs, self.node(i - 1), self.node(i), fa, fb)?);
            }
        }
        let (from, to) = (self.node(first), self.node(last));
        for j in first.max(1)..=last.min(self.steps - 1) {
            let (fl, fj, fr) = (f(j - 1), f(j), f(j + 1));
            let same = positive(fl) == positive(fj) && positive(fj) == positive(fr);
            if !(same && fj != 0.0 && fj.abs() < fl.abs() && fj.abs() <= fr.abs()) {
                continue;
            }
            let (a, b) = (self.node(j - 1), self.node(j + 1));
            if let Some((m, fm)) = self.find_dip(coeffs, a, b, fj.signum()) {
                for (x, y, fx, fy) in [(a, m, fl, fm), (m, b, fm, fr)] {
                    let (root, residual) = self.refine(coeffs, x, y, fx, fy)?;
                    if root >= from && root <= to {
                        found.push((root, residual));
                    }
                }
            }
        }
        found.retain(|(r, _)| r.abs() < FRAC_PI_2);
        found.sort_by(|x, y| x.0.total_cmp(&y.0));
        found.dedup_by(|x, y| (x.0 - y.0).abs() < WIDTH_TOL);
        let zeros_theta: Vec<f64> = found.iter().map(|z| z.0).collect();
        let residuals = found.iter().map(|z| z.1).collect();
        let zeros_x = zeros_theta.iter().map(|t: &f64| t.tan()).collect();
        Ok(ZeroSample {
            n: self.n,
            seed: None,
            zeros_theta,
            zeros_x,
            residuals,
            scan_grid_step: self.step,
            zero_at_infinity: coeffs[self.n] == 0.0,
        })
    }

    /// Golden-section search for a point in `(a, b)` where `sign · g < 0`.
    fn find_dip(&self, coeffs: &[f64], mut a: f64, mut b: f64, sign: f64) -> Option<(f64, f64)> {
        const INV_PHI: f64 = 0.618_033_988_749_894_8;
        let h = |x: f64| sign * self.eval(coeffs, x);
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let (mut hc, mut hd) = (h(c), h(d));
        while b - a > WIDTH_TOL {
            if hc < 0.0 {
                return Some((c, sign * hc));
            }
            if hd < 0.0 {
                return Some((d, sign * hd));
            }
            if hc < hd {
                b = d;
                d = c;
                hd = hc;
                c = b - INV_PHI * (b - a);
                hc = h(c);
            } else {
                a = c;
                c = d;
                hc = hd;
                d = a + INV_PHI * (b - a);
                hd = h(d);
            }
        }
        None
    }

    fn refine(&self, coeffs: &[f64], mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> Result<(f64, f64)> {
        if fb == 0.0 {
            return Ok((b, 0.0));
        }
        if fa == 0.0 {
            return Ok((a, 0.0));
        }
        let mut side = 0i8;
        let mut last_width = b - a;
        for iteration in 0..MAX_ITERATIONS {
            let width = b - a;
            let (best, fbest) = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
            if width <= WIDTH_TOL && fbest.abs() < RESIDUAL_TOL {
                return Ok((best, fbest.abs()));
            }
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                // Bracket is down to adjacent floats.
                return Ok((best, fbest.abs()));
            }
            let mut x = (a * fb - b * fa) / (fb - fa);
            // Every third step, or when the secant stalls, bisect.
            if iteration % 3 == 2 || !(x > a && x < b) || width > 0.5 * last_width {
                x = mid;
            }
            last_width = width;
            let fx = self.eval(coeffs, x);
            if fx == 0.0 {
                return Ok((x, 0.0));
            }
            if (fx >= 0.0) == (fa >= 0.0) {
                a = x;
                fa = fx;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            } else {
                b = x;
                fb = fx;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
        }
        Err(Error::numeric(
            format!("root refinement did not converge in bracket [{a}, {b}]"),
            b - a,
        ))
    }
}

/// Find all real zeros of `Σ √C(n,k) c_k x^k`.
pub fn scan_and_refine(coeffs: &[f64], n: usize, grid_factor: usize) -> Result<ZeroSample> {
    ScanPlan::new(n, grid_factor)?.scan(coeffs)
}

#[derive(Debug, Clone, Serialize)]
pub struct RootAudit {
    pub base_factor: usize,
    pub base_count: usize,
    pub fine_factor: usize,
    pub fine_count: usize,
    /// Zeros found on the doubled grid with no counterpart on the base grid.
    pub new_zeros: Vec<f64>,
}

impl RootAudit {
    pub fn discrepancy(&self) -> i64 {
        self.fine_count as i64 - self.base_count as i64
    }

    /// The two scans disagree in count or in location.
    pub fn flagged(&self) -> bool {
        self.discrepancy() != 0 || !self.new_zeros.is_empty()
    }
}

/// Rescan at twice the grid factor and report zeros the base scan missed.
pub fn audit_missed_roots(coeffs: &[f64], n: usize, grid_factor: usize) -> Result<RootAudit> {
    let base = scan_and_refine(coeffs, n, grid_factor)?;
    let fine = scan_and_refine(coeffs, n, 2 * grid_factor)?;
    let new_zeros = fine
        .zeros_theta
        .iter()
        .copied()
        .filter(|t| !base.zeros_theta.iter().any(|b| (b - t).abs() < 1e-9))
        .collect();
    Ok(RootAudit {
        base_factor: grid_factor,
        base_count: base.count(),
        fine_factor: 2 * grid_factor,
        fine_count: fine.count(),
        new_zeros,
    })
}

/// Scaled coefficients `c_k = a_k / √C(n,k)` of an ordinary polynomial `Σ a_k x^k`.
pub fn scaled_from_monomial(a: &[f64]) -> Vec<f64> {
    let n = a.len() - 1;
    let mut binom = 1.0f64;
    a.iter()
        .enumerate()
        .map(|(k, &ak)| {
            if k > 0 {
                binom *= (n - k + 1) as f64 / k as f64;
            }
            ak / binom.sqrt()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::build_weights;

    #[test]
    fn linear_polynomial() {
        let z = scan_and_refine(&[1.0, 1.0], 1, 4).unwrap();
        assert_eq!(z.count(), 1);
        assert!((z.zeros_theta[0] + PI / 4.0).abs() < 1e-12);
        assert!((z.zeros_x[0] + 1.0).abs() < 1e-11);
    }

    #[test]
    fn evaluator_agrees_with_weight_table() {
        let n = 37;
        let coeffs: Vec<f64> = (0..=n).map(|k| ((k * 7919) % 13) as f64 - 6.0).collect();
        let plan = ScanPlan::new(n, 20).unwrap();
        for theta in [-1.4, -0.7, -0.01, 0.0, 0.2, 0.9, 1.5] {
            let (g, _) = build_weights(n, theta).unwrap().evaluate_scaled(&coeffs).unwrap();
            assert!((plan.eval(&coeffs, theta) - g).abs() < 1e-13, "θ = {theta}");
        }
    }

    #[test]
    fn small_grid_factor_is_rejected() {
        assert!(matches!(ScanPlan::new(10, 3), Err(Error::Contract(_))));
    }

    #[test]
    fn known_roots_of_a_product() {
        // (x - 2)(x + 0.5)(x - 0.1)
        let a = [0.1, -0.85, -1.6, 1.0];
        let z = scan_and_refine(&scaled_from_monomial(&a), 3, 20).unwrap();
        let mut expected = [-0.5, 0.1, 2.0];
        expected.sort_by(f64::total_cmp);
        assert_eq!(z.count(), 3);
        for (x, e) in z.zeros_x.iter().zip(expected) {
            assert!((x - e).abs() < 1e-10);
        }
    }
}
