//! Real zeros of one realization, the reciprocal symmetry, and the grid audit.
//!
//! ```bash
//! cargo run --release --example root_scan
//! ```

use so2zeros::ensembles::CoefficientDistribution;
use so2zeros::roots::{audit_missed_roots, scaled_from_monomial, scan_and_refine, DEFAULT_GRID_FACTOR};

fn main() -> so2zeros::Result<()> {
    let n = 64;
    let c = CoefficientDistribution::uniform().sample(n + 1, 2024)?;
    let z = scan_and_refine(&c, n, DEFAULT_GRID_FACTOR)?;
    println!("{} real zeros (√n = 8)", z.count());
    for (x, r) in z.zeros_x.iter().zip(&z.residuals) {
        println!("  x = {x:+.12}  |g| = {r:.1e}");
    }

    let reversed: Vec<f64> = c.iter().rev().copied().collect();
    let mut inv: Vec<f64> = scan_and_refine(&reversed, n, DEFAULT_GRID_FACTOR)?.zeros_x.iter().map(|x| 1.0 / x).collect();
    inv.sort_by(f64::total_cmp);
    let worst = inv.iter().zip(&z.zeros_x).map(|(a, b)| (a - b).abs() / (1.0 + b.abs())).fold(0.0, f64::max);
    println!("reversed coefficients give reciprocal zeros (max rel. diff {worst:.1e})");

    let audit = audit_missed_roots(&c, n, DEFAULT_GRID_FACTOR)?;
    println!("audit at grid factor {}: discrepancy {}", audit.fine_factor, audit.discrepancy());

    // (x - 2)(x + 1/2)(x - 1/10) in monomial form
    let cubic = scaled_from_monomial(&[0.1, -0.85, -1.6, 1.0]);
    println!("cubic: {:?}", scan_and_refine(&cubic, 3, DEFAULT_GRID_FACTOR)?.zeros_x);
    Ok(())
}
