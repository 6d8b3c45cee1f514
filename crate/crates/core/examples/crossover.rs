//! p̂(y), the zero density in the O(1/√n) window at the origin.
//!
//! ```bash
//! cargo run --release --example crossover
//! ```

use std::f64::consts::PI;

use so2zeros::ensembles::CoefficientDistribution;
use so2zeros::kacrice::{crossover_density, density_at_origin};

fn main() -> so2zeros::Result<()> {
    let q = CoefficientDistribution::quartic();
    println!("quartic law: r(0)E|c| = {:.6}, 1/π = {:.6}", density_at_origin(0, &q), 1.0 / PI);
    for y in [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0] {
        let p = crossover_density(y, &q, 1e-14)?;
        println!("  y = {y:>4}: p̂ = {:.6}", p.value);
    }

    // Uniform coefficients: φ decays like 1/s only, so the grid cannot close
    // at small y and the evaluation reports a numeric failure.
    let u = CoefficientDistribution::uniform();
    for y in [0.0, 0.5, 2.0, 4.0] {
        match crossover_density(y, &u, 1e-14) {
            Ok(p) => println!("uniform y = {y}: p̂ = {:.6}", p.value),
            Err(e) => println!("uniform y = {y}: {e}"),
        }
    }
    Ok(())
}
