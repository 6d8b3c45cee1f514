//! Semi-analytic p_n(x)/√n next to the Cauchy density 1/(π(1+x²)).
//!
//! ```bash
//! cargo run --release --example kac_rice_density [uniform|quartic|gaussian]
//! ```

use std::f64::consts::PI;

use so2zeros::ensembles::CoefficientDistribution;
use so2zeros::kacrice::density;

fn main() -> so2zeros::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "uniform".into());
    let dist = CoefficientDistribution::from_name(&name)?;
    println!("{:>6} {:>6} {:>12} {:>12} {:>10}", "n", "x", "p_n/√n", "Cauchy", "error est");
    for n in [16usize, 64, 256] {
        for x in [0.0f64, 0.1, 0.5, 1.0, 3.0] {
            let cauchy = 1.0 / (PI * (1.0 + x * x));
            // slowly decaying φ (uniform law, small n, x near 0) can exhaust the cutoff
            match density(n, x.atan(), &dist) {
                Ok(d) => println!("{n:>6} {x:>6.2} {:>12.8} {:>12.8} {:>10.1e}", d.value, cauchy, d.error_estimate),
                Err(e) => println!("{n:>6} {x:>6.2} {e}"),
            }
        }
    }
    Ok(())
}
