//! Pair correlation of the limiting zero process, closed form and Monte Carlo.
//!
//! ```bash
//! cargo run --release --example limit_correlation
//! ```

use std::f64::consts::PI;

use so2zeros::ensembles::CoefficientDistribution;
use so2zeros::limit::{limit_correlation, sample_limit_zeros, CorrelationMethod, LimitKernel};

fn main() -> so2zeros::Result<()> {
    println!("{:>6} {:>10} {:>20}", "d", "K_2", "conditioned MC");
    for d in [0.05, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let exact = limit_correlation(&[0.0, d], CorrelationMethod::ClosedFormM2)?;
        let mc = limit_correlation(&[0.0, d], CorrelationMethod::ConditionedMc { samples: 100_000, seed: 1 })?;
        println!("{d:>6} {:>10.6} {:>11.6} ± {:.6}", exact.value, mc.value, mc.std_error);
    }
    println!("1/π² = {:.6}", 1.0 / (PI * PI));

    let k = LimitKernel::new(&[0.0, 0.5, 1.5], None)?;
    println!("three-point kernel: smallest eigenvalue {:.4e}", k.min_eigenvalue);

    let z = sample_limit_zeros((-5.0, 5.0), &CoefficientDistribution::quartic(), 1e-14, 3)?;
    println!("one realization of the limit field on [-5, 5]: K = {}, zeros {:.4?}", z.truncation, z.zeros);
    Ok(())
}
