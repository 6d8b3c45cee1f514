//! Seeded Monte Carlo zero density and mean count, split into mergeable runs.
//!
//! ```bash
//! cargo run --release --example monte_carlo_density
//! ```

use so2zeros::empirical::{merge_density, run_density_trials, Binning, Coordinate, DensityConfig, ScanMode};
use so2zeros::ensembles::CoefficientDistribution;
use so2zeros::kacrice::density;

fn main() -> so2zeros::Result<()> {
    let dist = CoefficientDistribution::uniform();
    let config = DensityConfig {
        distribution: dist.label().into(),
        n: 100,
        master_seed: 11,
        binning: Binning::uniform(Coordinate::X, -3.0, 3.0, 12)?,
        scan: ScanMode::Full,
        grid_factor: 20,
    };
    // Two halves run independently and merge into the same result as one run.
    let a = run_density_trials(&dist, &config, 0..2500)?;
    let b = run_density_trials(&dist, &config, 2500..5000)?;
    let est = merge_density(&[a, b])?;
    assert_eq!(est, run_density_trials(&dist, &config, 0..5000)?);

    let m = est.mean_count();
    println!("mean zero count {:.3} ± {:.3} (√n = 10)", m.value, m.std_error);
    for i in 0..config.binning.bins() {
        let c = config.binning.center(i);
        let e = est.normalized_bin_density(i);
        let kr = density(config.n, c.atan(), &dist)?;
        println!("x = {c:+.2}: {:.4} ± {:.4}   Kac-Rice {:.4}", e.value, e.std_error, kr.value);
    }
    let diff = est.paired_mass_difference((0.5, 1.0), (1.0, 2.0))?;
    println!("mass in [1/2, 1] minus [1, 2]: {:+.4} ± {:.4}", diff.value, diff.std_error);
    Ok(())
}
