//! The built-in coefficient laws: moments, characteristic functions, decay.
//!
//! ```bash
//! cargo run --release --example coefficient_laws
//! ```

use so2zeros::ensembles::{uniform_s_grid, verify_conditions, CoefficientDistribution};

fn main() -> so2zeros::Result<()> {
    let grid = uniform_s_grid(100.0, 2001);
    for dist in [
        CoefficientDistribution::gaussian(),
        CoefficientDistribution::uniform(),
        CoefficientDistribution::quartic(),
    ] {
        let m = dist.moments();
        println!("{}", dist.label());
        println!("  variance {:.12}  E|c| {:.7}  r(0) {:.7}", m.variance, m.abs_first_moment, m.density_at_zero);
        for s in [0.5, 1.0, 4.0, 16.0] {
            println!("  φ({s:>4}) = {:+.6e}", dist.char_fn(s, 0)?.re);
        }
        let report = verify_conditions(&dist, &grid)?;
        println!("  tail decay {:?}, crossover condition {}", report.decay[0], report.cross0_holds);
        let draws = dist.sample(5, 7)?;
        println!("  five draws {draws:.3?}");
    }

    // Any density given as a table; it is normalized and standardized on load.
    let t = [-1.0, -0.2, 0.0, 0.4, 2.0];
    let r = [0.0, 1.0, 0.3, 1.0, 0.0];
    let custom = CoefficientDistribution::from_table(&t, &r)?;
    let c = custom.correction().expect("tabulated laws carry their correction");
    println!("custom: raw mass {:.4}, shift {:.4}, scale {:.4}", c.mass, c.shift, c.scale);
    println!("  E|c| {:.6}, r(0) {:.6}", custom.moments().abs_first_moment, custom.moments().density_at_zero);
    Ok(())
}
