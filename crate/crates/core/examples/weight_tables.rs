//! Orthonormal weights μ_k, λ_k of the polynomial and of its scaling limit.
//!
//! ```bash
//! cargo run --release --example weight_tables
//! ```

use so2zeros::weights::{build_limit_weights, build_weights, limit_weight_gap};

fn main() -> so2zeros::Result<()> {
    let w = build_weights(2, std::f64::consts::FRAC_PI_4)?;
    println!("n = 2, x = 1: μ = {:.6?}, λ = {:.6?}", w.mu, w.lambda);

    for n in [64usize, 4096, 1 << 16] {
        let w = build_weights(n, 0.7)?;
        let s = w.identity_sums();
        println!(
            "n = {n:>6}: support {:?}, max identity error {:.1e}, log σ {:.3}",
            w.support_window(),
            s.max_deviation(),
            w.log_sigma
        );
    }

    let lim = build_limit_weights(1.0, 1e-15)?;
    println!("limit at y = 1: K = {}, m_0..3 = {:.6?}", lim.k_max, &lim.m[..4]);
    for n in [1000usize, 2000, 4000] {
        println!("  max |μ_k(1/√n) - m_k(1)| at n = {n}: {:.3e}", limit_weight_gap(n, 1.0)?);
    }

    let mut out = Vec::new();
    build_weights(6, 0.4)?.write_csv(&mut out)?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}
