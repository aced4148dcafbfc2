//! Bracket the runtime constant of the approximate drift maximizer.
//!
//!     cargo run --release --example runtime_constant -- [dense_max_r]

use driftopt::bounds::{bound_report, default_partition, dense_partition, runtime_estimate};
use driftopt::strength::Epsilon;

fn main() -> driftopt::Result<()> {
    let eps = Epsilon::default();
    let dense_max_r: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1001);

    let default = bound_report(&default_partition()?, eps, None)?;
    println!(
        "default partition ({} intervals): c' in [{:.6}, {:.6}], c in [{:.6}, {:.6}]",
        default.partition_size,
        default.c_prime_lower,
        default.c_prime_upper,
        default.c_lower,
        default.c_upper
    );

    let dense = bound_report(&dense_partition(dense_max_r)?, eps, None)?;
    println!(
        "dense partition up to R_{dense_max_r} ({} intervals): c' in [{:.6}, {:.6}]",
        dense.partition_size, dense.c_prime_lower, dense.c_prime_upper
    );

    for n in [1_000u64, 100_000, 10_000_000] {
        let (lo, hi) = runtime_estimate(n, &default.bracket())?;
        let rls = n as f64 * ((n as f64 / 2.0).ln() + driftopt::numeric::EULER_GAMMA);
        println!("n = {n:>9}: runtime in [{lo:.1}, {hi:.1}], RLS ~ {rls:.1}");
    }
    Ok(())
}
