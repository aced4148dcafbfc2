//! Compare RLS with the exact and approximate drift maximizers on OneMax.
//!
//!     cargo run --release --example simulate_rls_vs_driftmax -- [n] [runs]

use driftopt::numeric::EULER_GAMMA;
use driftopt::sim::{run_algorithm, summarize, Algorithm, SimConfig};

fn main() -> driftopt::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u64>().ok());
    let n = args.next().flatten().unwrap_or(1000);
    let runs = args.next().flatten().unwrap_or(10_000) as usize;

    let predicted_rls = n as f64 * ((n as f64 / 2.0).ln() + EULER_GAMMA);
    println!("n = {n}, {runs} runs, RLS prediction n(ln(n/2) + gamma) = {predicted_rls:.1}");

    let mut rls_mean = f64::NAN;
    for algo in [Algorithm::Rls, Algorithm::DriftMaxExact, Algorithm::DriftMaxApprox] {
        let cfg = SimConfig::new(algo, n, runs, 42);
        let s = summarize(&cfg, &run_algorithm(&cfg)?);
        if algo == Algorithm::Rls {
            rls_mean = s.mean;
        }
        println!(
            "{:<16} mean {:>10.2}  se {:>6.2}  saving vs rls {:>7.2} ({:.3} n)  censored {}",
            algo.name(),
            s.mean,
            s.standard_error,
            rls_mean - s.mean,
            (rls_mean - s.mean) / n as f64,
            s.censored
        );
    }
    Ok(())
}
