//! Variable-drift bounds against exact hitting times of an elitist chain.
//!
//!     cargo run --release --example drift_theorems

use driftopt::bounds::{drift_lower_bound, drift_upper_bound, DriftSpec, TransitionMatrix};

fn main() -> driftopt::Result<()> {
    let n = 100;
    // flip three bits far from the optimum, one bit close to it
    let chain = TransitionMatrix::elitist_onemax(n, |d| if 3 * d > n { 3 } else { 1 })?;
    let drift: Vec<f64> = (0..=n).map(|i| chain.drift(i)).collect();

    // lower envelope: non-decreasing and below the drift
    let mut low = drift.clone();
    for i in (0..n).rev() {
        low[i] = low[i].min(low[i + 1]);
    }
    // upper envelope: non-decreasing and above the drift
    let mut high = drift.clone();
    for i in 1..=n {
        high[i] = high[i].max(high[i - 1]);
    }
    // three flips move at most three steps
    let c: Vec<usize> = (0..=n).map(|i| i.saturating_sub(3)).collect();

    let upper = DriftSpec::unit_steps(low)?;
    let lower = DriftSpec::new(high, c, 0.0)?;
    println!("  x0   lower bound   exact time   upper bound");
    for x0 in [10, 30, 50, 70, 100] {
        println!(
            "{x0:>4} {:>13.3} {:>12.3} {:>13.3}",
            drift_lower_bound(&lower, x0)?,
            chain.brute_force_hitting_time(x0)?,
            drift_upper_bound(&upper, x0)?
        );
    }
    Ok(())
}
