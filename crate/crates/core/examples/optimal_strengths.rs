//! Optimal strengths: the interval table and exact vs approximate optima.
//!
//!     cargo run --release --example optimal_strengths

use driftopt::strength::{r_opt_approx, r_opt_exact, strength_intervals, Epsilon};

fn main() -> driftopt::Result<()> {
    println!("    r          L_r          R_r   A_max(L_r)   A_max(R_r)");
    for row in strength_intervals(15)? {
        println!(
            "{:>5} {:>12.9} {:>12.9} {:>12.6} {:>12.6}",
            row.r, row.lower, row.upper, row.drift_at_lower, row.drift_at_upper
        );
    }

    let eps = Epsilon::new(0.01)?;
    let n = 2000;
    println!("\n     d   exact   approx");
    for d in [100u64, 660, 700, 760, 800, 850, 900, 950] {
        let exact = r_opt_exact(n, d)?;
        let approx = r_opt_approx(d as f64 / n as f64, eps, Some(n))?;
        println!("{d:>6} {exact:>7} {approx:>8}");
    }
    Ok(())
}
