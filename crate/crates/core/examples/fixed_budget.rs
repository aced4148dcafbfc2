//! Expected distance after a fixed number of iterations, RLS against the
//! approximate drift maximizer.
//!
//!     cargo run --release --example fixed_budget -- [n] [runs]

use driftopt::sim::{fixed_budget_estimate, rls_fixed_budget_closed_form, Algorithm, SimConfig};

fn main() -> driftopt::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u64>().ok());
    let n = args.next().flatten().unwrap_or(1000);
    let runs = args.next().flatten().unwrap_or(20_000) as usize;
    let budgets: Vec<u64> = [0.0, 0.25, 0.5, 1.0, 2.0]
        .iter()
        .map(|f| (f * n as f64) as u64)
        .collect();

    let rls = fixed_budget_estimate(&SimConfig::new(Algorithm::Rls, n, runs, 1), &budgets)?;
    let opt = fixed_budget_estimate(&SimConfig::new(Algorithm::DriftMaxApprox, n, runs, 1), &budgets)?;

    println!("budget   rls (closed form)     rls mc   approx-driftmax   ratio");
    for (a, b) in rls.per_budget.iter().zip(&opt.per_budget) {
        println!(
            "{:>6} {:>18.3} {:>10.3} {:>17.3} {:>7.4}",
            a.budget,
            rls_fixed_budget_closed_form(n, a.budget)?,
            a.mean,
            b.mean,
            b.mean / a.mean
        );
    }
    Ok(())
}
