//! Exact hypergeometric drift next to its binomial approximation.
//!
//!     cargo run --release --example exact_and_approx_drift

use driftopt::drift::{
    approx_drift, approx_drift_via_integral, drift_constant_ck_exact, exact_drift,
    exact_drift_rational,
};

fn main() -> driftopt::Result<()> {
    // small case as an exact fraction
    println!("B(10, 4, 3) = {}", exact_drift_rational(10, 4, 3)?);

    let n = 10_000;
    println!("\n   d    r        B(n,d,r)        A(r,d/n)   |A - B|   3r^3/d");
    for d in [100u64, 1000, 3000, 4500] {
        for r in [1u64, 3, 5, 11] {
            let b = exact_drift(n, d, r)?;
            let a = approx_drift(r, d as f64 / n as f64)?;
            println!(
                "{d:>5} {r:>4} {b:>15.10} {a:>15.10} {:>9.2e} {:>8.4}",
                (a - b).abs(),
                3.0 * (r * r * r) as f64 / d as f64
            );
        }
    }

    println!("\nA(2k+1, p) from the integral of c_k (pq)^(k-1):");
    for k in [1u64, 2, 5] {
        let p = 0.4;
        println!(
            "k = {k}: c_k = {:>6}, integral {:.12}, direct {:.12}",
            drift_constant_ck_exact(k)?,
            approx_drift_via_integral(k, p)?,
            approx_drift(2 * k + 1, p)?
        );
    }
    Ok(())
}
