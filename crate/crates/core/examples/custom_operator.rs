//! A custom strength distribution in both simulation modes.
//!
//!     cargo run --release --example custom_operator

use driftopt::sim::{
    run_algorithm, summarize, Algorithm, Mode, SimConfig, UnaryOperatorDistribution,
};

fn main() -> driftopt::Result<()> {
    let n = 100;
    // one bit half of the time, otherwise three
    let mut weights = vec![0.0; n as usize + 1];
    weights[1] = 0.5;
    weights[3] = 0.5;
    let dist = UnaryOperatorDistribution::new(weights)?;

    for mode in [Mode::Condensed, Mode::Bitstring] {
        let mut cfg = SimConfig::new(Algorithm::Custom, n, 5000, 7);
        cfg.custom_dist = Some(dist.clone());
        cfg.mode = mode;
        let s = summarize(&cfg, &run_algorithm(&cfg)?);
        println!("{mode:?}: mean {:.2} +- {:.2}", s.mean, s.standard_error);
    }

    let rls = SimConfig::new(Algorithm::Rls, n, 5000, 7);
    let s = summarize(&rls, &run_algorithm(&rls)?);
    println!("rls: mean {:.2} +- {:.2}", s.mean, s.standard_error);
    Ok(())
}
