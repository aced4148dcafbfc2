//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use driftopt::bounds::{drift_lower_bound, drift_upper_bound, DriftSpec, TransitionMatrix};
use driftopt::drift::{approx_drift, exact_drift, exact_drift_rational};
use driftopt::numeric::{harmonic, EULER_GAMMA};
use driftopt::sim::{
    fixed_budget_estimate, rls_fixed_budget_closed_form, run_algorithm, summarize, Algorithm,
    Mode, SimConfig, SummaryStats, UnaryOperatorDistribution,
};
use driftopt::strength::{r_opt_approx, r_opt_exact, search_bound, Epsilon};
use num_bigint::BigInt;
use num_rational::BigRational;

mod common;
use common::{lower_envelope, random_chain, upper_envelope, RandomChain};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn driftopt(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_driftopt"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "driftopt {} exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn bounds_json(partition: &str) -> Result<serde_json::Value, String> {
    let text = driftopt(&["bounds", "--partition", partition, "--format", "json"])?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn field(v: &serde_json::Value, key: &str) -> Result<f64, String> {
    v[key].as_f64().ok_or_else(|| format!("missing {key}"))
}

fn check(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn table_of_intervals() -> Outcome {
    // r, L, R, A(L), A(R), width
    let expected = [
        (3, 0.333333333, 0.367544468, 0.333333, 0.405267, 0.034211135),
        (5, 0.367544468, 0.386916541, 0.405267, 0.467174, 0.019372073),
        (7, 0.386916541, 0.399734261, 0.467174, 0.522084, 0.012817721),
        (9, 0.399734261, 0.409006003, 0.522084, 0.571870, 0.009271741),
        (11, 0.409006003, 0.416109983, 0.571870, 0.617718, 0.007103980),
    ];
    let text = driftopt(&["cutoffs", "--max-r", "11", "--format", "csv"])?;
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap_or(f64::NAN)).collect())
        .collect();
    check(rows.len() == expected.len(), format!("{} rows", rows.len()))?;
    let mut worst = 0.0f64;
    for (row, &(r, l, u, al, au, w)) in rows.iter().zip(&expected) {
        check(row[0] == r as f64, format!("row for r = {} out of order", row[0]))?;
        for (got, want, tol) in [
            (row[1], l, 1e-9),
            (row[2], u, 1e-9),
            (row[3], al, 1e-6),
            (row[4], au, 1e-6),
            (row[5], w, 1e-9),
        ] {
            let err = (got - want).abs();
            check(err <= tol, format!("r = {r}: {got} vs {want}"))?;
            worst = worst.max(err / tol);
        }
    }
    Ok(format!("5 rows match, worst error {worst:.2} of tolerance"))
}

fn runtime_constant_bracket() -> Outcome {
    let coarse = bounds_json("default")?;
    let (lo, hi) = (field(&coarse, "c_prime_lower")?, field(&coarse, "c_prime_upper")?);
    let (cl, cu) = (field(&coarse, "c_lower")?, field(&coarse, "c_upper")?);
    check((0.2544..=0.2554).contains(&lo), format!("c' lower {lo}"))?;
    check((0.2670..=0.2680).contains(&hi), format!("c' upper {hi}"))?;
    let window = 0.2539 - 5e-4..=0.2665 + 5e-4;
    check(window.contains(&cl) && window.contains(&cu), format!("c in [{cl}, {cu}]"))?;
    let dense = bounds_json("dense:8001")?;
    let (dlo, dhi) = (field(&dense, "c_prime_lower")?, field(&dense, "c_prime_upper")?);
    check(dlo > lo && dhi < hi, format!("dense [{dlo}, {dhi}] not inside [{lo}, {hi}]"))?;
    Ok(format!(
        "c' in [{lo:.6}, {hi:.6}], c in [{cl:.6}, {cu:.6}], dense:8001 c' in [{dlo:.6}, {dhi:.6}]"
    ))
}

fn ratio_law_and_odd_optimum() -> Outcome {
    let int = |v: u64| BigRational::from_integer(BigInt::from(v));
    let mut pairs = 0;
    let mut optima = 0;
    for n in 2..=60u64 {
        for d in 1..=n / 2 {
            for k in (1..).take_while(|k| 2 * k < n) {
                let even = exact_drift_rational(n, d, 2 * k).map_err(|e| e.to_string())?;
                let odd = exact_drift_rational(n, d, 2 * k + 1).map_err(|e| e.to_string())?;
                check(
                    even * int(2 * k + 1) == odd * int(2 * k),
                    format!("ratio law fails at n = {n}, d = {d}, k = {k}"),
                )?;
                pairs += 1;
            }
            let r = r_opt_exact(n, d).map_err(|e| e.to_string())?;
            check(r % 2 == 1, format!("even optimum {r} at n = {n}, d = {d}"))?;
            optima += 1;
        }
    }
    Ok(format!("{pairs} exact pairs, {optima} odd optima"))
}

fn approximation_error() -> Outcome {
    let n = 10_000u64;
    let eps = Epsilon::new(0.05).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut checked = 0;
    for d in [100u64, 500, 1000, 3000, 4500] {
        let max_r = search_bound(eps).min(d / 2);
        for r in (1..=max_r).step_by(2) {
            let a = approx_drift(r, d as f64 / n as f64).map_err(|e| e.to_string())?;
            let b = exact_drift(n, d, r).map_err(|e| e.to_string())?;
            let bound = 3.0 * (r * r * r) as f64 / d as f64;
            let err = (a - b).abs();
            check(err < bound, format!("d = {d}, r = {r}: |A - B| = {err:e} >= {bound:e}"))?;
            worst = worst.max(err / bound);
            checked += 1;
        }
    }
    Ok(format!("{checked} pairs, largest |A - B| / bound = {worst:.3e}"))
}

fn approx_strength_monotone() -> Outcome {
    let eps = Epsilon::default();
    let mut prev = 0;
    let mut largest = 0;
    for i in 1..=10_000 {
        let p = 0.45 * i as f64 / 10_000.0;
        let r = r_opt_approx(p, eps, None).map_err(|e| e.to_string())?;
        check(r >= prev, format!("drops from {prev} to {r} at p = {p}"))?;
        if p < 1.0 / 3.0 {
            check(r == 1, format!("r = {r} at p = {p} < 1/3"))?;
        }
        prev = r;
        largest = r;
    }
    Ok(format!("non-decreasing on 10^4 points, r(0.45) = {largest}"))
}

fn drift_theorems() -> Outcome {
    for seed in 0..100u64 {
        let RandomChain { chain, max_jump } = random_chain(seed);
        let n = chain.size() - 1;
        let drift: Vec<f64> = (0..=n).map(|i| chain.drift(i)).collect();
        let upper = DriftSpec::unit_steps(lower_envelope(&drift)).map_err(|e| e.to_string())?;
        let c: Vec<usize> = (0..=n).map(|i| i - max_jump[i]).collect();
        let lower = DriftSpec::new(upper_envelope(&drift), c, 0.0).map_err(|e| e.to_string())?;
        for x0 in [1, n / 2, n] {
            let t = chain.brute_force_hitting_time(x0).map_err(|e| e.to_string())?;
            let hi = drift_upper_bound(&upper, x0).map_err(|e| e.to_string())?;
            let lo = drift_lower_bound(&lower, x0).map_err(|e| e.to_string())?;
            check(
                lo <= t * (1.0 + 1e-9) && t <= hi * (1.0 + 1e-9),
                format!("seed {seed}, x0 = {x0}: {lo} <= {t} <= {hi} fails"),
            )?;
        }
    }
    for n in [20usize, 100, 200] {
        let chain = TransitionMatrix::rls_onemax(n).map_err(|e| e.to_string())?;
        let h: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let spec = DriftSpec::unit_steps(h).map_err(|e| e.to_string())?;
        for x0 in [n / 2, n] {
            let closed = n as f64 * harmonic(x0 as u64);
            let sum = drift_upper_bound(&spec, x0).map_err(|e| e.to_string())?;
            let oracle = chain.brute_force_hitting_time(x0).map_err(|e| e.to_string())?;
            for v in [sum, oracle] {
                check(
                    ((v - closed) / closed).abs() <= 1e-9,
                    format!("RLS n = {n}, x0 = {x0}: {v} vs n H = {closed}"),
                )?;
            }
        }
    }
    Ok("100 random chains bracketed, RLS sums equal n H_x0".into())
}

fn simulate(algorithm: Algorithm, n: u64, runs: usize, seed: u64) -> Result<SummaryStats, String> {
    let config = SimConfig::new(algorithm, n, runs, seed);
    let records = run_algorithm(&config).map_err(|e| e.to_string())?;
    let s = summarize(&config, &records);
    check(s.censored == 0, format!("{} censored runs", s.censored))?;
    Ok(s)
}

fn expected_runtime_saving() -> Outcome {
    let n = 1000u64;
    let rls = simulate(Algorithm::Rls, n, 100_000, 7)?;
    let approx = simulate(Algorithm::DriftMaxApprox, n, 100_000, 7)?;
    let predicted = n as f64 * ((n as f64 / 2.0).ln() + EULER_GAMMA);
    let z = (rls.mean - predicted) / rls.standard_error;
    check(z.abs() <= 4.0, format!("RLS mean {:.2} vs {predicted:.2}, z = {z:.2}", rls.mean))?;
    let saving = rls.mean - approx.mean;
    check((100.0..=180.0).contains(&saving), format!("saving {saving:.2}"))?;
    Ok(format!(
        "RLS {:.2} (z = {z:.2}), approx {:.2}, saving {saving:.2}",
        rls.mean, approx.mean
    ))
}

fn fixed_budget_ratio() -> Outcome {
    let n = 1000u64;
    let budgets = [0u64, 100, 250, 500];
    let run = |algorithm| {
        let config = SimConfig::new(algorithm, n, 100_000, 11);
        fixed_budget_estimate(&config, &budgets).map_err(|e| e.to_string())
    };
    let rls = run(Algorithm::Rls)?;
    let approx = run(Algorithm::DriftMaxApprox)?;
    let mut worst_z = 0.0f64;
    for b in &rls.per_budget {
        let closed = rls_fixed_budget_closed_form(n, b.budget).map_err(|e| e.to_string())?;
        let z = if b.standard_error > 0.0 {
            (b.mean - closed) / b.standard_error
        } else {
            0.0
        };
        check(z.abs() <= 4.0, format!("RLS at B = {}: {} vs {closed}", b.budget, b.mean))?;
        worst_z = worst_z.max(z.abs());
    }
    let at = |s: &SummaryStats| s.per_budget.iter().find(|b| b.budget == 500).map(|b| b.mean);
    let (r, a) = (at(&rls).ok_or("no B = 500")?, at(&approx).ok_or("no B = 500")?);
    let ratio = a / r;
    check((0.84..=0.90).contains(&ratio), format!("ratio {ratio:.4}"))?;
    Ok(format!("ratio at B = 500 is {ratio:.4}, RLS worst |z| = {worst_z:.2}"))
}

fn representations_agree() -> Outcome {
    let mut worst = 0.0f64;
    for n in [50u64, 200] {
        let custom = UnaryOperatorDistribution::new(vec![0.0, 0.5, 0.0, 0.5]).map_err(|e| e.to_string())?;
        for algorithm in [Algorithm::Rls, Algorithm::DriftMaxExact, Algorithm::DriftMaxApprox, Algorithm::Custom] {
            let mut stats = Vec::new();
            for (mode, seed) in [(Mode::Condensed, 21u64), (Mode::Bitstring, 22)] {
                let mut config = SimConfig::new(algorithm, n, 10_000, seed);
                config.mode = mode;
                if algorithm == Algorithm::Custom {
                    config.custom_dist = Some(custom.clone());
                }
                let records = run_algorithm(&config).map_err(|e| e.to_string())?;
                let s = summarize(&config, &records);
                check(s.censored == 0, format!("{} censored", s.censored))?;
                stats.push(s);
            }
            let se = stats[0].standard_error.hypot(stats[1].standard_error);
            let z = (stats[0].mean - stats[1].mean) / se;
            check(
                z.abs() < 4.0,
                format!(
                    "{} at n = {n}: condensed {:.2}, bitstring {:.2}, z = {z:.2}",
                    algorithm.name(),
                    stats[0].mean,
                    stats[1].mean
                ),
            )?;
            worst = worst.max(z.abs());
        }
    }
    Ok(format!("4 algorithms at n = 50 and 200, worst |z| = {worst:.2}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("cut-off table for r <= 11", table_of_intervals),
        ("runtime constant bracket", runtime_constant_bracket),
        ("exact ratio law and odd optima for n <= 60", ratio_law_and_odd_optimum),
        ("approximation error at n = 10^4", approximation_error),
        ("approximate optimal strength is monotone", approx_strength_monotone),
        ("variable drift bounds", drift_theorems),
        ("expected runtime at n = 1000", expected_runtime_saving),
        ("fixed-budget ratio at n = 1000", fixed_budget_ratio),
        ("bitstring and condensed simulators agree", representations_agree),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
