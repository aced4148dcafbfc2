use std::process::{Command, Output};

fn driftopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_driftopt"))
        .args(args)
        .env("DRIFTOPT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn drift_values() {
    let out = driftopt(&["drift", "exact", "--n", "100", "--d", "30", "--r", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "0.3\n");

    let out = driftopt(&["drift", "approx", "--r", "3", "--p", "0.333333333333"]);
    assert_eq!(stdout(&out), "0.333333333333\n");

    let out = driftopt(&["drift", "exact", "--n", "4", "--d", "2", "--r", "2", "--rational"]);
    assert_eq!(stdout(&out), "1/3\n");

    let out = driftopt(&["drift", "integral", "--k", "1", "--p", "0.25"]);
    let v: f64 = stdout(&out).trim().parse().unwrap();
    let direct: f64 = stdout(&driftopt(&["drift", "approx", "--r", "3", "--p", "0.25"]))
        .trim()
        .parse()
        .unwrap();
    assert!((v - direct).abs() < 1e-11);
}

#[test]
fn drift_json_and_csv_agree() {
    let args = ["drift", "exact", "--n", "1000", "--d", "377", "--r", "7"];
    let j = json(&driftopt(&[&args[..], &["--format", "json"]].concat()));
    let c = stdout(&driftopt(&[&args[..], &["--format", "csv"]].concat()));
    let row: Vec<&str> = c.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(c.lines().next().unwrap(), "n,d,r,drift");
    assert_eq!(row[3].parse::<f64>().unwrap(), j["drift"].as_f64().unwrap());
}

#[test]
fn strength_queries() {
    assert_eq!(stdout(&driftopt(&["strength", "approx", "--p", "0.3"])), "1\n");
    assert_eq!(stdout(&driftopt(&["strength", "approx", "--p", "0.37"])), "5\n");
    assert_eq!(stdout(&driftopt(&["strength", "approx", "--p", "0.7", "--n", "50"])), "50\n");
    assert_eq!(driftopt(&["strength", "approx", "--p", "0.7"]).status.code(), Some(1));
    assert_eq!(stdout(&driftopt(&["strength", "exact", "--n", "100", "--d", "10"])), "1\n");
}

#[test]
fn cutoffs_table() {
    let out = driftopt(&["cutoffs", "--max-r", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    assert!(row.split_whitespace().nth(1).unwrap().starts_with("0.333333333"));
    assert_eq!(text.lines().count(), 2);

    let c = driftopt(&["cutoffs", "--max-r", "11", "--format", "csv"]);
    assert_eq!(stdout(&c).lines().count(), 6);
    let j = json(&driftopt(&["cutoffs", "--max-r", "11", "--format", "json"]));
    for (line, obj) in stdout(&c).lines().skip(1).zip(j.as_array().unwrap()) {
        let cols: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(cols[1], obj["lower"].as_f64().unwrap());
        assert_eq!(cols[2], obj["upper"].as_f64().unwrap());
        assert_eq!(cols[5], obj["width"].as_f64().unwrap());
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(driftopt(&["cutoffs", "--max-r", "4"]).status.code(), Some(2));
    assert_eq!(driftopt(&["simulate", "--algo", "custom", "--n", "10"]).status.code(), Some(2));
    assert_eq!(driftopt(&["drift", "exact", "--n", "10"]).status.code(), Some(2));
    assert_eq!(driftopt(&["bounds", "--partition", "dense:10"]).status.code(), Some(2));
    assert_eq!(
        driftopt(&["simulate", "--algo", "rls", "--n", "10", "--per-run", "--format", "csv"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn domain_errors_exit_one() {
    let out = driftopt(&["drift", "exact", "--n", "10", "--d", "11", "--r", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("out of range"));
    assert_eq!(
        driftopt(&["drift", "exact", "--n", "61", "--d", "2", "--r", "2", "--rational"]).status.code(),
        Some(1)
    );
}

#[test]
fn bounds_from_partition_file() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("p.txt");
    std::fs::write(&good, "# coarse\n0.45\n0.42\n0.40973\n").unwrap();
    let arg = format!("file:{}", good.display());
    let out = driftopt(&["bounds", "--partition", &arg, "--n", "1000"]);
    assert!(out.status.success());
    let j = json(&out);
    assert_eq!(j["partition_size"], 2);
    let lo = j["c_prime_lower"].as_f64().unwrap();
    let hi = j["c_prime_upper"].as_f64().unwrap();
    assert!(lo < hi);
    let est = j["runtime_estimate_at_n"].as_array().unwrap();
    let base = 1000.0 * ((1000.0f64 / 3.0).ln() + 0.5772156649015329);
    assert!((est[0].as_f64().unwrap() - (base + 1000.0 * lo)).abs() < 1e-6);

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "0.40\n0.45\n").unwrap();
    let out = driftopt(&["bounds", "--partition", &format!("file:{}", bad.display())]);
    assert_eq!(out.status.code(), Some(1));
    let missing = driftopt(&["bounds", "--partition", "file:/nonexistent/partition"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", "--algo", "approx-driftmax", "--n", "200", "--runs", "500", "--seed", "42"];
    let a = driftopt(&args);
    let b = driftopt(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let j = json(&a);
    assert_eq!(j["summary"]["runs"], 500);
    assert_eq!(j["summary"]["censored"], 0);
    assert_eq!(j["config"]["algorithm"], "approx-driftmax");

    // thread count does not change results
    let single = Command::new(env!("CARGO_BIN_EXE_driftopt"))
        .args(args)
        .env("DRIFTOPT_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(single.stdout, a.stdout);
}

#[test]
fn simulate_csv_matches_json() {
    let base = ["simulate", "--algo", "rls", "--n", "100", "--runs", "300", "--seed", "3", "--budgets", "0,50,2000"];
    let j = json(&driftopt(&[&base[..], &["--format", "json"]].concat()));
    let c = stdout(&driftopt(&[&base[..], &["--format", "csv"]].concat()));
    let summary: Vec<&str> = c.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(summary[0], "rls");
    assert_eq!(summary[3].parse::<f64>().unwrap(), j["summary"]["mean"].as_f64().unwrap());
    let budget_rows: Vec<&str> = c.lines().skip_while(|l| !l.starts_with("budget")).skip(1).collect();
    assert_eq!(budget_rows.len(), 3);
    for (row, b) in budget_rows.iter().zip(j["summary"]["per_budget"].as_array().unwrap()) {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[1].parse::<f64>().unwrap(), b["mean"].as_f64().unwrap());
    }
}

#[test]
fn simulate_custom_per_run_and_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let dist = dir.path().join("dist.txt");
    std::fs::write(&dist, "0 0.5 0 0.5\n").unwrap();
    let traj = dir.path().join("traj.csv");
    let out = driftopt(&[
        "simulate",
        "--algo",
        "custom",
        "--n",
        "30",
        "--runs",
        "20",
        "--dist-file",
        dist.to_str().unwrap(),
        "--per-run",
        "--trajectory",
        traj.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let j = json(&out);
    let runs = j["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 20);
    for r in runs {
        let tr: Vec<u64> = serde_json::from_value(r["trajectory"].clone()).unwrap();
        assert!(tr.windows(2).all(|w| w[1] <= w[0]));
    }
    let csv = std::fs::read_to_string(&traj).unwrap();
    assert_eq!(csv.lines().next(), Some("t,mean_x"));
    assert!(csv.lines().last().unwrap().ends_with(",0.0"));

    std::fs::write(&dist, "0.5 0.4\n").unwrap();
    let bad = driftopt(&["simulate", "--algo", "custom", "--n", "30", "--dist-file", dist.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("sim.conf");
    std::fs::write(&conf, "algo = rls\nn = 64\nruns = 50\nseed = 9\nformat = csv\n").unwrap();
    let from_file = driftopt(&["simulate", "--config", conf.to_str().unwrap()]);
    let direct = driftopt(&["simulate", "--algo", "rls", "--n", "64", "--runs", "50", "--seed", "9", "--format", "csv"]);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, direct.stdout);

    // command-line flags win
    let overridden = driftopt(&["--config", conf.to_str().unwrap(), "simulate", "--seed", "10"]);
    let direct10 = driftopt(&["simulate", "--algo", "rls", "--n", "64", "--runs", "50", "--seed", "10", "--format", "csv"]);
    assert_eq!(overridden.stdout, direct10.stdout);
}

#[test]
fn help_exits_zero() {
    let out = driftopt(&["--help"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("simulate"));
}
