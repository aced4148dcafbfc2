//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 on usage errors.
//! `--config FILE` reads `key = value` lines that stand in for `--key value`
//! flags of the chosen subcommand; flags given on the command line win.
//! `DRIFTOPT_THREADS` caps the worker threads used by simulations.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bounds::{bound_report, default_partition, dense_partition, PartitionScheme};
use crate::drift::{
    approx_drift_general, approx_drift_via_integral, exact_drift, exact_drift_rational,
};
use crate::sim::{
    fixed_budget_estimate, mean_trajectory, run_algorithm, summarize, Algorithm, Folding, Mode,
    SimConfig, UnaryOperatorDistribution, DEFAULT_SIM_EPSILON,
};
use crate::strength::{r_opt_approx, r_opt_exact, strength_intervals, Epsilon, DEFAULT_EPSILON};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Pretty,
}

#[derive(Debug, Parser)]
#[command(name = "driftopt", version, about = "Drift-maximizing mutation strengths on OneMax")]
struct Cli {
    /// key = value file supplying flags for the subcommand
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expected one-step fitness gain of flipping r bits
    #[command(subcommand)]
    Drift(DriftCommand),
    /// Drift-maximizing strengths
    #[command(subcommand)]
    Strength(StrengthCommand),
    /// Table of optimal-strength intervals
    #[command(args_override_self = true)]
    Cutoffs(CutoffsArgs),
    /// Bracket for the runtime constant of the approximate drift maximizer
    #[command(args_override_self = true)]
    Bounds(BoundsArgs),
    /// Monte Carlo runs on OneMax
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
}

#[derive(Debug, Subcommand)]
enum DriftCommand {
    /// Exact drift B(n, d, r)
    #[command(args_override_self = true)]
    Exact {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        r: u64,
        /// exact fraction, for n up to 60
        #[arg(long)]
        rational: bool,
        #[arg(long, value_enum, default_value_t = OutputFormat::Pretty)]
        format: OutputFormat,
    },
    /// Binomial approximation A(r, p, q)
    #[command(args_override_self = true)]
    Approx {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        p: f64,
        /// defaults to 1 - p
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Pretty)]
        format: OutputFormat,
    },
    /// A(2k+1, p) through its integral representation
    #[command(args_override_self = true)]
    Integral {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        p: f64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Pretty)]
        format: OutputFormat,
    },
}

#[derive(Debug, Subcommand)]
enum StrengthCommand {
    /// Exact optimum R_opt(d, n)
    #[command(args_override_self = true)]
    Exact {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Pretty)]
        format: OutputFormat,
    },
    /// Approximate optimum at relative distance p
    #[command(args_override_self = true)]
    Approx {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        eps: f64,
        /// needed when p > 1/2
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Pretty)]
        format: OutputFormat,
    },
}

#[derive(Debug, Args)]
struct CutoffsArgs {
    /// largest odd strength, at least 3
    #[arg(long, value_parser = parse_max_r)]
    max_r: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Pretty)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// default, dense:<max_r> or file:<path>
    #[arg(long, default_value = "default", value_parser = parse_partition_choice)]
    partition: PartitionChoice,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    eps: f64,
    /// also report the runtime estimate at this n
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    algo: Algorithm,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 1000)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Condensed)]
    mode: Mode,
    #[arg(long, value_enum, default_value_t = Folding::Complement)]
    folding: Folding,
    /// epsilon of the approximate maximizer
    #[arg(long, default_value_t = DEFAULT_SIM_EPSILON)]
    eps: f64,
    /// iteration cap per run
    #[arg(long)]
    budget: Option<u64>,
    /// report the mean distance after each of these iteration counts
    #[arg(long, value_delimiter = ',')]
    budgets: Vec<u64>,
    /// strength weights for --algo custom
    #[arg(long, required_if_eq("algo", "custom"))]
    dist_file: Option<PathBuf>,
    /// include every run in the JSON output
    #[arg(long)]
    per_run: bool,
    /// write the mean trajectory as CSV (t, mean_x) to this file
    #[arg(long, value_name = "FILE")]
    trajectory: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq)]
enum PartitionChoice {
    Default,
    Dense(u64),
    File(PathBuf),
}

fn parse_max_r(s: &str) -> Result<u64, String> {
    let r: u64 = s.parse().map_err(|e| format!("{e}"))?;
    if r < 3 || r % 2 == 0 {
        return Err(format!("{r} is not an odd number >= 3"));
    }
    Ok(r)
}

fn parse_partition_choice(s: &str) -> Result<PartitionChoice, String> {
    if s == "default" {
        return Ok(PartitionChoice::Default);
    }
    if let Some(r) = s.strip_prefix("dense:") {
        let r: u64 = r.parse().map_err(|e| format!("dense:{r}: {e}"))?;
        if r < 9 || r % 2 == 0 {
            return Err(format!("dense partitions need an odd max_r >= 9, got {r}"));
        }
        return Ok(PartitionChoice::Dense(r));
    }
    if let Some(path) = s.strip_prefix("file:") {
        return Ok(PartitionChoice::File(PathBuf::from(path)));
    }
    Err(format!("expected default, dense:<max_r> or file:<path>, got {s:?}"))
}

/// Errors that end the program with exit code 1.
#[derive(Debug)]
enum Failure {
    Compute(crate::Error),
    Io(String),
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Compute(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "{e}"),
        }
    }
}

/// Round to `digits` significant digits and print the shortest form.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() || x == 0.0 {
        return format!("{x}");
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x);
    format!("{rounded}")
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// `key = value` lines to flag tokens. `key = true` becomes a bare flag,
/// `key = false` is dropped.
fn config_tokens(text: &str) -> Result<Vec<String>, String> {
    let mut tokens = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        match value {
            "true" => tokens.push(format!("--{key}")),
            "false" => {}
            _ => {
                tokens.push(format!("--{key}"));
                tokens.push(value.to_string());
            }
        }
    }
    Ok(tokens)
}

/// Pull `--config FILE` out of `args` and splice the file's flags in right
/// after the subcommand names, ahead of the user's own flags.
fn expand_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut it = args.into_iter();
    if let Some(program) = it.next() {
        rest.push(program);
    }
    while let Some(a) = it.next() {
        if a == "--config" {
            config = Some(it.next().ok_or("--config needs a file")?);
        } else if let Some(path) = a.strip_prefix("--config=") {
            config = Some(path.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
    let tokens = config_tokens(&text)?;
    let split = rest
        .iter()
        .skip(1)
        .position(|a| a.starts_with('-'))
        .map_or(rest.len(), |p| p + 1);
    let mut out: Vec<String> = rest[..split].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&rest[split..]);
    Ok(out)
}

fn configure_threads() {
    if let Some(threads) = std::env::var("DRIFTOPT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t > 0)
    {
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

/// Run the CLI on `args`, writing results to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<String> = args
        .into_iter()
        .map(|a| a.into().to_string_lossy().into_owned())
        .collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return ExitCode::from(code.clamp(0, 255) as u8);
        }
    };
    configure_threads();
    match dispatch(cli.command) {
        Ok(Outcome::Done(text)) => {
            let _ = out.write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Ok(Outcome::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Entry point for the binary.
pub fn main() -> ExitCode {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

enum Outcome {
    Done(String),
    Usage(String),
}

fn dispatch(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Drift(c) => cmd_drift(c),
        Command::Strength(c) => cmd_strength(c),
        Command::Cutoffs(a) => cmd_cutoffs(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// A single named value in one of the output formats.
fn scalar_output(name: &str, value: f64, format: OutputFormat, extra: &[(&str, String)]) -> String {
    match format {
        OutputFormat::Pretty => format!("{}\n", format_significant(value, 12)),
        OutputFormat::Json => {
            let mut obj = serde_json::Map::new();
            for (k, v) in extra {
                obj.insert((*k).into(), serde_json::from_str(v).unwrap_or(json!(v)));
            }
            obj.insert(name.into(), json!(value));
            to_json(&obj)
        }
        OutputFormat::Csv => {
            let header: Vec<&str> = extra.iter().map(|(k, _)| *k).chain([name]).collect();
            let row: Vec<String> = extra
                .iter()
                .map(|(_, v)| v.clone())
                .chain([format!("{value:?}")])
                .collect();
            format!("{}\n{}\n", header.join(","), row.join(","))
        }
    }
}

fn cmd_drift(c: DriftCommand) -> Result<Outcome, Failure> {
    let text = match c {
        DriftCommand::Exact { n, d, r, rational, format } => {
            let extra = [("n", n.to_string()), ("d", d.to_string()), ("r", r.to_string())];
            if rational {
                let q = exact_drift_rational(n, d, r)?;
                match format {
                    OutputFormat::Pretty => format!("{q}\n"),
                    OutputFormat::Json => to_json(&json!({
                        "n": n, "d": d, "r": r, "drift": q.to_string()
                    })),
                    OutputFormat::Csv => format!("n,d,r,drift\n{n},{d},{r},{q}\n"),
                }
            } else {
                scalar_output("drift", exact_drift(n, d, r)?, format, &extra)
            }
        }
        DriftCommand::Approx { r, p, q, format } => {
            let q = q.unwrap_or(1.0 - p);
            let extra = [("r", r.to_string()), ("p", format!("{p:?}")), ("q", format!("{q:?}"))];
            scalar_output("drift", approx_drift_general(r, p, q)?, format, &extra)
        }
        DriftCommand::Integral { k, p, format } => {
            let extra = [("k", k.to_string()), ("p", format!("{p:?}"))];
            scalar_output("drift", approx_drift_via_integral(k, p)?, format, &extra)
        }
    };
    Ok(Outcome::Done(text))
}

fn strength_output(value: u64, format: OutputFormat, extra: &[(&str, String)]) -> String {
    match format {
        OutputFormat::Pretty => format!("{value}\n"),
        OutputFormat::Json => {
            let mut obj = serde_json::Map::new();
            for (k, v) in extra {
                obj.insert((*k).into(), serde_json::from_str(v).unwrap_or(json!(v)));
            }
            obj.insert("strength".into(), json!(value));
            to_json(&obj)
        }
        OutputFormat::Csv => {
            let header: Vec<&str> = extra.iter().map(|(k, _)| *k).chain(["strength"]).collect();
            let row: Vec<String> =
                extra.iter().map(|(_, v)| v.clone()).chain([value.to_string()]).collect();
            format!("{}\n{}\n", header.join(","), row.join(","))
        }
    }
}

fn cmd_strength(c: StrengthCommand) -> Result<Outcome, Failure> {
    let text = match c {
        StrengthCommand::Exact { n, d, format } => {
            let r = r_opt_exact(n, d)?;
            strength_output(r, format, &[("n", n.to_string()), ("d", d.to_string())])
        }
        StrengthCommand::Approx { p, eps, n, format } => {
            let r = r_opt_approx(p, Epsilon::new(eps)?, n)?;
            strength_output(r, format, &[("p", format!("{p:?}")), ("eps", format!("{eps:?}"))])
        }
    };
    Ok(Outcome::Done(text))
}

fn cmd_cutoffs(a: CutoffsArgs) -> Result<Outcome, Failure> {
    let rows = strength_intervals(a.max_r)?;
    let text = match a.format {
        OutputFormat::Json => {
            let table: Vec<_> = rows
                .iter()
                .map(|row| {
                    json!({
                        "r": row.r,
                        "lower": row.lower,
                        "upper": row.upper,
                        "drift_at_lower": row.drift_at_lower,
                        "drift_at_upper": row.drift_at_upper,
                        "width": row.width(),
                    })
                })
                .collect();
            to_json(&table)
        }
        OutputFormat::Csv => {
            let mut s = String::from("r,L_r,R_r,A_max_L,A_max_R,width\n");
            for row in &rows {
                let _ = writeln!(
                    s,
                    "{},{:?},{:?},{:?},{:?},{:?}",
                    row.r,
                    row.lower,
                    row.upper,
                    row.drift_at_lower,
                    row.drift_at_upper,
                    row.width()
                );
            }
            s
        }
        OutputFormat::Pretty => {
            let mut s = format!(
                "{:>5} {:>12} {:>12} {:>12} {:>12} {:>12}\n",
                "r", "L_r", "R_r", "A_max(L_r)", "A_max(R_r)", "width"
            );
            for row in &rows {
                let _ = writeln!(
                    s,
                    "{:>5} {:>12.9} {:>12.9} {:>12.9} {:>12.9} {:>12.9}",
                    row.r,
                    row.lower,
                    row.upper,
                    row.drift_at_lower,
                    row.drift_at_upper,
                    row.width()
                );
            }
            s
        }
    };
    Ok(Outcome::Done(text))
}

fn cmd_bounds(a: BoundsArgs) -> Result<Outcome, Failure> {
    let partition = match &a.partition {
        PartitionChoice::Default => default_partition()?,
        PartitionChoice::Dense(r) => dense_partition(*r)?,
        PartitionChoice::File(path) => read_file(path)?.parse::<PartitionScheme>()?,
    };
    let report = bound_report(&partition, Epsilon::new(a.eps)?, a.n)?;
    let text = match a.format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => {
            let (lo, hi) = report
                .runtime_estimate_at_n
                .map_or((String::new(), String::new()), |(l, h)| (format!("{l:?}"), format!("{h:?}")));
            format!(
                "partition_size,eps,c_prime_lower,c_prime_upper,c_lower,c_upper,integral_value,n,runtime_lower,runtime_upper\n\
                 {},{:?},{:?},{:?},{:?},{:?},{:?},{},{},{}\n",
                report.partition_size,
                report.eps,
                report.c_prime_lower,
                report.c_prime_upper,
                report.c_lower,
                report.c_upper,
                report.integral_value,
                report.n.map_or(String::new(), |n| n.to_string()),
                lo,
                hi
            )
        }
        OutputFormat::Pretty => {
            let mut s = format!(
                "partition intervals: {}\nc' in [{:.6}, {:.6}]\nc  in [{:.6}, {:.6}]\nintegral over [1/3, p_k]: {:.9}\n",
                report.partition_size,
                report.c_prime_lower,
                report.c_prime_upper,
                report.c_lower,
                report.c_upper,
                report.integral_value
            );
            if let (Some(n), Some((lo, hi))) = (report.n, report.runtime_estimate_at_n) {
                let _ = writeln!(s, "runtime at n = {n}: [{lo:.3}, {hi:.3}]");
            }
            s
        }
    };
    Ok(Outcome::Done(text))
}

fn cmd_simulate(a: SimulateArgs) -> Result<Outcome, Failure> {
    if a.per_run && a.format != OutputFormat::Json {
        return Ok(Outcome::Usage("--per-run needs --format json".into()));
    }
    if a.dist_file.is_some() && a.algo != Algorithm::Custom {
        return Ok(Outcome::Usage("--dist-file is only used with --algo custom".into()));
    }
    let mut cfg = SimConfig::new(a.algo, a.n, a.runs, a.seed);
    cfg.eps = Epsilon::new(a.eps)?;
    cfg.mode = a.mode;
    cfg.folding = a.folding;
    cfg.budget = a.budget;
    cfg.record_trajectory = a.per_run || a.trajectory.is_some();
    if let Some(path) = &a.dist_file {
        cfg.custom_dist = Some(UnaryOperatorDistribution::parse(&read_file(path)?)?);
    }

    let (summary, records) = if a.budgets.is_empty() {
        let records = run_algorithm(&cfg)?;
        (summarize(&cfg, &records), Some(records))
    } else {
        let summary = fixed_budget_estimate(&cfg, &a.budgets)?;
        let records = if cfg.record_trajectory {
            Some(run_algorithm(&cfg)?)
        } else {
            None
        };
        (summary, records)
    };

    if let (Some(path), Some(records)) = (&a.trajectory, &records) {
        let mut s = String::from("t,mean_x\n");
        for (t, x) in mean_trajectory(records) {
            let _ = writeln!(s, "{t},{x:?}");
        }
        fs::write(path, s).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }

    let text = match a.format {
        OutputFormat::Json => {
            let mut doc = json!({ "config": cfg, "summary": summary });
            if a.per_run {
                doc["runs"] = json!(records);
            }
            to_json(&doc)
        }
        OutputFormat::Csv => {
            let mut s = format!(
                "algorithm,n,runs,mean,variance,se,censored\n{},{},{},{:?},{:?},{:?},{}\n",
                summary.algorithm.name(),
                summary.n,
                summary.runs,
                summary.mean,
                summary.variance,
                summary.standard_error,
                summary.censored
            );
            if !summary.per_budget.is_empty() {
                s.push_str("\nbudget,mean_x,variance,se\n");
                for b in &summary.per_budget {
                    let _ = writeln!(
                        s,
                        "{},{:?},{:?},{:?}",
                        b.budget, b.mean, b.variance, b.standard_error
                    );
                }
            }
            s
        }
        OutputFormat::Pretty => {
            let mut s = format!(
                "{} n={} runs={}: mean runtime {:.3} (sd {:.3}, se {:.3}), censored {}\n",
                summary.algorithm.name(),
                summary.n,
                summary.runs,
                summary.mean,
                summary.variance.sqrt(),
                summary.standard_error,
                summary.censored
            );
            for b in &summary.per_budget {
                let _ = writeln!(
                    s,
                    "  budget {:>8}: mean distance {:.4} (se {:.4})",
                    b.budget, b.mean, b.standard_error
                );
            }
            s
        }
    };
    Ok(Outcome::Done(text))
}
