//! Monte Carlo runs of unary unbiased elitist algorithms on OneMax.
//!
//! A run starts from a uniform random string, mutates by flipping `r` random
//! bits, and keeps the offspring if it is not worse. Runtimes count fitness
//! evaluations, the initial sample being evaluation 1. Budgets count
//! iterations after the initial sample.
//!
//! Run `i` draws from its own ChaCha8 stream `i` of the master seed, so
//! results do not depend on thread count or scheduling.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strength::{r_opt_approx, r_opt_exact, r_opt_exact_full, Epsilon};

/// Epsilon used by the approximate maximizer in simulations.
///
/// Smaller values push the strength used on the plateau `(1/2 - eps, 1/2]`
/// far beyond `n` for desk-scale `n`, and the run stalls at `d = n/2`.
pub const DEFAULT_SIM_EPSILON: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Randomized local search: always one bit.
    Rls,
    /// Exact drift maximizer at the simulated `n`.
    #[value(name = "driftmax")]
    #[serde(rename = "driftmax")]
    DriftMaxExact,
    /// Approximate drift maximizer, independent of `n`.
    #[value(name = "approx-driftmax")]
    #[serde(rename = "approx-driftmax")]
    DriftMaxApprox,
    /// Strength drawn from a user distribution each iteration.
    Custom,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rls => "rls",
            Algorithm::DriftMaxExact => "driftmax",
            Algorithm::DriftMaxApprox => "approx-driftmax",
            Algorithm::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Full bit strings.
    Bitstring,
    /// Only the fitness distance; offspring distances are sampled directly.
    #[default]
    Condensed,
}

/// How the drift maximizers treat distances above `n/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Folding {
    /// Minimize `min(d, n - d)` and flip all bits once the all-zeros string
    /// is found. Costs at most one extra evaluation.
    #[default]
    Complement,
    /// Minimize `d` itself; above `n/2` the strength is chosen for the
    /// actual distance.
    Literal,
}

/// Probability vector over strengths `0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnaryOperatorDistribution {
    weights: Vec<f64>,
    #[serde(skip)]
    sampler: WeightedIndex<f64>,
}

impl UnaryOperatorDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("no weights".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidDistribution("weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}, not 1")));
        }
        let sampler = WeightedIndex::new(&weights)
            .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
        Ok(UnaryOperatorDistribution { weights, sampler })
    }

    /// All mass on strength `r`, for problem size `n`.
    pub fn point_mass(n: u64, r: u64) -> Result<Self> {
        if r > n {
            return Err(Error::StrengthOutOfRange { r, n });
        }
        let mut w = vec![0.0; n as usize + 1];
        w[r as usize] = 1.0;
        Self::new(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Largest strength with non-zero weight.
    pub fn max_strength(&self) -> u64 {
        self.weights.iter().rposition(|&w| w > 0.0).unwrap_or(0) as u64
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.sampler.sample(rng) as u64
    }

    /// Weights separated by whitespace or newlines, `#` comments allowed.
    /// Entry `i` is the probability of flipping `i` bits.
    pub fn parse(text: &str) -> Result<Self> {
        let mut weights = Vec::new();
        for line in text.lines() {
            let body = line.split('#').next().unwrap_or("");
            for tok in body.split_whitespace() {
                let w: f64 = tok
                    .parse()
                    .map_err(|_| Error::InvalidDistribution(format!("cannot parse {tok:?}")))?;
                weights.push(w);
            }
        }
        Self::new(weights)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub n: u64,
    pub algorithm: Algorithm,
    pub eps: Epsilon,
    pub custom_dist: Option<UnaryOperatorDistribution>,
    pub mode: Mode,
    pub folding: Folding,
    pub seed: u64,
    pub runs: usize,
    /// Iteration cap per run; `None` uses [`default_budget`].
    pub budget: Option<u64>,
    pub record_trajectory: bool,
}

impl SimConfig {
    pub fn new(algorithm: Algorithm, n: u64, runs: usize, seed: u64) -> Self {
        SimConfig {
            n,
            algorithm,
            eps: Epsilon::new(DEFAULT_SIM_EPSILON).expect("valid default"),
            custom_dist: None,
            mode: Mode::default(),
            folding: Folding::default(),
            seed,
            runs,
            budget: None,
            record_trajectory: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::ZeroProblemSize);
        }
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        match (&self.custom_dist, self.algorithm) {
            (None, Algorithm::Custom) => {
                Err(Error::InvalidConfig("custom algorithm needs a distribution".into()))
            }
            (Some(_), a) if a != Algorithm::Custom => Err(Error::InvalidConfig(
                "a distribution is only allowed with the custom algorithm".into(),
            )),
            (Some(dist), _) if dist.weights().len() as u64 > self.n + 1 => {
                Err(Error::InvalidDistribution(format!(
                    "{} weights for n = {}",
                    dist.weights().len(),
                    self.n
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn effective_budget(&self) -> u64 {
        self.budget.unwrap_or_else(|| default_budget(self.n))
    }

    fn folded(&self) -> bool {
        self.folding == Folding::Complement
            && matches!(self.algorithm, Algorithm::DriftMaxExact | Algorithm::DriftMaxApprox)
    }
}

/// `20 n (ln n + 1) + 100` iterations, far beyond any sensible runtime.
pub fn default_budget(n: u64) -> u64 {
    let x = n as f64;
    (20.0 * x * (x.ln() + 1.0)).ceil() as u64 + 100
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Evaluations up to and including the first optimal one; `None` when the
    /// budget ran out first.
    pub runtime: Option<u64>,
    /// Objective value at the end of the run.
    pub final_distance: u64,
    /// Best-so-far objective after each iteration, starting with the
    /// initial sample.
    pub trajectory: Option<Vec<u64>>,
}

/// Flip exactly `r` distinct uniformly chosen positions.
pub fn flip_r<R: Rng + ?Sized>(x: &[bool], r: u64, rng: &mut R) -> Result<Vec<bool>> {
    let n = x.len();
    if r as usize > n {
        return Err(Error::StrengthOutOfRange { r, n: n as u64 });
    }
    let mut y = x.to_vec();
    for i in index::sample(rng, n, r as usize) {
        y[i] = !y[i];
    }
    Ok(y)
}

/// Draw a strength from `dist` and apply [`flip_r`].
pub fn sample_unary_operator<R: Rng + ?Sized>(
    dist: &UnaryOperatorDistribution,
    x: &[bool],
    rng: &mut R,
) -> Result<Vec<bool>> {
    flip_r(x, dist.sample(rng), rng)
}

/// Number of wrong bits among `r` distinct random positions when `d` of the
/// `n` bits are wrong.
fn good_flips<R: Rng + ?Sized>(n: u64, d: u64, r: u64, rng: &mut R) -> u64 {
    match r {
        0 => 0,
        1 => (rng.gen_range(0..n) < d) as u64,
        _ if r == n => d,
        // the unflipped n - r positions hold d - Z wrong bits
        _ if 2 * r > n => d - urn_draws(n, d, n - r, rng),
        _ => urn_draws(n, d, r, rng),
    }
}

/// Draw `r` positions one at a time without replacement and count the wrong
/// ones. Exact, O(r).
fn urn_draws<R: Rng + ?Sized>(n: u64, d: u64, r: u64, rng: &mut R) -> u64 {
    let (mut left, mut wrong, mut z) = (n, d, 0);
    for _ in 0..r {
        if wrong == 0 {
            break;
        }
        if rng.gen_range(0..left) < wrong {
            wrong -= 1;
            z += 1;
        }
        left -= 1;
    }
    z
}

/// Distance after one mutate-and-select step at distance `d` flipping `r` bits.
pub fn condensed_step<R: Rng + ?Sized>(n: u64, d: u64, r: u64, rng: &mut R) -> Result<u64> {
    if d > n {
        return Err(Error::DistanceOutOfRange { d, n });
    }
    if r > n {
        return Err(Error::StrengthOutOfRange { r, n });
    }
    let z = good_flips(n, d, r, rng);
    Ok((d + r - 2 * z).min(d))
}

/// Per-run strength rule, precomputed once per configuration.
enum Strengths<'a> {
    /// `table[v]` is the strength at objective value `v`.
    Table(Vec<u64>),
    Random(&'a UnaryOperatorDistribution),
}

impl Strengths<'_> {
    fn get<R: Rng + ?Sized>(&self, v: u64, rng: &mut R) -> u64 {
        match self {
            Strengths::Table(t) => t[v as usize],
            Strengths::Random(dist) => dist.sample(rng),
        }
    }
}

/// Strength used by `config.algorithm` at each objective value.
pub fn strength_table(config: &SimConfig) -> Result<Vec<u64>> {
    let n = config.n;
    let top = if config.folded() { n / 2 } else { n };
    let rule = |v: u64| -> Result<u64> {
        if v == 0 {
            return Ok(0);
        }
        let r = match config.algorithm {
            Algorithm::Rls => 1,
            Algorithm::DriftMaxExact if 2 * v <= n => r_opt_exact(n, v)?,
            Algorithm::DriftMaxExact => r_opt_exact_full(n, v)?,
            Algorithm::DriftMaxApprox => r_opt_approx(v as f64 / n as f64, config.eps, Some(n))?,
            Algorithm::Custom => {
                return Err(Error::InvalidConfig("custom strengths are random".into()))
            }
        };
        Ok(r.min(n))
    };
    (0..=top).into_par_iter().map(rule).collect()
}

fn run_rng(seed: u64, run: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run as u64);
    rng
}

/// Observes the objective after each iteration.
struct Observer<'a> {
    trajectory: Option<Vec<u64>>,
    checkpoints: &'a [u64],
    at_checkpoints: Vec<u64>,
}

impl Observer<'_> {
    fn record(&mut self, t: u64, v: u64) {
        self.record_span(t, 1, v);
    }

    /// The objective stayed at `v` for the `len` iterations ending at `t`.
    fn record_span(&mut self, t: u64, len: u64, v: u64) {
        if let Some(tr) = self.trajectory.as_mut() {
            tr.extend(std::iter::repeat_n(v, len as usize));
        }
        while self.at_checkpoints.len() < self.checkpoints.len()
            && self.checkpoints[self.at_checkpoints.len()] <= t
        {
            self.at_checkpoints.push(v);
        }
    }

    fn finish(&mut self) {
        self.at_checkpoints.resize(self.checkpoints.len(), 0);
    }
}

/// The search state in either representation.
enum State {
    Condensed { d: u64 },
    Bits { x: Vec<bool>, d: u64 },
}

impl State {
    fn random<R: Rng + ?Sized>(n: u64, mode: Mode, rng: &mut R) -> State {
        match mode {
            Mode::Condensed => State::Condensed {
                d: Binomial::new(n, 0.5).expect("valid").sample(rng),
            },
            Mode::Bitstring => {
                // true marks a correct bit
                let x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
                let d = x.iter().filter(|&&b| !b).count() as u64;
                State::Bits { x, d }
            }
        }
    }

    fn distance(&self) -> u64 {
        match self {
            State::Condensed { d } | State::Bits { d, .. } => *d,
        }
    }

    /// Mutate with strength `r` and keep the offspring if `objective` does
    /// not get worse.
    fn step<R: Rng + ?Sized>(&mut self, n: u64, r: u64, objective: impl Fn(u64) -> u64, rng: &mut R) {
        match self {
            State::Condensed { d } => {
                let z = good_flips(n, *d, r, rng);
                let nd = *d + r - 2 * z;
                if objective(nd) <= objective(*d) {
                    *d = nd;
                }
            }
            State::Bits { x, d } => {
                let flips = index::sample(rng, n as usize, r as usize);
                let z = flips.iter().filter(|&i| !x[i]).count() as u64;
                let nd = *d + r - 2 * z;
                if objective(nd) <= objective(*d) {
                    for i in flips {
                        x[i] = !x[i];
                    }
                    *d = nd;
                }
            }
        }
    }
}

fn simulate_run(
    config: &SimConfig,
    strengths: &Strengths<'_>,
    run: usize,
    budget: u64,
    checkpoints: &[u64],
) -> (RunRecord, Vec<u64>) {
    let n = config.n;
    let folded = config.folded();
    let objective = |d: u64| if folded { d.min(n - d) } else { d };
    let mut rng = run_rng(config.seed, run);
    let mut state = State::random(n, config.mode, &mut rng);
    let mut obs = Observer {
        trajectory: config.record_trajectory.then(Vec::new),
        checkpoints,
        at_checkpoints: Vec::with_capacity(checkpoints.len()),
    };

    let mut t = 0u64;
    obs.record(t, objective(state.distance()));
    let mut runtime = None;
    loop {
        let d = state.distance();
        let v = objective(d);
        if v == 0 {
            if d == 0 {
                runtime = Some(t + 1);
                break;
            }
            // all bits wrong: one more evaluation for the complement
            if t < budget {
                t += 1;
                obs.record(t, 0);
                runtime = Some(t + 1);
            }
            break;
        }
        if t >= budget {
            break;
        }
        let r = strengths.get(v, &mut rng);
        if let State::Condensed { d } = &mut state {
            // With one bit flipped only d -> d - 1 can be accepted, so skip
            // the unchanged iterations in one geometric draw.
            let fixed = matches!(strengths, Strengths::Table(_));
            if fixed && r == 1 && (!folded || 2 * (*d + 1) <= n) {
                let fails = Geometric::new(*d as f64 / n as f64)
                    .expect("0 < d <= n")
                    .sample(&mut rng);
                if fails >= budget - t {
                    obs.record_span(budget, budget - t, v);
                    t = budget;
                    continue;
                }
                if fails > 0 {
                    t += fails;
                    obs.record_span(t, fails, v);
                }
                *d -= 1;
                t += 1;
                obs.record(t, objective(*d));
                continue;
            }
        }
        state.step(n, r, objective, &mut rng);
        t += 1;
        obs.record(t, objective(state.distance()));
    }
    obs.finish();
    let final_distance = if runtime.is_some() { 0 } else { objective(state.distance()) };
    let record = RunRecord {
        runtime,
        final_distance,
        trajectory: obs.trajectory,
    };
    (record, obs.at_checkpoints)
}

fn prepare(config: &SimConfig) -> Result<Strengths<'_>> {
    config.validate()?;
    Ok(match &config.custom_dist {
        Some(dist) => Strengths::Random(dist),
        None => Strengths::Table(strength_table(config)?),
    })
}

/// Execute `config.runs` independent runs.
pub fn run_algorithm(config: &SimConfig) -> Result<Vec<RunRecord>> {
    let strengths = prepare(config)?;
    let budget = config.effective_budget();
    Ok((0..config.runs)
        .into_par_iter()
        .map(|i| simulate_run(config, &strengths, i, budget, &[]).0)
        .collect())
}

/// Mean, variance and standard error of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub standard_error: f64,
}

impl Moments {
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Moments {
        // Welford
        let (mut count, mut mean, mut m2) = (0usize, 0.0, 0.0);
        for v in values {
            count += 1;
            let delta = v - mean;
            mean += delta / count as f64;
            m2 += delta * (v - mean);
        }
        let variance = if count > 1 { m2 / (count - 1) as f64 } else { 0.0 };
        let standard_error = if count > 0 {
            (variance / count as f64).sqrt()
        } else {
            f64::NAN
        };
        Moments {
            count,
            mean: if count > 0 { mean } else { f64::NAN },
            variance,
            standard_error,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetStat {
    pub budget: u64,
    pub mean: f64,
    pub variance: f64,
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub algorithm: Algorithm,
    pub n: u64,
    pub runs: usize,
    /// Runs that reached the optimum; the moments cover only these.
    pub count: usize,
    pub censored: usize,
    pub mean: f64,
    pub variance: f64,
    pub standard_error: f64,
    pub per_budget: Vec<BudgetStat>,
}

impl SummaryStats {
    fn new(config: &SimConfig, runtimes: &[Option<u64>], per_budget: Vec<BudgetStat>) -> Self {
        let m = Moments::from_values(runtimes.iter().flatten().map(|&t| t as f64));
        SummaryStats {
            algorithm: config.algorithm,
            n: config.n,
            runs: runtimes.len(),
            count: m.count,
            censored: runtimes.len() - m.count,
            mean: m.mean,
            variance: m.variance,
            standard_error: m.standard_error,
            per_budget,
        }
    }
}

/// Runtime statistics of finished runs.
pub fn summarize(config: &SimConfig, records: &[RunRecord]) -> SummaryStats {
    let runtimes: Vec<Option<u64>> = records.iter().map(|r| r.runtime).collect();
    SummaryStats::new(config, &runtimes, Vec::new())
}

/// Mean best-so-far objective after each budget. Runs stop at the largest
/// budget unless `config.budget` is smaller.
pub fn fixed_budget_estimate(config: &SimConfig, budgets: &[u64]) -> Result<SummaryStats> {
    if budgets.is_empty() {
        return Err(Error::InvalidConfig("no budgets given".into()));
    }
    let strengths = prepare(config)?;
    let mut sorted = budgets.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let limit = *sorted.last().unwrap();
    let budget = config.budget.map_or(limit, |b| b.min(limit));
    let outcomes: Vec<(Option<u64>, Vec<u64>)> = (0..config.runs)
        .into_par_iter()
        .map(|i| {
            let (rec, at) = simulate_run(config, &strengths, i, budget, &sorted);
            (rec.runtime, at)
        })
        .collect();
    let per_budget = sorted
        .iter()
        .enumerate()
        .filter(|(_, &b)| b <= budget)
        .map(|(k, &b)| {
            let m = Moments::from_values(outcomes.iter().map(|o| o.1[k] as f64));
            BudgetStat {
                budget: b,
                mean: m.mean,
                variance: m.variance,
                standard_error: m.standard_error,
            }
        })
        .collect();
    let runtimes: Vec<Option<u64>> = outcomes.iter().map(|o| o.0).collect();
    Ok(SummaryStats::new(config, &runtimes, per_budget))
}

/// Mean trajectory `(t, mean X_t)` over runs, finished runs padded with 0.
pub fn mean_trajectory(records: &[RunRecord]) -> Vec<(u64, f64)> {
    let len = records
        .iter()
        .filter_map(|r| r.trajectory.as_ref().map(Vec::len))
        .max()
        .unwrap_or(0);
    let mut sums = vec![0.0; len];
    let mut count = 0usize;
    for tr in records.iter().filter_map(|r| r.trajectory.as_ref()) {
        count += 1;
        let tail = *tr.last().unwrap_or(&0) as f64;
        for (t, s) in sums.iter_mut().enumerate() {
            *s += tr.get(t).map_or(tail, |&v| v as f64);
        }
    }
    sums.into_iter()
        .enumerate()
        .map(|(t, s)| (t as u64, s / count.max(1) as f64))
        .collect()
}

/// Expected distance of RLS after `b` iterations, `(n/2)(1 - 1/n)^b`.
pub fn rls_fixed_budget_closed_form(n: u64, b: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroProblemSize);
    }
    let half = n as f64 / 2.0;
    if b == 0 {
        return Ok(half);
    }
    if n == 1 {
        return Ok(0.0);
    }
    Ok(half * (b as f64 * (-1.0 / n as f64).ln_1p()).exp())
}
