//! Runtime bounds for the approximate drift maximizer and generic
//! variable-drift calculators.
//!
//! The expected runtime of the approximate maximizer is
//! `n (ln(n/3) + gamma + c') + o(n)`. The constant `c'` is bracketed by
//! Riemann-type sums of `1 / A_max,eps` over a partition
//! `1/2 - eps >= p_0 > p_1 > ... > p_k >= 1/3`, plus the integral of
//! `1 / A_max,eps` over `[1/3, p_k]`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::drift::approx_drift;
use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, harmonic, ln_hypergeometric_pmf, EULER_GAMMA};
use crate::strength::{cutoff_point, interval_upper_ends, max_approx_drift, Epsilon};

const INTEGRAL_TOL: f64 = 1e-8;
const INTEGRAL_MAX_DEPTH: u32 = 50;

/// Largest state space accepted by [`TransitionMatrix::brute_force_hitting_time`].
pub const HITTING_TIME_MAX_STATES: usize = 2001;

/// `n * H_m`, the time RLS-like single-bit phases spend between distance `m`
/// and the optimum.
pub fn harmonic_runtime_term(n: u64, m: u64) -> Result<f64> {
    if m == 0 || m > n {
        return Err(Error::OutOfDomain {
            name: "m",
            value: m as f64,
            domain: "[1, n]",
        });
    }
    Ok(n as f64 * harmonic(m))
}

/// Strictly decreasing partition points in `[1/3, 1/2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionScheme {
    points: Vec<f64>,
}

impl PartitionScheme {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidPartition("no points".into()));
        }
        for &p in &points {
            if !(1.0 / 3.0..0.5).contains(&p) {
                return Err(Error::InvalidPartition(format!(
                    "point {p} outside [1/3, 1/2)"
                )));
            }
        }
        if let Some(w) = points.windows(2).find(|w| w[1] >= w[0]) {
            return Err(Error::InvalidPartition(format!(
                "points not strictly decreasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(PartitionScheme { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of subintervals `k`.
    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.points.len() == 1
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        *self.points.last().unwrap()
    }

    /// Partition at the cut-off points `R_r` for the given odd strengths,
    /// sorted so that the points decrease.
    pub fn from_cutoffs(strengths: &[u64]) -> Result<Self> {
        let mut rs = strengths.to_vec();
        rs.sort_unstable_by(|a, b| b.cmp(a));
        rs.dedup();
        PartitionScheme::new(interval_upper_ends(&rs)?)
    }
}

impl FromStr for PartitionScheme {
    type Err = Error;

    /// One point per line; `#` starts a comment, blank lines are skipped.
    fn from_str(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let p: f64 = body.parse().map_err(|_| {
                Error::InvalidPartition(format!("line {}: cannot parse {body:?}", lineno + 1))
            })?;
            points.push(p);
        }
        PartitionScheme::new(points)
    }
}

impl fmt::Display for PartitionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.points {
            writeln!(f, "{p:.17}")?;
        }
        Ok(())
    }
}

/// Odd strengths whose cut-offs make up the default partition:
/// 4001, 3001, 2001, 1001, then 951 down to 251 in steps of 50, then
/// 199, 151, 101 and every odd strength from 35 down to 9.
pub fn default_partition_strengths() -> Vec<u64> {
    let mut rs = vec![4001, 3001, 2001, 1001];
    rs.extend((251..=951).rev().step_by(50));
    rs.extend([199, 151, 101]);
    rs.extend((9..=35).rev().step_by(2));
    rs
}

pub fn default_partition() -> Result<PartitionScheme> {
    PartitionScheme::from_cutoffs(&default_partition_strengths())
}

/// Cut-offs `R_r` for every odd `r` from 9 to `max_r`.
pub fn dense_partition(max_r: u64) -> Result<PartitionScheme> {
    if max_r % 2 == 0 || max_r < 9 {
        return Err(Error::InvalidPartition(format!(
            "dense partition needs odd max_r >= 9, got {max_r}"
        )));
    }
    let rs: Vec<u64> = (9..=max_r).rev().step_by(2).collect();
    PartitionScheme::from_cutoffs(&rs)
}

/// `integral_{1/3}^{upper} dp / A_max(p)`, split at the cut-off points where
/// the optimal strength changes.
pub fn inverse_drift_integral(upper: f64) -> Result<f64> {
    let third = 1.0 / 3.0;
    if !(upper >= third && upper < 0.5) {
        return Err(Error::OutOfDomain {
            name: "p",
            value: upper,
            domain: "[1/3, 1/2)",
        });
    }
    let mut total = 0.0;
    let mut lo = third;
    let mut r = 3;
    while lo < upper {
        let hi = cutoff_point(r, r + 2)?.p0.min(upper);
        total += adaptive_simpson(
            |p| 1.0 / approx_drift(r, p).unwrap_or(f64::NAN),
            lo,
            hi,
            INTEGRAL_TOL,
            INTEGRAL_MAX_DEPTH,
        )?;
        lo = hi;
        r += 2;
    }
    Ok(total)
}

/// The pieces that make up both bracket ends.
#[derive(Debug, Clone, Copy, PartialEq)]
struct BoundTerms {
    integral: f64,
    lower_sum: f64,
    upper_sum: f64,
    plateau: f64,
}

fn bound_terms(partition: &PartitionScheme, eps: Epsilon) -> Result<BoundTerms> {
    if partition.first() > eps.plateau_start() {
        return Err(Error::InvalidPartition(format!(
            "first point {} exceeds 1/2 - eps = {}",
            partition.first(),
            eps.plateau_start()
        )));
    }
    let drifts: Vec<f64> = partition
        .points()
        .par_iter()
        .map(|&p| max_approx_drift(p, eps))
        .collect::<Result<_>>()?;
    let pts = partition.points();
    let mut lower_sum = 0.0;
    let mut upper_sum = 0.0;
    for i in 1..pts.len() {
        let width = pts[i - 1] - pts[i];
        lower_sum += width / drifts[i - 1];
        upper_sum += width / drifts[i];
    }
    Ok(BoundTerms {
        integral: inverse_drift_integral(partition.last())?,
        lower_sum,
        upper_sum,
        plateau: (0.5 - pts[0]) / drifts[0],
    })
}

/// Lower end of the bracket for `c'`.
pub fn lower_bound_constant(partition: &PartitionScheme, eps: Epsilon) -> Result<f64> {
    let t = bound_terms(partition, eps)?;
    Ok(t.lower_sum + t.integral)
}

/// Upper end of the bracket for `c'`, including the plateau `(p_0, 1/2]`.
pub fn upper_bound_constant(partition: &PartitionScheme, eps: Epsilon) -> Result<f64> {
    let t = bound_terms(partition, eps)?;
    Ok(t.upper_sum + t.plateau + t.integral)
}

/// Bracket for the runtime constant in both of its forms:
/// `n (ln(n/3) + gamma + c')` and `n ln n - c n`, with `c = ln 3 - gamma - c'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuntimeConstantBracket {
    pub c_prime_lower: f64,
    pub c_prime_upper: f64,
    pub c_lower: f64,
    pub c_upper: f64,
}

impl RuntimeConstantBracket {
    pub fn from_c_prime(c_prime_lower: f64, c_prime_upper: f64) -> Result<Self> {
        if !(c_prime_lower <= c_prime_upper) {
            return Err(Error::OutOfDomain {
                name: "c_prime_lower",
                value: c_prime_lower,
                domain: "<= c_prime_upper",
            });
        }
        let shift = 3f64.ln() - EULER_GAMMA;
        Ok(RuntimeConstantBracket {
            c_prime_lower,
            c_prime_upper,
            c_lower: shift - c_prime_upper,
            c_upper: shift - c_prime_lower,
        })
    }

    pub fn width(&self) -> f64 {
        self.c_prime_upper - self.c_prime_lower
    }
}

/// `(n (ln(n/3) + gamma + c'_lower), n (ln(n/3) + gamma + c'_upper))`.
pub fn runtime_estimate(n: u64, bracket: &RuntimeConstantBracket) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::OutOfDomain {
            name: "n",
            value: n as f64,
            domain: "n >= 3",
        });
    }
    let x = n as f64;
    let base = (x / 3.0).ln() + EULER_GAMMA;
    Ok((
        x * (base + bracket.c_prime_lower),
        x * (base + bracket.c_prime_upper),
    ))
}

/// Everything computed for one partition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub partition_size: usize,
    pub eps: f64,
    pub c_prime_lower: f64,
    pub c_prime_upper: f64,
    pub c_lower: f64,
    pub c_upper: f64,
    pub integral_value: f64,
    pub n: Option<u64>,
    pub runtime_estimate_at_n: Option<(f64, f64)>,
}

impl BoundReport {
    pub fn bracket(&self) -> RuntimeConstantBracket {
        RuntimeConstantBracket {
            c_prime_lower: self.c_prime_lower,
            c_prime_upper: self.c_prime_upper,
            c_lower: self.c_lower,
            c_upper: self.c_upper,
        }
    }
}

/// Both bracket ends for `partition`, plus the runtime estimate at `n` if given.
pub fn bound_report(partition: &PartitionScheme, eps: Epsilon, n: Option<u64>) -> Result<BoundReport> {
    let t = bound_terms(partition, eps)?;
    let bracket = RuntimeConstantBracket::from_c_prime(
        t.lower_sum + t.integral,
        t.upper_sum + t.plateau + t.integral,
    )?;
    let runtime_estimate_at_n = n.map(|n| runtime_estimate(n, &bracket)).transpose()?;
    Ok(BoundReport {
        partition_size: partition.len(),
        eps: eps.value(),
        c_prime_lower: bracket.c_prime_lower,
        c_prime_upper: bracket.c_prime_upper,
        c_lower: bracket.c_lower,
        c_upper: bracket.c_upper,
        integral_value: t.integral,
        n,
        runtime_estimate_at_n,
    })
}

/// Pointwise drift bounds for a process on `[0..n]` that stops at 0.
///
/// `h[x]` bounds the expected one-step decrease at state `x`. `c[x]` is a
/// floor the next state stays at or above with probability at least
/// `1 - p_escape`; `c[0]` is ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftSpec {
    pub n: usize,
    pub h: Vec<f64>,
    pub c: Vec<usize>,
    pub p_escape: f64,
}

impl DriftSpec {
    pub fn new(h: Vec<f64>, c: Vec<usize>, p_escape: f64) -> Result<Self> {
        if h.is_empty() || h.len() != c.len() {
            return Err(Error::InvalidDriftSpec(format!(
                "h and c need equal non-zero length, got {} and {}",
                h.len(),
                c.len()
            )));
        }
        if !(0.0..1.0).contains(&p_escape) {
            return Err(Error::InvalidDriftSpec(format!(
                "p_escape = {p_escape} outside [0, 1)"
            )));
        }
        Ok(DriftSpec {
            n: h.len() - 1,
            h,
            c,
            p_escape,
        })
    }

    /// Spec with unit jumps (`c(i) = i - 1`) and no escape probability.
    pub fn unit_steps(h: Vec<f64>) -> Result<Self> {
        let c = (0..h.len()).map(|i| i.saturating_sub(1)).collect();
        DriftSpec::new(h, c, 0.0)
    }

    fn check_monotone(&self, from: usize, to: usize) -> Result<()> {
        for i in from..to {
            if self.h[i + 1] < self.h[i] {
                return Err(Error::InvalidDriftSpec(format!(
                    "h decreases between states {i} and {}",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    fn check_start(&self, x0: usize) -> Result<()> {
        if x0 > self.n {
            return Err(Error::InvalidDriftSpec(format!(
                "start state {x0} exceeds n = {}",
                self.n
            )));
        }
        Ok(())
    }

    /// `mu(x) = max{ i in [1..n] | c(i) <= x }`, or 0 if no such `i`.
    pub fn mu(&self) -> Result<Vec<usize>> {
        let mut best = vec![0usize; self.n + 1];
        for i in 1..=self.n {
            let ci = self.c[i];
            if ci > i {
                return Err(Error::InvalidDriftSpec(format!("c({i}) = {ci} exceeds {i}")));
            }
            best[ci] = best[ci].max(i);
        }
        let mut running = 0;
        for slot in best.iter_mut() {
            running = running.max(*slot);
            *slot = running;
        }
        Ok(best)
    }
}

/// Upper bound `sum_{i=1}^{x0} 1 / h(i)` on the expected hitting time of 0,
/// valid when `h` is non-decreasing and bounds the drift from below.
pub fn drift_upper_bound(spec: &DriftSpec, x0: usize) -> Result<f64> {
    spec.check_start(x0)?;
    if let Some(i) = (1..=x0).find(|&i| !(spec.h[i] > 0.0)) {
        return Err(Error::InvalidDriftSpec(format!(
            "h({i}) = {} is not positive",
            spec.h[i]
        )));
    }
    spec.check_monotone(1, x0.max(1))?;
    Ok((1..=x0).rev().map(|i| 1.0 / spec.h[i]).sum())
}

/// Lower bound `g - g^2 p / (1 + g p)` on the expected hitting time of 0,
/// where `g(x0) = sum_{i<x0} 1 / h(mu(i))`. Valid when `h` is non-decreasing
/// and bounds the drift from above and `(c, p)` bounds the jump sizes.
pub fn drift_lower_bound(spec: &DriftSpec, x0: usize) -> Result<f64> {
    spec.check_start(x0)?;
    spec.check_monotone(0, spec.n)?;
    let mu = spec.mu()?;
    let mut g = 0.0;
    for i in (0..x0).rev() {
        let h = spec.h[mu[i]];
        if !(h > 0.0) {
            return Err(Error::InvalidDriftSpec(format!(
                "h(mu({i})) = h({}) = {h} is not positive",
                mu[i]
            )));
        }
        g += 1.0 / h;
    }
    let p = spec.p_escape;
    Ok(g - g * g * p / (1.0 + g * p))
}

/// Row-stochastic matrix over states `[0..n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    rows: Vec<Vec<f64>>,
}

impl TransitionMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::InvalidTransition("no states".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvalidTransition(format!(
                    "row {i} has {} entries, expected {size}",
                    row.len()
                )));
            }
            if row.iter().any(|&x| !(x >= 0.0)) {
                return Err(Error::InvalidTransition(format!("row {i} has a negative entry")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidTransition(format!("row {i} sums to {sum}")));
            }
        }
        Ok(TransitionMatrix { rows })
    }

    /// RLS on the OneMax distance chain: from `i`, move to `i - 1` with
    /// probability `i / n`.
    pub fn rls_onemax(n: usize) -> Result<Self> {
        Self::elitist_onemax(n, |_| 1)
    }

    /// Elitist chain on the OneMax distance when `strength(d)` bits are
    /// flipped at distance `d`. Worse offspring are rejected.
    pub fn elitist_onemax(n: usize, strength: impl Fn(usize) -> usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroProblemSize);
        }
        let mut rows = vec![vec![0.0; n + 1]; n + 1];
        rows[0][0] = 1.0;
        for (d, row) in rows.iter_mut().enumerate().skip(1) {
            let r = strength(d);
            if r > n {
                return Err(Error::StrengthOutOfRange {
                    r: r as u64,
                    n: n as u64,
                });
            }
            let mut moved = 0.0;
            // z good flips move the distance to d + r - 2z
            for z in 0..=r.min(d) {
                let pr = ln_hypergeometric_pmf(n as u64, d as u64, r as u64, z as u64).exp();
                if 2 * z > r && pr > 0.0 {
                    row[d + r - 2 * z] += pr;
                    moved += pr;
                }
            }
            row[d] += 1.0 - moved;
        }
        Ok(TransitionMatrix { rows })
    }

    /// Number of states, `n + 1`.
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    /// Expected one-step decrease `E(X_t - X_{t+1} | X_t = i)`.
    pub fn drift(&self, i: usize) -> f64 {
        self.rows[i]
            .iter()
            .enumerate()
            .map(|(j, &p)| p * (i as f64 - j as f64))
            .sum()
    }

    /// Expected number of steps to reach state 0 from `start`, by solving
    /// `E_i = 1 + sum_j P_ij E_j`, `E_0 = 0` over the states reachable from
    /// `start`.
    pub fn brute_force_hitting_time(&self, start: usize) -> Result<f64> {
        let size = self.size();
        if size > HITTING_TIME_MAX_STATES {
            return Err(Error::InvalidTransition(format!(
                "{size} states exceed the limit of {HITTING_TIME_MAX_STATES}"
            )));
        }
        if start >= size {
            return Err(Error::InvalidTransition(format!("start state {start} out of range")));
        }
        if start == 0 {
            return Ok(0.0);
        }
        let reach = self.reachable_from(start);
        let hits_zero = self.can_reach_zero();
        if let Some(bad) = (0..size).find(|&i| reach[i] && !hits_zero[i]) {
            return Err(Error::Unreachable(bad));
        }
        let states: Vec<usize> = (1..size).filter(|&i| reach[i]).collect();
        let mut index = vec![usize::MAX; size];
        for (k, &s) in states.iter().enumerate() {
            index[s] = k;
        }
        let m = states.len();
        // (I - Q) E = 1, augmented with the right-hand side
        let mut a = vec![vec![0.0; m + 1]; m];
        for (k, &s) in states.iter().enumerate() {
            a[k][k] = 1.0;
            a[k][m] = 1.0;
            for (j, &p) in self.rows[s].iter().enumerate() {
                if j != 0 && p > 0.0 {
                    a[k][index[j]] -= p;
                }
            }
        }
        let solution = solve_dense(a).ok_or(Error::Unreachable(start))?;
        Ok(solution[index[start]])
    }

    fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.size()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            for (j, &p) in self.rows[i].iter().enumerate() {
                if p > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen
    }

    fn can_reach_zero(&self) -> Vec<bool> {
        let size = self.size();
        let mut preds = vec![Vec::new(); size];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                if p > 0.0 {
                    preds[j].push(i);
                }
            }
        }
        let mut seen = vec![false; size];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(j) = stack.pop() {
            for &i in &preds[j] {
                if !seen[i] {
                    seen[i] = true;
                    stack.push(i);
                }
            }
        }
        seen
    }
}

/// Gaussian elimination with partial pivoting on an `m x (m + 1)` augmented
/// matrix. `None` if the system is singular.
fn solve_dense(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let m = a.len();
    for col in 0..m {
        let pivot = (col..m).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        let (top, rest) = a.split_at_mut(col + 1);
        let prow = &top[col];
        for row in rest.iter_mut() {
            let f = row[col] / prow[col];
            if f != 0.0 {
                for k in col..=m {
                    row[k] -= f * prow[k];
                }
            }
        }
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let s: f64 = ((i + 1)..m).map(|k| a[i][k] * x[k]).sum();
        x[i] = (a[i][m] - s) / a[i][i];
    }
    Some(x)
}
