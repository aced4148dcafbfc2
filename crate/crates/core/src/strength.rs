//! Drift-maximizing mutation strengths.
//!
//! The exact maximizer `R_opt(d, n)` scans odd strengths of the hypergeometric
//! drift. The approximate maximizer `R~_opt,eps(p)` works on the binomial
//! curves `A(r, p, 1 - p)`; consecutive odd curves cross exactly once on
//! `(0, 1/2]` and the crossing points `R_r` increase with `r`, so the optimal
//! odd strength at `p` is the `r` whose interval `(R_{r-2}, R_r]` holds `p`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::drift::{approx_drift, exact_drift, ln_approx_drift};
use crate::error::{Error, Result};
use crate::numeric::bisect;

/// Default epsilon for strength queries.
pub const DEFAULT_EPSILON: f64 = 1e-3;

const BISECTION_TOL: f64 = 1e-12;
const BISECTION_MAX_ITER: usize = 200;
const CUTOFF_BRACKET_LOW: f64 = 0.25;

/// Width of the plateau `(1/2 - eps, 1/2]` where the approximate maximizer
/// stops optimizing. Always `0 < eps < 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Epsilon(f64);

impl Epsilon {
    pub fn new(eps: f64) -> Result<Self> {
        if eps > 0.0 && eps < 0.5 {
            Ok(Epsilon(eps))
        } else {
            Err(Error::InvalidEpsilon(eps))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `alpha = 2 ln(4 / (eps^2 (1/2 - eps)))`.
    pub fn alpha(self) -> f64 {
        let e = self.0;
        2.0 * (4.0 / (e * e * (0.5 - e))).ln()
    }

    /// Largest relative distance that is optimized exactly, `1/2 - eps`.
    pub fn plateau_start(self) -> f64 {
        0.5 - self.0
    }
}

impl Default for Epsilon {
    fn default() -> Self {
        Epsilon(DEFAULT_EPSILON)
    }
}

impl TryFrom<f64> for Epsilon {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Epsilon::new(value)
    }
}

impl From<Epsilon> for f64 {
    fn from(eps: Epsilon) -> f64 {
        eps.0
    }
}

/// `ceil(2 alpha / eps^2)`: no strength at or above this bound can maximize
/// the drift at relative distances up to `1/2 - eps`.
pub fn search_bound(eps: Epsilon) -> u64 {
    let bound = (2.0 * eps.alpha() / (eps.0 * eps.0)).ceil();
    if bound >= u64::MAX as f64 {
        u64::MAX
    } else {
        bound as u64
    }
}

/// Smallest maximizer of `exact_drift(n, d, r)` among `candidates`.
fn exact_argmax(n: u64, d: u64, candidates: impl Iterator<Item = u64>) -> Result<u64> {
    let mut best = (0u64, f64::NEG_INFINITY);
    for r in candidates {
        let v = exact_drift(n, d, r)?;
        if v > best.1 {
            best = (r, v);
        }
    }
    Ok(best.0)
}

/// `R_opt(d, n)`: the smallest strength maximizing the exact drift at
/// distance `0 < d <= n/2`.
///
/// Only odd strengths are scanned, up to `min(n, search_bound(1/2 - d/n))`.
pub fn r_opt_exact(n: u64, d: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroProblemSize);
    }
    if d == 0 || 2 * d > n {
        return Err(Error::DistanceOutOfRange { d, n });
    }
    let cap = if 2 * d == n {
        n
    } else {
        let eps = Epsilon::new(0.5 - d as f64 / n as f64)?;
        search_bound(eps).min(n)
    };
    exact_argmax(n, d, (1..=cap).step_by(2))
}

/// Smallest maximizer of the exact drift over every `r` in `[0..n]`, for any
/// `d`. No oddness or cap assumptions; `O(n)` drift evaluations.
pub fn r_opt_exact_full(n: u64, d: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroProblemSize);
    }
    if d > n {
        return Err(Error::DistanceOutOfRange { d, n });
    }
    exact_argmax(n, d, 0..=n)
}

/// `R~_opt,eps(p)`.
///
/// * `0 < p <= 1/2 - eps`: smallest odd `r` maximizing `A(r, p, 1 - p)`.
/// * `1/2 - eps < p <= 1/2`: the value at `1/2 - eps`.
/// * `p > 1/2`: `n`, which the caller must supply.
///
/// The result may exceed any particular problem size; callers simulating a
/// fixed `n` clamp it.
pub fn r_opt_approx(p: f64, eps: Epsilon, n: Option<u64>) -> Result<u64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::OutOfDomain {
            name: "p",
            value: p,
            domain: "(0, 1]",
        });
    }
    if p > 0.5 {
        return n.ok_or(Error::MissingProblemSize(p));
    }
    let p = p.min(eps.plateau_start());
    let cap = search_bound(eps);
    let max_k = (cap.saturating_sub(1)) / 2;

    // `peaked(k)`: A(2k+1) >= A(2k+3). False up to the optimum, true from it on.
    let peaked = |k: u64| -> Result<bool> {
        let r = 2 * k + 1;
        Ok(ln_approx_drift(r, p)? >= ln_approx_drift(r + 2, p)?)
    };
    if peaked(0)? {
        return Ok(1);
    }
    let mut lo = 0u64;
    let mut hi = 1u64;
    loop {
        if hi >= max_k {
            hi = max_k;
            if !peaked(hi)? {
                return Ok(2 * hi + 1);
            }
            break;
        }
        if peaked(hi)? {
            break;
        }
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if peaked(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(2 * hi + 1)
}

/// `A_max,eps(p) = A(R~_opt,eps(p), p, 1 - p)` for `0 < p <= 1/2`.
pub fn max_approx_drift(p: f64, eps: Epsilon) -> Result<f64> {
    if p > 0.5 {
        return Err(Error::OutOfDomain {
            name: "p",
            value: p,
            domain: "(0, 1/2]",
        });
    }
    let r = r_opt_approx(p, eps, None)?;
    approx_drift(r, p)
}

/// Crossing of two odd drift curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffPoint {
    pub r_low: u64,
    pub r_high: u64,
    /// Relative distance of the crossing.
    pub p0: f64,
    /// Common drift value at the crossing.
    pub a0: f64,
}

/// The unique `p0` in `(0, 1/2]` where `A(r_low, p0) = A(r_high, p0)`.
///
/// `A(r_low, p) > A(r_high, p)` holds exactly for `p < p0`.
pub fn cutoff_point(r_low: u64, r_high: u64) -> Result<CutoffPoint> {
    if r_low == 0 || r_low % 2 == 0 || r_high % 2 == 0 || r_low >= r_high {
        return Err(Error::InvalidStrengthPair {
            low: r_low,
            high: r_high,
        });
    }
    if (r_low, r_high) == (1, 3) {
        // A(1, p) = p and A(3, p) = 3 p^2
        return Ok(CutoffPoint {
            r_low,
            r_high,
            p0: 1.0 / 3.0,
            a0: 1.0 / 3.0,
        });
    }
    let gap = |p: f64| -> f64 {
        match (ln_approx_drift(r_low, p), ln_approx_drift(r_high, p)) {
            (Ok(a), Ok(b)) => a - b,
            _ => f64::NAN,
        }
    };
    let (lo, hi) = (CUTOFF_BRACKET_LOW, 0.5);
    if !(gap(lo) > 0.0 && gap(hi) < 0.0) {
        return Err(Error::NoSignChange {
            low: r_low,
            high: r_high,
            lo,
            hi,
        });
    }
    let p0 = bisect(gap, lo, hi, BISECTION_TOL, BISECTION_MAX_ITER)?;
    Ok(CutoffPoint {
        r_low,
        r_high,
        p0,
        a0: approx_drift(r_low, p0)?,
    })
}

/// Upper end `R_r` of the interval where flipping odd `r` bits is optimal,
/// i.e. the crossing of the `r` and `r + 2` curves. `R_1 = 1/3`.
pub fn interval_upper_end(r: u64) -> Result<f64> {
    if r % 2 == 0 {
        return Err(Error::EvenStrength(r));
    }
    Ok(cutoff_point(r, r + 2)?.p0)
}

/// `R_r` for every odd `r` in `rs`, computed in parallel.
pub fn interval_upper_ends(rs: &[u64]) -> Result<Vec<f64>> {
    rs.par_iter().map(|&r| interval_upper_end(r)).collect()
}

/// One row of the optimal-strength table: flipping `r` bits maximizes the
/// approximate drift for relative distances in `(lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrengthInterval {
    pub r: u64,
    pub lower: f64,
    pub upper: f64,
    pub drift_at_lower: f64,
    pub drift_at_upper: f64,
}

impl StrengthInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Optimal-strength intervals for odd `r = 3, 5, ..., max_r`. They tile
/// `(1/3, R_max_r]`; below `1/3` a single bit flip is optimal.
pub fn strength_intervals(max_r: u64) -> Result<Vec<StrengthInterval>> {
    if max_r % 2 == 0 {
        return Err(Error::EvenStrength(max_r));
    }
    if max_r < 3 {
        return Err(Error::InvalidStrengthPair {
            low: max_r,
            high: max_r + 2,
        });
    }
    let odd: Vec<u64> = (1..=max_r).step_by(2).collect();
    let ends = interval_upper_ends(&odd)?;
    ends.windows(2)
        .zip(odd.iter().skip(1))
        .map(|(w, &r)| {
            Ok(StrengthInterval {
                r,
                lower: w[0],
                upper: w[1],
                drift_at_lower: approx_drift(r, w[0])?,
                drift_at_upper: approx_drift(r, w[1])?,
            })
        })
        .collect()
}
