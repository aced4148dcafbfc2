//! Expected one-step fitness gain of `flip_r` on OneMax.
//!
//! [`exact_drift`] is the hypergeometric expectation `B(n, d, r)` of the
//! clamped gain `max(0, 2Z - r)`, where `Z` counts flipped wrong bits.
//! [`approx_drift`] replaces the hypergeometric law by `Bin(r, p)`, giving
//! the `n`-independent curve `A(r, p, 1 - p)`.
//!
//! Both are summed outward from the distribution's mode with the pmf ratio
//! recurrence, so only one log-binomial is evaluated per call and tails far
//! below double precision are never visited. [`exact_drift_rational`] and
//! [`approx_drift_via_integral`] are independent routes used as oracles.

use std::cell::Cell;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, ln_binomial};

/// Exact rational drift value.
pub type ExactRational = BigRational;

/// Largest `n` accepted by [`exact_drift_rational`].
pub const EXACT_ORACLE_MAX_N: u64 = 60;

const INTEGRAL_TOL: f64 = 1e-10;
const INNER_INTEGRAL_TOL: f64 = 1e-13;
const SIMPSON_MAX_DEPTH: u32 = 60;
const TRUNCATION: f64 = 1e-18;

/// `sum_{i >= ceil(r/2)} pmf(i) * (2i - r)`, held as `exp(ln_scale) * sum`.
#[derive(Debug, Clone, Copy)]
struct ScaledSum {
    ln_scale: f64,
    sum: f64,
}

impl ScaledSum {
    const ZERO: ScaledSum = ScaledSum {
        ln_scale: 0.0,
        sum: 0.0,
    };

    fn ln_value(self) -> f64 {
        if self.sum <= 0.0 {
            f64::NEG_INFINITY
        } else {
            self.ln_scale + self.sum.ln()
        }
    }

    fn value(self) -> f64 {
        if self.sum <= 0.0 {
            0.0
        } else {
            self.ln_value().exp()
        }
    }
}

/// Positive-part gain expectation for a unimodal pmf on `[lo, hi]`.
///
/// `ratio(i)` must return `pmf(i + 1) / pmf(i)`.
fn gain_expectation(
    r: u64,
    lo: u64,
    hi: u64,
    mode: u64,
    ln_pmf: impl Fn(u64) -> f64,
    ratio: impl Fn(u64) -> f64,
) -> ScaledSum {
    let start = lo.max(r.div_ceil(2));
    if start > hi {
        return ScaledSum::ZERO;
    }
    let anchor = mode.clamp(start, hi);
    let weight = |i: u64| (2 * i) as f64 - r as f64;

    let mut sum = weight(anchor);
    // Upward: terms may grow at first (weights grow), then decay for good.
    let mut w = 1.0;
    let mut prev = sum;
    for i in anchor..hi {
        w *= ratio(i);
        if w == 0.0 {
            break;
        }
        let term = w * weight(i + 1);
        sum += term;
        if term < prev && term < TRUNCATION * sum {
            break;
        }
        prev = term;
    }
    // Downward: only from the mode, where both pmf and weight shrink.
    let mut w = 1.0;
    let mut i = anchor;
    while i > start {
        i -= 1;
        w /= ratio(i);
        let term = w * weight(i);
        sum += term;
        if term < TRUNCATION * sum {
            break;
        }
    }
    ScaledSum {
        ln_scale: ln_pmf(anchor),
        sum,
    }
}

fn hypergeometric_gain(n: u64, d: u64, r: u64) -> ScaledSum {
    let lo = (r + d).saturating_sub(n);
    let hi = r.min(d);
    let mode = (((r + 1) as u128 * (d + 1) as u128) / (n + 2) as u128) as u64;
    let ln_total = ln_binomial(n, r);
    gain_expectation(
        r,
        lo,
        hi,
        mode,
        |i| ln_binomial(d, i) + ln_binomial(n - d, r - i) - ln_total,
        |i| {
            ((d - i) as f64 * (r - i) as f64)
                / ((i + 1) as f64 * (n + i + 1 - d - r) as f64)
        },
    )
}

/// Binomial `Bin(r, s)` gain with `0 <= s <= 1`.
fn binomial_gain(r: u64, s: f64) -> ScaledSum {
    if r == 0 || s <= 0.0 {
        return ScaledSum::ZERO;
    }
    if s >= 1.0 {
        return ScaledSum {
            ln_scale: 0.0,
            sum: r as f64,
        };
    }
    let ln_s = s.ln();
    let ln_t = (-s).ln_1p();
    let odds = s / (1.0 - s);
    let mode = (((r + 1) as f64) * s).floor().min(r as f64) as u64;
    gain_expectation(
        r,
        0,
        r,
        mode,
        |i| ln_binomial(r, i) + i as f64 * ln_s + (r - i) as f64 * ln_t,
        |i| (r - i) as f64 / (i + 1) as f64 * odds,
    )
}

fn check_exact_args(n: u64, d: u64, r: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::ZeroProblemSize);
    }
    if d > n {
        return Err(Error::DistanceOutOfRange { d, n });
    }
    if r > n {
        return Err(Error::StrengthOutOfRange { r, n });
    }
    Ok(())
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            name,
            value,
            domain: "[0, 1]",
        })
    }
}

/// Exact expected fitness gain `B(n, d, r)` of flipping `r` uniformly chosen
/// bits of a OneMax point with `d` wrong bits, negative gains clamped to 0.
///
/// `d` is not folded: any `0 <= d <= n` evaluates the literal sum.
pub fn exact_drift(n: u64, d: u64, r: u64) -> Result<f64> {
    check_exact_args(n, d, r)?;
    Ok(hypergeometric_gain(n, d, r).value().clamp(0.0, r as f64))
}

/// Natural log of [`exact_drift`]; `-inf` when the drift is zero.
pub fn ln_exact_drift(n: u64, d: u64, r: u64) -> Result<f64> {
    check_exact_args(n, d, r)?;
    Ok(hypergeometric_gain(n, d, r).ln_value())
}

fn big_binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for j in 1..=k {
        acc *= BigUint::from(n - k + j);
        acc /= BigUint::from(j);
    }
    acc
}

/// `B(n, d, r)` as an exact fraction. Limited to `n <= 60`.
pub fn exact_drift_rational(n: u64, d: u64, r: u64) -> Result<ExactRational> {
    check_exact_args(n, d, r)?;
    if n > EXACT_ORACLE_MAX_N {
        return Err(Error::OracleLimit {
            n,
            limit: EXACT_ORACLE_MAX_N,
        });
    }
    let mut numer = BigUint::zero();
    for i in r.div_ceil(2)..=r.min(d) {
        let gain = 2 * i - r;
        if gain == 0 || r - i > n - d {
            continue;
        }
        numer += big_binomial(d, i) * big_binomial(n - d, r - i) * BigUint::from(gain);
    }
    Ok(BigRational::new(numer.into(), big_binomial(n, r).into()))
}

/// `A(r, p, 1 - p)`: the binomial approximation of the drift at relative
/// distance `p`.
pub fn approx_drift(r: u64, p: f64) -> Result<f64> {
    check_probability("p", p)?;
    Ok(binomial_gain(r, p).value().clamp(0.0, r as f64))
}

/// Natural log of [`approx_drift`]. Stays finite where the drift itself
/// underflows, which keeps curve comparisons meaningful for large `r`.
pub fn ln_approx_drift(r: u64, p: f64) -> Result<f64> {
    check_probability("p", p)?;
    Ok(binomial_gain(r, p).ln_value())
}

/// `A(r, p, q) = sum_{i >= ceil(r/2)} C(r, i) (2i - r) p^i q^(r-i)` for
/// independent non-negative weights `p`, `q`.
pub fn approx_drift_general(r: u64, p: f64, q: f64) -> Result<f64> {
    for (name, v) in [("p", p), ("q", q)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::OutOfDomain {
                name,
                value: v,
                domain: "[0, inf)",
            });
        }
    }
    let total = p + q;
    if r == 0 || p == 0.0 {
        return Ok(0.0);
    }
    // A(r, p, q) = (p + q)^r * A(r, s, 1 - s) with s = p / (p + q)
    let scaled = binomial_gain(r, p / total);
    if scaled.sum <= 0.0 {
        return Ok(0.0);
    }
    Ok((r as f64 * total.ln() + scaled.ln_value()).exp())
}

/// `c_k = 2 (2k - 1)(2k + 1) C(2k - 2, k - 1)` as an exact integer.
pub fn drift_constant_ck_exact(k: u64) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::ZeroIndex);
    }
    Ok(BigUint::from(2u32)
        * BigUint::from(2 * k - 1)
        * BigUint::from(2 * k + 1)
        * big_binomial(2 * k - 2, k - 1))
}

/// `c_k` as a float (`inf` once it exceeds the double range).
pub fn drift_constant_ck(k: u64) -> Result<f64> {
    Ok(drift_constant_ck_exact(k)?
        .to_f64()
        .unwrap_or(f64::INFINITY))
}

/// `c_{k+1} / c_k = (4k + 6) / k`.
pub fn drift_constant_ratio(k: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::ZeroIndex);
    }
    Ok((4 * k + 6) as f64 / k as f64)
}

/// Second derivative of `p -> A(2k + 1, p, 1 - p)`, which is
/// `c_k (p (1 - p))^(k - 1)`.
pub fn drift_second_derivative(k: u64, p: f64) -> Result<f64> {
    let ck = drift_constant_ck(k)?;
    check_probability("p", p)?;
    let pq = p * (1.0 - p);
    if k == 1 {
        return Ok(ck);
    }
    if ck.is_finite() {
        Ok(ck * pq.powi((k - 1) as i32))
    } else {
        let ln_ck = 2f64.ln()
            + ((2 * k - 1) as f64).ln()
            + ((2 * k + 1) as f64).ln()
            + ln_binomial(2 * k - 2, k - 1);
        Ok((ln_ck + (k - 1) as f64 * pq.ln()).exp())
    }
}

/// `A(2k + 1, p, 1 - p)` through its double-integral representation
/// `c_k ∫_0^p ∫_0^y x^(k-1) (1-x)^(k-1) dx dy`, evaluated by nested adaptive
/// Simpson quadrature.
pub fn approx_drift_via_integral(k: u64, p: f64) -> Result<f64> {
    let ck = drift_constant_ck(k)?;
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::OutOfDomain {
            name: "p",
            value: p,
            domain: "[0, 1/2]",
        });
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let power = (k - 1) as i32;
    let failure: Cell<Option<Error>> = Cell::new(None);
    let slope = |y: f64| -> f64 {
        match adaptive_simpson(
            |x| ck * (x * (1.0 - x)).powi(power),
            0.0,
            y,
            INNER_INTEGRAL_TOL,
            SIMPSON_MAX_DEPTH,
        ) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let outer = adaptive_simpson(slope, 0.0, p, INTEGRAL_TOL, SIMPSON_MAX_DEPTH);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    outer
}
