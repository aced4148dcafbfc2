//! Small numerical toolkit: log-factorials, adaptive Simpson quadrature,
//! bisection and harmonic numbers.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_FACT_TABLE_LEN: usize = 257;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(LN_FACT_TABLE_LEN);
        let mut acc = 0.0_f64;
        table.push(0.0);
        for i in 1..LN_FACT_TABLE_LEN {
            acc += (i as f64).ln();
            table.push(acc);
        }
        table
    })
}

/// `ln(n!)`, tabulated for small `n` and from the Stirling series above.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < LN_FACT_TABLE_LEN {
        return ln_fact_table()[n as usize];
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Stirling with three correction terms; error below 1e-17 relative for n > 256.
    (x + 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    if k <= 32 {
        let base = (n - k) as f64;
        (1..=k).map(|j| ((base + j as f64) / j as f64).ln()).sum()
    } else {
        ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
    }
}

/// Harmonic number `H_m`. Direct summation up to 10^7, asymptotic expansion above.
pub fn harmonic(m: u64) -> f64 {
    const DIRECT_LIMIT: u64 = 10_000_000;
    if m <= DIRECT_LIMIT {
        // smallest terms first
        (1..=m).rev().map(|i| 1.0 / i as f64).sum()
    } else {
        let x = m as f64;
        let inv2 = 1.0 / (x * x);
        x.ln() + EULER_GAMMA + 0.5 / x - inv2 / 12.0 + inv2 * inv2 / 120.0
    }
}

/// `ln P(Z = z)` for `Z ~ Hypergeometric(population n, successes d, draws r)`.
/// `-inf` outside the support.
pub fn ln_hypergeometric_pmf(n: u64, d: u64, r: u64, z: u64) -> f64 {
    if z > d || z > r || r - z > n - d {
        return f64::NEG_INFINITY;
    }
    ln_binomial(d, z) + ln_binomial(n - d, r - z) - ln_binomial(n, r)
}

const SIMPSON_MIN_DEPTH: u32 = 4;

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Every panel is split at least [`SIMPSON_MIN_DEPTH`] times before the
/// Richardson acceptance test applies, so integrands concentrated near one
/// end are not accepted from a coarse first estimate. Exceeding `max_depth`
/// yields [`Error::QuadratureNonConvergence`].
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 0, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    max_depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth >= SIMPSON_MIN_DEPTH && delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= max_depth {
        return Err(Error::QuadratureNonConvergence { a, b });
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth)?;
    Ok(l + r)
}

/// Bisection for a root of `f` in `[lo, hi]`.
///
/// The caller guarantees `f(lo)` and `f(hi)` have opposite signs. Only the
/// sign of `f` is used. Returns the bracket midpoint once `hi - lo < tol`.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let lo_positive = f(lo) > 0.0;
    for _ in 0..max_iter {
        if hi - lo < tol {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo < tol {
        Ok(0.5 * (lo + hi))
    } else {
        Err(Error::BisectionLimit(max_iter))
    }
}
