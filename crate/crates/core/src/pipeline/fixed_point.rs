//! Resolving `n < C (log n)^k` into an explicit `n < N*`.

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::scalar::Real;
use crate::error::{Error, Result};

/// Iteration cap for the monotone fixed-point iteration.
pub const MAX_ITERATIONS: usize = 10_000;

fn rhs<R: Real>(c: &R, k: u32, n: &BigInt) -> Result<R> {
    let l = R::from_bigint(n).ln()?;
    Ok(c.clone() * l.powi(k as i64)?)
}

/// `N*` with `n < C (log n)^k  =>  n < N*` for every integer `n >= 1`.
///
/// `h(n) = C (log n)^k / n` decreases on `[e^k, ∞)`, so the iteration
/// `N <- ceil(C (log N)^k)` is started at `max(3, ceil(e^k))` and climbs
/// monotonically to the last crossing. On exit `C (log N*)^k <= N*` holds
/// for the whole enclosure of the right-hand side.
pub fn solve_fixed_point<R: Real>(c: &R, k: u32) -> Result<BigInt> {
    if !c.certainly_positive() {
        return Err(Error::Domain(format!("C = {:?} must be positive", c)));
    }
    if k == 0 {
        return c.ceil_upper().map(|n| n.max(BigInt::one()));
    }
    let seed = R::from_i64(k as i64).exp().ceil_upper()?.max(BigInt::from(3));
    let mut n = seed;
    for _ in 0..MAX_ITERATIONS {
        let next = rhs(c, k, &n)?.ceil_upper()?;
        if next <= n {
            return verify_fixed_point(c, k, &n).map(|_| n);
        }
        n = next;
    }
    Err(Error::NonConvergence(format!(
        "no fixed point of n = C (log n)^{k} after {MAX_ITERATIONS} steps (last iterate has {} digits)",
        n.to_string().len()
    )))
}

/// Certified check that `N` closes the bound: `N >= e^k` and `C (log N)^k <= N`.
pub fn verify_fixed_point<R: Real>(c: &R, k: u32, n: &BigInt) -> Result<()> {
    if k == 0 {
        return if c.certainly_le(&R::from_bigint(n)) {
            Ok(())
        } else {
            Err(Error::HypothesisViolation(format!("{n} is below C")))
        };
    }
    let nn = R::from_bigint(n);
    if !R::from_i64(k as i64).exp().certainly_le(&nn) {
        return Err(Error::HypothesisViolation(format!("{n} is below e^{k}")));
    }
    let value = rhs(c, k, n)?;
    if !value.certainly_le(&nn) {
        return Err(Error::HypothesisViolation(format!(
            "C (log N)^{k} = {:.6e} exceeds N = {n}",
            value.approx()
        )));
    }
    Ok(())
}

/// Lossy float view of a bound, for tests.
#[cfg(test)]
pub(crate) fn to_f64_lossy(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::INFINITY)
}
