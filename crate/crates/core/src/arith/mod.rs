//! Exact and certified arithmetic.

pub mod cfrac;
pub mod dyadic;
pub mod expr;
pub mod real;
pub mod scalar;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use dyadic::Dyadic;
use real::{CertifiedReal, DEFAULT_PRECISION, DEFAULT_PRECISION_CEILING};

/// Working precision schedule: start, double on `PrecisionExhausted`, stop at the ceiling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub start_bits: u32,
    pub ceiling_bits: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { start_bits: DEFAULT_PRECISION, ceiling_bits: DEFAULT_PRECISION_CEILING }
    }
}

impl PrecisionPolicy {
    pub fn with_ceiling(ceiling_bits: u32) -> Self {
        PrecisionPolicy { start_bits: DEFAULT_PRECISION.min(ceiling_bits), ceiling_bits }
    }

    /// The precisions tried, in order.
    pub fn schedule(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let mut p = self.start_bits.max(16);
        loop {
            out.push(p.min(self.ceiling_bits));
            if p >= self.ceiling_bits {
                break;
            }
            p = p.saturating_mul(2);
        }
        out
    }

    /// Run `f` at increasing precision until it stops reporting `PrecisionExhausted`.
    pub fn run<T>(&self, mut f: impl FnMut(u32) -> Result<T>) -> Result<T> {
        let mut last = None;
        for prec in self.schedule() {
            match f(prec) {
                Err(e) if e.is_precision() => last = Some(e),
                other => return other,
            }
        }
        Err(match last {
            Some(Error::PrecisionExhausted(msg)) => {
                Error::precision(format!("{msg} (ceiling {} bits reached)", self.ceiling_bits))
            }
            _ => Error::precision("empty precision schedule"),
        })
    }
}

/// `||x||`, the distance from `x` to the nearest integer.
///
/// The enclosure is exact in shape: the map is 1-Lipschitz, so near a
/// half-integer the result is clamped to `[.., 1/2]`.
pub fn nearest_int_distance(x: &CertifiedReal) -> Result<CertifiedReal> {
    let quarter = Dyadic::new(BigInt::from(1), -2);
    if x.radius() >= quarter {
        return Err(Error::precision(format!("interval {x} too wide for a nearest-integer distance")));
    }
    let half = Dyadic::new(BigInt::from(1), -1);
    let n = x.midpoint().add(&half).floor();
    let shift = CertifiedReal::from_int(n);
    let d = x.sub(&shift);
    let (lo, hi) = (d.lo().clone(), d.hi().clone());
    let prec = x.precision();
    if lo >= half.neg() && hi <= half {
        return Ok(d.abs());
    }
    // the interval crosses a half-integer: ||x|| is within the overshoot of 1/2
    let overshoot = if hi > half { hi.sub(&half) } else { half.neg().sub(&lo) };
    let inner = if hi > half { lo.abs() } else { hi.abs() };
    let low = inner.min(half.sub(&overshoot));
    Ok(CertifiedReal::from_bounds(low, half, prec))
}

/// Certified natural logarithm of a positive rational.
pub fn certified_log(x: &BigRational, prec: u32) -> Result<CertifiedReal> {
    if x <= &BigRational::from_integer(BigInt::from(0)) {
        return Err(Error::Domain(format!("logarithm of {x}")));
    }
    CertifiedReal::from_rational(x, prec + 8).ln().map(|r| r.with_precision(prec))
}

/// Certified square root of a non-negative rational.
pub fn certified_sqrt(x: &BigRational, prec: u32) -> Result<CertifiedReal> {
    if x < &BigRational::from_integer(BigInt::from(0)) {
        return Err(Error::Domain(format!("square root of {x}")));
    }
    CertifiedReal::from_rational(x, prec + 8).sqrt().map(|r| r.with_precision(prec))
}
