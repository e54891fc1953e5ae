//! The [`Real`] scalar abstraction.
//!
//! Bound formulas (Matveev constants, growth constants, the fixed-point
//! solve, the general bound chain) are written once against `Real` and
//! instantiated with `f64`/`f32` for quick estimates or with
//! [`CertifiedReal`] for certificates.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

use super::dyadic::Rounding;
use super::real::{CertifiedReal, RealRecord, DEFAULT_PRECISION};
use crate::error::{Error, Result};

pub trait Real: Num + Signed + Clone + Debug + Send + Sync + 'static {
    /// Whether values of this type carry rigorous error bounds.
    const CERTIFIED: bool;

    /// Short label recorded in ledgers.
    const NAME: &'static str;

    fn from_i64(n: i64) -> Self;
    fn from_bigint(n: &BigInt) -> Self;
    fn from_rational(r: &BigRational) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&BigRational::new(num.into(), den.into()))
    }

    fn ln(&self) -> Result<Self>;
    fn sqrt(&self) -> Result<Self>;
    fn exp(&self) -> Self;
    fn powi(&self, n: i64) -> Result<Self>;

    fn powr(&self, exponent: &Self) -> Result<Self> {
        Ok(exponent.clone().mul(self.ln()?).exp())
    }

    fn quotient(&self, other: &Self) -> Result<Self>;
    fn max_of(&self, other: &Self) -> Self;
    fn min_of(&self, other: &Self) -> Self;

    /// True only when every admissible value of `self` is below every value of `other`.
    fn certainly_lt(&self, other: &Self) -> bool;

    /// True only when every admissible value of `self` is at most every value of `other`.
    fn certainly_le(&self, other: &Self) -> bool;

    /// True when `self` is certainly strictly positive.
    fn certainly_positive(&self) -> bool {
        Self::from_i64(0).certainly_lt(self)
    }

    /// Smallest integer that is certainly `>= self`.
    fn ceil_upper(&self) -> Result<BigInt>;

    /// Largest integer that is certainly `<= self`.
    fn floor_lower(&self) -> Result<BigInt>;

    /// Approximate value for display and heuristics.
    fn approx(&self) -> f64;

    /// Outward-rounded decimal enclosure.
    fn record(&self) -> RealRecord;
}

impl Real for CertifiedReal {
    const CERTIFIED: bool = true;
    const NAME: &'static str = "certified";

    fn from_i64(n: i64) -> Self {
        CertifiedReal::from_int(n)
    }
    fn from_bigint(n: &BigInt) -> Self {
        CertifiedReal::from_int(n.clone())
    }
    fn from_rational(r: &BigRational) -> Self {
        CertifiedReal::from_rational(r, DEFAULT_PRECISION)
    }
    fn ln(&self) -> Result<Self> {
        CertifiedReal::ln(self)
    }
    fn sqrt(&self) -> Result<Self> {
        CertifiedReal::sqrt(self)
    }
    fn exp(&self) -> Self {
        CertifiedReal::exp(self)
    }
    fn powi(&self, n: i64) -> Result<Self> {
        CertifiedReal::powi(self, n)
    }
    fn powr(&self, exponent: &Self) -> Result<Self> {
        CertifiedReal::pow(self, exponent)
    }
    fn quotient(&self, other: &Self) -> Result<Self> {
        self.checked_div(other)
    }
    fn max_of(&self, other: &Self) -> Self {
        CertifiedReal::max(self, other)
    }
    fn min_of(&self, other: &Self) -> Self {
        CertifiedReal::min(self, other)
    }
    fn certainly_lt(&self, other: &Self) -> bool {
        CertifiedReal::certainly_lt(self, other)
    }
    fn certainly_le(&self, other: &Self) -> bool {
        CertifiedReal::certainly_le(self, other)
    }
    fn ceil_upper(&self) -> Result<BigInt> {
        Ok(self.hi().ceil())
    }
    fn floor_lower(&self) -> Result<BigInt> {
        Ok(self.lo().floor())
    }
    fn approx(&self) -> f64 {
        self.to_f64()
    }
    fn record(&self) -> RealRecord {
        self.to_record()
    }
}

macro_rules! impl_real_for_float {
    ($t:ty) => {
        impl Real for $t {
            const CERTIFIED: bool = false;
            const NAME: &'static str = stringify!($t);

            fn from_i64(n: i64) -> Self {
                n as $t
            }
            fn from_bigint(n: &BigInt) -> Self {
                n.to_f64().unwrap_or(f64::INFINITY) as $t
            }
            fn from_rational(r: &BigRational) -> Self {
                r.to_f64().unwrap_or(f64::NAN) as $t
            }
            fn ln(&self) -> Result<Self> {
                if *self <= 0.0 {
                    return Err(Error::Domain(format!("logarithm of {self}")));
                }
                Ok(<$t>::ln(*self))
            }
            fn sqrt(&self) -> Result<Self> {
                if *self < 0.0 {
                    return Err(Error::Domain(format!("square root of {self}")));
                }
                Ok(<$t>::sqrt(*self))
            }
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
            fn powi(&self, n: i64) -> Result<Self> {
                Ok(<$t>::powf(*self, n as $t))
            }
            fn powr(&self, exponent: &Self) -> Result<Self> {
                if *self <= 0.0 {
                    return Err(Error::Domain(format!("real power of {self}")));
                }
                Ok(<$t>::powf(*self, *exponent))
            }
            fn quotient(&self, other: &Self) -> Result<Self> {
                if *other == 0.0 {
                    return Err(Error::Domain("division by zero".into()));
                }
                Ok(*self / *other)
            }
            fn max_of(&self, other: &Self) -> Self {
                <$t>::max(*self, *other)
            }
            fn min_of(&self, other: &Self) -> Self {
                <$t>::min(*self, *other)
            }
            fn certainly_lt(&self, other: &Self) -> bool {
                *self < *other
            }
            fn certainly_le(&self, other: &Self) -> bool {
                *self <= *other
            }
            fn ceil_upper(&self) -> Result<BigInt> {
                BigInt::from_f64(<$t>::ceil(*self) as f64)
                    .ok_or_else(|| Error::Domain(format!("ceiling of {self}")))
            }
            fn floor_lower(&self) -> Result<BigInt> {
                BigInt::from_f64(<$t>::floor(*self) as f64)
                    .ok_or_else(|| Error::Domain(format!("floor of {self}")))
            }
            fn approx(&self) -> f64 {
                *self as f64
            }
            fn record(&self) -> RealRecord {
                match super::dyadic::Dyadic::from_f64(*self as f64) {
                    Some(d) => RealRecord::exact(d.to_sci_string(17, Rounding::Down)),
                    None => RealRecord::exact(format!("{self}")),
                }
            }
        }
    };
}

impl_real_for_float!(f64);
impl_real_for_float!(f32);

#[cfg(test)]
mod tests {
    use super::*;

    fn hypot_like<R: Real>(a: i64, b: i64) -> R {
        let s = R::from_i64(a * a) + R::from_i64(b * b);
        Real::sqrt(&s).unwrap()
    }

    #[test]
    fn generic_code_runs_on_all_scalars() {
        assert_eq!(hypot_like::<f64>(3, 4), 5.0);
        assert_eq!(hypot_like::<f32>(3, 4), 5.0);
        let c: CertifiedReal = hypot_like(3, 4);
        assert!(c.contains(&super::super::dyadic::Dyadic::from_int(5)));
    }

    #[test]
    fn float_domain_errors() {
        assert!(Real::ln(&0.0f64).is_err());
        assert!(Real::sqrt(&-1.0f64).is_err());
        assert!(Real::ln(&CertifiedReal::from_int(-2)).is_err());
    }
}
