//! Certified real numbers: closed intervals with dyadic endpoints.
//!
//! A [`CertifiedReal`] always contains the true value it stands for. Every
//! operation rounds the lower endpoint down and the upper endpoint up, so
//! radii only ever grow. The `prec` field is the working precision (in
//! significant bits) used when rounding results; binary operations use the
//! larger precision of their operands.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::dyadic::{Dyadic, Rounding};
use crate::error::{Error, Result};

/// Starting working precision, in bits.
pub const DEFAULT_PRECISION: u32 = 192;
/// Default ceiling for precision escalation, in bits.
pub const DEFAULT_PRECISION_CEILING: u32 = 16384;

/// A real number known to lie in `[lo, hi]`.
#[derive(Clone, PartialEq, Eq)]
pub struct CertifiedReal {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl CertifiedReal {
    /// The interval `[lo, hi]`; panics if `lo > hi`.
    pub fn from_bounds(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        assert!(lo <= hi, "inverted interval [{lo:?}, {hi:?}]");
        CertifiedReal {
            lo: lo.round(prec, Rounding::Down),
            hi: hi.round(prec, Rounding::Up),
            prec,
        }
    }

    pub fn exact(d: Dyadic, prec: u32) -> Self {
        CertifiedReal::from_bounds(d.clone(), d, prec)
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        CertifiedReal::exact(Dyadic::from_int(n), DEFAULT_PRECISION)
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        if r.is_integer() {
            return CertifiedReal::exact(Dyadic::from_int(r.to_integer()), prec);
        }
        CertifiedReal {
            lo: Dyadic::from_rational(r, prec, Rounding::Down),
            hi: Dyadic::from_rational(r, prec, Rounding::Up),
            prec,
        }
    }

    pub fn from_ratio(num: i64, den: i64, prec: u32) -> Self {
        CertifiedReal::from_rational(&BigRational::new(num.into(), den.into()), prec)
    }

    /// Same interval, re-labelled with a new working precision.
    pub fn with_precision(&self, prec: u32) -> Self {
        CertifiedReal::from_bounds(self.lo.clone(), self.hi.clone(), prec)
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn midpoint(&self) -> Dyadic {
        self.lo.add(&self.hi).half()
    }

    /// Half-width of the interval, exact.
    pub fn radius(&self) -> Dyadic {
        self.hi.sub(&self.lo).half()
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    pub fn contains(&self, d: &Dyadic) -> bool {
        &self.lo <= d && d <= &self.hi
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        let lo = self.lo.to_rational();
        let hi = self.hi.to_rational();
        &lo <= r && r <= &hi
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &CertifiedReal) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn overlaps(&self, other: &CertifiedReal) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    /// Every point of `self` is strictly below every point of `other`.
    pub fn certainly_lt(&self, other: &CertifiedReal) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_le(&self, other: &CertifiedReal) -> bool {
        self.hi <= other.lo
    }

    fn prec_with(&self, other: &CertifiedReal) -> u32 {
        self.prec.max(other.prec)
    }

    pub fn neg(&self) -> CertifiedReal {
        CertifiedReal { lo: self.hi.neg(), hi: self.lo.neg(), prec: self.prec }
    }

    pub fn add(&self, other: &CertifiedReal) -> CertifiedReal {
        CertifiedReal::from_bounds(self.lo.add(&other.lo), self.hi.add(&other.hi), self.prec_with(other))
    }

    pub fn sub(&self, other: &CertifiedReal) -> CertifiedReal {
        CertifiedReal::from_bounds(self.lo.sub(&other.hi), self.hi.sub(&other.lo), self.prec_with(other))
    }

    pub fn mul(&self, other: &CertifiedReal) -> CertifiedReal {
        let products = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = products.iter().min().cloned().unwrap();
        let hi = products.iter().max().cloned().unwrap();
        CertifiedReal::from_bounds(lo, hi, self.prec_with(other))
    }

    pub fn mul_int(&self, n: &BigInt) -> CertifiedReal {
        self.mul(&CertifiedReal::exact(Dyadic::from_int(n.clone()), self.prec))
    }

    pub fn recip(&self) -> Result<CertifiedReal> {
        if self.contains_zero() {
            return Err(Error::precision(format!("reciprocal of an interval containing zero: {self}")));
        }
        let one = Dyadic::one();
        let prec = self.prec;
        Ok(CertifiedReal {
            lo: one.div_round(&self.hi, prec, Rounding::Down),
            hi: one.div_round(&self.lo, prec, Rounding::Up),
            prec,
        })
    }

    pub fn checked_div(&self, other: &CertifiedReal) -> Result<CertifiedReal> {
        if other.contains_zero() {
            return Err(Error::precision(format!("division by an interval containing zero: {other}")));
        }
        let prec = self.prec_with(other);
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&other.lo, &other.hi] {
                let l = a.div_round(b, prec, Rounding::Down);
                let h = a.div_round(b, prec, Rounding::Up);
                lo = Some(match lo {
                    Some(x) if x <= l => x,
                    _ => l,
                });
                hi = Some(match hi {
                    Some(x) if x >= h => x,
                    _ => h,
                });
            }
        }
        Ok(CertifiedReal { lo: lo.unwrap(), hi: hi.unwrap(), prec })
    }

    pub fn abs(&self) -> CertifiedReal {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let hi = self.lo.abs().max(self.hi.abs());
            CertifiedReal { lo: Dyadic::zero(), hi, prec: self.prec }
        }
    }

    pub fn max(&self, other: &CertifiedReal) -> CertifiedReal {
        CertifiedReal {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            prec: self.prec_with(other),
        }
    }

    pub fn min(&self, other: &CertifiedReal) -> CertifiedReal {
        CertifiedReal {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
            prec: self.prec_with(other),
        }
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &CertifiedReal) -> CertifiedReal {
        CertifiedReal {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            prec: self.prec_with(other),
        }
    }

    pub fn sqrt(&self) -> Result<CertifiedReal> {
        if self.lo.is_negative() {
            return Err(Error::Domain(format!("square root of {self}")));
        }
        Ok(CertifiedReal {
            lo: self.lo.sqrt_round(self.prec, Rounding::Down),
            hi: self.hi.sqrt_round(self.prec, Rounding::Up),
            prec: self.prec,
        })
    }

    /// Natural logarithm; the interval must be certified positive.
    pub fn ln(&self) -> Result<CertifiedReal> {
        if !self.lo.is_positive() {
            if self.hi.is_positive() {
                return Err(Error::precision(format!("logarithm of an interval touching zero: {self}")));
            }
            return Err(Error::Domain(format!("logarithm of non-positive value {self}")));
        }
        let (lo, _) = ln_bounds(&self.lo, self.prec);
        let (_, hi) = ln_bounds(&self.hi, self.prec);
        Ok(CertifiedReal::from_bounds(lo, hi, self.prec))
    }

    pub fn exp(&self) -> CertifiedReal {
        let (lo, _) = exp_bounds(&self.lo, self.prec);
        let (_, hi) = exp_bounds(&self.hi, self.prec);
        CertifiedReal::from_bounds(lo, hi, self.prec)
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, n: i64) -> Result<CertifiedReal> {
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        let mut result = CertifiedReal::exact(Dyadic::one(), self.prec);
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = CertifiedReal::mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        Ok(result)
    }

    /// `x^2`, tighter than `x*x` when the interval contains zero.
    pub fn square(&self) -> CertifiedReal {
        let a = self.abs();
        CertifiedReal::from_bounds(a.lo.mul(&a.lo), a.hi.mul(&a.hi), self.prec)
    }

    /// `self^exponent = exp(exponent * ln self)` for positive `self`.
    pub fn pow(&self, exponent: &CertifiedReal) -> Result<CertifiedReal> {
        Ok(exponent.mul(&self.ln()?).exp())
    }

    /// The floor, if it is the same integer for every point of the interval.
    pub fn floor(&self) -> Result<BigInt> {
        let a = self.lo.floor();
        let b = self.hi.floor();
        if a == b {
            Ok(a)
        } else {
            Err(Error::precision(format!("floor of {self} is ambiguous")))
        }
    }

    /// The unique integer in the interval, if there is exactly one.
    pub fn unique_integer(&self) -> Option<BigInt> {
        let c = self.lo.ceil();
        let f = self.hi.floor();
        if c == f {
            Some(c)
        } else {
            None
        }
    }

    /// Upper bound of the interval as an integer ceiling.
    pub fn ceil_upper(&self) -> BigInt {
        self.hi.ceil()
    }

    /// Decimal rendering of the midpoint with a rounded-up radius.
    pub fn to_record(&self) -> RealRecord {
        let digits = ((self.prec as f64) * std::f64::consts::LOG10_2).ceil() as usize;
        let digits = digits.clamp(6, 80);
        RealRecord {
            lo: self.lo.to_sci_string(digits, Rounding::Down),
            hi: self.hi.to_sci_string(digits, Rounding::Up),
        }
    }
}

/// Serialisable enclosure `[lo, hi]` with decimal endpoints rounded outward.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RealRecord {
    pub lo: String,
    pub hi: String,
}

impl RealRecord {
    pub fn exact(s: impl Into<String>) -> Self {
        let s = s.into();
        RealRecord { lo: s.clone(), hi: s }
    }

    /// Parse back to an exact rational enclosure.
    pub fn to_interval(&self) -> Result<(BigRational, BigRational)> {
        Ok((parse_decimal(&self.lo)?, parse_decimal(&self.hi)?))
    }
}

/// Parse `[-]digits[.digits][e[-]digits]` into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse { pos: 0, msg: format!("not a decimal number: {s:?}") };
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mantissa, exp10) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: String = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    Ok(if scale >= 0 {
        BigRational::from_integer(num * ten.pow(scale as u32))
    } else {
        BigRational::new(num, ten.pow((-scale) as u32))
    })
}

// ---------------------------------------------------------------------------
// Elementary functions on dyadic points.

/// Enclosure of `2·atanh(y)` where `y = num/den ∈ [0, 1/3]`, in fixed point with `w` fraction bits.
fn two_atanh_fixed(num: &BigInt, den: &BigInt, w: u64) -> (BigInt, BigInt) {
    let y_lo = (num << w) / den;
    let y_hi = if (&y_lo * den) == (num << w) { y_lo.clone() } else { &y_lo + 1 };
    let sq = |y: &BigInt, up: bool| {
        let p = y * y;
        let q = &p >> w;
        if up && (&q << w) != p {
            q + 1
        } else {
            q
        }
    };
    let y2_lo = sq(&y_lo, false);
    let y2_hi = sq(&y_hi, true);

    // lower sum: everything truncated downwards
    let mut sum_lo = BigInt::zero();
    let mut p = y_lo.clone();
    let mut k = 0u64;
    while !p.is_zero() {
        sum_lo += &p / BigInt::from(2 * k + 1);
        p = (&p * &y2_lo) >> w;
        k += 1;
    }

    // upper sum: rounded upwards, plus a geometric tail bound
    let mut sum_hi = BigInt::zero();
    let mut p = y_hi.clone();
    let mut k = 0u64;
    loop {
        let d = BigInt::from(2 * k + 1);
        sum_hi += (&p + &d - 1) / &d;
        let prod = &p * &y2_hi;
        let next = &prod >> w;
        p = if (&next << w) != prod { next + 1 } else { next };
        k += 1;
        if p <= BigInt::one() {
            // remaining terms sum to at most p * 1/(1 - y^2) <= 9/8 p
            sum_hi += &p * 2 + 2;
            break;
        }
    }
    (sum_lo * 2, sum_hi * 2)
}

fn ln2_fixed(w: u64) -> (BigInt, BigInt) {
    static CACHE: OnceLock<Mutex<HashMap<u64, (BigInt, BigInt)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&w) {
        return v.clone();
    }
    let v = two_atanh_fixed(&BigInt::one(), &BigInt::from(3), w);
    cache.lock().unwrap().insert(w, v.clone());
    v
}

/// Enclosure `(lo, hi)` of `ln x` for a positive dyadic `x`.
pub(crate) fn ln_bounds(x: &Dyadic, prec: u32) -> (Dyadic, Dyadic) {
    assert!(x.is_positive());
    if x == &Dyadic::one() {
        return (Dyadic::zero(), Dyadic::zero());
    }
    let bits = x.mantissa().bits();
    // x = m * 2^e with m = mant / 2^(bits-1) in [1, 2)
    let e = x.exponent() + bits as i64 - 1;
    let half = BigInt::one() << (bits - 1);
    let num = x.mantissa() - &half;
    let den = x.mantissa() + &half;
    let guard = 64 + (64 - e.unsigned_abs().leading_zeros()) as u64;
    let w = prec as u64 + guard;
    let (m_lo, m_hi) = if num.is_zero() { (BigInt::zero(), BigInt::zero()) } else { two_atanh_fixed(&num, &den, w) };
    let (l2_lo, l2_hi) = ln2_fixed(w);
    let eb = BigInt::from(e);
    let (t_lo, t_hi) = if e >= 0 { (&eb * &l2_lo, &eb * &l2_hi) } else { (&eb * &l2_hi, &eb * &l2_lo) };
    let lo = Dyadic::from_fixed(m_lo + t_lo, w).round(prec, Rounding::Down);
    let hi = Dyadic::from_fixed(m_hi + t_hi, w).round(prec, Rounding::Up);
    (lo, hi)
}

/// Enclosure `(lo, hi)` of `exp x` for a dyadic `x`.
pub(crate) fn exp_bounds(x: &Dyadic, prec: u32) -> (Dyadic, Dyadic) {
    if x.is_zero() {
        return (Dyadic::one(), Dyadic::one());
    }
    if x.is_negative() {
        let (lo, hi) = exp_bounds(&x.neg(), prec + 4);
        let one = Dyadic::one();
        return (one.div_round(&hi, prec, Rounding::Down), one.div_round(&lo, prec, Rounding::Up));
    }
    // reduce: r = x / 2^s with r < 2^-8
    let s = (x.magnitude_log2() + 9).max(0) as u64;
    let r = x.mul_pow2(-(s as i64));
    let w = prec as u64 + 2 * s + 64;
    let r_lo = r.to_fixed(w, Rounding::Down);
    let r_hi = r.to_fixed(w, Rounding::Up);
    let one = BigInt::one() << w;

    let series = |rr: &BigInt, up: bool| -> BigInt {
        let mut sum = one.clone();
        let mut term = one.clone();
        let mut k = 1u64;
        loop {
            let prod = &term * rr;
            let div = BigInt::one() << w;
            let kk = BigInt::from(k);
            let den = &div * &kk;
            term = if up { (&prod + &den - 1) / &den } else { &prod / &den };
            if term.is_zero() {
                break;
            }
            sum += &term;
            k += 1;
            if up && term <= BigInt::one() {
                // tail: r < 1/2 so remaining terms sum to < 2 * term
                sum += 2;
                break;
            }
        }
        sum
    };
    let mut lo = series(&r_lo, false);
    let mut hi = series(&r_hi, true);
    for _ in 0..s {
        lo = (&lo * &lo) >> w;
        let p = &hi * &hi;
        let q = &p >> w;
        hi = if (&q << w) != p { q + 1 } else { q };
    }
    (
        Dyadic::from_fixed(lo, w).round(prec, Rounding::Down),
        Dyadic::from_fixed(hi, w).round(prec, Rounding::Up),
    )
}

impl fmt::Display for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lo.to_sci_string(25, Rounding::Down))
        } else {
            let mid = self.midpoint();
            let rad = self.radius();
            write!(
                f,
                "{} ± {}",
                mid.to_sci_string(25, Rounding::Down),
                rad.to_sci_string(3, Rounding::Up)
            )
        }
    }
}

impl fmt::Debug for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CertifiedReal[{}, {}]@{}", self.lo, self.hi, self.prec)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait for CertifiedReal {
            type Output = CertifiedReal;
            fn $method(self, rhs: CertifiedReal) -> CertifiedReal {
                CertifiedReal::$inner(&self, &rhs)
            }
        }
        impl<'a> $trait<&'a CertifiedReal> for &'a CertifiedReal {
            type Output = CertifiedReal;
            fn $method(self, rhs: &'a CertifiedReal) -> CertifiedReal {
                CertifiedReal::$inner(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);

impl Div for CertifiedReal {
    type Output = CertifiedReal;
    /// Panics if the divisor contains zero; use [`CertifiedReal::checked_div`] otherwise.
    fn div(self, rhs: CertifiedReal) -> CertifiedReal {
        self.checked_div(&rhs).expect("certified division")
    }
}

impl<'a> Div<&'a CertifiedReal> for &'a CertifiedReal {
    type Output = CertifiedReal;
    fn div(self, rhs: &'a CertifiedReal) -> CertifiedReal {
        self.checked_div(rhs).expect("certified division")
    }
}

impl Neg for CertifiedReal {
    type Output = CertifiedReal;
    fn neg(self) -> CertifiedReal {
        CertifiedReal::neg(&self)
    }
}

impl Neg for &CertifiedReal {
    type Output = CertifiedReal;
    fn neg(self) -> CertifiedReal {
        CertifiedReal::neg(self)
    }
}

impl From<i64> for CertifiedReal {
    fn from(n: i64) -> Self {
        CertifiedReal::from_int(n)
    }
}

impl Signed for CertifiedReal {
    fn abs(&self) -> Self {
        CertifiedReal::abs(self)
    }
    fn abs_sub(&self, other: &Self) -> Self {
        let d = CertifiedReal::sub(self, other);
        CertifiedReal::max(&d, &CertifiedReal::from_int(0))
    }
    fn signum(&self) -> Self {
        if self.is_positive() {
            CertifiedReal::from_int(1)
        } else if self.is_negative() {
            CertifiedReal::from_int(-1)
        } else {
            CertifiedReal::exact(Dyadic::from_int(-1), self.prec)
                .hull(&CertifiedReal::exact(Dyadic::one(), self.prec))
        }
    }
    fn is_positive(&self) -> bool {
        CertifiedReal::is_positive(self)
    }
    fn is_negative(&self) -> bool {
        CertifiedReal::is_negative(self)
    }
}

impl num_traits::Num for CertifiedReal {
    type FromStrRadixErr = Error;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self> {
        if radix != 10 {
            return Err(Error::Invalid(format!("radix {radix} unsupported")));
        }
        Ok(CertifiedReal::from_rational(&parse_decimal(s)?, DEFAULT_PRECISION))
    }
}

impl std::ops::Rem for CertifiedReal {
    type Output = CertifiedReal;
    fn rem(self, rhs: CertifiedReal) -> CertifiedReal {
        let q = self.checked_div(&rhs).expect("certified remainder");
        let f = CertifiedReal::exact(Dyadic::from_int(q.lo.floor()), self.prec)
            .hull(&CertifiedReal::exact(Dyadic::from_int(q.hi.floor()), self.prec));
        CertifiedReal::sub(&self, &CertifiedReal::mul(&f, &rhs))
    }
}

impl Zero for CertifiedReal {
    fn zero() -> Self {
        CertifiedReal::from_int(0)
    }
    fn is_zero(&self) -> bool {
        self.is_exact() && self.lo.is_zero()
    }
}

impl One for CertifiedReal {
    fn one() -> Self {
        CertifiedReal::from_int(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> CertifiedReal {
        CertifiedReal::from_int(n)
    }

    #[test]
    fn ln_of_one_is_exactly_zero() {
        let l = r(1).ln().unwrap();
        assert!(l.is_exact());
        assert!(l.lo().is_zero());
    }

    #[test]
    fn ln3_default_precision() {
        let l = r(3).ln().unwrap();
        assert!((l.to_f64() - 3f64.ln()).abs() < 1e-15);
        let rad = l.radius();
        assert!(rad.to_f64() < 1e-30, "radius {}", rad.to_f64());
        // 1.0986122886681098 is the f64 nearest ln 3
        let ln3 = parse_decimal("1.098612288668109691395245236922525704647490557822749451734694333").unwrap();
        assert!(l.contains_rational(&ln3));
    }

    #[test]
    fn ln_of_small_and_large_values() {
        let x = CertifiedReal::from_ratio(1, 1000, 128);
        assert!((x.ln().unwrap().to_f64() - (0.001f64).ln()).abs() < 1e-14);
        let y = CertifiedReal::exact(Dyadic::from_int(BigInt::from(10).pow(40)), 128);
        assert!((y.ln().unwrap().to_f64() - 40.0 * 10f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn exp_and_ln_invert() {
        for x in [-20i64, -1, 1, 5, 50] {
            let v = CertifiedReal::from_int(x).with_precision(160);
            let back = v.exp().ln().unwrap();
            assert!(back.contains(&Dyadic::from_int(x)), "{x}: {back:?}");
            assert!(back.radius().to_f64() < 1e-40);
        }
        let e = r(1).exp();
        assert!((e.to_f64() - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn sqrt5_squares_back_to_five() {
        let s = r(5).sqrt().unwrap();
        let sq = CertifiedReal::mul(&s, &s);
        assert!(sq.contains(&Dyadic::from_int(5)));
    }

    #[test]
    fn division_and_floor() {
        let x = r(22).checked_div(&r(7)).unwrap();
        assert_eq!(x.floor().unwrap(), BigInt::from(3));
        assert!(r(1).checked_div(&r(0)).is_err());
        let straddle = CertifiedReal::from_bounds(Dyadic::new(BigInt::from(7), -1), Dyadic::from_int(4), 64);
        assert!(straddle.floor().unwrap_err().is_precision());
    }

    #[test]
    fn fractional_power() {
        let p = r(2).pow(&CertifiedReal::from_ratio(45, 100, 192)).unwrap();
        assert!((p.to_f64() - 2f64.powf(0.45)).abs() < 1e-14);
    }

    #[test]
    fn parse_decimal_forms() {
        assert_eq!(parse_decimal("9e30").unwrap(), BigRational::from_integer(BigInt::from(9) * BigInt::from(10).pow(30)));
        assert_eq!(parse_decimal("-0.25").unwrap(), BigRational::new((-1).into(), 4.into()));
        assert_eq!(parse_decimal("1.45e27").unwrap(), BigRational::from_integer(BigInt::from(145) * BigInt::from(10).pow(25)));
        assert!(parse_decimal("1.2.3").is_err());
        assert!(parse_decimal("").is_err());
    }
}
