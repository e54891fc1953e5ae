//! Exact binary floating values `mantissa * 2^exponent` with directed rounding.
//!
//! Every interval endpoint in [`CertifiedReal`](super::CertifiedReal) is a
//! `Dyadic`. Arithmetic on dyadics is exact; precision is only lost through
//! the explicit `round_*` / `*_round` helpers, which always take a
//! [`Rounding`] direction.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction for inexact operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    Down,
    Up,
}

impl Rounding {
    pub fn flip(self) -> Self {
        match self {
            Rounding::Down => Rounding::Up,
            Rounding::Up => Rounding::Down,
        }
    }
}

/// `floor(n / 2^k)` for any sign of `n`.
pub(crate) fn shr_floor(n: &BigInt, k: u64) -> BigInt {
    if k == 0 {
        return n.clone();
    }
    let d = BigInt::one() << k;
    n.div_floor(&d)
}

pub(crate) fn shr_round(n: &BigInt, k: u64, dir: Rounding) -> BigInt {
    match dir {
        Rounding::Down => shr_floor(n, k),
        Rounding::Up => -shr_floor(&-n, k),
    }
}

pub(crate) fn div_round_int(n: &BigInt, d: &BigInt, dir: Rounding) -> BigInt {
    match dir {
        Rounding::Down => n.div_floor(d),
        Rounding::Up => -((-n).div_floor(d)),
    }
}

/// An exact value `mant * 2^exp`, kept normalised (odd mantissa, or zero with exponent 0).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic::new(n.into(), 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// `floor(log2 |x|)` for nonzero `x`.
    pub fn magnitude_log2(&self) -> i64 {
        self.exp + self.mant.bits() as i64 - 1
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    pub fn mul_int(&self, n: &BigInt) -> Dyadic {
        Dyadic::new(&self.mant * n, self.exp)
    }

    /// Half of `self`, exact.
    pub fn half(&self) -> Dyadic {
        self.mul_pow2(-1)
    }

    /// Round to at most `prec` significant bits in direction `dir`.
    pub fn round(&self, prec: u32, dir: Rounding) -> Dyadic {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = bits - prec as u64;
        Dyadic::new(shr_round(&self.mant, shift, dir), self.exp + shift as i64)
    }

    /// Round to a multiple of `2^-frac_bits` in direction `dir`.
    pub fn round_fixed(&self, frac_bits: u64, dir: Rounding) -> Dyadic {
        let target = -(frac_bits as i64);
        if self.exp >= target {
            return self.clone();
        }
        let shift = (target - self.exp) as u64;
        Dyadic::new(shr_round(&self.mant, shift, dir), target)
    }

    /// Fixed-point integer `round(self * 2^frac_bits)` in direction `dir`.
    pub fn to_fixed(&self, frac_bits: u64, dir: Rounding) -> BigInt {
        let shift = self.exp + frac_bits as i64;
        if shift >= 0 {
            &self.mant << shift as u64
        } else {
            shr_round(&self.mant, (-shift) as u64, dir)
        }
    }

    pub fn from_fixed(n: BigInt, frac_bits: u64) -> Dyadic {
        Dyadic::new(n, -(frac_bits as i64))
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            shr_floor(&self.mant, (-self.exp) as u64)
        }
    }

    pub fn ceil(&self) -> BigInt {
        -self.neg().floor()
    }

    pub fn is_integer(&self) -> bool {
        self.exp >= 0 || self.is_zero()
    }

    /// Quotient `self / other` rounded to `prec` significant bits.
    pub fn div_round(&self, other: &Dyadic, prec: u32, dir: Rounding) -> Dyadic {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let na = self.mant.bits() as i64;
        let nb = other.mant.bits() as i64;
        let k = (prec as i64 + nb - na + 2).max(0) as u64;
        let num = &self.mant << k;
        let q = div_round_int(&num, &other.mant, dir);
        Dyadic::new(q, self.exp - other.exp - k as i64).round(prec, dir)
    }

    /// Square root of a non-negative value rounded to `prec` significant bits.
    pub fn sqrt_round(&self, prec: u32, dir: Rounding) -> Dyadic {
        assert!(!self.is_negative(), "square root of a negative dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let want = 2 * prec as i64 + 4;
        let mut shift = (want - self.mant.bits() as i64).max(0);
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let n = &self.mant << shift as u64;
        let r = n.sqrt();
        let r = if dir == Rounding::Up && &r * &r != n { r + 1 } else { r };
        Dyadic::new(r, (self.exp - shift) / 2).round(prec, dir)
    }

    /// Rational value `p/q` rounded to `prec` bits.
    pub fn from_rational(r: &BigRational, prec: u32, dir: Rounding) -> Dyadic {
        Dyadic::from_int(r.numer().clone()).div_round(&Dyadic::from_int(r.denom().clone()), prec, dir)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let shift = (bits - 60).max(0);
        let m = shr_floor(&self.mant, shift as u64).to_f64().unwrap_or(f64::NAN);
        let e = self.exp + shift;
        if e > 2000 {
            return m.signum() * f64::INFINITY;
        }
        if e < -2000 {
            return 0.0;
        }
        let h = (e / 2) as i32;
        m * 2f64.powi(h) * 2f64.powi(e as i32 - h)
    }

    /// Exact conversion from a finite `f64`.
    pub fn from_f64(x: f64) -> Option<Dyadic> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Dyadic::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = (bits & ((1u64 << 52) - 1)) as i64;
        let (m, e) = if raw_exp == 0 { (frac, -1074) } else { (frac | (1 << 52), raw_exp - 1075) };
        Some(Dyadic::new(BigInt::from(sign * m), e))
    }

    /// Scientific decimal string with `digits` significant digits, rounded in direction `dir`.
    pub fn to_sci_string(&self, digits: usize, dir: Rounding) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        // decimal exponent estimate from the binary magnitude
        let mag10 = (self.magnitude_log2() as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let scale = digits as i64 - 1 - mag10;
        let mut q = self.scaled_decimal(scale, dir);
        let mut scale = scale;
        let limit = BigInt::from(10u32).pow(digits as u32);
        while q.abs() >= limit {
            scale -= 1;
            q = self.scaled_decimal(scale, dir);
        }
        let neg = q.is_negative();
        let s = q.abs().to_string();
        let e10 = s.len() as i64 - 1 - scale;
        let (head, tail) = s.split_at(1);
        let tail = tail.trim_end_matches('0');
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(head);
        if !tail.is_empty() {
            out.push('.');
            out.push_str(tail);
        }
        if e10 != 0 {
            out.push_str(&format!("e{e10}"));
        }
        out
    }

    /// `round(self * 10^scale)` in direction `dir`.
    fn scaled_decimal(&self, scale: i64, dir: Rounding) -> BigInt {
        let ten = BigInt::from(10u32);
        let (mut num, mut den) = (self.mant.clone(), BigInt::one());
        if scale >= 0 {
            num *= ten.pow(scale as u32);
        } else {
            den *= ten.pow((-scale) as u32);
        }
        if self.exp >= 0 {
            num <<= self.exp as u64;
        } else {
            den <<= (-self.exp) as u64;
        }
        div_round_int(&num, &den, dir)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.sub(other).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mant, self.exp)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci_string(20, Rounding::Down))
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::from_int(n)
    }
}

impl From<BigInt> for Dyadic {
    fn from(n: BigInt) -> Self {
        Dyadic::from_int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifts_floor_for_negatives() {
        assert_eq!(shr_floor(&BigInt::from(-5), 1), BigInt::from(-3));
        assert_eq!(shr_round(&BigInt::from(-5), 1, Rounding::Up), BigInt::from(-2));
        assert_eq!(shr_round(&BigInt::from(5), 1, Rounding::Up), BigInt::from(3));
    }

    #[test]
    fn normalises_and_compares() {
        let a = Dyadic::new(BigInt::from(12), 0);
        assert_eq!(a.mantissa(), &BigInt::from(3));
        assert_eq!(a.exponent(), 2);
        assert!(Dyadic::from_int(3) < Dyadic::new(BigInt::from(7), -1));
        assert_eq!(Dyadic::new(BigInt::from(-7), -1).floor(), BigInt::from(-4));
        assert_eq!(Dyadic::new(BigInt::from(-7), -1).ceil(), BigInt::from(-3));
    }

    #[test]
    fn directed_division_brackets_one_third() {
        let one = Dyadic::one();
        let three = Dyadic::from_int(3);
        let lo = one.div_round(&three, 64, Rounding::Down);
        let hi = one.div_round(&three, 64, Rounding::Up);
        assert!(lo < hi);
        assert!(lo.mul(&three) < one);
        assert!(hi.mul(&three) > one);
    }

    #[test]
    fn sqrt_brackets_two() {
        let two = Dyadic::from_int(2);
        let lo = two.sqrt_round(100, Rounding::Down);
        let hi = two.sqrt_round(100, Rounding::Up);
        assert!(lo.mul(&lo) < two && hi.mul(&hi) > two);
        assert_eq!(Dyadic::from_int(9).sqrt_round(10, Rounding::Up), Dyadic::from_int(3));
    }

    #[test]
    fn decimal_strings() {
        assert_eq!(Dyadic::from_int(1000).to_sci_string(5, Rounding::Down), "1e3");
        assert_eq!(Dyadic::new(BigInt::from(5), -1).to_sci_string(5, Rounding::Down), "2.5");
        let third_lo = Dyadic::one().div_round(&Dyadic::from_int(3), 80, Rounding::Down);
        assert_eq!(third_lo.to_sci_string(4, Rounding::Down), "3.333e-1");
        assert_eq!(third_lo.to_sci_string(4, Rounding::Up), "3.334e-1");
        assert_eq!(Dyadic::from_int(-999).to_sci_string(2, Rounding::Down), "-1e3");
    }

    #[test]
    fn f64_round_trip() {
        for x in [0.1f64, -3.75, 1e300, 5e-324] {
            assert_eq!(Dyadic::from_f64(x).unwrap().to_f64(), x);
        }
    }
}
