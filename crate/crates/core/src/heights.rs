//! Real quadratic numbers and their logarithmic heights.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::expr::Expr;
use crate::arith::real::CertifiedReal;
use crate::arith::scalar::Real;
use crate::error::{Error, Result};
use crate::recurrence::BinaryRecurrence;

/// `x + y·√d` with `d` squarefree and `d >= 2`, or a rational (`y = 0`).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadraticNumber {
    #[serde(with = "crate::decimal::rational")]
    x: BigRational,
    #[serde(with = "crate::decimal::rational")]
    y: BigRational,
    #[serde(with = "crate::decimal::int")]
    d: BigInt,
}

fn squarefree_split(d: &BigInt) -> (BigInt, BigInt) {
    // d = k^2 * m with m squarefree; trial division is fine for discriminants
    let mut m = d.clone();
    let mut k = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let pp = &p * &p;
        while (&m % &pp).is_zero() {
            m /= &pp;
            k *= &p;
        }
        p += 1;
    }
    (k, m)
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

impl QuadraticNumber {
    /// `x + y·√d`; `d` must be positive.
    pub fn new(x: BigRational, y: BigRational, d: impl Into<BigInt>) -> Result<Self> {
        let d = d.into();
        if !d.is_positive() {
            return Err(Error::Domain(format!("radicand {d} must be positive")));
        }
        let (k, m) = squarefree_split(&d);
        let mut y = y * BigRational::from_integer(k);
        let mut x = x;
        let mut d = m;
        if d.is_one() {
            x += &y;
            y = BigRational::zero();
        }
        if y.is_zero() {
            d = BigInt::one();
        }
        Ok(QuadraticNumber { x, y, d })
    }

    pub fn rational(x: BigRational) -> Self {
        QuadraticNumber { x, y: BigRational::zero(), d: BigInt::one() }
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Self::rational(rat(n))
    }

    /// `√n` for a positive integer `n`.
    pub fn sqrt_of(n: impl Into<BigInt>) -> Result<Self> {
        Self::new(BigRational::zero(), BigRational::one(), n)
    }

    pub fn x(&self) -> &BigRational {
        &self.x
    }

    pub fn y(&self) -> &BigRational {
        &self.y
    }

    /// Squarefree radicand, `1` for rationals.
    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn degree(&self) -> u32 {
        if self.is_rational() {
            1
        } else {
            2
        }
    }

    pub fn conjugate(&self) -> Self {
        QuadraticNumber { x: self.x.clone(), y: -self.y.clone(), d: self.d.clone() }
    }

    /// `x^2 - d y^2`.
    pub fn norm(&self) -> BigRational {
        &self.x * &self.x - &self.y * &self.y * BigRational::from_integer(self.d.clone())
    }

    pub fn trace(&self) -> BigRational {
        &self.x * rat(2)
    }

    fn field(&self, other: &Self) -> Result<BigInt> {
        match (self.is_rational(), other.is_rational()) {
            (true, _) => Ok(other.d.clone()),
            (_, true) => Ok(self.d.clone()),
            _ if self.d == other.d => Ok(self.d.clone()),
            _ => Err(Error::Domain(format!("mixing Q(sqrt {}) and Q(sqrt {})", self.d, other.d))),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let d = self.field(other)?;
        Self::new(&self.x + &other.x, &self.y + &other.y, d)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        QuadraticNumber { x: -self.x.clone(), y: -self.y.clone(), d: self.d.clone() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let d = self.field(other)?;
        let dr = BigRational::from_integer(d.clone());
        let x = &self.x * &other.x + &self.y * &other.y * dr;
        let y = &self.x * &other.y + &self.y * &other.x;
        Self::new(x, y, d)
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let n = self.norm();
        let c = self.conjugate();
        Self::new(c.x / &n, c.y / &n, self.d.clone())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.recip()?)
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.recip()?.pow(-n);
        }
        let mut acc = Self::integer(1);
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Primitive integer minimal polynomial, constant term first, positive leading coefficient.
    pub fn minimal_polynomial(&self) -> Vec<BigInt> {
        let coeffs = if self.is_rational() {
            vec![-self.x.clone(), BigRational::one()]
        } else {
            vec![self.norm(), -self.trace(), BigRational::one()]
        };
        let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        ints.into_iter().map(|c| c / &g).collect()
    }

    /// Symbolic form, for evaluation at any precision.
    pub fn to_expr(&self) -> Expr {
        let x = Expr::rational(self.x.clone());
        if self.is_rational() {
            return x;
        }
        let y = Expr::rational(self.y.clone()).mul(Expr::int(self.d.clone()).sqrt());
        if self.x.is_zero() {
            y
        } else {
            x.add(y)
        }
    }

    pub fn eval(&self, prec: u32) -> Result<CertifiedReal> {
        self.to_expr().eval(prec)
    }

    /// Value in any scalar type.
    pub fn value<R: Real>(&self) -> Result<R> {
        let x = R::from_rational(&self.x);
        if self.is_rational() {
            return Ok(x);
        }
        Ok(x + R::from_rational(&self.y) * R::from_bigint(&self.d).sqrt()?)
    }

    /// Both real embeddings (one for rationals).
    pub fn embeddings<R: Real>(&self) -> Result<Vec<R>> {
        if self.is_rational() {
            Ok(vec![self.value()?])
        } else {
            Ok(vec![self.value()?, self.conjugate().value()?])
        }
    }

    pub fn is_root_of_unity(&self) -> bool {
        // real roots of unity are +-1
        self.is_rational() && self.x.abs().is_one()
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

impl fmt::Debug for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadraticNumber({self})")
    }
}

/// Absolute logarithmic height `h(q)`.
pub fn log_height<R: Real>(q: &QuadraticNumber) -> Result<R> {
    if q.is_zero() {
        return Err(Error::ZeroInput);
    }
    let poly = q.minimal_polynomial();
    let lead = poly.last().unwrap().abs();
    if q.is_rational() {
        // h(p/q) = log max(|p|, |q|)
        let m = q.x.numer().abs().max(q.x.denom().clone());
        return R::from_bigint(&m).ln();
    }
    let one = R::from_i64(1);
    let mut sum = R::from_bigint(&lead).ln()?;
    for c in q.embeddings::<R>()? {
        sum = sum + c.abs().max_of(&one).ln()?;
    }
    sum.quotient(&R::from_i64(q.degree() as i64))
}

/// Lower bound for heights of quadratic numbers that are not roots of unity.
pub const PINK_ZIEGLER_FLOOR: f64 = 0.24;

/// Whether `h(q) >= 0.24` holds with certainty, or `q` is a root of unity.
pub fn pink_ziegler_floor(q: &QuadraticNumber) -> Result<bool> {
    if q.is_root_of_unity() {
        return Ok(true);
    }
    let h: CertifiedReal = log_height(q)?;
    let floor = CertifiedReal::from_ratio(24, 100, h.precision());
    Ok(floor.certainly_le(&h))
}

/// Which upper bound on the height of the composite logarithm base a step used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gamma3HeightBound {
    /// `A(i) = 2h(a) + log Δ + 2(Σ gaps) log|α| + i log 4`.
    LemmaAi,
    /// `2(h(b_s √Δ / a) + Σ gaps·h(α) + log i)`, from subadditivity of `h`.
    Direct,
    /// `2(h(a b_s) + 2 log Δ)`: twice the coarse bound `h(γ) <= h(a b_s) + 2 log Δ`.
    Coarse,
}

impl Gamma3HeightBound {
    pub fn name(&self) -> &'static str {
        match self {
            Gamma3HeightBound::LemmaAi => "lemma-a-of-i",
            Gamma3HeightBound::Direct => "direct-subadditive",
            Gamma3HeightBound::Coarse => "coarse",
        }
    }
}

/// `A(i)` for the `i = gaps.len() + 1` leading terms, with gaps `n_1 - n_j >= 0`.
pub fn a_of_i<R: Real>(rec: &BinaryRecurrence, gaps: &[R]) -> Result<R> {
    if gaps.iter().any(|g| g.is_negative()) {
        return Err(Error::Invalid("gaps n_1 - n_j must be non-negative".into()));
    }
    let i = gaps.len() as i64 + 1;
    let h_a: R = log_height(rec.a())?;
    let log_delta = R::from_bigint(rec.discriminant()).ln()?;
    let log_alpha = rec.alpha_value::<R>()?.abs().ln()?;
    let sum = gaps.iter().fold(R::from_i64(0), |acc, g| acc + g.clone());
    Ok(R::from_i64(2) * h_a + log_delta + R::from_i64(2) * sum * log_alpha + R::from_i64(i) * R::from_i64(4).ln()?)
}

/// Upper bound for `2h(γ)` where `γ = b_s a^{-1} √Δ (1 + α^{-g_2} + ... + α^{-g_i})^{-1}`.
pub fn gamma3_height_bound<R: Real>(
    kind: Gamma3HeightBound,
    rec: &BinaryRecurrence,
    b_s: u64,
    gaps: &[R],
) -> Result<R> {
    match kind {
        Gamma3HeightBound::LemmaAi => a_of_i(rec, gaps),
        Gamma3HeightBound::Direct => {
            let root = QuadraticNumber::sqrt_of(rec.discriminant().clone())?;
            let lead = QuadraticNumber::integer(b_s).mul(&root)?.div(rec.a())?;
            let h_alpha: R = log_height(rec.alpha())?;
            let sum = gaps.iter().fold(R::from_i64(0), |acc, g| acc + g.clone());
            let i = gaps.len() as i64 + 1;
            let inner = log_height::<R>(&lead)? + sum * h_alpha + R::from_i64(i).ln()?;
            Ok(R::from_i64(2) * inner)
        }
        Gamma3HeightBound::Coarse => {
            let ab = rec.a().mul(&QuadraticNumber::integer(b_s))?;
            let h: R = log_height(&ab)?;
            let log_delta = R::from_bigint(rec.discriminant()).ln()?;
            Ok(R::from_i64(2) * (h + R::from_i64(2) * log_delta))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    fn phi() -> QuadraticNumber {
        QuadraticNumber::new(BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 2.into()), 5).unwrap()
    }

    #[test]
    fn normalisation() {
        let q = QuadraticNumber::sqrt_of(20).unwrap();
        assert_eq!(q.radicand(), &BigInt::from(5));
        assert_eq!(q.y(), &rat(2));
        let r = QuadraticNumber::sqrt_of(9).unwrap();
        assert!(r.is_rational());
        assert_eq!(r.x(), &rat(3));
    }

    #[test]
    fn minimal_polynomials() {
        assert_eq!(phi().minimal_polynomial(), vec![BigInt::from(-1), BigInt::from(-1), BigInt::from(1)]);
        let s5 = QuadraticNumber::sqrt_of(5).unwrap();
        assert_eq!(s5.minimal_polynomial(), vec![BigInt::from(-5), BigInt::from(0), BigInt::from(1)]);
        let q = QuadraticNumber::rational(BigRational::new(3.into(), 4.into()));
        assert_eq!(q.minimal_polynomial(), vec![BigInt::from(-3), BigInt::from(4)]);
    }

    #[test]
    fn height_examples() {
        let h2: CertifiedReal = log_height(&QuadraticNumber::integer(2)).unwrap();
        assert!((h2.to_f64() - std::f64::consts::LN_2).abs() < 1e-15);
        let hphi: CertifiedReal = log_height(&phi()).unwrap();
        assert!((hphi.to_f64() - 0.2406059125).abs() < 1e-9);
        let hs5: CertifiedReal = log_height(&QuadraticNumber::sqrt_of(5).unwrap()).unwrap();
        assert!((hs5.to_f64() - 0.5 * 5f64.ln()).abs() < 1e-15);
        assert!(hs5.certainly_lt(&CertifiedReal::from_ratio(81, 100, 64)));
        assert_eq!(log_height::<f64>(&QuadraticNumber::integer(0)), Err(Error::ZeroInput));
    }

    #[test]
    fn pink_ziegler() {
        assert!(pink_ziegler_floor(&phi()).unwrap());
        assert!(pink_ziegler_floor(&QuadraticNumber::integer(-1)).unwrap());
        assert!(pink_ziegler_floor(&QuadraticNumber::sqrt_of(5).unwrap()).unwrap());
    }

    #[test]
    fn arithmetic_in_the_field() {
        let p = phi();
        let p2 = p.mul(&p).unwrap();
        assert_eq!(p2, p.add(&QuadraticNumber::integer(1)).unwrap());
        let one = p.mul(&p.recip().unwrap()).unwrap();
        assert_eq!(one, QuadraticNumber::integer(1));
        assert!(p.add(&QuadraticNumber::sqrt_of(2).unwrap()).is_err());
        let v = p.eval(128).unwrap();
        assert!((v.to_f64() - 1.618033988749895).abs() < 1e-15);
        assert!(v.square().overlaps(&v.add(&CertifiedReal::from_int(1))));
    }
}
