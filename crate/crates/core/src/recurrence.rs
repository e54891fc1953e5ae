//! Binary recurrences `U_n = P U_{n-1} + Q U_{n-2}` and the data derived from them.

use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::arith::real::CertifiedReal;
use crate::arith::scalar::Real;
use crate::error::{Error, Result};
use crate::heights::QuadraticNumber;

/// A non-degenerate binary recurrence with positive discriminant.
///
/// `alpha` is the dominant root, so `U_n = (a α^n - b β^n)/(α - β)` with
/// `a = U_1 - U_0 β` and `b = U_1 - U_0 α`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RecurrenceSeed", into = "RecurrenceSeed")]
pub struct BinaryRecurrence {
    p: i64,
    q: i64,
    u0: i64,
    u1: i64,
    delta: BigInt,
    alpha: QuadraticNumber,
    beta: QuadraticNumber,
    a: QuadraticNumber,
    b: QuadraticNumber,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
struct RecurrenceSeed {
    p: i64,
    q: i64,
    u0: i64,
    u1: i64,
}

impl TryFrom<RecurrenceSeed> for BinaryRecurrence {
    type Error = Error;
    fn try_from(s: RecurrenceSeed) -> Result<Self> {
        BinaryRecurrence::new(s.p, s.q, s.u0, s.u1)
    }
}

impl From<BinaryRecurrence> for RecurrenceSeed {
    fn from(r: BinaryRecurrence) -> Self {
        RecurrenceSeed { p: r.p, q: r.q, u0: r.u0, u1: r.u1 }
    }
}

impl BinaryRecurrence {
    pub fn new(p: i64, q: i64, u0: i64, u1: i64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::DegenerateSpec(format!("P·Q must be nonzero (P = {p}, Q = {q})")));
        }
        if u0 == 0 && u1 == 0 {
            return Err(Error::DegenerateSpec("seeds U0 = U1 = 0 give the zero sequence".into()));
        }
        let delta = BigInt::from(p) * BigInt::from(p) + BigInt::from(q) * BigInt::from(4);
        if !delta.is_positive() {
            return Err(Error::DegenerateSpec(format!("discriminant {delta} is not positive")));
        }
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mid = BigRational::from_integer(p.into()) * &half;
        let sign = if p > 0 { half.clone() } else { -half.clone() };
        let alpha = QuadraticNumber::new(mid.clone(), sign.clone(), delta.clone())?;
        let beta = QuadraticNumber::new(mid, -sign, delta.clone())?;
        let u0q = QuadraticNumber::integer(u0);
        let u1q = QuadraticNumber::integer(u1);
        let a = u1q.sub(&u0q.mul(&beta)?)?;
        let b = u1q.sub(&u0q.mul(&alpha)?)?;
        if a.is_zero() || b.is_zero() {
            return Err(Error::DegenerateSpec("Binet coefficient a or b vanishes".into()));
        }
        // with real distinct roots, α/β is a root of unity only when it equals ±1
        if alpha == beta || alpha == beta.neg() {
            return Err(Error::DegenerateSpec("α/β is a root of unity".into()));
        }
        Ok(BinaryRecurrence { p, q, u0, u1, delta, alpha, beta, a, b })
    }

    pub fn fibonacci() -> Self {
        Self::new(1, 1, 0, 1).expect("Fibonacci is non-degenerate")
    }

    pub fn p(&self) -> i64 {
        self.p
    }
    pub fn q(&self) -> i64 {
        self.q
    }
    pub fn u0(&self) -> i64 {
        self.u0
    }
    pub fn u1(&self) -> i64 {
        self.u1
    }
    pub fn discriminant(&self) -> &BigInt {
        &self.delta
    }
    pub fn alpha(&self) -> &QuadraticNumber {
        &self.alpha
    }
    pub fn beta(&self) -> &QuadraticNumber {
        &self.beta
    }
    pub fn a(&self) -> &QuadraticNumber {
        &self.a
    }
    pub fn b(&self) -> &QuadraticNumber {
        &self.b
    }

    pub fn alpha_value<R: Real>(&self) -> Result<R> {
        self.alpha.value()
    }

    pub fn beta_value<R: Real>(&self) -> Result<R> {
        self.beta.value()
    }

    /// `α - β = ±√Δ`.
    pub fn root_gap(&self) -> QuadraticNumber {
        self.alpha.sub(&self.beta).expect("same field")
    }

    /// `U_n` by exact iteration.
    pub fn term(&self, n: u64) -> BigInt {
        let (mut x, mut y) = (BigInt::from(self.u0), BigInt::from(self.u1));
        for _ in 0..n {
            let next = &y * self.p + &x * self.q;
            x = std::mem::replace(&mut y, next);
        }
        x
    }

    /// `U_0 ..= U_n`.
    pub fn terms(&self, n: u64) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(n as usize + 1);
        out.push(BigInt::from(self.u0));
        if n >= 1 {
            out.push(BigInt::from(self.u1));
        }
        for k in 2..=n as usize {
            let next = &out[k - 1] * self.p + &out[k - 2] * self.q;
            out.push(next);
        }
        out
    }

    /// Certified Binet value `(a α^n - b β^n)/(α - β)`.
    pub fn binet(&self, n: u64, prec: u32) -> Result<CertifiedReal> {
        let alpha = self.alpha.eval(prec)?;
        let beta = self.beta.eval(prec)?;
        let a = self.a.eval(prec)?;
        let b = self.b.eval(prec)?;
        let gap = self.root_gap().eval(prec)?;
        let n = n as i64;
        let num = CertifiedReal::mul(&a, &alpha.powi(n)?).sub(&CertifiedReal::mul(&b, &beta.powi(n)?));
        num.checked_div(&gap)
    }

    /// `c_0 = (|a| + |b|)/√Δ`, so that `|U_n| <= c_0 |α|^n`.
    pub fn c0<R: Real>(&self) -> Result<R> {
        let a: R = self.a.value()?;
        let b: R = self.b.value()?;
        (a.abs() + b.abs()).quotient(&R::from_bigint(&self.delta).sqrt()?)
    }
}

/// Append-only memo of `U_0, U_1, ...`, safe to share between threads.
///
/// Readers get an immutable snapshot; a writer extends a copy and publishes it
/// by swapping the `Arc` under the lock.
#[derive(Debug)]
pub struct TermCache {
    rec: BinaryRecurrence,
    table: RwLock<Arc<Vec<BigInt>>>,
}

impl TermCache {
    pub fn new(rec: BinaryRecurrence) -> Self {
        let seed = rec.terms(1);
        TermCache { rec, table: RwLock::new(Arc::new(seed)) }
    }

    pub fn recurrence(&self) -> &BinaryRecurrence {
        &self.rec
    }

    /// Snapshot containing at least `U_0 ..= U_n`.
    pub fn prefix(&self, n: u64) -> Arc<Vec<BigInt>> {
        let need = n as usize + 1;
        {
            let current = self.table.read().unwrap();
            if current.len() >= need {
                return Arc::clone(&current);
            }
        }
        let mut guard = self.table.write().unwrap();
        if guard.len() < need {
            let mut v: Vec<BigInt> = guard.as_ref().clone();
            v.reserve(need - v.len());
            while v.len() < need {
                let k = v.len();
                let next = &v[k - 1] * self.rec.p + &v[k - 2] * self.rec.q;
                v.push(next);
            }
            *guard = Arc::new(v);
        }
        Arc::clone(&guard)
    }

    pub fn get(&self, n: u64) -> BigInt {
        self.prefix(n)[n as usize].clone()
    }

    pub fn len(&self) -> usize {
        self.table.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The equation data: recurrence, primes `p_1 <= ... <= p_s`, coefficients `b_i`, term count `t`, and `ε`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub recurrence: BinaryRecurrence,
    pub primes: Vec<u64>,
    pub coefficients: Vec<u64>,
    pub t: usize,
    #[serde(with = "crate::decimal::rational")]
    pub epsilon: BigRational,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl ProblemSpec {
    pub fn new(
        recurrence: BinaryRecurrence,
        primes: Vec<u64>,
        coefficients: Vec<u64>,
        t: usize,
        epsilon: BigRational,
    ) -> Result<Self> {
        let spec = ProblemSpec { recurrence, primes, coefficients, t, epsilon };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.primes.is_empty() {
            return Err(Error::Invalid("at least one prime is required".into()));
        }
        if self.primes.len() != self.coefficients.len() {
            return Err(Error::Invalid(format!(
                "{} primes but {} coefficients",
                self.primes.len(),
                self.coefficients.len()
            )));
        }
        if let Some(p) = self.primes.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        if self.primes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Invalid("primes must be sorted ascending".into()));
        }
        if self.coefficients.contains(&0) {
            return Err(Error::Invalid("coefficients b_i must be positive".into()));
        }
        if self.t == 0 {
            return Err(Error::Invalid("t must be at least 1".into()));
        }
        if !(self.epsilon.is_positive() && self.epsilon < BigRational::one()) {
            return Err(Error::Invalid(format!("ε = {} must lie in (0, 1)", self.epsilon)));
        }
        Ok(())
    }

    /// `F_{n1} + F_{n2} = 2^{z1} + 3^{z2}`.
    pub fn fibonacci_2_3() -> Self {
        Self::new(
            BinaryRecurrence::fibonacci(),
            vec![2, 3],
            vec![1, 1],
            2,
            BigRational::new(1.into(), 2.into()),
        )
        .unwrap()
    }

    pub fn s(&self) -> usize {
        self.primes.len()
    }

    /// `K = max b_i`.
    pub fn k(&self) -> u64 {
        *self.coefficients.iter().max().unwrap()
    }

    pub fn p_1(&self) -> u64 {
        self.primes[0]
    }

    pub fn p_s(&self) -> u64 {
        *self.primes.last().unwrap()
    }

    /// Coefficient attached to the largest prime.
    pub fn b_s(&self) -> u64 {
        *self.coefficients.last().unwrap()
    }
}

/// `c_0` and `c_1` with the branch of `c_1` that attains the maximum.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthConstants<R> {
    pub c0: R,
    pub c1: R,
    pub c1_first: R,
    pub c1_second: R,
}

/// `c_0 = (|a|+|b|)/√Δ` and `c_1 = max{2 log|α|/log p_s, log|α|(log p_s + log p_1)/(2 log p_1 log p_s)}`.
pub fn growth_constants<R: Real>(spec: &ProblemSpec) -> Result<GrowthConstants<R>> {
    let rec = &spec.recurrence;
    let c0 = rec.c0::<R>()?;
    let log_alpha = rec.alpha_value::<R>()?.abs().ln()?;
    let log_ps = R::from_i64(spec.p_s() as i64).ln()?;
    let log_p1 = R::from_i64(spec.p_1() as i64).ln()?;
    let two = R::from_i64(2);
    let c1_first = (two.clone() * log_alpha.clone()).quotient(&log_ps)?;
    let c1_second = (log_alpha * (log_ps.clone() + log_p1.clone())).quotient(&(two * log_p1 * log_ps))?;
    let c1 = c1_first.max_of(&c1_second);
    Ok(GrowthConstants { c0, c1, c1_first, c1_second })
}

/// One branch of the nonvanishing bound.
#[derive(Clone, Debug, PartialEq)]
pub enum BranchValue<R> {
    Bound(R),
    /// Negative denominator with a non-negative numerator: the branch constrains nothing.
    Inapplicable,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdBranch<R> {
    pub i: usize,
    pub branch: usize,
    pub value: BranchValue<R>,
}

/// `ℓ = max_i ℓ_i` together with every branch that went into it.
#[derive(Clone, Debug, PartialEq)]
pub struct NonvanishingThreshold<R> {
    pub ell: R,
    pub branches: Vec<ThresholdBranch<R>>,
}

fn branch_quotient<R: Real>(num: R, den: R, what: &str) -> Result<BranchValue<R>> {
    let zero = R::from_i64(0);
    if den.certainly_positive() {
        return Ok(BranchValue::Bound(num.quotient(&den)?));
    }
    if !den.certainly_lt(&zero) {
        return Err(Error::DegenerateDenominator(format!("{what}: denominator {den:?} is not certainly nonzero")));
    }
    if num.certainly_lt(&zero) {
        return Ok(BranchValue::Bound(num.abs().quotient(&den.abs())?));
    }
    if zero.certainly_lt(&num) || num == zero {
        return Ok(BranchValue::Inapplicable);
    }
    // numerator straddles zero: the conservative reading is the absolute quotient
    Ok(BranchValue::Bound(num.abs().quotient(&den.abs())?))
}

/// `ℓ` such that every linear form `Λ_i` is nonzero once `n_1 > ℓ`.
pub fn nonvanishing_threshold<R: Real>(spec: &ProblemSpec) -> Result<NonvanishingThreshold<R>> {
    let rec = &spec.recurrence;
    let gc = growth_constants::<R>(spec)?;
    let alpha = rec.alpha_value::<R>()?.abs();
    let beta = rec.beta_value::<R>()?.abs();
    let a = rec.a().value::<R>()?.abs();
    let b = rec.b().value::<R>()?.abs();
    let r = R::from_bigint(rec.discriminant()).sqrt()?;
    let ratio_ba = b.quotient(&a)?;
    let log_ab = alpha.quotient(&beta)?.ln()?;
    let log_a = alpha.ln()?;
    let ps = R::from_i64(spec.p_s() as i64);
    let den3 = log_a.clone() - gc.c1.clone() * ps.ln()?;
    let num3 = (R::from_i64(spec.b_s() as i64) * r).quotient(&a)?.ln()?;

    let mut branches = Vec::new();
    for i in 1..=spec.t {
        let num = (R::from_i64(i as i64) * ratio_ba.clone()).ln()?;
        let values = [
            branch_quotient(num.clone(), log_ab.clone(), "log|α/β|")?,
            branch_quotient(num, log_a.clone(), "log|α|")?,
            branch_quotient(num3.clone(), den3.clone(), "log(|α|/p_s^c1)")?,
        ];
        for (k, value) in values.into_iter().enumerate() {
            branches.push(ThresholdBranch { i, branch: k + 1, value });
        }
    }
    let mut ell = R::from_i64(0);
    for br in &branches {
        if let BranchValue::Bound(v) = &br.value {
            ell = ell.max_of(v);
        }
    }
    Ok(NonvanishingThreshold { ell, branches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::dyadic::Dyadic;

    #[test]
    fn fibonacci_terms() {
        let f = BinaryRecurrence::fibonacci();
        assert_eq!(f.term(0), BigInt::from(0));
        assert_eq!(f.term(1), BigInt::from(1));
        assert_eq!(f.term(10), BigInt::from(55));
        assert_eq!(f.terms(10)[10], BigInt::from(55));
        assert_eq!(f.term(100).to_string(), "354224848179261915075");
    }

    #[test]
    fn binet_matches_iteration() {
        let f = BinaryRecurrence::fibonacci();
        for n in [0u64, 1, 2, 17, 60] {
            let v = f.binet(n, 256).unwrap();
            assert_eq!(v.unique_integer(), Some(f.term(n)));
        }
        let lucas_like = BinaryRecurrence::new(3, -2, 0, 1).unwrap(); // 2^n - 1
        assert_eq!(lucas_like.term(10), BigInt::from(1023));
        assert_eq!(lucas_like.binet(10, 128).unwrap().unique_integer(), Some(BigInt::from(1023)));
    }

    #[test]
    fn negative_p_picks_dominant_root() {
        let r = BinaryRecurrence::new(-1, 1, 0, 1).unwrap();
        assert!(r.alpha_value::<f64>().unwrap() < -1.6);
        for n in [5u64, 12] {
            assert_eq!(r.binet(n, 192).unwrap().unique_integer(), Some(r.term(n)));
        }
    }

    #[test]
    fn degenerate_recurrences_are_rejected() {
        assert!(BinaryRecurrence::new(0, 1, 0, 1).is_err());
        assert!(BinaryRecurrence::new(1, 0, 0, 1).is_err());
        assert!(BinaryRecurrence::new(1, 1, 0, 0).is_err());
        assert!(BinaryRecurrence::new(1, -1, 0, 1).is_err());
        assert!(BinaryRecurrence::new(2, -1, 0, 1).is_err());
        // U_n = 2^n: b = U1 - U0 α vanishes
        assert!(BinaryRecurrence::new(3, -2, 1, 2).is_err());
    }

    #[test]
    fn cache_extends_and_shares() {
        let cache = TermCache::new(BinaryRecurrence::fibonacci());
        let snap = cache.prefix(20);
        assert_eq!(snap[20], BigInt::from(6765));
        assert_eq!(cache.get(12), BigInt::from(144));
        assert!(cache.len() >= 21);
    }

    #[test]
    fn fibonacci_growth_constants() {
        let spec = ProblemSpec::fibonacci_2_3();
        let gc = growth_constants::<CertifiedReal>(&spec).unwrap();
        let c0_expected = crate::arith::expr::Expr::parse("2/sqrt(5)").unwrap().eval(192).unwrap();
        assert!(gc.c0.overlaps(&c0_expected));
        assert!((gc.c1.to_f64() - 0.876).abs() < 1e-3);
        assert!((gc.c1_second.to_f64() - 0.566).abs() < 1e-3);
    }

    #[test]
    fn fibonacci_threshold_is_small() {
        let spec = ProblemSpec::fibonacci_2_3();
        let th = nonvanishing_threshold::<CertifiedReal>(&spec).unwrap();
        assert!(th.ell.certainly_lt(&CertifiedReal::from_int(100)));
        assert!((th.ell.to_f64() - 2f64.ln() / 1.618033988749895f64.ln()).abs() < 1e-12);
        let i1: Vec<_> = th.branches.iter().filter(|b| b.i == 1 && b.branch < 3).collect();
        for b in i1 {
            match &b.value {
                BranchValue::Bound(v) => assert!(v.contains(&Dyadic::zero())),
                BranchValue::Inapplicable => panic!("log 1 branch should be a bound"),
            }
        }
        assert!(th.branches.iter().any(|b| b.branch == 3 && b.value == BranchValue::Inapplicable));
    }

    #[test]
    fn spec_validation() {
        let rec = BinaryRecurrence::fibonacci();
        let half = BigRational::new(1.into(), 2.into());
        assert!(ProblemSpec::new(rec.clone(), vec![3, 2], vec![1, 1], 2, half.clone()).is_err());
        assert!(ProblemSpec::new(rec.clone(), vec![2, 4], vec![1, 1], 2, half.clone()).is_err());
        assert!(ProblemSpec::new(rec.clone(), vec![2], vec![0], 2, half.clone()).is_err());
        assert!(ProblemSpec::new(rec.clone(), vec![2], vec![1], 2, BigRational::one()).is_err());
        assert_eq!(ProblemSpec::new(rec, vec![2, 3, 3], vec![1, 5, 2], 3, half).unwrap().k(), 5);
    }

    #[test]
    fn serde_uses_seeds() {
        let json = serde_json::to_string(&BinaryRecurrence::fibonacci()).unwrap();
        assert_eq!(json, r#"{"P":1,"Q":1,"U0":0,"U1":1}"#);
        let back: BinaryRecurrence = serde_json::from_str(&json).unwrap();
        assert_eq!(back, BinaryRecurrence::fibonacci());
        assert!(serde_json::from_str::<BinaryRecurrence>(r#"{"P":0,"Q":1,"U0":0,"U1":1}"#).is_err());
    }
}
