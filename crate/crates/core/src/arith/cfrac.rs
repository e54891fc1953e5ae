//! Simple continued fractions of certified reals.
//!
//! Partial quotients are read off the exact expansions of both interval
//! endpoints; a quotient is emitted only when the two expansions agree on it
//! and neither has terminated, so every real in the interval shares it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::expr::Expr;
use super::real::CertifiedReal;
use super::PrecisionPolicy;
use crate::error::{Error, Result};

/// Partial quotients `a_0, a_1, ...` with their convergents `p_k / q_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    #[serde(with = "crate::decimal::int_vec")]
    partial_quotients: Vec<BigInt>,
    #[serde(with = "crate::decimal::int_vec")]
    numerators: Vec<BigInt>,
    #[serde(with = "crate::decimal::int_vec")]
    denominators: Vec<BigInt>,
}

impl ContinuedFraction {
    /// Build from partial quotients; `a_k >= 1` is required for `k >= 1`.
    pub fn from_partial_quotients(quotients: Vec<BigInt>) -> Result<Self> {
        if quotients.iter().skip(1).any(|a| !a.is_positive()) {
            return Err(Error::Invalid("partial quotients after a_0 must be positive".into()));
        }
        let mut numerators = Vec::with_capacity(quotients.len());
        let mut denominators = Vec::with_capacity(quotients.len());
        let (mut p_prev, mut p) = (BigInt::zero(), BigInt::one());
        let (mut q_prev, mut q) = (BigInt::one(), BigInt::zero());
        for a in &quotients {
            let p_next = a * &p + &p_prev;
            let q_next = a * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
            numerators.push(p.clone());
            denominators.push(q.clone());
        }
        Ok(ContinuedFraction { partial_quotients: quotients, numerators, denominators })
    }

    pub fn len(&self) -> usize {
        self.partial_quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partial_quotients.is_empty()
    }

    pub fn partial_quotients(&self) -> &[BigInt] {
        &self.partial_quotients
    }

    pub fn numerator(&self, k: usize) -> Result<&BigInt> {
        self.numerators.get(k).ok_or(Error::IndexOutOfRange { index: k, len: self.len() })
    }

    pub fn denominator(&self, k: usize) -> Result<&BigInt> {
        self.denominators.get(k).ok_or(Error::IndexOutOfRange { index: k, len: self.len() })
    }

    /// The `k`-th convergent `p_k / q_k`.
    pub fn convergent(&self, k: usize) -> Result<BigRational> {
        Ok(BigRational::new(self.numerator(k)?.clone(), self.denominator(k)?.clone()))
    }

    pub fn convergents(&self) -> Vec<BigRational> {
        (0..self.len()).map(|k| self.convergent(k).unwrap()).collect()
    }

    /// Smallest index whose denominator strictly exceeds `bound`.
    pub fn first_denominator_above(&self, bound: &BigInt) -> Option<usize> {
        self.denominators.iter().position(|q| q > bound)
    }

    /// Convergents rendered as `p` or `p/q`.
    pub fn convergent_strings(&self) -> Vec<String> {
        self.numerators
            .iter()
            .zip(&self.denominators)
            .map(|(p, q)| if q.is_one() { p.to_string() } else { format!("{p}/{q}") })
            .collect()
    }
}

/// Exact continued fraction of a rational, at most `limit` terms.
fn rational_quotients(r: &BigRational, limit: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    let (mut n, mut d) = (r.numer().clone(), r.denom().clone());
    while !d.is_zero() && out.len() < limit {
        let (q, rem) = n.div_mod_floor(&d);
        out.push(q);
        n = std::mem::replace(&mut d, rem);
    }
    out
}

/// The longest prefix, at most `limit` terms, valid for every point of `x`.
pub fn cfrac_certified_prefix(x: &CertifiedReal, limit: usize) -> ContinuedFraction {
    // one extra term so that "not yet terminated" can be checked at the last index
    let lo = rational_quotients(&x.lo().to_rational(), limit + 1);
    let hi = rational_quotients(&x.hi().to_rational(), limit + 1);
    let agreed: Vec<BigInt> = (0..limit)
        .take_while(|&k| lo.len() > k + 1 && hi.len() > k + 1 && lo[k] == hi[k])
        .map(|k| lo[k].clone())
        .collect();
    ContinuedFraction::from_partial_quotients(agreed).expect("Euclid quotients are positive after a_0")
}

/// Partial quotients `a_0 ..= a_{k_max}` valid for every point of `x`.
pub fn cfrac_expand(x: &CertifiedReal, k_max: usize) -> Result<ContinuedFraction> {
    let want = k_max + 1;
    let cf = cfrac_certified_prefix(x, want);
    if cf.len() < want {
        return Err(Error::precision(format!(
            "only {} partial quotients certified at {} bits (wanted {want})",
            cf.len(),
            x.precision()
        )));
    }
    Ok(cf)
}

/// [`cfrac_expand`] on a symbolic value, doubling precision until it succeeds.
pub fn cfrac_expand_expr(x: &Expr, k_max: usize, policy: &PrecisionPolicy) -> Result<ContinuedFraction> {
    policy.run(|prec| cfrac_expand(&x.eval(prec)?, k_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::dyadic::Dyadic;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn golden_ratio_is_all_ones() {
        let phi = crate::arith::expr::golden_ratio().eval(192).unwrap();
        let cf = cfrac_expand(&phi, 5).unwrap();
        assert_eq!(cf.partial_quotients(), ints(&[1, 1, 1, 1, 1, 1]).as_slice());
        assert_eq!(cf.convergent_strings(), vec!["1", "2", "3/2", "5/3", "8/5", "13/8"]);
        assert_eq!(cf.convergent(4).unwrap(), BigRational::new(8.into(), 5.into()));
    }

    #[test]
    fn sqrt2_quotients() {
        let s = Expr::parse("sqrt(2)").unwrap().eval(128).unwrap();
        let cf = cfrac_expand(&s, 4).unwrap();
        assert_eq!(cf.partial_quotients(), ints(&[1, 2, 2, 2, 2]).as_slice());
    }

    #[test]
    fn exact_rational_cannot_certify_past_its_end() {
        let x = CertifiedReal::exact(Dyadic::new(BigInt::from(5), -1), 64);
        // 5/2 = [2; 2]: two terms, and the second one ends the expansion
        assert!(cfrac_expand(&x, 0).is_ok());
        assert!(cfrac_expand(&x, 1).unwrap_err().is_precision());
    }

    #[test]
    fn wide_interval_reports_precision_exhausted() {
        let x = CertifiedReal::from_bounds(Dyadic::from_int(2), Dyadic::from_int(3), 64);
        assert!(cfrac_expand(&x, 0).unwrap_err().is_precision());
    }

    #[test]
    fn index_out_of_range() {
        let cf = ContinuedFraction::from_partial_quotients(ints(&[1, 2])).unwrap();
        assert_eq!(cf.convergent(2), Err(Error::IndexOutOfRange { index: 2, len: 2 }));
        assert!(ContinuedFraction::from_partial_quotients(ints(&[1, 0])).is_err());
    }

    #[test]
    fn escalation_reaches_deep_terms() {
        let e = Expr::parse("log(3)/log((1+sqrt(5))/2)").unwrap();
        let policy = PrecisionPolicy { start_bits: 64, ceiling_bits: 4096 };
        let cf = cfrac_expand_expr(&e, 70, &policy).unwrap();
        assert_eq!(cf.len(), 71);
        assert!(cfrac_expand_expr(&e, 70, &PrecisionPolicy { start_bits: 32, ceiling_bits: 64 })
            .unwrap_err()
            .is_precision());
    }
}
