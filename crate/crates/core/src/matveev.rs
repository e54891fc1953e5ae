//! Matveev's lower bound for linear forms in logarithms.
//!
//! For `Λ = γ_1^{b_1} ⋯ γ_t^{b_t} - 1 ≠ 0` over a real field of degree `D`,
//! `log|Λ| > -1.4·30^{t+3}·t^{4.5}·D^2 (1 + log D)(1 + log B) A_1 ⋯ A_t`.

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::arith::real::RealRecord;
use crate::arith::scalar::Real;
use crate::error::{Error, Result};
use crate::heights::{log_height, QuadraticNumber};

/// Smallest admissible `A_j`.
pub const A_FLOOR: (i64, i64) = (16, 100);

/// The data of one application of the bound.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFormSpec<R> {
    pub t: usize,
    pub degree: u32,
    pub a: Vec<R>,
    /// Upper bound for `max |b_j|`.
    pub b: R,
    /// The exponents, when known; checked against `b`.
    pub exponents: Vec<BigInt>,
}

impl<R: Real> LinearFormSpec<R> {
    pub fn new(degree: u32, a: Vec<R>, b: R) -> Self {
        LinearFormSpec { t: a.len(), degree, a, b, exponents: Vec::new() }
    }

    pub fn with_exponents(mut self, exponents: Vec<BigInt>) -> Self {
        self.exponents = exponents;
        self
    }

    fn check(&self) -> Result<()> {
        if self.t == 0 || self.a.len() != self.t {
            return Err(Error::HypothesisViolation(format!("t = {} with {} values of A", self.t, self.a.len())));
        }
        if self.degree == 0 {
            return Err(Error::HypothesisViolation("field degree D must be at least 1".into()));
        }
        let floor = R::from_ratio(A_FLOOR.0, A_FLOOR.1);
        for (j, a) in self.a.iter().enumerate() {
            if !floor.certainly_le(a) {
                return Err(Error::HypothesisViolation(format!("A_{} = {:.6} is below 0.16", j + 1, a.approx())));
            }
        }
        let one = R::from_i64(1);
        if self.b.certainly_lt(&one) {
            return Err(Error::HypothesisViolation(format!("B = {:.6} is below 1", self.b.approx())));
        }
        for (j, e) in self.exponents.iter().enumerate() {
            if self.b.certainly_lt(&R::from_bigint(&e.abs())) {
                return Err(Error::HypothesisViolation(format!("|b_{}| = {} exceeds B", j + 1, e.abs())));
            }
        }
        Ok(())
    }
}

/// `1.4·30^{t+3}·t^{4.5}·D^2(1 + log D)·A_1⋯A_t`, the coefficient of `(1 + log B)`.
pub fn matveev_constant<R: Real>(t: usize, degree: u32, a: &[R]) -> Result<R> {
    let tt = R::from_i64(t as i64);
    let d = R::from_i64(degree as i64);
    let mut c = R::from_ratio(14, 10) * R::from_i64(30).powi(t as i64 + 3)?;
    c = c * tt.powi(4)? * tt.sqrt()?;
    c = c * d.clone() * d.clone() * (R::from_i64(1) + d.ln()?);
    for aj in a {
        c = c * aj.clone();
    }
    Ok(c)
}

/// `E` with `|Λ| >= exp(-E)`.
///
/// For certified scalars the caller should use the upper endpoint of the result.
pub fn lower_bound_exponent<R: Real>(lf: &LinearFormSpec<R>) -> Result<R> {
    lf.check()?;
    let c = matveev_constant(lf.t, lf.degree, &lf.a)?;
    Ok(c * (R::from_i64(1) + lf.b.ln()?))
}

/// What an `A_j` has to dominate: `h(γ_j)` and `|log γ_j|`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaData<R> {
    pub height: R,
    pub abs_log: R,
}

impl<R: Real> GammaData<R> {
    pub fn of(q: &QuadraticNumber) -> Result<Self> {
        let height = log_height(q)?;
        let abs_log = q.value::<R>()?.abs().ln()?.abs();
        Ok(GammaData { height, abs_log })
    }

    /// `max{D·h(γ), |log γ|, 0.16}`.
    pub fn requirement(&self, degree: u32) -> R {
        (R::from_i64(degree as i64) * self.height.clone())
            .max_of(&self.abs_log)
            .max_of(&R::from_ratio(A_FLOOR.0, A_FLOOR.1))
    }
}

/// True iff every `A_j` certainly dominates `max{D·h(γ_j), |log γ_j|, 0.16}`.
pub fn validate_hypotheses<R: Real>(lf: &LinearFormSpec<R>, gammas: &[GammaData<R>]) -> bool {
    if gammas.len() != lf.a.len() {
        return false;
    }
    lf.a.iter().zip(gammas).all(|(a, g)| {
        g.requirement(lf.degree).certainly_le(a)
    })
}

/// Serializable echo of an application, for the ledger.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatveevRecord {
    pub t: usize,
    pub degree: u32,
    pub a: Vec<RealRecord>,
    pub b: RealRecord,
    pub constant: RealRecord,
}

impl MatveevRecord {
    pub fn of<R: Real>(lf: &LinearFormSpec<R>) -> Result<Self> {
        Ok(MatveevRecord {
            t: lf.t,
            degree: lf.degree,
            a: lf.a.iter().map(Real::record).collect(),
            b: lf.b.record(),
            constant: matveev_constant(lf.t, lf.degree, &lf.a)?.record(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::real::CertifiedReal;

    fn cr(num: i64, den: i64) -> CertifiedReal {
        CertifiedReal::from_ratio(num, den, 192)
    }

    #[test]
    fn section_five_constants() {
        let a = [cr(22, 10), cr(5, 10), cr(17, 10)];
        let c = matveev_constant(3, 2, &a).unwrap();
        assert!((c.to_f64() / 1.8e12 - 1.0).abs() < 0.01);
        // A_3 factored out: t = 3 with only A_1 A_2 multiplied in
        let base = matveev_constant(3, 2, &a[..2]).unwrap();
        assert!((base.to_f64() / 1.06e12 - 1.0).abs() < 0.01);
    }

    #[test]
    fn float_and_certified_agree() {
        let af = [2.2f64, 0.5, 1.7];
        let cf = matveev_constant(3, 2, &af).unwrap();
        let cc = matveev_constant(3, 2, &[cr(22, 10), cr(5, 10), cr(17, 10)]).unwrap();
        assert!((cf / cc.to_f64() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponent_is_linear_in_each_a() {
        let lf = LinearFormSpec::new(2, vec![2.2f64, 0.5, 1.7], 1e6);
        let mut doubled = lf.clone();
        doubled.a[0] *= 2.0;
        let e1 = lower_bound_exponent(&lf).unwrap();
        let e2 = lower_bound_exponent(&doubled).unwrap();
        assert!((e2 / e1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hypothesis_violations() {
        let lf = LinearFormSpec::new(2, vec![0.1f64, 0.5], 10.0);
        assert!(matches!(lower_bound_exponent(&lf), Err(Error::HypothesisViolation(_))));
        let lf = LinearFormSpec::new(2, vec![1.0f64], 0.5);
        assert!(matches!(lower_bound_exponent(&lf), Err(Error::HypothesisViolation(_))));
        let lf = LinearFormSpec::new(2, vec![1.0f64], 5.0).with_exponents(vec![BigInt::from(-7)]);
        assert!(matches!(lower_bound_exponent(&lf), Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn validate_section_five_choices() {
        let three = GammaData::<CertifiedReal>::of(&QuadraticNumber::integer(3)).unwrap();
        let phi = QuadraticNumber::new(
            num_rational::BigRational::new(1.into(), 2.into()),
            num_rational::BigRational::new(1.into(), 2.into()),
            5,
        )
        .unwrap();
        let alpha = GammaData::<CertifiedReal>::of(&phi).unwrap();
        let lf = LinearFormSpec::new(2, vec![cr(22, 10), cr(5, 10)], cr(100, 1));
        assert!(validate_hypotheses(&lf, &[three.clone(), alpha.clone()]));
        let low = LinearFormSpec::new(2, vec![cr(21, 10), cr(5, 10)], cr(100, 1));
        assert!(!validate_hypotheses(&low, &[three, alpha.clone()]));
        let tiny = LinearFormSpec::new(2, vec![cr(1, 10)], cr(100, 1));
        let one_tenth = GammaData { height: cr(0, 1), abs_log: cr(0, 1) };
        assert!(!validate_hypotheses(&tiny, &[one_tenth]));
    }
}
