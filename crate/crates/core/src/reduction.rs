//! Baker–Davenport reduction in the Dujella–Pethő form.
//!
//! For `0 < uγ - n + μ < A·B^{-m}` with `u <= M`, pick a convergent `p/q` of
//! `γ` with `q > 6M` and put `ε = ||μq|| - M||γq||`. If `ε > 0` there are no
//! solutions with `m >= log(Aq/ε)/log B`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::cfrac::{cfrac_certified_prefix, ContinuedFraction};
use crate::arith::dyadic::Dyadic;
use crate::arith::expr::Expr;
use crate::arith::real::{CertifiedReal, RealRecord};
use crate::arith::{nearest_int_distance, PrecisionPolicy};
use crate::error::{Error, Result};

/// Default number of extra convergents tried after `ε <= 0`.
pub const DEFAULT_RETRIES: usize = 50;

/// The problem `0 < uγ - n + μ < A·B^{-m}`, `u <= M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionInstance {
    pub gamma: Expr,
    pub mu: Expr,
    pub a: Expr,
    pub b: Expr,
    #[serde(with = "crate::decimal::int")]
    pub m: BigInt,
}

impl ReductionInstance {
    pub fn new(gamma: Expr, mu: Expr, a: Expr, b: Expr, m: BigInt) -> Result<Self> {
        let inst = ReductionInstance { gamma, mu, a, b, m };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < BigInt::from(1) {
            return Err(Error::Invalid(format!("M = {} must be a positive integer", self.m)));
        }
        let policy = PrecisionPolicy { start_bits: 64, ceiling_bits: 1024 };
        policy.run(|prec| {
            let a = self.a.eval(prec)?;
            let b = self.b.eval(prec)?;
            check_positive(&a, "A")?;
            let one = CertifiedReal::from_int(1);
            if b.certainly_le(&one) {
                return Err(Error::Invalid(format!("B = {b} must exceed 1")));
            }
            if !one.certainly_lt(&b) {
                return Err(Error::precision(format!("cannot certify B = {b} > 1")));
            }
            Ok(())
        })
    }
}

fn check_positive(x: &CertifiedReal, name: &str) -> Result<()> {
    if !x.hi().is_positive() {
        return Err(Error::Invalid(format!("{name} = {x} must be positive")));
    }
    if !x.lo().is_positive() {
        return Err(Error::precision(format!("cannot certify {name} = {x} > 0")));
    }
    Ok(())
}

/// How the convergent is picked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConvergentChoice {
    /// Smallest `k` with `q_k > 6M`, advancing up to `retries` times while `ε <= 0`.
    Smallest { retries: usize },
    /// Exactly this index, which must satisfy `q_k > 6M`.
    Pinned(usize),
}

impl Default for ConvergentChoice {
    fn default() -> Self {
        ConvergentChoice::Smallest { retries: DEFAULT_RETRIES }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReductionStatus {
    Success,
    EpsilonNonpositive,
}

/// Result of one reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionOutcome {
    pub status: ReductionStatus,
    /// Convergent index used (the last one tried when `ε <= 0` throughout).
    pub k: usize,
    #[serde(with = "crate::decimal::int")]
    pub q_k: BigInt,
    pub epsilon: RealRecord,
    /// `log(A q/ε)/log B`, on success.
    pub bound: Option<RealRecord>,
    /// Smallest `m_0` such that no solution has `m >= m_0`, on success.
    #[serde(with = "crate::decimal::opt_int")]
    pub m_bound: Option<BigInt>,
    /// Convergents tried, in order.
    pub tried: Vec<usize>,
    pub precision_bits: u32,
}

impl ReductionOutcome {
    pub fn is_success(&self) -> bool {
        self.status == ReductionStatus::Success
    }

    /// Largest `m` that survives the reduction.
    pub fn max_m(&self) -> Option<BigInt> {
        self.m_bound.as_ref().map(|m| m - 1)
    }
}

/// Number of partial quotients that surely contains an index with `q_k > 6M`, plus `retries`.
fn expansion_limit(six_m: &BigInt, extra: usize) -> usize {
    // q_k >= F_{k+1} >= φ^{k-1}
    let bits = six_m.bits() as f64;
    (bits * std::f64::consts::LN_2 / 0.4812).ceil() as usize + 3 + extra
}

/// `ε = ||μq|| - M||γq||` at the precision of the inputs.
pub fn epsilon(gamma: &CertifiedReal, mu: &CertifiedReal, q: &BigInt, m: &BigInt) -> Result<CertifiedReal> {
    let mu_q = nearest_int_distance(&mu.mul_int(q))?;
    let gamma_q = nearest_int_distance(&gamma.mul_int(q))?;
    Ok(mu_q.sub(&gamma_q.mul_int(m)))
}

/// One attempt at a fixed precision with a given expansion of `γ`.
fn reduce_with(
    inst: &ReductionInstance,
    cf: &ContinuedFraction,
    cf_complete: bool,
    choice: ConvergentChoice,
    prec: u32,
) -> Result<ReductionOutcome> {
    let gamma = inst.gamma.eval(prec)?;
    let mu = inst.mu.eval(prec)?;
    let a = inst.a.eval(prec)?;
    let b = inst.b.eval(prec)?;
    let six_m = &inst.m * BigInt::from(6);
    let short = |k: usize| {
        if cf_complete {
            Error::NoConvergentFound { threshold: six_m.to_string(), searched: cf.len().min(k) }
        } else {
            Error::precision(format!("convergent {k} not certified at {prec} bits"))
        }
    };
    let (start, last) = match choice {
        ConvergentChoice::Pinned(k) => {
            let q = cf.denominator(k).map_err(|_| short(k + 1))?;
            if q <= &six_m {
                return Err(Error::HypothesisViolation(format!("pinned q_{k} = {q} does not exceed 6M = {six_m}")));
            }
            (k, k)
        }
        ConvergentChoice::Smallest { retries } => {
            let k0 = cf.first_denominator_above(&six_m).ok_or_else(|| short(cf.len()))?;
            (k0, k0 + retries)
        }
    };
    let mut tried = Vec::new();
    let mut last_eps = None;
    for k in start..=last {
        let Ok(q) = cf.denominator(k) else {
            if cf_complete {
                break;
            }
            return Err(short(k));
        };
        tried.push(k);
        let eps = epsilon(&gamma, &mu, q, &inst.m)?;
        if eps.lo().is_positive() {
            let aq = a.mul_int(q);
            let bound = aq.checked_div(&eps)?.ln()?.checked_div(&b.ln()?)?;
            let m_bound = bound.ceil_upper().max(BigInt::zero());
            return Ok(ReductionOutcome {
                status: ReductionStatus::Success,
                k,
                q_k: q.clone(),
                epsilon: eps.to_record(),
                bound: Some(bound.to_record()),
                m_bound: Some(m_bound),
                tried,
                precision_bits: prec,
            });
        }
        if eps.hi() > &Dyadic::zero() {
            // the sign of ε is undecided: more precision before moving on
            return Err(Error::precision(format!("ε at q_{k} straddles zero: {eps}")));
        }
        last_eps = Some((k, q.clone(), eps));
    }
    let (k, q_k, eps) = last_eps.ok_or_else(|| short(start))?;
    Ok(ReductionOutcome {
        status: ReductionStatus::EpsilonNonpositive,
        k,
        q_k,
        epsilon: eps.to_record(),
        bound: None,
        m_bound: None,
        tried,
        precision_bits: prec,
    })
}

fn needed_terms(inst: &ReductionInstance, choice: ConvergentChoice) -> usize {
    match choice {
        ConvergentChoice::Pinned(k) => k + 1,
        ConvergentChoice::Smallest { retries } => expansion_limit(&(&inst.m * BigInt::from(6)), retries + 1),
    }
}

/// Run the reduction, doubling precision whenever a quantity cannot be certified.
pub fn baker_davenport(
    inst: &ReductionInstance,
    choice: ConvergentChoice,
    policy: &PrecisionPolicy,
) -> Result<ReductionOutcome> {
    let limit = needed_terms(inst, choice);
    policy.run(|prec| {
        let cf = cfrac_certified_prefix(&inst.gamma.eval(prec)?, limit);
        let complete = cf.len() >= limit;
        reduce_with(inst, &cf, complete, choice, prec)
    })
}

/// Shared data of a family of reductions differing only in `μ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTemplate {
    pub gamma: Expr,
    pub a: Expr,
    pub b: Expr,
    #[serde(with = "crate::decimal::int")]
    pub m: BigInt,
}

impl ReductionTemplate {
    pub fn instance(&self, mu: Expr) -> Result<ReductionInstance> {
        ReductionInstance::new(self.gamma.clone(), mu, self.a.clone(), self.b.clone(), self.m.clone())
    }
}

/// Certified expansion of `γ` deep enough for `choice`, or as deep as the ceiling allows.
pub fn expansion_for(
    gamma: &Expr,
    m: &BigInt,
    choice: ConvergentChoice,
    policy: &PrecisionPolicy,
) -> Result<(ContinuedFraction, bool)> {
    let six_m = m * BigInt::from(6);
    let want_extra = match choice {
        ConvergentChoice::Pinned(k) => return Ok((policy.run(|p| crate::arith::cfrac::cfrac_expand(&gamma.eval(p)?, k))?, false)),
        ConvergentChoice::Smallest { retries } => retries,
    };
    let limit = expansion_limit(&six_m, want_extra + 1);
    let mut best: Option<ContinuedFraction> = None;
    let got = policy.run(|prec| {
        let cf = cfrac_certified_prefix(&gamma.eval(prec)?, limit);
        let enough = match cf.first_denominator_above(&six_m) {
            Some(k0) => cf.len() > k0 + want_extra,
            None => cf.len() >= limit,
        };
        if enough {
            Ok(cf)
        } else {
            best = Some(cf);
            Err(Error::precision("expansion too short"))
        }
    });
    match got {
        Ok(cf) => {
            let complete = cf.len() >= limit;
            Ok((cf, complete))
        }
        Err(e) if e.is_precision() => best.map(|cf| (cf, false)).ok_or(e),
        Err(e) => Err(e),
    }
}

/// Reduce every member of a family `g -> μ(g)`; errors are kept per key.
pub fn batch_reduce(
    family: &BTreeMap<u64, Expr>,
    template: &ReductionTemplate,
    choice: ConvergentChoice,
    policy: &PrecisionPolicy,
) -> Result<BTreeMap<u64, Result<ReductionOutcome>>> {
    let (cf, complete) = expansion_for(&template.gamma, &template.m, choice, policy)?;
    let results: Vec<(u64, Result<ReductionOutcome>)> = family
        .par_iter()
        .map(|(&g, mu)| {
            let outcome = template
                .instance(mu.clone())
                .and_then(|inst| policy.run(|prec| reduce_with(&inst, &cf, complete, choice, prec)));
            (g, outcome)
        })
        .collect();
    Ok(results.into_iter().collect())
}

/// Bound from the best-approximation property of convergents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectBound {
    pub k: usize,
    #[serde(with = "crate::decimal::int")]
    pub q_k: BigInt,
    #[serde(with = "crate::decimal::int")]
    pub q_k1: BigInt,
    /// `log(A (q_{k+1} + q_k))/log B`.
    pub bound: RealRecord,
    /// Smallest `n_0` such that no solution has `n >= n_0`.
    #[serde(with = "crate::decimal::int")]
    pub n_bound: BigInt,
}

impl DirectBound {
    pub fn max_n(&self) -> BigInt {
        &self.n_bound - 1
    }
}

/// Bound `n` in `0 < uγ - p < A·B^{-n}` when `1 <= u <= u_max`.
///
/// For `u < q_{k+1}` one has `|uγ - p| >= |q_k γ - p_k| > 1/(q_{k+1} + q_k)`,
/// whence `n < log(A (q_{k+1} + q_k))/log B`. With `k = None` the smallest
/// index with `q_{k+1} > u_max` is used.
pub fn direct_convergent_bound(
    cf: &ContinuedFraction,
    k: Option<usize>,
    u_max: &BigInt,
    a: &CertifiedReal,
    b: &CertifiedReal,
) -> Result<DirectBound> {
    check_positive(a, "A")?;
    let one = CertifiedReal::from_int(1);
    if !one.certainly_lt(b) {
        return Err(Error::DegenerateCase(format!("B = {b} is not certainly above 1")));
    }
    let k = match k {
        Some(k) => {
            let q1 = cf.denominator(k + 1)?;
            if q1 <= u_max {
                return Err(Error::DegenerateCase(format!(
                    "u may reach q_{} = {q1}: the approximation can be a later convergent",
                    k + 1
                )));
            }
            k
        }
        None => match cf.first_denominator_above(u_max) {
            Some(j) if j >= 1 => j - 1,
            Some(_) => return Err(Error::DegenerateCase("u_max is below q_0".into())),
            None => {
                return Err(Error::NoConvergentFound { threshold: u_max.to_string(), searched: cf.len() })
            }
        },
    };
    let q_k = cf.denominator(k)?.clone();
    let q_k1 = cf.denominator(k + 1)?.clone();
    let bound = a.mul_int(&(&q_k1 + &q_k)).ln()?.checked_div(&b.ln()?)?;
    let n_bound = bound.ceil_upper().max(BigInt::zero());
    Ok(DirectBound { k, q_k, q_k1, bound: bound.to_record(), n_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    /// All `(u, n, m)` with `1 <= u <= M`, `m0 <= m <= m_max` and `0 < uγ - n + μ < A B^{-m}`.
    fn brute_force_violations(gamma: f64, mu: f64, a: f64, b: f64, m: u64, m0: u64, m_max: u64) -> Vec<(u64, i64, u64)> {
        let mut out = Vec::new();
        let widest = a * b.powi(-(m0 as i32));
        for u in 1..=m {
            let x = u as f64 * gamma + mu;
            for n in (x - widest).floor() as i64..=x.ceil() as i64 {
                let v = x - n as f64;
                for mm in m0..=m_max {
                    if v > 0.0 && v < a * b.powi(-(mm as i32)) {
                        out.push((u, n, mm));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn synthetic_instance_succeeds_and_brute_force_agrees() {
        let inst = ReductionInstance::new(e("sqrt(2)"), e("sqrt(3)"), e("10"), e("2"), BigInt::from(50)).unwrap();
        let out = baker_davenport(&inst, ConvergentChoice::default(), &PrecisionPolicy::default()).unwrap();
        assert!(out.is_success());
        assert!(out.q_k > BigInt::from(300));
        let m0: u64 = out.m_bound.clone().unwrap().try_into().unwrap();
        let v = brute_force_violations(2f64.sqrt(), 3f64.sqrt(), 10.0, 2.0, 50, m0, m0 + 10);
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn integer_mu_never_gives_positive_epsilon() {
        // μ = 0: ||μq|| = 0 and ε = -M||γq|| < 0 for every k
        let inst = ReductionInstance::new(e("sqrt(2)"), e("0"), e("10"), e("2"), BigInt::from(50)).unwrap();
        let out = baker_davenport(&inst, ConvergentChoice::Smallest { retries: 5 }, &PrecisionPolicy::default()).unwrap();
        assert_eq!(out.status, ReductionStatus::EpsilonNonpositive);
        assert_eq!(out.tried.len(), 6);
        assert!(out.m_bound.is_none());
    }

    #[test]
    fn invalid_instances() {
        assert!(ReductionInstance::new(e("sqrt(2)"), e("1"), e("0"), e("2"), BigInt::from(5)).is_err());
        assert!(ReductionInstance::new(e("sqrt(2)"), e("1"), e("1"), e("1"), BigInt::from(5)).is_err());
        assert!(ReductionInstance::new(e("sqrt(2)"), e("1"), e("1"), e("2"), BigInt::from(0)).is_err());
    }

    #[test]
    fn pinned_index_below_six_m_is_rejected() {
        let inst = ReductionInstance::new(e("sqrt(2)"), e("sqrt(3)"), e("10"), e("2"), BigInt::from(50)).unwrap();
        let r = baker_davenport(&inst, ConvergentChoice::Pinned(2), &PrecisionPolicy::default());
        assert!(matches!(r, Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn rational_gamma_runs_out_of_convergents() {
        let inst = ReductionInstance::new(e("7/3"), e("sqrt(3)"), e("10"), e("2"), BigInt::from(50)).unwrap();
        let r = baker_davenport(&inst, ConvergentChoice::default(), &PrecisionPolicy { start_bits: 64, ceiling_bits: 256 });
        assert!(r.is_err());
    }

    #[test]
    fn direct_bound_monotone_sanity() {
        let cf = cfrac_certified_prefix(&e("sqrt(2)").eval(256).unwrap(), 30);
        let a = CertifiedReal::from_int(10);
        let b = CertifiedReal::from_int(2);
        let d = direct_convergent_bound(&cf, None, &BigInt::from(100), &a, &b).unwrap();
        assert!(cf.denominator(d.k + 1).unwrap() > &BigInt::from(100));
        assert!(cf.denominator(d.k).unwrap() <= &BigInt::from(100));
        // every n below n_bound admits A B^{-n} >= 1/(q_{k+1}+q_k)
        let s = (&d.q_k1 + &d.q_k).to_string().parse::<f64>().unwrap();
        let n0: i32 = d.max_n().try_into().unwrap();
        assert!(10.0 * 2f64.powi(-n0) >= 1.0 / s);
        assert!(matches!(
            direct_convergent_bound(&cf, Some(0), &BigInt::from(100), &a, &b),
            Err(Error::DegenerateCase(_))
        ));
    }
}
