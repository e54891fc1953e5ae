//! Exact enumeration in finite boxes and the p-adic valuation endgame.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::real::CertifiedReal;
use crate::arith::PrecisionPolicy;
use crate::error::{Error, Result};
use crate::heights::QuadraticNumber;
use crate::recurrence::BinaryRecurrence;

/// A solution `(n_1, n_2, z_1, z_2)` of `F_{n_1} + F_{n_2} = 2^{z_1} + 3^{z_2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SolutionTuple {
    pub n1: u64,
    pub n2: u64,
    pub z1: u64,
    pub z2: u64,
}

impl SolutionTuple {
    pub fn new(n1: u64, n2: u64, z1: u64, z2: u64) -> Self {
        SolutionTuple { n1, n2, z1, z2 }
    }

    /// Re-check the equation with exact integers.
    pub fn verify(&self) -> bool {
        let f = BinaryRecurrence::fibonacci();
        let lhs = f.term(self.n1) + f.term(self.n2);
        let rhs = BigInt::from(2).pow(self.z1 as u32) + BigInt::from(3).pow(self.z2 as u32);
        self.n1 >= self.n2 && self.z2 >= self.z1 && lhs == rhs
    }
}

impl fmt::Display for SolutionTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.n1, self.n2, self.z1, self.z2)
    }
}

/// Largest `z` with `base^z <= x`, for `x >= 1`.
fn floor_log(x: &BigInt, base: u32) -> u64 {
    let b = BigInt::from(base);
    let mut z = 0;
    let mut p = b.clone();
    while &p <= x {
        p *= &b;
        z += 1;
    }
    z
}

/// All solutions with `n_2 <= n_1 <= n_max` and `z_1 <= z_2 <= floor(log(2 F_{n_max})/log 3)`, sorted.
pub fn enumerate_box(n_max: u64) -> Vec<SolutionTuple> {
    let fib = BinaryRecurrence::fibonacci().terms(n_max.max(1));
    let top = &fib[n_max as usize] * BigInt::from(2);
    let z2_max = if top.is_zero() { 0 } else { floor_log(&top, 3) };

    let pow2: Vec<BigInt> = (0..=z2_max).map(|z| BigInt::from(2).pow(z as u32)).collect();
    let pow3: Vec<BigInt> = (0..=z2_max).map(|z| BigInt::from(3).pow(z as u32)).collect();
    let mut sums: HashMap<BigInt, Vec<(u64, u64)>> = HashMap::new();
    for z2 in 0..=z2_max {
        for z1 in 0..=z2 {
            sums.entry(&pow2[z1 as usize] + &pow3[z2 as usize]).or_default().push((z1, z2));
        }
    }

    let found: BTreeSet<SolutionTuple> = (0..=n_max)
        .into_par_iter()
        .flat_map_iter(|n1| {
            let fib = &fib;
            let sums = &sums;
            (0..=n1).flat_map(move |n2| {
                let s = &fib[n1 as usize] + &fib[n2 as usize];
                sums.get(&s)
                    .into_iter()
                    .flatten()
                    .map(move |&(z1, z2)| SolutionTuple::new(n1, n2, z1, z2))
            })
        })
        .collect();
    found.into_iter().collect()
}

/// `ν_p(x)`; `None` stands for the infinite valuation of `0`.
pub fn padic_valuation(x: &BigInt, p: u64) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        y = q;
        v += 1;
    }
}

fn valuation_u128(mut x: u128, p: u128) -> u64 {
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// Ranges of `ν_p(U_{n_1} + U_{n_2} - b^{z_1})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanParams {
    /// `n_1` runs over `(n1_exclusive_lo, n1_hi]`.
    pub n1_exclusive_lo: u64,
    pub n1_hi: u64,
    /// `0 <= n_1 - n_2 <= gap_max`, and `n_2 >= 0`.
    pub gap_max: u64,
    pub z1_max: u64,
    pub p: u64,
    /// The subtracted power base `b`.
    pub base: u64,
}

impl ScanParams {
    pub fn fibonacci_3(n1_exclusive_lo: u64, n1_hi: u64, gap_max: u64, z1_max: u64) -> Self {
        ScanParams { n1_exclusive_lo, n1_hi, gap_max, z1_max, p: 3, base: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanResult {
    pub params: ScanParams,
    pub max_valuation: u64,
    /// Lexicographically smallest `(n_1, n_2, z_1)` attaining the maximum.
    pub argmax: Option<(u64, u64, u64)>,
    /// Triples with `U_{n_1} + U_{n_2} = b^{z_1}`, excluded from the maximum.
    pub zero_cases: Vec<(u64, u64, u64)>,
    pub triples: u64,
}

#[derive(Default)]
struct Partial {
    max: u64,
    argmax: Option<(u64, u64, u64)>,
    zeros: Vec<(u64, u64, u64)>,
    count: u64,
}

impl Partial {
    fn offer(&mut self, v: u64, at: (u64, u64, u64)) {
        if self.argmax.is_none() || v > self.max || (v == self.max && Some(at) < self.argmax) {
            self.max = v;
            self.argmax = Some(at);
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        if let Some(at) = other.argmax {
            self.offer(other.max, at);
        }
        self.zeros.extend(other.zeros);
        self.count += other.count;
        self
    }
}

/// Maximum of `ν_p(U_{n_1} + U_{n_2} - b^{z_1})` over the ranges, zero differences excluded.
///
/// Residues are taken modulo the largest power of `p` below `2^63`; a zero
/// residue falls back to exact integers.
pub fn valuation_scan(rec: &BinaryRecurrence, params: &ScanParams) -> Result<ScanResult> {
    if params.p < 2 {
        return Err(Error::Invalid(format!("p = {} is not a prime", params.p)));
    }
    let p = params.p as u128;
    let mut modulus: u128 = 1;
    while modulus * p < (1u128 << 63) {
        modulus *= p;
    }
    let m_big = BigInt::from(modulus);
    let exact = rec.terms(params.n1_hi);
    let residues: Vec<u128> = exact.iter().map(|x| x.mod_floor(&m_big).to_u128().unwrap()).collect();
    let pow_exact: Vec<BigInt> = (0..=params.z1_max).map(|z| BigInt::from(params.base).pow(z as u32)).collect();
    let pow_res: Vec<u128> = pow_exact.iter().map(|x| x.mod_floor(&m_big).to_u128().unwrap()).collect();

    let lo = params.n1_exclusive_lo + 1;
    let merged = (lo..=params.n1_hi)
        .into_par_iter()
        .map(|n1| {
            let mut part = Partial::default();
            let n2_lo = n1.saturating_sub(params.gap_max);
            for n2 in n2_lo..=n1 {
                let s = (residues[n1 as usize] + residues[n2 as usize]) % modulus;
                for z1 in 0..=params.z1_max {
                    part.count += 1;
                    let r = (s + modulus - pow_res[z1 as usize]) % modulus;
                    let v = if r != 0 {
                        valuation_u128(r, p)
                    } else {
                        let x = &exact[n1 as usize] + &exact[n2 as usize] - &pow_exact[z1 as usize];
                        match padic_valuation(&x, params.p) {
                            Some(v) => v,
                            None => {
                                part.zeros.push((n1, n2, z1));
                                continue;
                            }
                        }
                    };
                    part.offer(v, (n1, n2, z1));
                }
            }
            part
        })
        .reduce(Partial::default, Partial::merge);
    let mut zero_cases = merged.zeros;
    zero_cases.sort_unstable();
    Ok(ScanResult {
        params: params.clone(),
        max_valuation: merged.max,
        argmax: merged.argmax,
        zero_cases,
        triples: merged.count,
    })
}

/// `2 + ceil(log(2 p^z)/log α)`: any `n_1` with `α^{n_1-2} <= 2 p^z` is below or equal to this.
pub fn index_bound_from_valuation(alpha: &QuadraticNumber, p: u64, z_max: u64, policy: &PrecisionPolicy) -> Result<u64> {
    policy.run(|prec| {
        let a = alpha.eval(prec)?;
        let rhs = CertifiedReal::from_int(BigInt::from(2) * BigInt::from(p).pow(z_max as u32));
        let l = rhs.ln()?.checked_div(&a.ln()?)?;
        let c = l.ceil_upper();
        c.to_u64()
            .map(|c| c + 2)
            .ok_or_else(|| Error::Domain(format!("index bound {c} out of range")))
    })
}

/// Fibonacci with `p = 3`: `n_1 <= 2 + ceil(log(2·3^{z_2})/log α)`.
pub fn valuation_to_index_bound(z2_max: u64) -> Result<u64> {
    index_bound_from_valuation(BinaryRecurrence::fibonacci().alpha(), 3, z2_max, &PrecisionPolicy::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_boxes() {
        let two = enumerate_box(2);
        assert_eq!(
            two,
            vec![SolutionTuple::new(1, 1, 0, 0), SolutionTuple::new(2, 1, 0, 0), SolutionTuple::new(2, 2, 0, 0)]
        );
        assert!(enumerate_box(12).iter().all(SolutionTuple::verify));
    }

    #[test]
    fn valuations() {
        assert_eq!(padic_valuation(&BigInt::from(9), 3), Some(2));
        assert_eq!(padic_valuation(&BigInt::from(12), 2), Some(2));
        assert_eq!(padic_valuation(&BigInt::from(-24), 2), Some(3));
        assert_eq!(padic_valuation(&BigInt::from(0), 3), None);
        assert_eq!(padic_valuation(&BigInt::from(7), 3), Some(0));
    }

    #[test]
    fn index_bounds() {
        assert_eq!(valuation_to_index_bound(12).unwrap(), 31);
        assert_eq!(valuation_to_index_bound(0).unwrap(), 4);
    }

    #[test]
    fn scan_matches_direct_evaluation() {
        let rec = BinaryRecurrence::fibonacci();
        let params = ScanParams::fibonacci_3(0, 30, 30, 20);
        let r = valuation_scan(&rec, &params).unwrap();
        let mut best = 0;
        let mut zeros = Vec::new();
        for n1 in 1..=30u64 {
            for n2 in 0..=n1 {
                for z1 in 0..=20u64 {
                    let x = rec.term(n1) + rec.term(n2) - BigInt::from(2).pow(z1 as u32);
                    match padic_valuation(&x, 3) {
                        Some(v) => best = best.max(v),
                        None => zeros.push((n1, n2, z1)),
                    }
                }
            }
        }
        assert_eq!(r.max_valuation, best);
        assert_eq!(r.zero_cases, zeros);
        assert_eq!(r.triples, 21 * (2..=31).sum::<u64>());
    }
}
