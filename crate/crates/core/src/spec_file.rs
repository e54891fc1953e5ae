//! Flat `key = value` problem files.
//!
//! ```text
//! # F_{n1} + F_{n2} = 2^{z1} + 3^{z2}
//! P = 1
//! Q = 1
//! U0 = 0
//! U1 = 1
//! primes = 2, 3
//! coefficients = 1, 1
//! t = 2
//! epsilon = 1/2
//! ```
//!
//! `coefficients` defaults to all ones. `epsilon` accepts a decimal or `p/q`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::arith::real::parse_decimal;
use crate::error::{Error, Result};
use crate::recurrence::{BinaryRecurrence, ProblemSpec};

const KEYS: [&str; 8] = ["P", "Q", "U0", "U1", "primes", "coefficients", "t", "epsilon"];

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos: line, msg: msg.into() }
}

fn int<T: std::str::FromStr>(v: &str, line: usize, key: &str) -> Result<T> {
    v.trim().parse().map_err(|_| err(line, format!("{key}: {v:?} is not an integer")))
}

fn list(v: &str, line: usize, key: &str) -> Result<Vec<u64>> {
    v.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| int(s, line, key))
        .collect()
}

fn rational(v: &str, line: usize) -> Result<BigRational> {
    let v = v.trim();
    let bad = || err(line, format!("epsilon: {v:?} is not a number"));
    match v.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => parse_decimal(v).map_err(|_| bad()),
    }
}

/// Parse a problem file. Errors carry the 1-based line number in `pos`.
pub fn parse_spec(text: &str) -> Result<ProblemSpec> {
    let mut seen: BTreeMap<&str, (usize, String)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content
            .split_once('=')
            .or_else(|| content.split_once(':'))
            .ok_or_else(|| err(line, format!("expected key = value, got {content:?}")))?;
        let k = k.trim();
        let key = KEYS
            .iter()
            .find(|name| name.eq_ignore_ascii_case(k))
            .ok_or_else(|| err(line, format!("unknown key {k:?}")))?;
        if seen.insert(key, (line, v.trim().to_string())).is_some() {
            return Err(err(line, format!("{key} given twice")));
        }
    }
    let get = |key: &str| seen.get(key).ok_or_else(|| err(0, format!("missing key {key}")));

    let (l, v) = get("P")?;
    let p: i64 = int(v, *l, "P")?;
    let (l, v) = get("Q")?;
    let q: i64 = int(v, *l, "Q")?;
    let (l, v) = get("U0")?;
    let u0: i64 = int(v, *l, "U0")?;
    let (l, v) = get("U1")?;
    let u1: i64 = int(v, *l, "U1")?;
    let (l, v) = get("primes")?;
    let primes = list(v, *l, "primes")?;
    let coefficients = match seen.get("coefficients") {
        Some((l, v)) => list(v, *l, "coefficients")?,
        None => vec![1; primes.len()],
    };
    let (l, v) = get("t")?;
    let t: usize = int(v, *l, "t")?;
    let (l, v) = get("epsilon")?;
    let epsilon = rational(v, *l)?;
    ProblemSpec::new(BinaryRecurrence::new(p, q, u0, u1)?, primes, coefficients, t, epsilon)
}

/// Inverse of [`parse_spec`].
pub fn render_spec(spec: &ProblemSpec) -> String {
    let r = &spec.recurrence;
    let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(", ");
    format!(
        "P = {}\nQ = {}\nU0 = {}\nU1 = {}\nprimes = {}\ncoefficients = {}\nt = {}\nepsilon = {}\n",
        r.p(),
        r.q(),
        r.u0(),
        r.u1(),
        join(&spec.primes),
        join(&spec.coefficients),
        spec.t,
        spec.epsilon
    )
}
