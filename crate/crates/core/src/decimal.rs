//! Serde adapters writing big integers and rationals as decimal strings.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

fn parse_int<E: serde::de::Error>(s: &str) -> Result<BigInt, E> {
    BigInt::from_str(s).map_err(|e| E::custom(format!("bad integer {s:?}: {e}")))
}

pub mod int {
    use super::*;

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(n)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        parse_int(&String::deserialize(d)?)
    }
}

pub mod opt_int {
    use super::*;

    pub fn serialize<S: Serializer>(n: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match n {
            Some(n) => s.serialize_some(&n.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        Option::<String>::deserialize(d)?.map(|s| parse_int(&s)).transpose()
    }
}

pub mod int_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for n in v {
            seq.serialize_element(&n.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?.iter().map(|s| parse_int(s)).collect()
    }
}

/// `u64`-keyed maps. JSON object keys are strings, and serde cannot turn a
/// buffered string key back into an integer inside a tagged enum.
pub mod u64_map {
    use std::collections::BTreeMap;

    use serde::Serialize;

    use super::*;

    pub fn serialize<S: Serializer, T: Serialize>(m: &BTreeMap<u64, T>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>, T: Deserialize<'de>>(d: D) -> Result<BTreeMap<u64, T>, D::Error> {
        BTreeMap::<String, T>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| k.parse().map(|k| (k, v)).map_err(|_| D::Error::custom(format!("bad key {k:?}"))))
            .collect()
    }
}

/// `p/q` in lowest terms, or `p` for integers.
pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        match s.split_once('/') {
            Some((p, q)) => {
                let q: BigInt = parse_int(q.trim())?;
                if q == BigInt::from(0) {
                    return Err(D::Error::custom("zero denominator"));
                }
                Ok(BigRational::new(parse_int(p.trim())?, q))
            }
            None => Ok(BigRational::from_integer(parse_int(s.trim())?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use serde::{Deserialize, Serialize};

    use super::*;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Sample {
        #[serde(with = "int")]
        a: BigInt,
        #[serde(with = "opt_int")]
        b: Option<BigInt>,
        #[serde(with = "int_vec")]
        c: Vec<BigInt>,
        #[serde(with = "rational")]
        r: BigRational,
    }

    #[test]
    fn round_trip() {
        let x = Sample {
            a: BigInt::from(10).pow(40) * -3,
            b: None,
            c: vec![BigInt::from(2), BigInt::from(-7)],
            r: BigRational::new(6.into(), (-4).into()),
        };
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"{"a":"-30000000000000000000000000000000000000000","b":null,"c":["2","-7"],"r":"-3/2"}"#);
        assert_eq!(serde_json::from_str::<Sample>(&json).unwrap(), x);
    }
}
