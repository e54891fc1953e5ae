//! A small expression language for real constants.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | func '(' expr ')' | bin '(' expr ',' expr ')' | '(' expr ')'
//! func   := sqrt | log | ln | exp
//! bin    := max | min
//! number := digits ['.' digits] [('e'|'E') ['-'] digits]
//! ```
//!
//! An identifier not followed by `(` is a variable. Variables must be bound
//! before evaluation, either by [`Expr::substitute`] or through
//! [`Expr::eval_real`].
//!
//! Expressions are kept symbolic so that a quantity can be re-evaluated at a
//! higher precision when a certified decision fails.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::real::{parse_decimal, CertifiedReal};
use super::scalar::Real;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(BigRational),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Sqrt(Box<Expr>),
    Log(Box<Expr>),
    Exp(Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Var(String),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn int(n: impl Into<BigInt>) -> Expr {
        Expr::Num(BigRational::from_integer(n.into()))
    }

    pub fn rational(r: BigRational) -> Expr {
        Expr::Num(r)
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    /// Names of the free variables, sorted and deduplicated.
    pub fn vars(&self) -> Vec<String> {
        fn walk(e: &Expr, out: &mut Vec<String>) {
            match e {
                Expr::Num(_) => {}
                Expr::Var(v) => out.push(v.clone()),
                Expr::Add(a, b)
                | Expr::Sub(a, b)
                | Expr::Mul(a, b)
                | Expr::Div(a, b)
                | Expr::Pow(a, b)
                | Expr::Max(a, b)
                | Expr::Min(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Expr::Neg(a) | Expr::Sqrt(a) | Expr::Log(a) | Expr::Exp(a) => walk(a, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Replace every variable by `bind(name)`; an unbound name is an error.
    pub fn substitute(&self, bind: &dyn Fn(&str) -> Option<Expr>) -> Result<Expr> {
        let un = |a: &Expr| a.substitute(bind).map(Box::new);
        Ok(match self {
            Expr::Num(_) => self.clone(),
            Expr::Var(v) => bind(v).ok_or_else(|| Error::Invalid(format!("unbound variable {v:?}")))?,
            Expr::Add(a, b) => Expr::Add(un(a)?, un(b)?),
            Expr::Sub(a, b) => Expr::Sub(un(a)?, un(b)?),
            Expr::Mul(a, b) => Expr::Mul(un(a)?, un(b)?),
            Expr::Div(a, b) => Expr::Div(un(a)?, un(b)?),
            Expr::Pow(a, b) => Expr::Pow(un(a)?, un(b)?),
            Expr::Neg(a) => Expr::Neg(un(a)?),
            Expr::Sqrt(a) => Expr::Sqrt(un(a)?),
            Expr::Log(a) => Expr::Log(un(a)?),
            Expr::Exp(a) => Expr::Exp(un(a)?),
            Expr::Max(a, b) => Expr::Max(un(a)?, un(b)?),
            Expr::Min(a, b) => Expr::Min(un(a)?, un(b)?),
        })
    }

    /// Evaluate in any [`Real`] scalar, looking variables up in `env`.
    pub fn eval_real<R: Real>(&self, env: &dyn Fn(&str) -> Option<R>) -> Result<R> {
        if let Some(r) = self.exact_value() {
            return Ok(R::from_rational(&r));
        }
        Ok(match self {
            Expr::Num(r) => R::from_rational(r),
            Expr::Var(v) => env(v).ok_or_else(|| Error::Invalid(format!("unbound variable {v:?}")))?,
            Expr::Add(a, b) => a.eval_real(env)? + b.eval_real(env)?,
            Expr::Sub(a, b) => a.eval_real(env)? - b.eval_real(env)?,
            Expr::Mul(a, b) => a.eval_real(env)? * b.eval_real(env)?,
            Expr::Div(a, b) => a.eval_real(env)?.quotient(&b.eval_real(env)?)?,
            Expr::Neg(a) => -a.eval_real(env)?,
            Expr::Pow(a, b) => {
                let base = a.eval_real(env)?;
                match b.exact_value() {
                    Some(e) if e.is_integer() => {
                        let n = e.to_integer().to_i64().ok_or_else(|| Error::Domain("exponent too large".into()))?;
                        base.powi(n)?
                    }
                    _ => base.powr(&b.eval_real(env)?)?,
                }
            }
            Expr::Sqrt(a) => Real::sqrt(&a.eval_real(env)?)?,
            Expr::Log(a) => Real::ln(&a.eval_real(env)?)?,
            Expr::Exp(a) => Real::exp(&a.eval_real(env)?),
            Expr::Max(a, b) => a.eval_real(env)?.max_of(&b.eval_real(env)?),
            Expr::Min(a, b) => a.eval_real(env)?.min_of(&b.eval_real(env)?),
        })
    }

    pub fn sqrt(self) -> Expr {
        Expr::Sqrt(Box::new(self))
    }

    pub fn log(self) -> Expr {
        Expr::Log(Box::new(self))
    }

    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    pub fn pow(self, e: Expr) -> Expr {
        Expr::Pow(Box::new(self), Box::new(e))
    }


    #[allow(clippy::should_implement_trait)]
    pub fn add(self, o: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(o))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, o: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(o))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, o: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(o))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, o: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(o))
    }

    pub fn max(self, o: Expr) -> Expr {
        Expr::Max(Box::new(self), Box::new(o))
    }

    pub fn min(self, o: Expr) -> Expr {
        Expr::Min(Box::new(self), Box::new(o))
    }

    /// `max(x, -x)`.
    pub fn abs(self) -> Expr {
        let n = -self.clone();
        self.max(n)
    }

    /// The exact value, when the expression only involves rational operations.
    pub fn exact_value(&self) -> Option<BigRational> {
        Some(match self {
            Expr::Num(r) => r.clone(),
            Expr::Add(a, b) => a.exact_value()? + b.exact_value()?,
            Expr::Sub(a, b) => a.exact_value()? - b.exact_value()?,
            Expr::Mul(a, b) => a.exact_value()? * b.exact_value()?,
            Expr::Div(a, b) => {
                let d = b.exact_value()?;
                if d.is_zero() {
                    return None;
                }
                a.exact_value()? / d
            }
            Expr::Neg(a) => -a.exact_value()?,
            Expr::Pow(a, b) => {
                let e = b.exact_value()?;
                if !e.is_integer() {
                    return None;
                }
                let e = e.to_integer().to_i32()?;
                let base = a.exact_value()?;
                if base.is_zero() && e < 0 {
                    return None;
                }
                num_traits::pow::Pow::pow(base, e)
            }
            Expr::Max(a, b) => a.exact_value()?.max(b.exact_value()?),
            Expr::Min(a, b) => a.exact_value()?.min(b.exact_value()?),
            Expr::Sqrt(_) | Expr::Log(_) | Expr::Exp(_) | Expr::Var(_) => return None,
        })
    }

    /// Evaluate to a certified enclosure at working precision `prec`.
    pub fn eval(&self, prec: u32) -> Result<CertifiedReal> {
        // a few guard bits so that the result is good to about `prec` bits
        let work = prec + 16;
        Ok(self.eval_inner(work)?.with_precision(prec))
    }

    fn eval_inner(&self, prec: u32) -> Result<CertifiedReal> {
        if let Some(r) = self.exact_value() {
            return Ok(CertifiedReal::from_rational(&r, prec));
        }
        Ok(match self {
            Expr::Num(r) => CertifiedReal::from_rational(r, prec),
            Expr::Add(a, b) => a.eval_inner(prec)?.add(&b.eval_inner(prec)?),
            Expr::Sub(a, b) => a.eval_inner(prec)?.sub(&b.eval_inner(prec)?),
            Expr::Mul(a, b) => a.eval_inner(prec)?.mul(&b.eval_inner(prec)?),
            Expr::Div(a, b) => a.eval_inner(prec)?.checked_div(&b.eval_inner(prec)?)?,
            Expr::Neg(a) => a.eval_inner(prec)?.neg(),
            Expr::Pow(a, b) => {
                let base = a.eval_inner(prec)?;
                match b.exact_value() {
                    Some(e) if e.is_integer() => {
                        let n = e.to_integer().to_i64().ok_or_else(|| Error::Domain("exponent too large".into()))?;
                        base.powi(n)?
                    }
                    _ => base.pow(&b.eval_inner(prec)?)?,
                }
            }
            Expr::Sqrt(a) => a.eval_inner(prec)?.sqrt()?,
            Expr::Log(a) => a.eval_inner(prec)?.ln()?,
            Expr::Exp(a) => a.eval_inner(prec)?.exp(),
            Expr::Max(a, b) => a.eval_inner(prec)?.max(&b.eval_inner(prec)?),
            Expr::Min(a, b) => a.eval_inner(prec)?.min(&b.eval_inner(prec)?),
            Expr::Var(v) => return Err(Error::Invalid(format!("unbound variable {v:?}"))),
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(r) if r.is_negative() => 3,
            Expr::Num(r) if !r.is_integer() => 2,
            _ => 5,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Expr::Add(a, b) => {
                write_child(f, a, 1)?;
                f.write_str("+")?;
                write_child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_child(f, a, 1)?;
                f.write_str("-")?;
                write_child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_child(f, a, 2)?;
                f.write_str("*")?;
                write_child(f, b, 3)
            }
            Expr::Div(a, b) => {
                write_child(f, a, 2)?;
                f.write_str("/")?;
                write_child(f, b, 3)
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, 3)
            }
            Expr::Pow(a, b) => {
                write_child(f, a, 5)?;
                f.write_str("^")?;
                write_child(f, b, 4)
            }
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
            Expr::Log(a) => write!(f, "log({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Max(a, b) => write!(f, "max({a}, {b})"),
            Expr::Min(a, b) => write!(f, "min({a}, {b})"),
            Expr::Var(v) => f.write_str(v),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Expr::parse(s)
    }
}

impl Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Expr::parse(&s).map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = lhs.add(self.term()?);
            } else if self.eat(b'-') {
                lhs = lhs.sub(self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = lhs.mul(self.unary()?);
            } else if self.eat(b'/') {
                lhs = lhs.div(self.unary()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.unary()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let raw = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if !self.eat(b'(') {
                    return Ok(Expr::Var(raw.to_string()));
                }
                let name = raw.to_ascii_lowercase();
                let arg = self.expr()?;
                if name == "max" || name == "min" {
                    if !self.eat(b',') {
                        return Err(self.error("expected ','"));
                    }
                    let second = self.expr()?;
                    if !self.eat(b')') {
                        return Err(self.error("expected ')'"));
                    }
                    let (a, b) = (Box::new(arg), Box::new(second));
                    return Ok(if name == "max" { Expr::Max(a, b) } else { Expr::Min(a, b) });
                }
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                match name.as_str() {
                    "sqrt" => Ok(arg.sqrt()),
                    "log" | "ln" => Ok(arg.log()),
                    "exp" => Ok(arg.exp()),
                    _ => Err(Error::Parse { pos: start, msg: format!("unknown function {name:?}") }),
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            digits(self);
        }
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'-' || self.src[self.pos] == b'+') {
                self.pos += 1;
            }
            let before = self.pos;
            digits(self);
            if self.pos == before {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let r = parse_decimal(text).map_err(|_| Error::Parse { pos: start, msg: format!("bad number {text:?}") })?;
        Ok(Expr::Num(r))
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;

    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

/// `(1 + sqrt(5)) / 2`.
pub fn golden_ratio() -> Expr {
    Expr::int(1).add(Expr::int(5).sqrt()).div(Expr::int(2))
}

impl Default for Expr {
    fn default() -> Self {
        Expr::Num(BigRational::one())
    }
}
