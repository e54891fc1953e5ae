//! The effective constant for `U_{n_1} + ... + U_{n_t} = b_1 p_1^{z_1} + ... + b_s p_s^{z_s}`.
//!
//! Step `i` of the chain bounds `n_1 - n_{i+1}` (or `n_1` itself when
//! `i = t`) by `H_{i+1} (log n_1)^i`, using Matveev's theorem on
//! `Λ_i = b_s p_s^{z_s} √Δ a^{-1} α^{-n_1} (1 + α^{n_2-n_1} + ... + α^{n_i-n_1})^{-1} - 1`
//! with `B = c_1' n_1`. The last bound is resolved by a fixed point and
//! converted into bounds for the exponents.
//!
//! Every quantity is a ledger formula, so the same expression drives the
//! computation in any scalar and the certified replay.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::fixed_point::solve_fixed_point;
use super::ledger::{BoundLedger, Check, LedgerStep, Sense, StepOutput};
use crate::arith::expr::Expr;
use crate::arith::scalar::Real;
use crate::error::{Error, Result};
use crate::heights::QuadraticNumber;
use crate::matveev::{matveev_constant, GammaData};
use crate::recurrence::{nonvanishing_threshold, BranchValue, ProblemSpec};

/// `δ_1, δ_2, δ_3`, all in `(0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaConstants<R> {
    pub delta1: R,
    pub delta2: R,
    pub delta3: R,
}

impl<R: Real> DeltaConstants<R> {
    /// The exponent used at every chain step, `min(δ_1, δ_3)`.
    pub fn delta(&self) -> R {
        self.delta1.min_of(&self.delta3)
    }
}

fn num(n: impl Into<BigInt>) -> Expr {
    Expr::int(n)
}

/// `h(q)` as an expression, choosing the conjugates above 1 once.
fn height_expr(q: &QuadraticNumber) -> Result<Expr> {
    if q.is_zero() {
        return Err(Error::ZeroInput);
    }
    if q.is_rational() {
        let m = q.x().numer().abs().max(q.x().denom().clone());
        return Ok(num(m).log());
    }
    let lead = q.minimal_polynomial().last().cloned().unwrap_or_else(BigInt::one).abs();
    let mut sum = num(lead).log();
    for c in [q.clone(), q.conjugate()] {
        sum = sum.add(num(1).max(c.to_expr().abs()).log());
    }
    Ok(sum.div(num(2)))
}

/// `|q|` as an exact quadratic, for expressions that take logarithms.
fn abs_q(q: &QuadraticNumber) -> Result<QuadraticNumber> {
    let v: crate::arith::real::CertifiedReal = q.value()?;
    if v.is_negative() {
        Ok(q.neg())
    } else if v.is_positive() {
        Ok(q.clone())
    } else {
        Err(Error::ZeroInput)
    }
}

/// Spec-derived expressions, all variable-free.
struct Data {
    t: u64,
    s: u64,
    k: u64,
    b_s: u64,
    alpha: Expr,
    abs_a: Expr,
    abs_b: Expr,
    root: Expr,
    log_delta: Expr,
    h_a: Expr,
    h_alpha: Expr,
    log_p1: Expr,
    log_ps: Expr,
    epsilon: Expr,
    c0: Expr,
    c1: Expr,
    lambda: Expr,
    delta1: Expr,
    delta2: Expr,
    delta3: Expr,
}

impl Data {
    fn new(spec: &ProblemSpec) -> Result<Data> {
        let rec = &spec.recurrence;
        let alpha_v: crate::arith::real::CertifiedReal = rec.alpha().value()?;
        if !crate::arith::real::CertifiedReal::from_int(1).certainly_lt(&alpha_v) {
            return Err(Error::DegenerateSpec(format!(
                "dominant root {alpha_v} is not above 1; the chain needs log alpha > 0"
            )));
        }
        let alpha = rec.alpha().to_expr();
        let abs_beta = abs_q(rec.beta())?.to_expr();
        let abs_a = abs_q(rec.a())?.to_expr();
        let abs_b = if rec.b().is_zero() { num(0) } else { abs_q(rec.b())?.to_expr() };
        let root = num(rec.discriminant().clone()).sqrt();
        let log_p1 = num(spec.p_1()).log();
        let log_ps = num(spec.p_s()).log();
        let epsilon = Expr::rational(spec.epsilon.clone());
        let c0 = abs_a.clone().add(abs_b.clone()).div(root.clone());
        let c1 = num(2)
            .mul(alpha.clone().log())
            .div(log_ps.clone())
            .max(alpha.clone().log().mul(log_ps.clone().add(log_p1.clone())).div(num(2).mul(log_p1.clone()).mul(log_ps.clone())));
        let lambda = alpha.clone().div(abs_beta).min(alpha.clone());
        let below = spec.primes.iter().filter(|&&p| p < spec.p_s()).max().copied();
        let delta1 = match below {
            Some(p) => epsilon.clone().min(num(1).sub(num(p).log().div(log_ps.clone()))),
            None => epsilon.clone(),
        };
        let delta2 = if spec.p_1() == spec.p_s() {
            epsilon.clone()
        } else {
            num(1).sub(log_ps.clone().add(log_p1.clone()).div(num(2).mul(log_ps.clone())))
        };
        let delta3 = epsilon.clone().min(delta2.clone());
        Ok(Data {
            t: spec.t as u64,
            s: spec.s() as u64,
            k: spec.k(),
            b_s: spec.b_s(),
            alpha,
            abs_a,
            abs_b,
            root,
            log_delta: num(rec.discriminant().clone()).log(),
            h_a: height_expr(rec.a())?,
            h_alpha: height_expr(rec.alpha())?,
            log_p1,
            log_ps,
            epsilon,
            c0,
            c1,
            lambda,
            delta1,
            delta2,
            delta3,
        })
    }

    fn delta(&self) -> Expr {
        self.delta1.clone().min(self.delta3.clone())
    }

    /// `(t|b| + [t c_0 √Δ] + (s-1) K (t c_0)^{1-δ_1} √Δ)/|a|`; the bracket is dropped for the last step.
    fn coefficient(&self, with_middle: bool) -> Expr {
        let t = num(self.t);
        let tc0 = t.clone().mul(self.c0.clone());
        let mut e = t.mul(self.abs_b.clone());
        if with_middle {
            e = e.add(tc0.clone().mul(self.root.clone()));
        }
        let tail = num(self.s - 1)
            .mul(num(self.k))
            .mul(tc0.pow(num(1).sub(self.delta1.clone())))
            .mul(self.root.clone());
        e.add(tail).div(self.abs_a.clone())
    }

    /// `max{2h(a) + log Δ + i log 4 + 2 log b_s + 2(i-1) log t, 0.16}`.
    fn c6(&self, i: u64) -> Expr {
        num(2)
            .mul(self.h_a.clone())
            .add(self.log_delta.clone())
            .add(num(i).mul(num(4).log()))
            .add(num(2).mul(num(self.b_s).log()))
            .add(num(2 * (i - 1)).mul(num(self.t).log()))
            .max(Expr::parse("0.16").expect("literal"))
    }
}

/// `δ_1, δ_2, δ_3` for a spec.
pub fn delta_constants<R: Real>(spec: &ProblemSpec) -> Result<DeltaConstants<R>> {
    spec.validate()?;
    let d = Data::new(spec)?;
    let none = |_: &str| None;
    Ok(DeltaConstants { delta1: d.delta1.eval_real(&none)?, delta2: d.delta2.eval_real(&none)?, delta3: d.delta3.eval_real(&none)? })
}

struct Chain<R> {
    ledger: BoundLedger,
    values: BTreeMap<String, R>,
}

impl<R: Real> Chain<R> {
    fn eval(&self, e: &Expr) -> Result<R> {
        e.eval_real(&|name| self.values.get(name).cloned())
    }

    fn formula(&mut self, name: &str, statement: impl Into<String>, inputs: &[&str], expr: Expr, sense: Sense) -> Result<R> {
        let v = self.eval(&expr)?;
        self.ledger.push(
            LedgerStep::new(name, statement, "effective constant", StepOutput::Real(v.record()), Check::Formula { expr, sense })
                .inputs(inputs),
        );
        self.values.insert(name.to_string(), v.clone());
        Ok(v)
    }
}

/// `C` with `max{n_1, ..., n_t, z_1, ..., z_s} < C` for every solution in `T_ε`, and the ledger behind it.
pub fn theorem1_constant<R: Real>(spec: &ProblemSpec) -> Result<(R, BoundLedger)> {
    spec.validate()?;
    let d = Data::new(spec)?;
    let t = d.t;
    let mut ch: Chain<R> = Chain { ledger: BoundLedger::new(R::NAME), values: BTreeMap::new() };

    ch.formula("log_alpha", "log alpha > 0 for the dominant root", &[], d.alpha.clone().log(), Sense::Value)?;
    ch.formula("growth_c0", "|U_n| <= c_0 alpha^n", &[], d.c0.clone(), Sense::Value)?;
    ch.formula("growth_c1", "z_s <= c_1 n_1 once n_1 exceeds the nonvanishing threshold", &[], d.c1.clone(), Sense::Value)?;

    // branches are picked once; the formula keeps only the live ones
    let rec = &spec.recurrence;
    let mut ell = num(0);
    // with b = 0 there is no conjugate term and nothing can cancel
    if !rec.b().is_zero() {
        let th = nonvanishing_threshold::<crate::arith::real::CertifiedReal>(spec)?;
        let abs_beta = abs_q(rec.beta())?.to_expr();
        let num3 = num(d.b_s).mul(d.root.clone()).div(d.abs_a.clone()).log();
        let den3 = d.alpha.clone().log().sub(d.c1.clone().mul(d.log_ps.clone()));
        for br in &th.branches {
            if let BranchValue::Bound(_) = br.value {
                let ni = num(br.i as u64).mul(d.abs_b.clone()).div(d.abs_a.clone()).log();
                let q = match br.branch {
                    1 => ni.div(d.alpha.clone().div(abs_beta.clone()).log()),
                    2 => ni.div(d.alpha.clone().log()),
                    _ => num3.clone().div(den3.clone()),
                };
                ell = ell.max(q.abs());
            }
        }
    }
    ch.formula(
        "nonvanishing",
        "every Lambda_i is nonzero when n_1 exceeds this threshold",
        &["log_alpha"],
        ell,
        Sense::Value,
    )?;

    ch.formula("delta_1", "powers of the smaller primes are at most p_s^{(1 - delta_1) z_s}", &[], d.delta1.clone(), Sense::Value)?;
    ch.formula("delta_2", "gap between the largest and the smallest prime", &[], d.delta2.clone(), Sense::Value)?;
    ch.formula("delta_3", "min(epsilon, delta_2)", &["delta_2"], Expr::var("delta_2").min(d.epsilon.clone()), Sense::Value)?;
    ch.formula(
        "chain_scale",
        "1/(delta log lambda) with delta = min(delta_1, delta_3) and lambda = min(alpha/|beta|, alpha)",
        &["delta_1", "delta_3"],
        num(1).div(d.delta().mul(d.lambda.clone().log())),
        Sense::Value,
    )?;
    if t > 1 {
        ch.formula("coefficient_c", "upper-bound coefficient of |Lambda_i| for i < t", &["growth_c0", "delta_1"], d.coefficient(true), Sense::Value)?;
    }
    ch.formula("coefficient_c9", "upper-bound coefficient of |Lambda_t|", &["growth_c0", "delta_1"], d.coefficient(false), Sense::Value)?;
    ch.formula(
        "kappa",
        "1 + log(c_1' n_1) <= kappa log n_1 for n_1 >= 3, c_1' = max(c_1, 1)",
        &["growth_c1"],
        num(2).add(num(1).max(Expr::var("growth_c1")).log()),
        Sense::Upper,
    )?;

    let p_s = QuadraticNumber::integer(spec.p_s());
    let a1 = GammaData::<R>::of(&p_s)?.requirement(2);
    let a2 = GammaData::<R>::of(rec.alpha())?.requirement(2);
    let a1_e = num(2).mul(d.log_ps.clone()).max(Expr::parse("0.16").expect("literal"));
    let a2_e = num(2).mul(d.h_alpha.clone()).max(d.alpha.clone().log()).max(Expr::parse("0.16").expect("literal"));
    let (a1_chk, a2_chk) = (ch.eval(&a1_e)?, ch.eval(&a2_e)?);
    if !(a1.certainly_le(&(a1_chk.clone() * R::from_ratio(1_000_001, 1_000_000)))
        && a2.certainly_le(&(a2_chk.clone() * R::from_ratio(1_000_001, 1_000_000))))
    {
        return Err(Error::HypothesisViolation("A_1 or A_2 is below its Matveev requirement".into()));
    }

    let mut gap_names: Vec<String> = Vec::new();
    for i in 1..=t {
        let a3 = format!("a3_step_{i}");
        let mv = format!("matveev_step_{i}");
        let gap = format!("gap_step_{i}");
        let mut p = d.c6(i);
        for g in &gap_names {
            p = p.add(num(2).mul(d.alpha.clone().log()).mul(Expr::var(g.as_str())));
        }
        let mut inputs: Vec<&str> = gap_names.iter().map(String::as_str).collect();
        inputs.push("log_alpha");
        ch.formula(
            &a3,
            format!("2 h(gamma_3) <= P_{i} (log n_1)^{}", i - 1),
            &inputs,
            p,
            Sense::Upper,
        )?;
        let a_exprs = vec![a1_e.clone(), a2_e.clone(), Expr::var(a3.as_str())];
        let a_vals = vec![a1_chk.clone(), a2_chk.clone(), ch.values[&a3].clone()];
        let c = matveev_constant(3, 2, &a_vals)?;
        ch.ledger.push(
            LedgerStep::new(
                &mv,
                format!("log|Lambda_{i}| > -E_{i} (1 + log(c_1' n_1)) (log n_1)^{} with t = 3, D = 2", i - 1),
                "linear form lower bound",
                StepOutput::Real(c.record()),
                Check::Matveev { t: 3, degree: 2, a: a_exprs },
            )
            .inputs(&[&a3]),
        );
        ch.values.insert(mv.clone(), c);
        let last = i == t;
        let coeff = if last { "coefficient_c9" } else { "coefficient_c" };
        let expr = Expr::var(mv.as_str())
            .mul(Expr::var("kappa"))
            .add(num(0).max(Expr::var(coeff).log()))
            .mul(Expr::var("chain_scale"));
        let statement = if last {
            format!("n_1 < H (log n_1)^{t}")
        } else {
            format!("n_1 - n_{} < H (log n_1)^{i}", i + 1)
        };
        ch.formula(&gap, statement, &[&mv, "kappa", coeff, "chain_scale"], expr, Sense::Upper)?;
        gap_names.push(gap);
    }
    let last_gap = gap_names.last().cloned().expect("t >= 1");
    let n_star = solve_fixed_point(&ch.values[&last_gap], t as u32)?;
    ch.ledger.push(
        LedgerStep::new(
            "index_fixed_point",
            format!("n_1 < H (log n_1)^{t} implies n_1 < {n_star}"),
            "absolute bound",
            StepOutput::Integer(n_star.clone()),
            Check::FixedPoint { c: Expr::var(last_gap.as_str()), k: t as u32 },
        )
        .inputs(&[&last_gap]),
    );
    ch.values.insert("index_fixed_point".into(), R::from_bigint(&n_star));

    let log_tc0 = num(t).mul(d.c0.clone()).log().max(num(0));
    ch.formula(
        "trivial_branch",
        "if n_1 is below this, z_s is bounded without linear forms",
        &["growth_c0", "log_alpha"],
        log_tc0.clone().div(d.alpha.clone().log()),
        Sense::Value,
    )?;
    ch.formula(
        "exponent_bound",
        "p_1^{z_j} <= t c_0 alpha^{n_1} bounds every z_j",
        &["index_fixed_point", "growth_c0", "log_alpha"],
        log_tc0.add(Expr::var("index_fixed_point").mul(d.alpha.clone().log())).div(d.log_p1.clone()),
        Sense::Upper,
    )?;
    let c_expr = Expr::var("index_fixed_point")
        .max(Expr::var("nonvanishing").add(num(1)))
        .max(num(3))
        .max(Expr::var("trivial_branch").add(num(1)))
        .max(Expr::var("exponent_bound").add(num(1)));
    let c = ch.formula(
        "constant_c",
        "every n_i and z_j of a solution lies below C",
        &["index_fixed_point", "nonvanishing", "trivial_branch", "exponent_bound"],
        c_expr,
        Sense::Upper,
    )?;
    if !c.certainly_positive() {
        return Err(Error::Domain(format!("C = {c:?} is not positive")));
    }
    ch.ledger.check_links()?;
    Ok((c, ch.ledger))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::real::CertifiedReal;
    use crate::arith::PrecisionPolicy;
    use crate::recurrence::BinaryRecurrence;
    use num_rational::BigRational;

    #[test]
    fn fibonacci_constant_replays() {
        let spec = ProblemSpec::fibonacci_2_3();
        let (c, ledger) = theorem1_constant::<CertifiedReal>(&spec).unwrap();
        for s in &ledger.steps {
            println!("{:22} {}", s.name, s.output_summary());
        }
        assert!(c.is_positive());
        ledger.replay(&PrecisionPolicy::default()).unwrap();
        let (cf, lf) = theorem1_constant::<f64>(&spec).unwrap();
        assert!((cf / c.to_f64() - 1.0).abs() < 1e-9);
        lf.replay(&PrecisionPolicy::default()).unwrap();
    }

    #[test]
    fn delta_values() {
        let d = delta_constants::<f64>(&ProblemSpec::fibonacci_2_3()).unwrap();
        let l = 2f64.ln() / 3f64.ln();
        assert!((d.delta1 - 0.5f64.min(1.0 - l)).abs() < 1e-15);
        assert!((d.delta2 - (1.0 - (1.0 + l) / 2.0)).abs() < 1e-15);
        assert!((d.delta3 - d.delta2.min(0.5)).abs() < 1e-15);
    }

    #[test]
    fn single_term_collapses() {
        let spec = ProblemSpec::new(BinaryRecurrence::fibonacci(), vec![2], vec![1], 1, BigRational::new(1.into(), 3.into())).unwrap();
        let (_, ledger) = theorem1_constant::<CertifiedReal>(&spec).unwrap();
        let matveev = ledger.steps.iter().filter(|s| matches!(s.check, Check::Matveev { .. })).count();
        assert_eq!(matveev, 1);
        ledger.replay(&PrecisionPolicy::default()).unwrap();
    }

    #[test]
    fn contracting_root_is_degenerate() {
        let rec = BinaryRecurrence::new(-1, 1, 0, 1).unwrap();
        let spec = ProblemSpec::new(rec, vec![2], vec![1], 2, BigRational::new(1.into(), 2.into())).unwrap();
        assert!(matches!(theorem1_constant::<f64>(&spec), Err(Error::DegenerateSpec(_))));
    }
}
