//! The ordered record of every inequality used in a bound chain.
//!
//! Each step names the earlier steps it consumes. Derived constants are kept
//! as [`Expr`] formulas whose variables are those step names; replay binds a
//! variable to the recorded upper endpoint of the step it names, so formulas
//! must be nondecreasing in their variables (they only ever feed upper bounds
//! forward).

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::fixed_point::{solve_fixed_point, verify_fixed_point};
use crate::arith::cfrac::cfrac_expand_expr;
use crate::arith::expr::Expr;
use crate::arith::real::{CertifiedReal, RealRecord};
use crate::arith::PrecisionPolicy;
use crate::error::{Error, Result};
use crate::matveev::matveev_constant;
use crate::recurrence::BinaryRecurrence;
use crate::reduction::{
    baker_davenport, batch_reduce, direct_convergent_bound, ConvergentChoice, DirectBound, ReductionInstance,
    ReductionOutcome, ReductionTemplate,
};
use crate::search::{enumerate_box, valuation_scan, valuation_to_index_bound, ScanResult, SolutionTuple};

/// What a step establishes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum StepOutput {
    Real(RealRecord),
    #[serde(with = "crate::decimal::int")]
    Integer(BigInt),
    Solutions(Vec<SolutionTuple>),
    /// A side condition that holds.
    Holds,
}

/// Which way a recorded real may deviate from its recomputation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sense {
    /// The recorded value is an upper bound.
    Upper,
    /// The recorded value encloses the quantity.
    Value,
}

/// How a step is re-verified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Check {
    /// A logical argument with nothing to recompute.
    Argument,
    Formula {
        expr: Expr,
        sense: Sense,
    },
    /// Integer output `floor(expr)`.
    Floor {
        expr: Expr,
    },
    /// Integer output equal to the largest integer output among the inputs.
    Max,
    /// Every `lhs < rhs`; variables take upper endpoints on the left and lower endpoints on the right.
    Compare {
        pairs: Vec<(Expr, Expr)>,
    },
    /// Output `1.4·30^{t+3}·t^{4.5}·D^2(1 + log D)·∏A_j` over the listed `A_j`.
    Matveev {
        t: usize,
        degree: u32,
        a: Vec<Expr>,
    },
    /// Integer output `N*` for `n < C (log n)^k`.
    FixedPoint {
        c: Expr,
        k: u32,
    },
    Reduction {
        instance: ReductionInstance,
        choice: ConvergentChoice,
        outcome: ReductionOutcome,
    },
    /// Integer output is the largest surviving exponent over the family.
    BatchReduction {
        template: ReductionTemplate,
        #[serde(with = "crate::decimal::u64_map")]
        family: BTreeMap<u64, Expr>,
        choice: ConvergentChoice,
        #[serde(with = "crate::decimal::u64_map")]
        outcomes: BTreeMap<u64, ReductionOutcome>,
    },
    /// Integer output is the largest surviving exponent.
    DirectConvergent {
        gamma: Expr,
        #[serde(with = "crate::decimal::int")]
        u_max: BigInt,
        a: Expr,
        b: Expr,
        result: DirectBound,
    },
    /// Solutions output of the exhaustive Fibonacci search up to `n_max`.
    Enumeration {
        n_max: u64,
    },
    /// Integer output is the maximal valuation.
    ValuationScan {
        result: ScanResult,
    },
    /// Integer output bounds `n_1` given `z_2 <= z_max` (Fibonacci, `p = 3`).
    IndexBound {
        z_max: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerStep {
    /// Unique identifier, also the variable name of the output in later formulas.
    pub name: String,
    /// The inequality, in plain text.
    pub statement: String,
    /// Where in the argument this step sits.
    pub anchor: String,
    pub inputs: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, RealRecord>,
    pub output: StepOutput,
    pub check: Check,
    /// Reference value for the same quantity, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<RealRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl LedgerStep {
    pub fn new(name: &str, statement: impl Into<String>, anchor: &str, output: StepOutput, check: Check) -> Self {
        LedgerStep {
            name: name.to_string(),
            statement: statement.into(),
            anchor: anchor.to_string(),
            inputs: Vec::new(),
            constants: BTreeMap::new(),
            output,
            check,
            reference: None,
            flags: Vec::new(),
        }
    }

    pub fn inputs(mut self, inputs: &[&str]) -> Self {
        self.inputs = inputs.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn constant(mut self, name: &str, value: RealRecord) -> Self {
        self.constants.insert(name.to_string(), value);
        self
    }

    pub fn reference(mut self, value: RealRecord) -> Self {
        self.reference = Some(value);
        self
    }

    pub fn flag(mut self, flag: &str) -> Self {
        self.flags.push(flag.to_string());
        self
    }

    pub fn integer(&self) -> Option<&BigInt> {
        match &self.output {
            StepOutput::Integer(n) => Some(n),
            _ => None,
        }
    }

    /// Enclosure of a numeric output.
    pub fn interval(&self) -> Option<(BigRational, BigRational)> {
        match &self.output {
            StepOutput::Real(r) => r.to_interval().ok(),
            StepOutput::Integer(n) => Some((BigRational::from_integer(n.clone()), BigRational::from_integer(n.clone()))),
            _ => None,
        }
    }

    /// One-line rendering of the output.
    pub fn output_summary(&self) -> String {
        match &self.output {
            StepOutput::Real(r) => format!("<= {:.6e}", approx_hi(r)),
            StepOutput::Integer(n) => n.to_string(),
            StepOutput::Solutions(s) => format!("{} solutions", s.len()),
            StepOutput::Holds => "holds".to_string(),
        }
    }
}

/// Ordered steps, each consumed by a later one; the last step is the final claim.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundLedger {
    /// Scalar type the real-valued steps were computed in.
    pub scalar: String,
    pub steps: Vec<LedgerStep>,
}

impl BoundLedger {
    pub fn new(scalar: &str) -> Self {
        BoundLedger { scalar: scalar.to_string(), steps: Vec::new() }
    }

    pub fn push(&mut self, step: LedgerStep) {
        self.steps.push(step);
    }

    pub fn step(&self, name: &str) -> Option<&LedgerStep> {
        self.steps.iter().find(|s| s.name == name)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Structural checks: unique names, inputs refer to earlier steps and cover
    /// every formula variable, and every step but the last is consumed later.
    pub fn check_links(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        let mut consumed = BTreeSet::new();
        for step in &self.steps {
            if !seen.insert(step.name.as_str()) {
                return Err(mismatch(&step.name, "duplicate step name"));
            }
            for i in &step.inputs {
                if i == &step.name || !seen.contains(i.as_str()) {
                    return Err(mismatch(&step.name, &format!("input {i:?} is not an earlier step")));
                }
                consumed.insert(i.as_str());
            }
            for v in check_vars(&step.check) {
                if !step.inputs.contains(&v) {
                    return Err(mismatch(&step.name, &format!("variable {v:?} is not among the inputs")));
                }
            }
        }
        if let Some((last, rest)) = self.steps.split_last() {
            for s in rest {
                if !consumed.contains(s.name.as_str()) {
                    return Err(mismatch(&s.name, &format!("output is never consumed (final step is {:?})", last.name)));
                }
            }
        }
        Ok(())
    }

    /// Re-derive every step from the recorded data and compare.
    pub fn replay(&self, policy: &PrecisionPolicy) -> Result<()> {
        self.check_links()?;
        let tol = tolerance(&self.scalar);
        for (idx, step) in self.steps.iter().enumerate() {
            let earlier = &self.steps[..idx];
            replay_step(step, earlier, policy, &tol).map_err(|e| match e {
                Error::ReplayMismatch { .. } => e,
                other => mismatch(&step.name, &other.to_string()),
            })?;
        }
        Ok(())
    }
}

fn mismatch(step: &str, detail: &str) -> Error {
    Error::ReplayMismatch { step: step.to_string(), detail: detail.to_string() }
}

fn check_vars(check: &Check) -> Vec<String> {
    let mut out = Vec::new();
    match check {
        Check::Formula { expr, .. } | Check::Floor { expr } => out.extend(expr.vars()),
        Check::FixedPoint { c, .. } => out.extend(c.vars()),
        Check::Compare { pairs } => {
            for (l, r) in pairs {
                out.extend(l.vars());
                out.extend(r.vars());
            }
        }
        Check::Matveev { a, .. } => a.iter().for_each(|e| out.extend(e.vars())),
        _ => {}
    }
    out
}

/// Relative slack allowed between a record and its recomputation.
fn tolerance(scalar: &str) -> BigRational {
    let digits: u32 = match scalar {
        "f32" => 3,
        "f64" => 9,
        _ => 40,
    };
    BigRational::new(BigInt::one(), BigInt::from(10).pow(digits))
}

#[derive(Clone, Copy)]
enum End {
    Lo,
    Hi,
}

fn bind(expr: &Expr, earlier: &[LedgerStep], end: End) -> Result<Expr> {
    expr.substitute(&|name| {
        let step = earlier.iter().find(|s| s.name == name)?;
        let (lo, hi) = step.interval()?;
        Some(Expr::rational(match end {
            End::Lo => lo,
            End::Hi => hi,
        }))
    })
}

fn eval_bound(expr: &Expr, earlier: &[LedgerStep], end: End, policy: &PrecisionPolicy) -> Result<CertifiedReal> {
    let e = bind(expr, earlier, end)?;
    policy.run(|prec| e.eval(prec))
}

fn slack(x: &BigRational, tol: &BigRational) -> BigRational {
    x.abs() * tol + BigRational::new(BigInt::one(), BigInt::from(10).pow(60))
}

fn compare_real(
    recorded: &RealRecord,
    got: &CertifiedReal,
    sense: Sense,
    tol: &BigRational,
) -> std::result::Result<(), String> {
    let (rlo, rhi) = recorded.to_interval().map_err(|e| e.to_string())?;
    let glo = got.lo().to_rational();
    let ghi = got.hi().to_rational();
    if ghi > &rhi + slack(&rhi, tol) {
        return Err(format!("recomputed upper end {got} exceeds the recorded [{}, {}]", recorded.lo, recorded.hi));
    }
    if sense == Sense::Value && glo < &rlo - slack(&rlo, tol) {
        return Err(format!("recomputed lower end {got} is below the recorded [{}, {}]", recorded.lo, recorded.hi));
    }
    Ok(())
}

fn expect_integer(step: &LedgerStep) -> Result<&BigInt> {
    step.integer().ok_or_else(|| mismatch(&step.name, "expected an integer output"))
}

fn expect_equal<T: PartialEq + std::fmt::Debug>(step: &LedgerStep, what: &str, recorded: &T, got: &T) -> Result<()> {
    if recorded != got {
        return Err(mismatch(&step.name, &format!("{what}: recorded {recorded:?}, recomputed {got:?}")));
    }
    Ok(())
}

fn outcome_max(outcome: &ReductionOutcome) -> Option<BigInt> {
    outcome.max_m().map(|m| m.max(BigInt::zero()))
}

fn replay_step(step: &LedgerStep, earlier: &[LedgerStep], policy: &PrecisionPolicy, tol: &BigRational) -> Result<()> {
    match &step.check {
        Check::Argument => Ok(()),
        Check::Formula { expr, sense } => {
            let StepOutput::Real(rec) = &step.output else {
                return Err(mismatch(&step.name, "formula step without a real output"));
            };
            let got = eval_bound(expr, earlier, End::Hi, policy)?;
            compare_real(rec, &got, *sense, tol).map_err(|d| mismatch(&step.name, &d))
        }
        Check::Floor { expr } => {
            let e = bind(expr, earlier, End::Hi)?;
            let got = policy.run(|prec| e.eval(prec)?.floor())?;
            expect_equal(step, "floor", expect_integer(step)?, &got)
        }
        Check::Max => {
            let mut best: Option<BigInt> = None;
            for name in &step.inputs {
                if let Some(n) = earlier.iter().find(|s| &s.name == name).and_then(LedgerStep::integer) {
                    best = Some(best.map_or(n.clone(), |b| b.max(n.clone())));
                }
            }
            let best = best.ok_or_else(|| mismatch(&step.name, "no integer inputs"))?;
            expect_equal(step, "maximum", expect_integer(step)?, &best)
        }
        Check::Compare { pairs } => {
            for (l, r) in pairs {
                let lhs = bind(l, earlier, End::Hi)?;
                let rhs = bind(r, earlier, End::Lo)?;
                let holds = policy.run(|prec| {
                    let (a, b) = (lhs.eval(prec)?, rhs.eval(prec)?);
                    if a.certainly_lt(&b) {
                        Ok(true)
                    } else if b.certainly_le(&a) {
                        Ok(false)
                    } else {
                        Err(Error::precision(format!("cannot order {l} and {r}")))
                    }
                })?;
                if !holds {
                    return Err(mismatch(&step.name, &format!("{l} < {r} fails")));
                }
            }
            Ok(())
        }
        Check::Matveev { t, degree, a } => {
            let StepOutput::Real(rec) = &step.output else {
                return Err(mismatch(&step.name, "Matveev step without a real output"));
            };
            let got = policy.run(|_| {
                let av = a
                    .iter()
                    .map(|e| eval_bound(e, earlier, End::Hi, policy))
                    .collect::<Result<Vec<CertifiedReal>>>()?;
                matveev_constant(*t, *degree, &av)
            })?;
            compare_real(rec, &got, Sense::Upper, tol).map_err(|d| mismatch(&step.name, &d))
        }
        Check::FixedPoint { c, k } => {
            let cv = eval_bound(c, earlier, End::Hi, policy)?;
            let n = expect_integer(step)?;
            let got = solve_fixed_point(&cv, *k)?;
            if n >= &got {
                verify_fixed_point(&cv, *k, n)?;
            }
            // float ledgers may land a few ulps away from the certified iterate
            let diff = BigRational::from_integer((n - &got).abs());
            if diff > slack(&BigRational::from_integer(got.clone()), tol) {
                return Err(mismatch(&step.name, &format!("fixed point: recorded {n}, recomputed {got}")));
            }
            Ok(())
        }
        Check::Reduction { instance, choice, outcome } => {
            let got = baker_davenport(instance, *choice, policy)?;
            expect_equal(step, "reduction outcome", outcome, &got)?;
            let m = outcome_max(outcome).ok_or_else(|| mismatch(&step.name, "reduction did not succeed"))?;
            expect_equal(step, "surviving exponent", expect_integer(step)?, &m)
        }
        Check::BatchReduction { template, family, choice, outcomes } => {
            let got = batch_reduce(family, template, *choice, policy)?;
            let mut best = BigInt::zero();
            for (g, res) in got {
                let res = res.map_err(|e| mismatch(&step.name, &format!("member {g}: {e}")))?;
                let rec = outcomes.get(&g).ok_or_else(|| mismatch(&step.name, &format!("member {g} missing")))?;
                expect_equal(step, &format!("member {g}"), rec, &res)?;
                let m = outcome_max(&res).ok_or_else(|| mismatch(&step.name, &format!("member {g} did not succeed")))?;
                best = best.max(m);
            }
            expect_equal(step, "family maximum", expect_integer(step)?, &best)
        }
        Check::DirectConvergent { gamma, u_max, a, b, result } => {
            let cf = cfrac_expand_expr(gamma, result.k + 1, policy)?;
            let av = policy.run(|prec| a.eval(prec))?;
            let bv = policy.run(|prec| b.eval(prec))?;
            let got = direct_convergent_bound(&cf, None, u_max, &av, &bv)?;
            expect_equal(step, "direct bound", result, &got)?;
            expect_equal(step, "surviving exponent", expect_integer(step)?, &got.max_n())
        }
        Check::Enumeration { n_max } => {
            let StepOutput::Solutions(sols) = &step.output else {
                return Err(mismatch(&step.name, "enumeration step without solutions"));
            };
            expect_equal(step, "solutions", sols, &enumerate_box(*n_max))
        }
        Check::ValuationScan { result } => {
            let got = valuation_scan(&BinaryRecurrence::fibonacci(), &result.params)?;
            expect_equal(step, "scan", result, &got)?;
            expect_equal(step, "maximal valuation", expect_integer(step)?, &BigInt::from(got.max_valuation))
        }
        Check::IndexBound { z_max } => {
            let got = valuation_to_index_bound(*z_max)?;
            expect_equal(step, "index bound", expect_integer(step)?, &BigInt::from(got))
        }
    }
}

/// Recorded upper endpoint as a float, for reporting.
pub fn approx_hi(rec: &RealRecord) -> f64 {
    rec.to_interval().ok().and_then(|(_, hi)| hi.to_f64()).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    fn small_ledger() -> BoundLedger {
        let mut l = BoundLedger::new("certified");
        let c = e("100").eval(192).unwrap();
        l.push(LedgerStep::new(
            "c",
            "c = 100",
            "setup",
            StepOutput::Real(c.to_record()),
            Check::Formula { expr: e("100"), sense: Sense::Value },
        ));
        l.push(
            LedgerStep::new(
                "twice",
                "d <= 2c",
                "derived",
                StepOutput::Real(e("200").eval(192).unwrap().to_record()),
                Check::Formula { expr: e("2*c"), sense: Sense::Upper },
            )
            .inputs(&["c"]),
        );
        l.push(
            LedgerStep::new(
                "n_star",
                "n < 2c log n implies n < N*",
                "fixed point",
                StepOutput::Integer(solve_fixed_point(&CertifiedReal::from_int(200), 1).unwrap()),
                Check::FixedPoint { c: e("twice"), k: 1 },
            )
            .inputs(&["twice"]),
        );
        l.push(
            LedgerStep::new(
                "claim",
                "N* < 10^4",
                "conclusion",
                StepOutput::Holds,
                Check::Compare { pairs: vec![(e("n_star"), e("10000"))] },
            )
            .inputs(&["n_star"]),
        );
        l
    }

    #[test]
    fn replay_accepts_consistent_ledger() {
        let l = small_ledger();
        l.check_links().unwrap();
        l.replay(&PrecisionPolicy::default()).unwrap();
    }

    #[test]
    fn replay_rejects_tampering() {
        let mut l = small_ledger();
        l.steps[1].output = StepOutput::Real(RealRecord::exact("150"));
        assert!(matches!(l.replay(&PrecisionPolicy::default()), Err(Error::ReplayMismatch { .. })));

        let mut l = small_ledger();
        l.steps[2].output = StepOutput::Integer(BigInt::from(500));
        assert!(l.replay(&PrecisionPolicy::default()).is_err());
    }

    #[test]
    fn links_are_checked() {
        let mut l = small_ledger();
        l.steps[3].inputs.clear();
        assert!(l.check_links().is_err());

        let mut l = small_ledger();
        l.steps[2].inputs = vec!["c".into()];
        assert!(l.check_links().is_err());

        let mut l = small_ledger();
        l.steps.swap(0, 1);
        assert!(l.check_links().is_err());
    }

    #[test]
    fn serde_round_trip() {
        let l = small_ledger();
        let json = serde_json::to_string_pretty(&l).unwrap();
        let back: BoundLedger = serde_json::from_str(&json).unwrap();
        assert_eq!(back, l);
        assert!(json.contains("\"kind\": \"fixed-point\""));
    }
}
