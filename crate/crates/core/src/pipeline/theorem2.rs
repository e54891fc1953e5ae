//! The complete certified solve of `F_{n_1} + F_{n_2} = 2^{z_1} + 3^{z_2}`.
//!
//! The run is a fixed sequence of ledger steps: a finite search for
//! `n_1 <= 100`, two linear forms in logarithms bounded with Matveev's
//! theorem, Baker–Davenport reductions of both, a direct continued-fraction
//! argument for the one degenerate family member, and a 3-adic scan that
//! pushes the remaining range below 100.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::fixed_point::solve_fixed_point;
use super::ledger::{BoundLedger, Check, LedgerStep, Sense, StepOutput};
use crate::arith::expr::Expr;
use crate::arith::real::{parse_decimal, CertifiedReal, RealRecord};
use crate::arith::scalar::Real;
use crate::arith::PrecisionPolicy;
use crate::error::{Error, Result};
use crate::heights::QuadraticNumber;
use crate::matveev::{matveev_constant, validate_hypotheses, GammaData, LinearFormSpec};
use crate::recurrence::BinaryRecurrence;
use crate::reduction::{
    baker_davenport, batch_reduce, direct_convergent_bound, expansion_for, ConvergentChoice, ReductionInstance,
    ReductionTemplate,
};
use crate::search::{enumerate_box, valuation_scan, valuation_to_index_bound, ScanParams, SolutionTuple};

/// Step names, for reading results back out of the ledger.
pub mod steps {
    pub const BOX: &str = "box_search";
    pub const MATVEEV_1: &str = "matveev_lambda1";
    pub const GAP_CHAIN: &str = "gap_chain";
    pub const A3: &str = "lambda2_a3";
    pub const MATVEEV_2: &str = "matveev_lambda2";
    pub const INDEX_CHAIN: &str = "index_chain";
    pub const FIXED_POINT: &str = "index_fixed_point";
    pub const FIXED_POINT_REFERENCE: &str = "index_fixed_point_reference";
    pub const M: &str = "reduction_m";
    pub const LAMBDA1_POS: &str = "lambda1_pos_reduction";
    pub const LAMBDA1_NEG: &str = "lambda1_neg_reduction";
    pub const GAP_BOUND: &str = "gap_bound";
    pub const LAMBDA2_POS: &str = "lambda2_pos_batch";
    pub const LAMBDA2_NEG: &str = "lambda2_neg_batch";
    pub const GAP2_POS: &str = "gap2_pos_direct";
    pub const GAP2_NEG: &str = "gap2_neg_direct";
    pub const INDEX_BOUND: &str = "index_bound";
    pub const Z2_BOUND: &str = "z2_bound";
    pub const SCAN: &str = "valuation_scan";
    pub const VALUATION_INDEX: &str = "valuation_index_bound";
    pub const CONTRADICTION: &str = "contradiction";
    pub const SOLUTIONS: &str = "solutions";
}

const ALPHA: &str = "((1+sqrt(5))/2)";
const B: &str = "((1+sqrt(5))/2/2^0.45)";

/// Expression with `{a}` for `α` and `{b}` for `α/2^0.45`.
fn ex(src: &str) -> Expr {
    Expr::parse(&src.replace("{a}", ALPHA).replace("{b}", B)).expect("built-in expression")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem2Options {
    pub policy: PrecisionPolicy,
    /// Largest `n_1` searched exhaustively.
    pub box_n: u64,
    /// Upper bound for the multiplier `u` in every reduction.
    pub m: BigInt,
    pub lambda1_choice: ConvergentChoice,
    pub lambda2_choice: ConvergentChoice,
    /// The second family is reduced for gaps `0..=gap_max` (at least the proven gap bound).
    pub gap_max: u64,
    /// Relative amount by which a recomputed constant may exceed its reference.
    pub drift_tolerance: BigRational,
}

impl Default for Theorem2Options {
    fn default() -> Self {
        Theorem2Options {
            policy: PrecisionPolicy::default(),
            box_n: 100,
            m: BigInt::from(9) * BigInt::from(10).pow(30),
            lambda1_choice: ConvergentChoice::Pinned(64),
            lambda2_choice: ConvergentChoice::default(),
            gap_max: 485,
            drift_tolerance: BigRational::new(2.into(), 100.into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTiming {
    pub phase: String,
    pub millis: u64,
}

#[derive(Clone, Debug)]
pub struct Theorem2Solution {
    pub solutions: Vec<SolutionTuple>,
    pub ledger: BoundLedger,
    pub phases: Vec<PhaseTiming>,
}

/// A failed run together with the steps completed before the failure.
#[derive(Debug, Clone, thiserror::Error)]
#[error("{error} (after {} ledger steps)", ledger.len())]
pub struct PipelineFailure {
    #[source]
    pub error: Error,
    pub ledger: BoundLedger,
    pub phases: Vec<PhaseTiming>,
}

struct Run<'a> {
    opts: &'a Theorem2Options,
    ledger: BoundLedger,
    values: BTreeMap<String, CertifiedReal>,
    phases: Vec<PhaseTiming>,
    clock: Instant,
}

impl Run<'_> {
    fn eval(&self, e: &Expr) -> Result<CertifiedReal> {
        if e.vars().is_empty() {
            return self.opts.policy.run(|p| e.eval(p));
        }
        e.eval_real(&|name| self.values.get(name).cloned())
    }

    fn holds(&self, pairs: &[(Expr, Expr)]) -> Result<()> {
        for (l, r) in pairs {
            let ok = self.opts.policy.run(|p| {
                let bind = |e: &Expr| -> Result<CertifiedReal> {
                    if e.vars().is_empty() {
                        e.eval(p)
                    } else {
                        e.eval_real(&|name| self.values.get(name).cloned())
                    }
                };
                let (a, b) = (bind(l)?, bind(r)?);
                if a.certainly_lt(&b) {
                    Ok(true)
                } else if b.certainly_le(&a) {
                    Ok(false)
                } else {
                    Err(Error::precision(format!("cannot order {l} and {r}")))
                }
            })?;
            if !ok {
                return Err(Error::HypothesisViolation(format!("{l} < {r} fails")));
            }
        }
        Ok(())
    }

    fn push_real(&mut self, step: LedgerStep, value: CertifiedReal) {
        self.values.insert(step.name.clone(), value);
        self.ledger.push(step);
    }

    fn push_int(&mut self, step: LedgerStep) {
        if let Some(n) = step.integer() {
            self.values.insert(step.name.clone(), CertifiedReal::from_int(n.clone()));
        }
        self.ledger.push(step);
    }

    fn phase(&mut self, name: &str) {
        let now = Instant::now();
        let d: Duration = now - self.clock;
        self.clock = now;
        self.phases.push(PhaseTiming { phase: name.to_string(), millis: d.as_millis() as u64 });
    }

    /// Compare against a reference value; fail if ours is looser beyond the tolerance.
    fn reference(&self, step: LedgerStep, ours: &CertifiedReal, reference: &str) -> Result<LedgerStep> {
        let r = parse_decimal(reference)?;
        let limit = &r * (BigRational::from_integer(1.into()) + &self.opts.drift_tolerance);
        let lo = ours.lo().to_rational();
        let hi = ours.hi().to_rational();
        if lo > limit {
            return Err(Error::ConstantDrift(format!(
                "{}: recomputed {ours} exceeds the reference {reference} by more than the tolerance",
                step.name
            )));
        }
        let step = step.reference(RealRecord::exact(reference));
        Ok(if hi < r {
            step.flag("reference-looser")
        } else if lo > r {
            step.flag("reference-rounds-down")
        } else {
            step
        })
    }

    fn formula(&mut self, name: &str, statement: &str, anchor: &str, inputs: &[&str], expr: Expr, reference: Option<&str>) -> Result<CertifiedReal> {
        let v = self.eval(&expr)?;
        let mut step = LedgerStep::new(name, statement, anchor, StepOutput::Real(v.to_record()), Check::Formula { expr, sense: Sense::Upper })
            .inputs(inputs);
        if let Some(r) = reference {
            step = self.reference(step, &v, r)?;
        }
        self.push_real(step, v.clone());
        Ok(v)
    }

    fn compare(&mut self, name: &str, statement: &str, anchor: &str, inputs: &[&str], pairs: Vec<(Expr, Expr)>) -> Result<()> {
        self.holds(&pairs)?;
        let step = LedgerStep::new(name, statement, anchor, StepOutput::Holds, Check::Compare { pairs }).inputs(inputs);
        self.ledger.push(step);
        Ok(())
    }

    fn argument(&mut self, name: &str, statement: &str, anchor: &str, inputs: &[&str]) {
        self.ledger.push(LedgerStep::new(name, statement, anchor, StepOutput::Holds, Check::Argument).inputs(inputs));
    }

    fn matveev(&mut self, name: &str, statement: &str, inputs: &[&str], a: &[&str], gammas: &[QuadraticNumber], reference: &str) -> Result<CertifiedReal> {
        let a_expr: Vec<Expr> = a.iter().map(|s| ex(s)).collect();
        let a_val = a_expr.iter().map(|e| self.eval(e)).collect::<Result<Vec<_>>>()?;
        let data = gammas.iter().map(GammaData::<CertifiedReal>::of).collect::<Result<Vec<_>>>()?;
        let lf = LinearFormSpec::new(2, a_val[..gammas.len()].to_vec(), CertifiedReal::from_int(101));
        if !validate_hypotheses(&lf, &data) {
            return Err(Error::HypothesisViolation(format!("{name}: some A_j is below max{{2h, |log|, 0.16}}")));
        }
        let c = matveev_constant(3, 2, &a_val)?;
        let mut step = LedgerStep::new(
            name,
            statement,
            "linear form lower bound",
            StepOutput::Real(c.to_record()),
            Check::Matveev { t: 3, degree: 2, a: a_expr },
        )
        .inputs(inputs);
        for (j, d) in data.iter().enumerate() {
            step = step.constant(&format!("A{}_requirement", j + 1), d.requirement(2).to_record());
        }
        let step = self.reference(step, &c, reference)?;
        self.push_real(step, c.clone());
        Ok(c)
    }
}

fn fib_alpha() -> QuadraticNumber {
    BinaryRecurrence::fibonacci().alpha().clone()
}

/// Run the whole chain with default options.
pub fn theorem2_solve() -> std::result::Result<Theorem2Solution, PipelineFailure> {
    theorem2_solve_with(&Theorem2Options::default())
}

pub fn theorem2_solve_with(opts: &Theorem2Options) -> std::result::Result<Theorem2Solution, PipelineFailure> {
    let mut run = Run {
        opts,
        ledger: BoundLedger::new(CertifiedReal::NAME),
        values: BTreeMap::new(),
        phases: Vec::new(),
        clock: Instant::now(),
    };
    match drive(&mut run) {
        Ok(solutions) => Ok(Theorem2Solution { solutions, ledger: run.ledger, phases: run.phases }),
        Err(error) => Err(PipelineFailure { error, ledger: run.ledger, phases: run.phases }),
    }
}

fn drive(run: &mut Run<'_>) -> Result<Vec<SolutionTuple>> {
    use steps::*;
    let opts = run.opts;
    let m_expr = Expr::int(opts.m.clone());

    // finite box
    let sols = enumerate_box(opts.box_n);
    if let Some(bad) = sols.iter().find(|s| !s.verify()) {
        return Err(Error::Invalid(format!("enumeration returned a non-solution {bad}")));
    }
    run.ledger.push(LedgerStep::new(
        BOX,
        format!("all solutions with n_2 <= n_1 <= {}: {} tuples", opts.box_n, sols.len()),
        "finite search",
        StepOutput::Solutions(sols.clone()),
        Check::Enumeration { n_max: opts.box_n },
    ));
    run.phase("enumeration");

    // linear forms and the Matveev chain
    run.compare(
        "z2_growth",
        "3^{z_2} <= F_{n_1} + F_{n_2} <= 2 alpha^{n_1 - 1}, hence z_1 <= z_2 <= 0.45 n_1 for n_1 > 100",
        "exponent growth",
        &[],
        vec![
            (ex("log({a})/log(3)"), ex("0.45")),
            (ex("log(2)/log(3) + 100*log({a})/log(3)"), ex("0.45*101")),
        ],
    )?;
    run.compare(
        "lambda1_form",
        "|1 - 3^{z_2} alpha^{-n_1} sqrt(5)| <= 3 sqrt(5) / B^{n_1 - n_2} with B = alpha/2^0.45 > 1",
        "first linear form",
        &["z2_growth"],
        vec![(ex("1"), ex("{b}"))],
    )?;
    let alpha_q = fib_alpha();
    let sqrt5 = QuadraticNumber::sqrt_of(5)?;
    run.matveev(
        MATVEEV_1,
        "log|Lambda_1| > -E (1 + log n_1) with t = 3, D = 2, A = (2.2, 0.5, 1.7), B = n_1",
        &["lambda1_form"],
        &["2.2", "0.5", "1.7"],
        &[QuadraticNumber::integer(3), alpha_q.clone(), sqrt5.clone()],
        "1.8e12",
    )?;
    run.formula(
        GAP_CHAIN,
        "n_1 - n_2 < c_1 log n_1, using 1 + log n_1 < 2 log n_1 and log(3 sqrt 5) <= log(3 sqrt 5) log n_1 / log 101",
        "first linear form",
        &[MATVEEV_1],
        ex("(2*matveev_lambda1 + log(3*sqrt(5))/log(101))/log({b})"),
        Some("2.18e13"),
    )?;
    run.argument(
        "lambda2_form",
        "|1 - 3^{z_2} sqrt(5) alpha^{-n_1} (1 + alpha^{n_2 - n_1})^{-1}| <= 3 sqrt(5) / B^{n_1}",
        "second linear form",
        &["lambda1_form"],
    );
    run.formula(
        A3,
        "2 h(gamma_3) <= 2(log sqrt5 + (n_1 - n_2) log(alpha)/2 + log 2) <= a_3 log n_1",
        "second linear form",
        &[GAP_CHAIN],
        ex("gap_chain*log({a}) + log(20)/log(101)"),
        Some("1.16e14"),
    )?;
    run.matveev(
        MATVEEV_2,
        "log|Lambda_2| > -E' (1 + log n_1) A_3 with t = 3, D = 2, A_1 = 2.2, A_2 = 0.5 and A_3 factored out",
        &["lambda2_form"],
        &["2.2", "0.5"],
        &[QuadraticNumber::integer(3), alpha_q.clone()],
        "1.06e12",
    )?;
    run.formula(
        INDEX_CHAIN,
        "n_1 < c_2 (log n_1)^2",
        "second linear form",
        &[MATVEEV_2, A3],
        ex("(2*matveev_lambda2*lambda2_a3 + log(3*sqrt(5))/log(101)^2)/log({b})"),
        Some("1.45e27"),
    )?;
    let c2 = run.values[INDEX_CHAIN].clone();
    let n_star = solve_fixed_point(&c2, 2)?;
    run.push_int(
        LedgerStep::new(
            FIXED_POINT,
            format!("n_1 < c_2 (log n_1)^2 implies n_1 < {n_star}"),
            "absolute bound",
            StepOutput::Integer(n_star.clone()),
            Check::FixedPoint { c: Expr::var(INDEX_CHAIN), k: 2 },
        )
        .inputs(&[INDEX_CHAIN]),
    );
    let ref_c = ex("1.45e27");
    let n_ref = solve_fixed_point(&run.eval(&ref_c)?, 2)?;
    run.push_int(
        LedgerStep::new(
            FIXED_POINT_REFERENCE,
            format!("with the reference constant 1.45e27: n_1 < {n_ref}"),
            "absolute bound",
            StepOutput::Integer(n_ref.clone()),
            Check::FixedPoint { c: ref_c, k: 2 },
        )
        .flag("reference-replay"),
    );
    run.holds(&[(Expr::var(FIXED_POINT), m_expr.clone().add(Expr::int(1))), (Expr::var(FIXED_POINT_REFERENCE), m_expr.clone().add(Expr::int(1)))])?;
    run.push_int(
        LedgerStep::new(
            M,
            format!("u <= n_1 <= M = {} in every reduction", opts.m),
            "absolute bound",
            StepOutput::Integer(opts.m.clone()),
            Check::Compare {
                pairs: vec![
                    (Expr::var(FIXED_POINT), m_expr.clone().add(Expr::int(1))),
                    (Expr::var(FIXED_POINT_REFERENCE), m_expr.clone().add(Expr::int(1))),
                ],
            },
        )
        .inputs(&[FIXED_POINT, FIXED_POINT_REFERENCE]),
    );
    run.phase("linear forms");

    // first linear form, reduced
    run.argument(
        "lambda1_nonzero",
        "Lambda_1 = 0 would give 5 * 9^{z_2} = alpha^{2 n_1}, a rational equal to an irrational",
        "first linear form",
        &["lambda1_form"],
    );
    run.compare(
        "lambda1_pos_setup",
        "Lambda_1 > 0: 0 < z_2 gamma - n_1 + mu < 14 / B^{n_1 - n_2}, gamma = log 3/log alpha, mu = log sqrt5/log alpha",
        "first linear form, positive",
        &["lambda1_nonzero"],
        vec![(ex("3*sqrt(5)/log({a})"), ex("14"))],
    )?;
    let pos1 = ReductionInstance::new(ex("log(3)/log({a})"), ex("log(sqrt(5))/log({a})"), ex("14"), ex("{b}"), opts.m.clone())?;
    reduction(run, LAMBDA1_POS, "n_1 - n_2 <= {max} when Lambda_1 > 0", pos1, opts.lambda1_choice, &["lambda1_pos_setup", M])?;

    let f86 = BinaryRecurrence::fibonacci().term(86);
    run.compare(
        "subcase1_boundary",
        "Lambda_1 < 0 and n_1 - n_2 <= 15: F_{n_2} < |beta|^{n_1}/sqrt5 + 2^{0.45 n_1} fails at n_1 = 101, n_2 = 86 \
         and F grows by a factor >= 3/2 > 2^0.45 per step, so the case is empty",
        "first linear form, negative, small gap",
        &["lambda1_nonzero", "z2_growth"],
        vec![
            (ex("((sqrt(5)-1)/2)^101/sqrt(5) + 2^45.45"), Expr::int(f86)),
            (ex("2^0.45"), ex("3/2")),
        ],
    )?;
    run.compare(
        "subcase2_setup",
        "Lambda_1 < 0 and n_1 - n_2 >= 16: 3 sqrt5 / B^16 < 1/2, so |Lambda_1| < 6 sqrt5 / B^{n_1 - n_2} and \
         0 < n_1 gamma' - z_2 + mu' < 13 / B^{n_1 - n_2}",
        "first linear form, negative",
        &["lambda1_nonzero"],
        vec![(ex("3*sqrt(5)/{b}^16"), ex("1/2")), (ex("6*sqrt(5)/log(3)"), ex("13"))],
    )?;
    let neg1 = ReductionInstance::new(ex("log({a})/log(3)"), ex("-log(sqrt(5))/log(3)"), ex("13"), ex("{b}"), opts.m.clone())?;
    reduction(run, LAMBDA1_NEG, "n_1 - n_2 <= {max} when Lambda_1 < 0", neg1, opts.lambda1_choice, &["subcase2_setup", M])?;
    let gap = max_of(run, &[LAMBDA1_POS, LAMBDA1_NEG]);
    run.push_int(
        LedgerStep::new(GAP_BOUND, format!("n_1 - n_2 <= {gap}"), "first linear form", StepOutput::Integer(gap.clone()), Check::Max)
            .inputs(&[LAMBDA1_POS, "subcase1_boundary", LAMBDA1_NEG]),
    );
    run.phase("first form reduction");

    // second linear form, reduced per gap
    run.argument(
        "lambda2_nonzero",
        "Lambda_2 = 0 would give 3^{z_2} sqrt5 = alpha^{n_1} + alpha^{n_2}; conjugating, 2 * 3^{z_2} = 2^{z_1} + 3^{z_2} < 2 * 3^{z_2}",
        "second linear form",
        &["lambda2_form"],
    );
    run.compare(
        "lambda2_setup",
        "with phi(x) = sqrt5/(1 + alpha^{-x}): 0 < z_2 gamma - n_1 + log phi/log alpha < 14/B^{n_1} if Lambda_2 > 0, \
         and 0 < n_1 gamma' - z_2 - log phi/log 3 < 13/B^{n_1} if Lambda_2 < 0",
        "second linear form",
        &["lambda2_nonzero"],
        vec![
            (ex("3*sqrt(5)/log({a})"), ex("14")),
            (ex("3*sqrt(5)/{b}^101"), ex("1/2")),
            (ex("6*sqrt(5)/log(3)"), ex("13")),
        ],
    )?;
    let gap_u64 = gap.to_u64().ok_or_else(|| Error::Domain(format!("gap bound {gap} out of range")))?;
    let top = opts.gap_max.max(gap_u64);
    let phi = |g: u64| format!("(sqrt(5)/(1+{{a}}^(-{g})))");
    let plus: BTreeMap<u64, Expr> = (0..=top).filter(|&g| g != 2).map(|g| (g, ex(&format!("log({})/log({{a}})", phi(g))))).collect();
    let minus: BTreeMap<u64, Expr> = (0..=top).filter(|&g| g != 2).map(|g| (g, ex(&format!("-log({})/log(3)", phi(g))))).collect();
    let tpl_plus = ReductionTemplate { gamma: ex("log(3)/log({a})"), a: ex("14"), b: ex("{b}"), m: opts.m.clone() };
    let tpl_minus = ReductionTemplate { gamma: ex("log({a})/log(3)"), a: ex("13"), b: ex("{b}"), m: opts.m.clone() };
    batch(run, LAMBDA2_POS, "n_1 <= {max} when Lambda_2 > 0 and n_1 - n_2 != 2", tpl_plus.clone(), plus, &["lambda2_setup", GAP_BOUND, M])?;
    batch(run, LAMBDA2_NEG, "n_1 <= {max} when Lambda_2 < 0 and n_1 - n_2 != 2", tpl_minus.clone(), minus, &["lambda2_setup", GAP_BOUND, M])?;
    run.phase("second form reduction");

    // gap 2: phi(2) = alpha makes mu an integer combination of 1 and gamma
    let phi2 = QuadraticNumber::sqrt_of(5)?.div(&QuadraticNumber::integer(1).add(&alpha_q.pow(-2)?)?)?;
    if phi2 != alpha_q {
        return Err(Error::Invalid("phi(2) should equal alpha".into()));
    }
    run.argument(
        "gap2_degenerate",
        "phi(2) = alpha, so mu = 1 (positive case) and mu = -gamma' (negative case): epsilon <= 0 for every convergent; \
         the forms become 0 < z_2 gamma - (n_1 - 1) < 14/B^{n_1} and 0 < (n_1 - 1) gamma' - z_2 < 13/B^{n_1}",
        "second linear form, gap 2",
        &["lambda2_setup"],
    );
    let u_plus = (&opts.m * BigInt::from(45)) / BigInt::from(100);
    direct(run, GAP2_POS, "n_1 <= {max} when n_1 - n_2 = 2 and Lambda_2 > 0 (u = z_2 <= 0.45 M)", &tpl_plus, u_plus)?;
    direct(run, GAP2_NEG, "n_1 <= {max} when n_1 - n_2 = 2 and Lambda_2 < 0 (u = n_1 - 1 <= M)", &tpl_minus, opts.m.clone())?;
    let n_bound = max_of(run, &[LAMBDA2_POS, LAMBDA2_NEG, GAP2_POS, GAP2_NEG]);
    run.push_int(
        LedgerStep::new(INDEX_BOUND, format!("n_1 <= {n_bound}"), "second linear form", StepOutput::Integer(n_bound.clone()), Check::Max)
            .inputs(&[LAMBDA2_POS, LAMBDA2_NEG, GAP2_POS, GAP2_NEG]),
    );
    let z_expr = ex("0.45*index_bound");
    let z2 = run.eval(&z_expr)?.floor()?;
    run.push_int(
        LedgerStep::new(Z2_BOUND, format!("z_1 <= z_2 <= {z2}"), "exponent growth", StepOutput::Integer(z2.clone()), Check::Floor { expr: z_expr })
            .inputs(&[INDEX_BOUND]),
    );
    run.phase("degenerate gap");

    // 3-adic endgame
    let to_u64 = |n: &BigInt| n.to_u64().ok_or_else(|| Error::Domain(format!("{n} out of range")));
    let params = ScanParams::fibonacci_3(opts.box_n, to_u64(&n_bound)?, gap_u64, to_u64(&z2)?);
    let scan = valuation_scan(&BinaryRecurrence::fibonacci(), &params)?;
    let nu = scan.max_valuation;
    run.push_int(
        LedgerStep::new(
            SCAN,
            format!(
                "z_2 = nu_3(F_{{n_1}} + F_{{n_2}} - 2^{{z_1}}) <= {nu} for {} < n_1 <= {}, n_1 - n_2 <= {}, z_1 <= {} ({} triples, {} exact zeros excluded)",
                params.n1_exclusive_lo,
                params.n1_hi,
                params.gap_max,
                params.z1_max,
                scan.triples,
                scan.zero_cases.len()
            ),
            "3-adic valuation",
            StepOutput::Integer(BigInt::from(nu)),
            Check::ValuationScan { result: scan },
        )
        .inputs(&[INDEX_BOUND, GAP_BOUND, Z2_BOUND]),
    );
    let idx = valuation_to_index_bound(nu)?;
    run.push_int(
        LedgerStep::new(
            VALUATION_INDEX,
            format!("alpha^{{n_1 - 2}} <= F_{{n_1}} + F_{{n_2}} <= 2 * 3^{{z_2}} gives n_1 <= {idx}"),
            "3-adic valuation",
            StepOutput::Integer(BigInt::from(idx)),
            Check::IndexBound { z_max: nu },
        )
        .inputs(&[SCAN]),
    );
    let lo = Expr::int(opts.box_n + 1);
    run.compare(
        CONTRADICTION,
        &format!("n_1 <= {idx} < {} contradicts n_1 > {}", opts.box_n + 1, opts.box_n),
        "3-adic valuation",
        &[VALUATION_INDEX],
        vec![(Expr::var(VALUATION_INDEX), lo)],
    )?;
    run.phase("valuation scan");

    run.ledger.push(
        LedgerStep::new(
            SOLUTIONS,
            format!("the {} solutions with n_1 <= {} are all solutions", sols.len(), opts.box_n),
            "conclusion",
            StepOutput::Solutions(sols.clone()),
            Check::Argument,
        )
        .inputs(&[BOX, CONTRADICTION]),
    );
    run.ledger.check_links()?;
    Ok(sols)
}

fn max_of(run: &Run<'_>, names: &[&str]) -> BigInt {
    names
        .iter()
        .filter_map(|n| run.ledger.step(n).and_then(LedgerStep::integer).cloned())
        .max()
        .unwrap_or_else(BigInt::zero)
}

fn reduction(run: &mut Run<'_>, name: &str, statement: &str, inst: ReductionInstance, choice: ConvergentChoice, inputs: &[&str]) -> Result<()> {
    let out = baker_davenport(&inst, choice, &run.opts.policy)?;
    let max = out
        .max_m()
        .ok_or_else(|| Error::DegenerateCase(format!("{name}: epsilon <= 0 at every convergent tried {:?}", out.tried)))?
        .max(BigInt::zero());
    let step = LedgerStep::new(
        name,
        statement.replace("{max}", &max.to_string()),
        "reduction",
        StepOutput::Integer(max),
        Check::Reduction { instance: inst, choice, outcome: out },
    )
    .inputs(inputs);
    run.push_int(step);
    Ok(())
}

fn batch(run: &mut Run<'_>, name: &str, statement: &str, tpl: ReductionTemplate, family: BTreeMap<u64, Expr>, inputs: &[&str]) -> Result<()> {
    let choice = run.opts.lambda2_choice;
    let results = batch_reduce(&family, &tpl, choice, &run.opts.policy)?;
    let mut outcomes = BTreeMap::new();
    let mut best = BigInt::zero();
    let mut argbest = 0;
    for (g, res) in results {
        let out = res.map_err(|e| Error::DegenerateCase(format!("{name}, gap {g}: {e}")))?;
        let m = out
            .max_m()
            .ok_or_else(|| Error::DegenerateCase(format!("{name}, gap {g}: epsilon <= 0 at every convergent tried")))?;
        if m > best {
            best = m;
            argbest = g;
        }
        outcomes.insert(g, out);
    }
    let step = LedgerStep::new(
        name,
        format!("{} (largest at gap {argbest})", statement.replace("{max}", &best.to_string())),
        "reduction",
        StepOutput::Integer(best),
        Check::BatchReduction { template: tpl, family, choice, outcomes },
    )
    .inputs(inputs);
    run.push_int(step);
    Ok(())
}

fn direct(run: &mut Run<'_>, name: &str, statement: &str, tpl: &ReductionTemplate, u_max: BigInt) -> Result<()> {
    let policy = &run.opts.policy;
    let (cf, _) = expansion_for(&tpl.gamma, &u_max, ConvergentChoice::Smallest { retries: 4 }, policy)?;
    let a = policy.run(|p| tpl.a.eval(p))?;
    let b = policy.run(|p| tpl.b.eval(p))?;
    let d = direct_convergent_bound(&cf, None, &u_max, &a, &b)?;
    let max = d.max_n();
    let step = LedgerStep::new(
        name,
        statement.replace("{max}", &max.to_string()),
        "continued fraction",
        StepOutput::Integer(max),
        Check::DirectConvergent { gamma: tpl.gamma.clone(), u_max, a: tpl.a.clone(), b: tpl.b.clone(), result: d },
    )
    .inputs(&["gap2_degenerate", steps::M]);
    run.push_int(step);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_run_replays() {
        let sol = theorem2_solve().unwrap_or_else(|f| panic!("{f}"));
        assert_eq!(sol.solutions.len(), 20);
        for s in &sol.ledger.steps {
            println!("{:28} {:?} {:?}", s.name, s.output_summary(), s.flags);
        }
        for p in &sol.phases {
            println!("{} {}ms", p.phase, p.millis);
        }
        let t = Instant::now();
        sol.ledger.replay(&PrecisionPolicy::default()).unwrap();
        println!("replay {:?}", t.elapsed());
    }
}
