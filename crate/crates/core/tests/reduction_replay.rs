use num_bigint::BigInt;
use recsum::arith::expr::Expr;
use recsum::arith::PrecisionPolicy;
use recsum::reduction::{baker_davenport, ConvergentChoice, ReductionInstance, ReductionStatus};

const ALPHA: &str = "((1+sqrt(5))/2)";

fn e(s: &str) -> Expr {
    Expr::parse(&s.replace("alpha", ALPHA)).unwrap()
}

fn m() -> BigInt {
    BigInt::from(9) * BigInt::from(10).pow(30)
}

fn lambda1_positive() -> ReductionInstance {
    ReductionInstance::new(e("log(3)/log(alpha)"), e("log(sqrt(5))/log(alpha)"), e("14"), e("alpha/2^0.45"), m()).unwrap()
}

fn lambda1_negative() -> ReductionInstance {
    ReductionInstance::new(e("log(alpha)/log(3)"), e("-log(sqrt(5))/log(3)"), e("13"), e("alpha/2^0.45"), m()).unwrap()
}

fn bound(out: &recsum::reduction::ReductionOutcome) -> f64 {
    out.bound.as_ref().unwrap().lo.parse().unwrap()
}

#[test]
fn positive_form_smallest_convergent() {
    let out = baker_davenport(&lambda1_positive(), ConvergentChoice::default(), &PrecisionPolicy::default()).unwrap();
    assert_eq!(out.status, ReductionStatus::Success);
    assert_eq!(out.k, 63);
    assert_eq!(out.q_k.to_string(), "4741375395260423320746180710658041");
    assert!((bound(&out) - 479.607).abs() < 1e-3, "{}", bound(&out));
    assert_eq!(out.m_bound, Some(BigInt::from(480)));
}

#[test]
fn positive_form_pinned_64() {
    let out = baker_davenport(&lambda1_positive(), ConvergentChoice::Pinned(64), &PrecisionPolicy::default()).unwrap();
    assert_eq!(out.q_k.to_string(), "4785677483503011996638326749283751");
    assert!((bound(&out) - 480.135).abs() < 1e-3, "{}", bound(&out));
    assert_eq!(out.max_m(), Some(BigInt::from(480)));
}

#[test]
fn negative_form_replays_484_034() {
    let small = baker_davenport(&lambda1_negative(), ConvergentChoice::default(), &PrecisionPolicy::default()).unwrap();
    assert_eq!(small.k, 63);
    assert_eq!(small.q_k.to_string(), "101142191489035988399613431000209");
    assert!((bound(&small) - 457.557).abs() < 1e-3, "{}", bound(&small));
    let out = baker_davenport(&lambda1_negative(), ConvergentChoice::Pinned(64), &PrecisionPolicy::default()).unwrap();
    assert!((bound(&out) - 484.0339).abs() < 1e-3, "{}", bound(&out));
    assert_eq!(out.max_m(), Some(BigInt::from(484)));
}
