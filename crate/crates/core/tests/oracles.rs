//! Values computed independently (600 to 2000-bit mpmath and plain Python
//! integer arithmetic) and frozen here.

use num_bigint::BigInt;

use recsum::arith::cfrac::cfrac_expand_expr;
use recsum::heights::{log_height, QuadraticNumber};
use recsum::reduction::{direct_convergent_bound, expansion_for, ConvergentChoice};
use recsum::search::{enumerate_box, valuation_scan, valuation_to_index_bound, ScanParams};
use recsum::{BinaryRecurrence, CertifiedReal, Expr, PrecisionPolicy, Rational};

const ALPHA: &str = "((1+sqrt(5))/2)";

fn ex(s: &str) -> Expr {
    Expr::parse(&s.replace("alpha", ALPHA)).unwrap()
}

fn big(s: &str) -> BigInt {
    s.parse().unwrap()
}

fn m9() -> BigInt {
    BigInt::from(9) * BigInt::from(10).pow(30)
}

#[test]
fn gamma_partial_quotients_and_denominators() {
    let cf = cfrac_expand_expr(&ex("log(3)/log(alpha)"), 64, &PrecisionPolicy::default()).unwrap();
    let head: Vec<BigInt> = [2, 3, 1, 1, 6, 1, 49, 1, 2, 2, 1, 1, 2, 1, 2, 2, 1, 10, 3, 12].map(BigInt::from).to_vec();
    assert_eq!(&cf.partial_quotients()[..20], &head[..]);
    assert_eq!(cf.denominator(63).unwrap(), &big("4741375395260423320746180710658041"));
    assert_eq!(cf.denominator(64).unwrap(), &big("4785677483503011996638326749283751"));
    assert_eq!(cf.numerator(64).unwrap(), &big("10925758302650752420253604469325076"));

    let inv = cfrac_expand_expr(&ex("log(alpha)/log(3)"), 64, &PrecisionPolicy::default()).unwrap();
    assert_eq!(inv.partial_quotients()[0], BigInt::from(0));
    assert_eq!(&inv.partial_quotients()[1..21], &head[..]);
    assert_eq!(inv.denominator(63).unwrap(), &big("101142191489035988399613431000209"));
    assert_eq!(inv.denominator(64).unwrap(), &big("10824616111161716431853991038324867"));
}

#[test]
fn gap_two_direct_bounds() {
    let policy = PrecisionPolicy::default();
    let b = ex("alpha/2^0.45").eval(256).unwrap();
    let run = |gamma: &str, a: i64, u: BigInt| {
        let (cf, _) = expansion_for(&ex(gamma), &u, ConvergentChoice::Smallest { retries: 4 }, &policy).unwrap();
        direct_convergent_bound(&cf, None, &u, &CertifiedReal::from_int(a), &b).unwrap()
    };
    let plus = run("log(3)/log(alpha)", 14, m9() * 45 / 100);
    assert_eq!(plus.k, 61);
    assert_eq!(plus.q_k, big("1051953303435000286554577707071"));
    assert_eq!(plus.q_k1, big("44302088242588675892146038625710"));
    assert!((plus.bound.lo.parse::<f64>().unwrap() - 446.149).abs() < 1e-3);
    assert_eq!(plus.max_n(), BigInt::from(446));

    let minus = run("log(alpha)/log(3)", 13, m9());
    assert_eq!(minus.k, 62);
    assert_eq!(minus.q_k, big("2401621834865673095353921302504"));
    assert_eq!(minus.q_k1, big("101142191489035988399613431000209"));
    assert!((minus.bound.lo.parse::<f64>().unwrap() - 450.588).abs() < 1e-3);
    assert_eq!(minus.max_n(), BigInt::from(450));
}

#[test]
fn fibonacci_terms() {
    let f = BinaryRecurrence::fibonacci();
    assert_eq!(f.term(300), big("222232244629420445529739893461909967206666939096499764990979600"));
    let lucas = BinaryRecurrence::new(1, 1, 2, 1).unwrap();
    assert_eq!(lucas.term(50), big("28143753123"));
}

#[test]
fn enumeration_counts() {
    for (n, count) in [(2, 3), (5, 10), (10, 18), (12, 20), (30, 20), (100, 20)] {
        assert_eq!(enumerate_box(n).len(), count, "n_max = {n}");
    }
}

#[test]
fn golden_ratio_height() {
    let half = Rational::new(1.into(), 2.into());
    let alpha = QuadraticNumber::new(half.clone(), half, 5).unwrap();
    let h: CertifiedReal = log_height(&alpha).unwrap();
    // h(α) = log(α)/2, truncated to 41 digits
    let want = Rational::new(big("24060591252980172374887945671218421156759"), BigInt::from(10).pow(41));
    let diff = h.sub(&CertifiedReal::from_rational(&want, 256)).abs();
    assert!(diff.hi().to_f64() < 1e-40, "{h}");
}

#[test]
fn literal_valuation_scan() {
    let res = valuation_scan(&BinaryRecurrence::fibonacci(), &ScanParams::fibonacci_3(100, 493, 485, 222)).unwrap();
    assert_eq!(res.max_valuation, 15);
    assert_eq!(res.argmax, Some((260, 149, 193)));
    assert_eq!(res.triples, 26_108_394);
    assert_eq!(valuation_to_index_bound(15).unwrap(), 38);
    assert_eq!(valuation_to_index_bound(12).unwrap(), 31);
}
