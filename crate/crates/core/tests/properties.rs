use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use recsum::arith::cfrac::{cfrac_certified_prefix, ContinuedFraction};
use recsum::arith::dyadic::Dyadic;
use recsum::arith::nearest_int_distance;
use recsum::heights::{log_height, QuadraticNumber};
use recsum::matveev::matveev_constant;
use recsum::pipeline::{solve_fixed_point, verify_fixed_point};
use recsum::reduction::epsilon;
use recsum::search::{padic_valuation, valuation_scan, ScanParams};
use recsum::{BinaryRecurrence, CertifiedReal, Expr, Rational};

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn positive_expr() -> impl Strategy<Value = Expr> {
    let leaf = (1i64..60, 1i64..25).prop_map(|(n, d)| Expr::rational(rat(n, d)));
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.div(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.max(b)),
            inner.clone().prop_map(Expr::sqrt),
            inner.clone().prop_map(|a| Expr::int(1).add(a).log()),
            inner.prop_map(|a| a.clone().div(Expr::int(1).add(a)).exp()),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn intervals_nest_under_more_precision(e in positive_expr(), p in 40u32..200) {
        let coarse = e.eval(p).unwrap();
        let fine = e.eval(2 * p).unwrap();
        prop_assert!(fine.is_subset_of(&coarse), "{e}: {fine} not in {coarse}");
        prop_assert!(coarse.is_positive());
    }

    #[test]
    fn float_evaluation_lies_in_the_enclosure(e in positive_expr()) {
        let iv = e.eval(256).unwrap();
        let x: f64 = e.eval_real(&|_| None).unwrap();
        let tol = 1e-12 * x.abs().max(1.0);
        prop_assert!(iv.lo().to_f64() - tol <= x && x <= iv.hi().to_f64() + tol, "{e}: {x} vs {iv}");
    }

    #[test]
    fn rational_arithmetic_is_enclosed(a in -50i64..50, b in 1i64..30, c in -50i64..50, d in 1i64..30) {
        let (x, y) = (rat(a, b), rat(c, d));
        let e = Expr::rational(x.clone()).mul(Expr::rational(y.clone())).add(Expr::rational(x.clone()));
        prop_assert!(e.eval(64).unwrap().contains_rational(&(&x * &y + &x)));
    }

    #[test]
    fn convergent_determinant(qs in prop::collection::vec(1u32..1000, 1..40), a0 in -5i64..5) {
        let mut pq: Vec<BigInt> = vec![BigInt::from(a0)];
        pq.extend(qs.iter().map(|&q| BigInt::from(q)));
        let cf = ContinuedFraction::from_partial_quotients(pq).unwrap();
        for k in 1..cf.len() {
            let det = cf.numerator(k).unwrap() * cf.denominator(k - 1).unwrap()
                - cf.numerator(k - 1).unwrap() * cf.denominator(k).unwrap();
            let want = if k % 2 == 1 { BigInt::one() } else { -BigInt::one() };
            prop_assert_eq!(det, want);
        }
    }

    #[test]
    fn certified_convergents_approximate(n in -10_000i64..10_000, d in 1i64..10_000) {
        let x = rat(n, d);
        let cf = cfrac_certified_prefix(&CertifiedReal::from_rational(&x, 128), 64);
        prop_assert!(!cf.is_empty());
        for k in 0..cf.len() {
            let q = cf.denominator(k).unwrap();
            let err = (&x - cf.convergent(k).unwrap()).abs();
            prop_assert!(err * q * q <= Rational::one());
        }
    }

    #[test]
    fn exact_prefix_drops_only_the_last_quotient(n in -100_000i64..100_000, k in 0i64..20) {
        let x = CertifiedReal::exact(Dyadic::new(BigInt::from(n), -k), 64);
        let cf = cfrac_certified_prefix(&x, 200);
        let (mut a, mut b) = (n, 1i64 << k);
        let mut euclid = Vec::new();
        while b != 0 {
            euclid.push(BigInt::from(a.div_euclid(b)));
            (a, b) = (b, a.rem_euclid(b));
        }
        euclid.pop();
        prop_assert_eq!(cf.partial_quotients(), &euclid[..]);
    }

    #[test]
    fn nearest_int_distance_is_shift_invariant(n in -1000i64..1000, d in 1i64..997, k in -1_000_000i64..1_000_000) {
        let x = CertifiedReal::from_rational(&rat(n, d), 128);
        let shifted = x.add(&CertifiedReal::from_int(k));
        let a = nearest_int_distance(&x).unwrap();
        let b = nearest_int_distance(&shifted).unwrap();
        prop_assert!(a.overlaps(&b));
        prop_assert!(!a.is_negative() && a.lo().to_f64() <= 0.5);
    }

    #[test]
    fn rational_heights(n in -100_000i64..100_000, d in 1i64..100_000) {
        prop_assume!(n != 0);
        let x = rat(n, d);
        let q = QuadraticNumber::rational(x.clone());
        let h: f64 = log_height(&q).unwrap();
        let want = (x.numer().abs().max(x.denom().clone()).to_string().parse::<f64>().unwrap()).ln();
        prop_assert!((h - want).abs() < 1e-9);
        // h(1/x) = h(x)
        let inv: f64 = log_height(&q.recip().unwrap()).unwrap();
        prop_assert!((h - inv).abs() < 1e-9);
    }

    #[test]
    fn quadratic_heights_are_conjugation_invariant(x in -20i64..20, y in 1i64..20, r in prop::sample::select(vec![2i64, 3, 5, 6, 7, 10])) {
        let q = QuadraticNumber::new(rat(x, 1), rat(y, 3), r).unwrap();
        let h: CertifiedReal = log_height(&q).unwrap();
        let hc: CertifiedReal = log_height(&q.conjugate()).unwrap();
        prop_assert!(h.overlaps(&hc));
        prop_assert!(!h.is_negative());
        let h2: CertifiedReal = log_height(&q.pow(2).unwrap()).unwrap();
        // h(q^2) = 2 h(q)
        prop_assert!(h2.overlaps(&h.mul_int(&BigInt::from(2))));
    }

    #[test]
    fn matveev_is_monotone(a in prop::collection::vec(0.2f64..50.0, 2..5), bump in 0.01f64..10.0, i in 0usize..4) {
        let t = a.len();
        let base: f64 = matveev_constant(t, 2, &a).unwrap();
        let mut b = a.clone();
        b[i % t] += bump;
        let bigger: f64 = matveev_constant(t, 2, &b).unwrap();
        prop_assert!(bigger > base);
        let d3: f64 = matveev_constant(t, 3, &a).unwrap();
        prop_assert!(d3 > base);
    }

    #[test]
    fn epsilon_decreases_in_m(g in 1i64..1000, mu in 1i64..1000, q in 1u64..1_000_000, m1 in 1u64..1000, extra in 1u64..1000) {
        let gamma = CertifiedReal::from_int(g).sqrt().unwrap();
        let mu = CertifiedReal::from_int(mu).ln().unwrap();
        let q = BigInt::from(q);
        let e1 = epsilon(&gamma, &mu, &q, &BigInt::from(m1)).unwrap();
        let e2 = epsilon(&gamma, &mu, &q, &BigInt::from(m1 + extra)).unwrap();
        prop_assert!(!e1.certainly_lt(&e2));
    }

    #[test]
    fn fixed_point_is_sound(mant in 1u32..1000, exp in 0u32..25, k in 1u32..4) {
        let c = CertifiedReal::from_int(BigInt::from(mant) * BigInt::from(10).pow(exp));
        let n = solve_fixed_point(&c, k).unwrap();
        prop_assert!(verify_fixed_point(&c, k, &n).is_ok());
        let bigger = solve_fixed_point(&c.mul_int(&BigInt::from(2)), k).unwrap();
        prop_assert!(bigger >= n);
    }

    #[test]
    fn valuation_of_scaled_powers(k in 0u32..60, m in 1i64..1_000_000, p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        prop_assume!(m % p as i64 != 0);
        let x = BigInt::from(p).pow(k) * BigInt::from(m);
        prop_assert_eq!(padic_valuation(&x, p), Some(k as u64));
        prop_assert_eq!(padic_valuation(&BigInt::zero(), p), None);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn valuation_scan_shrinks_with_its_ranges(lo in 0u64..40, len in 1u64..40, gap in 0u64..30, z1 in 0u64..25, cut in 0u64..20) {
        let fib = BinaryRecurrence::fibonacci();
        let wide = valuation_scan(&fib, &ScanParams::fibonacci_3(lo, lo + len, gap, z1)).unwrap();
        let hi = lo + len.saturating_sub(cut).max(1);
        let narrow = valuation_scan(&fib, &ScanParams::fibonacci_3(lo, hi, gap.saturating_sub(cut), z1.saturating_sub(cut))).unwrap();
        prop_assert!(narrow.max_valuation <= wide.max_valuation);
        prop_assert!(narrow.triples <= wide.triples);
    }
}
