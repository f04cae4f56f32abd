use num_bigint::BigInt;
use sparsity_core::recurrence::*;
use sparsity_core::sequences::builtin;

fn poly(c: &[i64]) -> Vec<BigInt> {
    c.iter().map(|&x| x.into()).collect()
}

fn spec(name: &str) -> RecurrenceSpec {
    RecurrenceSpec::from_sequence(&builtin(name).unwrap()).unwrap()
}

#[test]
fn characteristic_polynomials() {
    assert_eq!(spec("fibonacci").char_poly(), poly(&[-1, -1, 1]));
    assert_eq!(spec("pell").char_poly(), poly(&[-1, -2, 1]));
    assert_eq!(spec("perrin").char_poly(), poly(&[-1, -1, 0, 1]));
    assert_eq!(spec("lehmer").char_poly(), poly(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]));
}

#[test]
fn named_table_is_pisot() {
    for name in [
        "fibonacci",
        "lucas",
        "pell",
        "pell_lucas",
        "fibonacci_order_3",
        "fibonacci_order_4",
        "fibonacci_order_5",
        "padovan",
        "perrin",
    ] {
        let d = classify(&spec(name).char_poly()).unwrap();
        assert_eq!(d.classification, Classification::Pisot, "{name}");
        assert!(d.squarefree);
    }
}

#[test]
fn lehmer_is_salem() {
    let d = classify(&spec("lehmer").char_poly()).unwrap();
    assert_eq!(d.classification, Classification::Salem);
    let l = d.lambda.unwrap();
    assert!((l.mid() - 1.17628).abs() < 1e-4, "{l:?}");
    let on_circle = d.roots.iter().filter(|r| r.location == RootLocation::OnUnitCircle).count();
    assert_eq!(on_circle, 8);
    assert!(!d.irreducibility_verified);
}

#[test]
fn plastic_number() {
    let d = classify(&poly(&[-1, -1, 0, 1])).unwrap();
    assert_eq!(d.classification, Classification::Pisot);
    assert!((d.lambda.unwrap().mid() - 1.32471).abs() < 1e-4);
    assert!(d.irreducibility_verified);
}

#[test]
fn rejections() {
    let d = classify(&poly(&[6, -5, 1])).unwrap();
    assert!(matches!(d.classification, Classification::Rejected(RejectReason::RootOutsideUnitDisc { .. })));
    assert_eq!(d.rational_root_free, Some(false));
    let d = classify(&poly(&[1, 0, 1])).unwrap();
    assert_eq!(d.classification, Classification::Rejected(RejectReason::NoDominant));
    // 2ⁿ + n: (x − 1)²(x − 2)
    let d = classify(&spec("two_pow_plus_n").char_poly()).unwrap();
    assert_eq!(d.classification, Classification::Rejected(RejectReason::RepeatedRoot));
}

#[test]
fn binet_coefficients() {
    let d = binet(&spec("fibonacci"), 71).unwrap();
    let b = d.binet.unwrap();
    let inv_sqrt5 = 1.0 / 5f64.sqrt();
    assert!((b.alpha.mid() - inv_sqrt5).abs() < 1e-9);
    assert!(b.max_residual < 0.5);
    let d = binet(&spec("lucas"), 40).unwrap();
    assert!((d.binet.unwrap().alpha.mid() - 1.0).abs() < 1e-9);
}

#[test]
fn binet_for_every_accepted_builtin() {
    for name in ["pell", "pell_lucas", "fibonacci_order_5", "padovan", "perrin", "lehmer"] {
        let d = binet(&spec(name), 60).unwrap();
        assert!(d.binet.unwrap().max_residual < 0.5, "{name}");
    }
}

#[test]
fn zero_sets() {
    let cfg = ZeroScanConfig::default();
    let fib = spec("fibonacci");
    let z = zero_set(&fib, &[2], &[1, 0], &BigInt::from(0), &cfg).unwrap();
    assert_eq!(z.verdict, ZeroVerdict::IdenticallyZero);

    let z = zero_set(&fib, &[1], &[0], &BigInt::from(0), &cfg).unwrap();
    let ZeroVerdict::Finite { zeros, cutoff } = z.verdict else { panic!("{z:?}") };
    assert_eq!(zeros, vec![1]);
    let rescan = derived_terms(&fib, &[1], &[0], &BigInt::from(0), 2 * cutoff + 2);
    assert_eq!(rescan.iter().filter(|v| **v == BigInt::from(0)).count(), 1);

    let z = zero_set(&fib, &[1], &[0], &BigInt::from(-1), &cfg).unwrap();
    let ZeroVerdict::Finite { zeros, .. } = z.verdict else { panic!() };
    assert_eq!(zeros, vec![0, 2, 3]);
}

#[test]
fn identically_zero_matches_long_scan() {
    let cfg = ZeroScanConfig::default();
    let cases: &[(&str, &[usize], &[usize], i64)] = &[
        ("fibonacci", &[2], &[1, 0], 0),
        ("fibonacci", &[3], &[2, 1], 0),
        ("pell", &[2], &[1, 1, 0], 0),
        ("perrin", &[3], &[1, 0], 0),
        ("padovan", &[3], &[2], 0),
        ("fibonacci", &[1], &[0], 0),
        ("lucas", &[2], &[1], 1),
    ];
    for &(name, plus, minus, r) in cases {
        let s = spec(name);
        let z = zero_set(&s, plus, minus, &BigInt::from(r), &cfg).unwrap();
        let scan = derived_terms(&s, plus, minus, &BigInt::from(r), 10 * (s.order() + 1));
        let all_zero = scan.iter().all(|v| *v == BigInt::from(0));
        assert_eq!(z.verdict == ZeroVerdict::IdenticallyZero, all_zero, "{name} {plus:?} {minus:?}");
        if let ZeroVerdict::Finite { zeros, cutoff } = &z.verdict {
            let long = derived_terms(&s, plus, minus, &BigInt::from(r), 2 * cutoff + 2);
            let all: Vec<usize> = (0..long.len()).filter(|&i| long[i] == BigInt::from(0)).collect();
            assert_eq!(&all, zeros);
        }
    }
}

#[test]
fn squarefree_and_integer_roots() {
    assert!(is_squarefree(&poly(&[-1, -1, 1])));
    assert!(!is_squarefree(&poly(&[-2, 5, -4, 1])));
    assert_eq!(integer_roots(&poly(&[6, -5, 1])).unwrap(), poly(&[2, 3]));
    assert_eq!(integer_roots(&poly(&[-1, -1, 1])).unwrap(), Vec::<BigInt>::new());
}

#[test]
fn golden_ratio() {
    let d = classify(&poly(&[-1, -1, 1])).unwrap();
    assert_eq!(d.classification, Classification::Pisot);
    let l = d.lambda.unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    assert!(l.lo <= phi + 1e-12 && phi - 1e-12 <= l.hi && l.hi - l.lo < 1e-9);
}

#[test]
fn quadratic_with_large_second_root() {
    let d = classify(&poly(&[6, -5, 1])).unwrap();
    assert!(matches!(d.classification, Classification::Rejected(RejectReason::RootOutsideUnitDisc { .. })));
}

#[test]
fn degree_one() {
    let s = RecurrenceSpec::from_i64(&[3], &[2]).unwrap();
    let d = binet(&s, 20).unwrap();
    assert_eq!(d.classification, Classification::Pisot);
    assert!(d.binet.unwrap().alpha.contains(3.0));
}

#[test]
fn poly_text() {
    assert_eq!(poly_to_string(&poly(&[-1, -1, 0, 1])), "x^3 - x - 1");
}
