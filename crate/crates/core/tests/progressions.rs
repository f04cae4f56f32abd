use num_bigint::BigInt;
use sparsity_core::sequences::SequenceWindow;
use sparsity_core::progressions::*;

#[test]
fn longest_examples() {
    assert!(longest_ap(&[1, 2, 4, 8, 16], 3).is_none());
    let w = longest_ap(&[1, 3, 5, 9], 3).unwrap();
    assert_eq!((w.start, w.difference, w.length), (1, 2, 3));
    let w = longest_ap(&[10, 20, 30, 40], 3).unwrap();
    assert_eq!((w.start, w.difference, w.length), (10, 10, 4));
}

#[test]
fn strong_containment_examples() {
    let s = strongly_contained_aps(&[1, 3, 5, 7], 3);
    assert!(!s.iter().any(|w| w.start == 3 && w.difference == 2));
    let s = strongly_contained_aps(&[5, 8, 11], 3);
    assert_eq!(s, vec![APWitness { start: 5, difference: 3, length: 3, strongly_contained: true }]);
    let s = strongly_contained_aps(&[2, 7, 12, 1000, 5000], 3);
    assert!(s.iter().any(|w| (w.start, w.difference, w.length) == (2, 5, 3)));
}

#[test]
fn order_witness_from_ap() {
    let w = SequenceWindow::complete_up_to(vec![2, 7, 12].into_iter().map(BigInt::from).collect(), BigInt::from(100));
    let r = order_property_witness(&w, 3, 50, 10_000).unwrap();
    let wit = r.witness.unwrap();
    assert_eq!(wit.b, vec![0, 5, 10]);
    assert_eq!(wit.c, vec![2, 7, 12]);
}

#[test]
fn incomplete_window_is_an_error() {
    let w = SequenceWindow::complete_up_to(vec![BigInt::from(1)], BigInt::from(10));
    assert!(order_property_witness(&w, 3, 50, 100).is_err());
}

use proptest::prelude::*;
use sparsity_core::sequences::{builtin, generate_up_to};
use std::collections::BTreeSet;

/// Every pair as the first two terms, extended while members: `(len, d, a)`,
/// longest first, then smallest `d`, then smallest `a`.
fn brute_longest(s: &[i64]) -> Option<(usize, i64, i64)> {
    let set: BTreeSet<i64> = s.iter().copied().collect();
    let mut best: Option<(usize, i64, i64)> = None;
    for &a in &set {
        for &b in set.range(a + 1..) {
            let d = b - a;
            let mut n = 0;
            while set.contains(&(a + n as i64 * d)) {
                n += 1;
            }
            let better = match best {
                None => true,
                Some((bn, bd, ba)) => n > bn || (n == bn && (d, a) < (bd, ba)),
            };
            if better {
                best = Some((n, d, a));
            }
        }
    }
    best
}

fn is_strong(set: &BTreeSet<i64>, a: i64, d: i64, n: usize) -> bool {
    (0..n as i64).all(|i| set.contains(&(a + i * d))) && (1..n as i64).all(|i| !set.contains(&(a - i * d)))
}

fn window(vals: &[i64], bound: i64) -> SequenceWindow {
    SequenceWindow::complete_up_to(vals.iter().map(|&x| BigInt::from(x)).collect(), BigInt::from(bound))
}

#[test]
fn no_three_term_ap_in_powers_of_two() {
    let w = generate_up_to(&builtin("pi2").unwrap(), &BigInt::from(1_000_000)).unwrap();
    let v = window_values(&w, 1_000_000).unwrap();
    assert!(longest_ap(&v, 3).is_none());
    let w = longest_ap(&v, 2).unwrap();
    assert_eq!(w.length, 2);
    assert_eq!(brute_longest(&v).unwrap().0, 2);
}

#[test]
fn order_witness_on_naturals() {
    let n: Vec<i64> = (0..=200).collect();
    let r = order_property_witness(&window(&n, 200), 10, 100, 10_000).unwrap();
    let wit = r.witness.unwrap();
    assert_eq!(wit.k, 10);
    assert!(wit.verify(|v| (0..=200).contains(&v)));
    assert!(matches!(r.route, Some(OrderRoute::StronglyContainedAp(_))));
}

#[test]
fn no_order_witness_in_powers_of_two() {
    let w = generate_up_to(&builtin("pi2").unwrap(), &BigInt::from(2000)).unwrap();
    let r = order_property_witness(&w, 4, 1000, 1_000_000).unwrap();
    assert!(r.witness.is_none());
    assert_eq!(r.bounds.value_bound, 1000);
}

#[test]
fn probe_on_powers_of_two_and_squares() {
    let cfg = sparsity_core::sumset::EngineConfig::default();
    let pi2 = generate_up_to(&builtin("pi2").unwrap(), &BigInt::from(10_000)).unwrap();
    let p = ap_sparse_probe(&pi2, 1, 10_000, 3, &cfg).unwrap();
    assert!(p[0].longest.is_none());
    assert!(p[0].trend.iter().all(|&(_, l)| l == 2));

    let sq = generate_up_to(&builtin("squares").unwrap(), &BigInt::from(10_000)).unwrap();
    let p = ap_sparse_probe(&sq, 4, 10_000, 3, &cfg).unwrap();
    let t = &p[3].trend;
    assert!(t.windows(2).all(|w| w[1].1 > w[0].1), "{t:?}");
    assert_eq!(p[3].longest.unwrap().length, 10_000);
}

#[test]
fn longest_strong_matches_enumeration() {
    let sets: [&[i64]; 4] = [&[1, 3, 5, 7], &[2, 7, 12, 1000], &[5, 8, 11, 14, 30, 31, 32], &[1, 2, 4, 8, 16]];
    for s in sets {
        let best = strongly_contained_aps(s, 2).into_iter().map(|w| w.length).max();
        assert_eq!(longest_strong_ap(s, 2).map(|w| w.length), best, "{s:?}");
    }
}

fn small_set() -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::btree_set(0i64..120, 0..=50).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn longest_matches_brute(s in small_set()) {
        let got = longest_ap(&s, 2).map(|w| (w.length, w.difference, w.start));
        let want = brute_longest(&s).filter(|b| b.0 >= 2);
        prop_assert_eq!(got, want);
    }

    #[test]
    fn witnesses_verify(s in small_set(), min in 2usize..5) {
        let set = IntSet::new(&s);
        let bs: BTreeSet<i64> = s.iter().copied().collect();
        if let Some(w) = longest_ap(&s, min) {
            prop_assert!(verify_ap(&set, &w));
            prop_assert_eq!(w.strongly_contained, is_strong(&bs, w.start, w.difference, w.length));
        }
        for w in strongly_contained_aps(&s, min) {
            prop_assert!(w.length >= min);
            prop_assert!(is_strong(&bs, w.start, w.difference, w.length));
        }
        if let Some(w) = longest_strong_ap(&s, min) {
            prop_assert!(is_strong(&bs, w.start, w.difference, w.length));
            let best = strongly_contained_aps(&s, min).into_iter().map(|x| x.length).max();
            prop_assert_eq!(Some(w.length), best);
        }
    }

    #[test]
    fn small_start_is_always_strong(s in small_set(), a in 0i64..20, d in 20i64..40, n in 2usize..5) {
        // a ≤ d: every reflected point a − id is negative
        let mut t = s.clone();
        t.extend((0..n as i64).map(|i| a + i * d));
        let bs: BTreeSet<i64> = t.iter().copied().collect();
        prop_assert!(is_strong(&bs, a, d, n));
    }

    #[test]
    fn no_long_strong_ap_bounds_all_aps(s in small_set(), l in 2usize..6) {
        // with no strongly contained progression of length ≥ l, every AP has n / ⌈a/d⌉ < l
        prop_assume!(strongly_contained_aps(&s, l).is_empty());
        let bs: BTreeSet<i64> = s.iter().copied().collect();
        for &a in &bs {
            for &b in bs.range(a + 1..) {
                let d = b - a;
                let mut n = 0i64;
                while bs.contains(&(a + n * d)) {
                    n += 1;
                }
                // a start of 0 is itself strongly contained
                let q = ((a + d - 1) / d).max(1);
                prop_assert!(n < l as i64 * q, "a={} d={} n={}", a, d, n);
            }
        }
    }

    #[test]
    fn order_witnesses_verify(s in small_set()) {
        let w = window(&s, 240);
        let r = order_property_witness(&w, 3, 120, 20_000).unwrap();
        if let Some(wit) = r.witness {
            let bs: BTreeSet<i64> = s.iter().copied().collect();
            prop_assert!(wit.verify(|v| bs.contains(&v)));
        }
    }
}
