use num_bigint::BigInt;
use proptest::prelude::*;
use sparsity_core::equations::*;
use sparsity_core::geometry::{construct_witness, LambdaModel, ModelKind};
use sparsity_core::sequences::{builtin, generate, SequenceWindow};

fn window(name: &str, n: usize) -> SequenceWindow {
    generate(&builtin(name).unwrap(), n).unwrap()
}

fn b(x: i64) -> BigInt {
    BigInt::from(x)
}

fn sol(m: &[usize], n: &[usize], r: i64) -> SolutionTuple {
    SolutionTuple::new(m.to_vec(), n.to_vec(), b(r))
}

#[test]
fn fibonacci_sums_of_two() {
    let w = window("fibonacci", 40);
    let e = enumerate_solutions(&w, 1, 2, &b(0), 30).unwrap();
    // the window is 1, 2, 3, 5, ... so 2 = 1 + 1 adds one solution below the main family
    let mut want = vec![sol(&[1], &[0, 0], 0)];
    want.extend((2..=30).map(|m| sol(&[m], &[m - 1, m - 2], 0)));
    assert_eq!(e.solutions, want);
}

#[test]
fn fibonacci_shift_by_one() {
    let w = window("fibonacci", 40);
    let e = enumerate_solutions(&w, 1, 1, &b(1), 30).unwrap();
    assert_eq!(e.solutions, vec![sol(&[0], &[1], 1), sol(&[1], &[2], 1)]);
}

#[test]
fn diagonal_only() {
    for name in ["fibonacci", "pi2", "factorials", "squares"] {
        let w = window(name, 20);
        let e = enumerate_solutions(&w, 1, 1, &b(0), 15).unwrap();
        let want: Vec<SolutionTuple> = (0..=15).map(|i| sol(&[i], &[i], 0)).collect();
        assert_eq!(e.solutions, want, "{name}");
    }
}

#[test]
fn decomposition_examples() {
    let w = window("fibonacci", 40);
    let a = &w.values;
    let c = decompose(a, &sol(&[2], &[1, 0], 0), &b(2)).unwrap();
    assert_eq!(c.s_prime, b(1));
    assert!(c.i_set.is_empty());
    assert_eq!(c.j_set, vec![2]);
    assert!(c.verify(a));
    assert!(decompose(a, &sol(&[4], &[3, 2], 0), &b(0)).is_none());

    let c = decompose(a, &sol(&[5, 3], &[5, 3], 0), &b(0)).unwrap();
    assert_eq!(c.s_prime, b(0));
    assert_eq!((c.i_set.len(), c.j_set.len()), (1, 1));
}

#[test]
fn decomposition_bounds() {
    let fib = window("fibonacci", 40);
    let got = find_decomposition_bound(&fib, 1, 2, &b(0), 30, 16, 30).unwrap();
    assert!(matches!(got, DecompositionBound::Found { s: 0, t: 2, .. }), "{got:?}");
    let pi2 = window("pi2", 40);
    let got = find_decomposition_bound(&pi2, 1, 2, &b(0), 30, 16, 30).unwrap();
    assert!(matches!(got, DecompositionBound::Found { s: 0, t: 1, .. }), "{got:?}");
    let got = find_decomposition_bound(&pi2, 1, 1, &b(0), 30, 16, 30).unwrap();
    assert!(matches!(got, DecompositionBound::Found { s: 0, t: 0, .. }), "{got:?}");
}

#[test]
fn decomposition_grid_is_finite() {
    for name in ["fibonacci", "pell", "pi2", "factorials"] {
        let w = window(name, 40);
        for k in 1..=2 {
            for l in 1..=2 {
                for r in -2..=2 {
                    let got = find_decomposition_bound(&w, k, l, &b(r), 30, 16, 30).unwrap();
                    assert!(matches!(got, DecompositionBound::Found { .. }), "{name} {k} {l} {r}: {got:?}");
                }
            }
        }
    }
}

#[test]
fn slices() {
    let fib = window("fibonacci", 40);
    let s = bounded_spread_slice(&fib, 1, 2, &b(0), 2, 30).unwrap();
    assert_eq!(s.patterns.len(), 2);
    let p = s.patterns.iter().find(|p| p.u == vec![2]).unwrap();
    assert_eq!(p.v, vec![1, 0]);
    assert_eq!(p.summary, PSummary::Cofinite { from: 0 });
    let q = s.patterns.iter().find(|p| p.u == vec![1]).unwrap();
    assert_eq!(q.summary, PSummary::Finite);

    let s = bounded_spread_slice(&fib, 1, 1, &b(1), 2, 30).unwrap();
    assert!(s.patterns.iter().all(|p| p.summary == PSummary::Finite));
    assert_eq!(s.solutions.len(), 2);

    let pi2 = window("pi2", 40);
    let s = bounded_spread_slice(&pi2, 2, 1, &b(0), 1, 30).unwrap();
    assert_eq!(s.patterns.len(), 1);
    assert_eq!((s.patterns[0].u.clone(), s.patterns[0].v.clone()), (vec![0, 0], vec![1]));
    assert_eq!(s.patterns[0].summary, PSummary::Cofinite { from: 0 });
}

#[test]
fn factorial_solutions_decompose_at_zero() {
    // for fast-growing windows every A(k,l,0) solution with a large top index splits with s′ = 0
    let w = window("factorials", 30);
    for (k, l) in [(1, 2), (2, 1), (2, 2), (2, 3)] {
        let e = enumerate_solutions(&w, k, l, &b(0), 20).unwrap();
        for s in e.solutions.iter().filter(|s| s.m.iter().chain(&s.n).max().copied().unwrap_or(0) >= 4) {
            assert!(decompose(&w.values, s, &b(0)).is_some(), "{s:?}");
        }
    }
}

#[test]
fn lambda_balance() {
    let w = window("pi2", 30);
    let wit = construct_witness(&w, &LambdaModel::Identity, None).unwrap();
    let c = lambda_balance_decompose(&w.values, &sol(&[7, 7], &[7, 7], 0), &wit, 1e-9).unwrap().unwrap();
    assert_eq!(c.s_prime, b(0));
    assert!(c.verify(&w.values));
    assert_eq!(decompose(&w.values, &c.base, &c.s).unwrap().s_prime, c.s_prime);

    let spec = builtin("fibonacci").unwrap();
    let fw = generate(&spec, 30).unwrap();
    let model = LambdaModel::for_window(&fw, ModelKind::Auto).unwrap();
    let wit = construct_witness(&fw, &model, None).unwrap();
    assert!(lambda_balance_decompose(&fw.values, &sol(&[2], &[1, 0], 0), &wit, 1e-9).unwrap().is_none());
}

#[test]
fn certificates_are_monotone_in_s() {
    let w = window("pell", 30);
    let e = enumerate_solutions(&w, 2, 2, &b(1), 20).unwrap();
    for s in &e.solutions {
        for bound in 0..20 {
            if let Some(c) = decompose(&w.values, s, &b(bound)) {
                assert!(c.verify(&w.values));
                assert!(decompose(&w.values, s, &b(bound + 1)).is_some());
            }
        }
    }
}

/// Every weakly decreasing index tuple of length `k` with entries ≤ `m`.
fn decreasing_tuples(k: usize, m: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..=m {
        for mut rest in decreasing_tuples(k - 1, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn enumerate_naive(a: &[BigInt], k: usize, l: usize, r: &BigInt, m: usize) -> Vec<SolutionTuple> {
    let mut out = Vec::new();
    for left in decreasing_tuples(k, m) {
        let lhs: BigInt = r + left.iter().map(|&i| &a[i]).sum::<BigInt>();
        for right in decreasing_tuples(l, m) {
            if lhs == right.iter().map(|&j| &a[j]).sum::<BigInt>() {
                out.push(SolutionTuple::new(left.clone(), right, r.clone()));
            }
        }
    }
    out.sort();
    out
}

fn small_sets() -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::btree_set(1i64..60, 9..14).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn meet_in_the_middle_matches_naive(vals in small_sets(), k in 0usize..=3, l in 0usize..=3, r in -5i64..=5) {
        let w = SequenceWindow::from_set(vals.iter().map(|&x| BigInt::from(x)));
        let fast = enumerate_solutions(&w, k, l, &b(r), 8).unwrap();
        let slow = enumerate_naive(&w.values, k, l, &b(r), 8);
        prop_assert_eq!(fast.solutions, slow);
    }
}

#[test]
fn meet_in_the_middle_matches_naive_on_builtins() {
    for name in ["fibonacci", "pell", "pi2", "factorials"] {
        let w = window(name, 12);
        for k in 0..=3 {
            for l in 0..=3 {
                for r in -5..=5 {
                    let fast = enumerate_solutions(&w, k, l, &b(r), 8).unwrap();
                    assert_eq!(fast.solutions, enumerate_naive(&w.values, k, l, &b(r), 8), "{name} {k} {l} {r}");
                }
            }
        }
    }
}

#[test]
fn degenerate_sides() {
    let w = SequenceWindow::from_u64s(&[1, 2, 4, 8]);
    let e = enumerate_solutions(&w, 0, 0, &b(0), 3).unwrap();
    assert_eq!(e.solutions.len(), 1);
    let e = enumerate_solutions(&w, 0, 0, &BigInt::from(1), 3).unwrap();
    assert!(e.solutions.is_empty());
    let e = enumerate_solutions(&w, 0, 1, &BigInt::from(4), 3).unwrap();
    assert_eq!(e.solutions, vec![SolutionTuple::new(vec![], vec![2], BigInt::from(4))]);
}
