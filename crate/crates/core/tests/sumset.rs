use num_bigint::BigInt;
use num_traits::Zero;
use sparsity_core::error::Error;
use sparsity_core::sequences::SequenceWindow;
use sparsity_core::sumset::*;

fn img(v: &[i64], b: i64, signed: bool) -> SumsetImage {
    let mut g = v.to_vec();
    if signed {
        g.extend(v.iter().map(|x| -x));
    }
    SumsetImage::from_generators("test", &g, b, signed)
}

#[test]
fn closure_examples() {
    let w = SequenceWindow::from_u64s(&[1, 3]);
    assert_eq!(signed_closure(&w, 10).to_vec(), vec![-3, -1, 1, 3]);
    let w = SequenceWindow::from_u64s(&[2, 15]);
    let c = signed_closure(&w, 10);
    assert_eq!(c.to_vec(), vec![-2, 2]);
    assert!(c.truncation_note.is_some());
    let w = SequenceWindow::from_set([BigInt::zero()]);
    assert_eq!(signed_closure(&w, 10).to_vec(), vec![0]);
}

#[test]
fn sumset_examples() {
    let cfg = EngineConfig::default();
    assert_eq!(iterated_sumset(&img(&[0, 1], 10, false), 2, &cfg).unwrap().to_vec(), vec![0, 1, 2]);
    assert_eq!(
        iterated_sumset(&img(&[1, 3], 10, true), 2, &cfg).unwrap().to_vec(),
        vec![-6, -4, -2, 0, 2, 4, 6]
    );
    assert_eq!(sigma(&img(&[1, 3], 10, false), 2, &cfg).unwrap().to_vec(), vec![1, 2, 3, 4, 6]);
}

#[test]
fn widened_window_keeps_returning_sums() {
    // 9 + 9 − 9 leaves [−10, 10] midway but lands back inside
    let cfg = EngineConfig::default();
    let i = img(&[9], 10, true);
    let s = iterated_sumset(&i, 3, &cfg).unwrap();
    assert!(s.contains(9) && s.contains(-9));
    let sp = iterated_sumset(&i, 3, &EngineConfig { engine: Engine::Sparse, ..cfg }).unwrap();
    assert_eq!(s.to_vec(), sp.to_vec());
}

#[test]
fn dense_limit_errors() {
    let cfg = EngineConfig { engine: Engine::Dense, dense_limit: 100 };
    let e = sigma(&img(&[1, 3], 1000, true), 2, &cfg).unwrap_err();
    assert!(matches!(e, Error::DenseLimit { .. }));
}

#[test]
fn bitset_shifts() {
    let mut src = BitSet::new(-5, 200);
    for v in [-5, 0, 63, 64, 130, 200] {
        src.insert(v);
    }
    for shift in [-140, -70, -64, -1, 0, 1, 63, 64, 65, 129] {
        let mut dst = BitSet::new(-100, 150);
        dst.or_shifted(&src, shift);
        let want: Vec<i64> = src.iter().map(|v| v + shift).filter(|v| (-100..=150).contains(v)).collect();
        assert_eq!(dst.iter().collect::<Vec<_>>(), want, "shift {shift}");
    }
}

#[test]
fn powers_of_two_membership() {
    let w = SequenceWindow::from_set((0..40).map(|i| BigInt::from(1u64) << i));
    let r = sparse_membership(&w, &BigInt::zero(), 2, true, 40).unwrap();
    assert_eq!(r.terms.len(), 2);
    assert_eq!(r.sum(), BigInt::zero());
    assert!(sparse_membership(&w, &BigInt::from(11), 2, true, 20).is_none());
    let r = sparse_membership(&w, &BigInt::from(11), 3, true, 20).unwrap();
    assert!(r.verify(&w));
}

#[test]
fn coset_on_evens() {
    let evens: Vec<i64> = (-50..=50).map(|x| 2 * x).collect();
    let i = SumsetImage::from_generators("evens", &evens, 100, true);
    let s = detect_coset(&i, 10, 5, CosetMode::FullCoset);
    let w = s.witness.unwrap();
    assert_eq!((w.modulus, w.residue), (2, 0));
    assert!(verify_coset(&i, &w));
}

#[test]
fn rle_json() {
    let i = img(&[1, 2, 3, 7], 10, false);
    let j = i.to_json();
    assert_eq!(j["members"], serde_json::json!([[1, 3], [7, 1]]));
}

use proptest::prelude::*;
use sparsity_core::sequences::{builtin, generate, generate_up_to, SequenceSpec};
use std::collections::BTreeSet;

/// `k(X)` by brute force with no clipping.
fn brute_k(gens: &[i64], k: usize) -> BTreeSet<i64> {
    let mut cur: BTreeSet<i64> = [0].into();
    for _ in 0..k {
        cur = cur.iter().flat_map(|&s| gens.iter().map(move |&g| s + g)).collect();
    }
    cur
}

fn brute_sigma(gens: &[i64], n: usize, bound: i64) -> Vec<i64> {
    let all: BTreeSet<i64> = (1..=n).flat_map(|k| brute_k(gens, k)).collect();
    all.into_iter().filter(|v| v.abs() <= bound).collect()
}

fn dense() -> EngineConfig {
    EngineConfig { engine: Engine::Dense, ..EngineConfig::default() }
}

fn sparse() -> EngineConfig {
    EngineConfig { engine: Engine::Sparse, ..EngineConfig::default() }
}

fn up_to(name: &str, b: i64) -> SequenceWindow {
    generate_up_to(&builtin(name).unwrap(), &BigInt::from(b)).unwrap()
}

#[test]
fn two_pow_plus_n_law() {
    // 2a_{k+1} − a_{k+2} = k for a_n = 2ⁿ + n, checked in 128-bit arithmetic
    for k in 0u32..=100 {
        let a = |n: u32| (1i128 << n) + n as i128;
        assert_eq!(2 * a(k + 1) - a(k + 2), k as i128);
    }
    let w = generate(&builtin("two_pow_plus_n").unwrap(), 110).unwrap();
    assert_eq!(w.values[..4], [1, 3, 6, 11].map(BigInt::from));
    for t in -100i64..=100 {
        let r = sparse_membership(&w, &BigInt::from(t), 3, true, 110).unwrap_or_else(|| panic!("{t}"));
        assert!(r.verify(&w) && r.terms.len() <= 3, "{t}");
    }
}

#[test]
fn two_pow_plus_n_realized_image_is_everything() {
    let w = generate(&builtin("two_pow_plus_n").unwrap(), 110).unwrap();
    let img = realize_sigma(&w, 3, true, 100, 110);
    assert_eq!(img.to_vec(), (-100..=100).collect::<Vec<_>>());
    let c = detect_coset(&img, 5, 5, CosetMode::FullCoset).witness.unwrap();
    assert_eq!((c.modulus, c.residue), (1, 0));
    assert!(verify_coset(&img, &c));
}

#[test]
fn eleven_is_not_two_signed_powers() {
    let w = SequenceWindow::from_set((0..20).map(|i| BigInt::from(1u64) << i));
    assert!(sparse_membership(&w, &BigInt::from(11), 2, true, 20).is_none());
    let r = sparse_membership(&w, &BigInt::zero(), 2, true, 20).unwrap();
    assert!(r.verify(&w));
}

#[test]
fn lagrange_four_squares() {
    let img = sigma(&unsigned_image(&up_to("squares", 100_000), 100_000), 4, &dense()).unwrap();
    assert!((1..=100_000).all(|v| img.contains(v)));
    let img = sigma(&unsigned_image(&up_to("squares", 100), 100), 4, &EngineConfig::default()).unwrap();
    assert!((1..=100).all(|v| img.contains(v)));
}

#[test]
fn gauss_odd_squares() {
    let odd: Vec<BigInt> = (0..400i64).map(|k| BigInt::from((2 * k + 1) * (2 * k + 1))).collect();
    let w = SequenceWindow::complete_up_to(odd, BigInt::from(100_000));
    let img = sigma(&unsigned_image(&w, 100_000), 3, &dense()).unwrap();
    assert!((3..=100_000).step_by(8).all(|v| img.contains(v)));
}

#[test]
fn powers_of_two_carry_no_coset() {
    let w = up_to("pi2", 10_000);
    let img = sigma(&signed_closure(&w, 10_000), 3, &EngineConfig::default()).unwrap();
    let s = detect_coset(&img, 50, 20, CosetMode::FullCoset);
    assert!(s.witness.is_none());
    assert_eq!(s.max_modulus, 50);
}

#[test]
fn lehmer_windows_need_zero() {
    let spec: SequenceSpec = "lehmer".parse().unwrap();
    let w = generate(&spec, 30).unwrap();
    assert!(signed_closure(&w, 1000).contains(0));
}

fn gen_set() -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::btree_set(0i64..40, 1..6).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn engines_agree_with_brute_force(v in gen_set(), n in 1usize..4, signed in any::<bool>(), b in 5i64..60) {
        let w = SequenceWindow::from_set(v.iter().map(|&x| BigInt::from(x)));
        let base = if signed { signed_closure(&w, b) } else { unsigned_image(&w, b) };
        let d = sigma(&base, n, &dense()).unwrap();
        let s = sigma(&base, n, &sparse()).unwrap();
        let gens = base.generators().to_vec();
        prop_assert_eq!(d.to_vec(), brute_sigma(&gens, n, b));
        prop_assert_eq!(d.to_vec(), s.to_vec());
        // the realized image uses every element, including those above the bound
        let r = realize_sigma(&w, n, signed, b, w.len());
        let all: Vec<i64> = if signed { v.iter().flat_map(|&x| [x, -x]).collect() } else { v.clone() };
        prop_assert_eq!(r.to_vec(), brute_sigma(&all, n, b));
    }

    #[test]
    fn sigma_is_monotone_and_symmetric(v in gen_set(), n in 1usize..4, b in 5i64..60) {
        let w = SequenceWindow::from_set(v.iter().map(|&x| BigInt::from(x)));
        let base = signed_closure(&w, b);
        let lo = sigma(&base, n, &EngineConfig::default()).unwrap();
        let hi = sigma(&base, n + 1, &EngineConfig::default()).unwrap();
        prop_assert!(lo.to_vec().iter().all(|&x| hi.contains(x)));
        prop_assert!(lo.is_symmetric());
        prop_assert!(lo.to_vec().iter().all(|&x| lo.contains(-x)));
    }

    #[test]
    fn iterated_sums_add(v in gen_set(), k in 1usize..3, l in 1usize..3, b in 5i64..60) {
        let w = SequenceWindow::from_set(v.iter().map(|&x| BigInt::from(x)));
        let base = signed_closure(&w, b);
        let gens = base.generators().to_vec();
        let (kx, lx) = (brute_k(&gens, k), brute_k(&gens, l));
        let sum: BTreeSet<i64> = kx.iter().flat_map(|x| lx.iter().map(move |y| x + y)).filter(|v| v.abs() <= b).collect();
        let got = iterated_sumset(&base, k + l, &EngineConfig::default()).unwrap();
        prop_assert_eq!(got.to_vec(), sum.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn detected_cosets_verify(v in gen_set(), n in 1usize..4, b in 50i64..200, one_sided in any::<bool>()) {
        let w = SequenceWindow::from_set(v.iter().map(|&x| BigInt::from(x)));
        let mode = if one_sided { CosetMode::OneSidedProgression } else { CosetMode::FullCoset };
        let base = if one_sided { unsigned_image(&w, b) } else { signed_closure(&w, b) };
        let img = sigma(&base, n, &EngineConfig::default()).unwrap();
        if let Some(c) = detect_coset(&img, 10, 5, mode).witness {
            prop_assert!(verify_coset(&img, &c));
            let (lo, hi) = c.verified_range;
            let first = lo + (c.residue - lo).rem_euclid(c.modulus);
            prop_assert!((first..=hi).step_by(c.modulus as usize).all(|x| img.to_vec().binary_search(&x).is_ok()));
        }
    }
}
