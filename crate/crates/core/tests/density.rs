use num_bigint::BigInt;
use num_rational::Ratio;
use sparsity_core::error::Error;
use sparsity_core::sequences::SequenceWindow;
use sparsity_core::sumset::SumsetImage;
use sparsity_core::density::*;

fn w(v: &[u64]) -> SequenceWindow {
    SequenceWindow::from_u64s(v)
}

#[test]
fn counting_examples() {
    let evens: Vec<u64> = (0..=20).map(|x| 2 * x).collect();
    assert_eq!(counting(&w(&evens), 10).unwrap(), 5);
    assert_eq!(counting(&w(&[1, 2, 4, 8, 16]), 10).unwrap(), 4);
    assert_eq!(counting(&w(&[5, 9]), 3).unwrap(), 0);
}

#[test]
fn counting_requires_coverage() {
    let win = SequenceWindow::complete_up_to(vec![BigInt::from(1), BigInt::from(4)], BigInt::from(5));
    assert!(counting(&win, 5).is_ok());
    assert!(matches!(counting(&win, 6), Err(Error::Incomplete { .. })));
}

#[test]
fn full_naturals() {
    let n: Vec<u64> = (1..=1000).collect();
    let ld = lower_density_estimate(&w(&n), 1, 1000).unwrap();
    assert_eq!(ld.estimate, Ratio::new(1, 1));
    let b = banach_density_estimate(&w(&n), 512);
    assert!(b.points.iter().all(|p| p.density == Ratio::new(1, 1)));
}

#[test]
fn banach_brute_force() {
    let s = [1u64, 2, 3, 7, 8, 20, 21, 22, 23, 40];
    let win = w(&s);
    let b = banach_density_estimate(&win, 16);
    for p in &b.points {
        let l = p.length;
        let best = (0..=40 - l).map(|m| s.iter().filter(|&&x| x > m && x <= m + l).count() as u64).max().unwrap();
        assert_eq!(p.max_count, best, "length {l}");
    }
}

#[test]
fn perturbation_identity() {
    let x = SumsetImage::from_generators("x", &[-8, -4, -2, -1, 1, 2, 4, 8], 100, true);
    let c = perturbation_density_check(&x, &[0], 100);
    assert_eq!(c.base.ladder, c.perturbed.ladder);
    assert!(c.violations.is_empty());
}

use proptest::prelude::*;
use sparsity_core::sequences::{builtin, generate_up_to};
use sparsity_core::sumset::{CosetMode, EngineConfig};

fn up_to(name: &str, b: i64) -> SequenceWindow {
    generate_up_to(&builtin(name).unwrap(), &BigInt::from(b)).unwrap()
}

fn progression(m: u64, r: u64, top: u64) -> SequenceWindow {
    let v: Vec<BigInt> = (r..=top).step_by(m as usize).map(BigInt::from).collect();
    SequenceWindow::complete_up_to(v, BigInt::from(top))
}

#[test]
fn progression_density() {
    let ld = lower_density_estimate(&progression(7, 3, 1_000_000), 1000, 1_000_000).unwrap();
    assert!((ld.value() - 1.0 / 7.0).abs() < 1e-3);
    let at = ld.at(1_000_000).unwrap();
    assert_eq!(at.count, (1_000_000 - 3) / 7 + 1);
}

#[test]
fn squares_are_thin() {
    let sq = up_to("squares", 1_000_000);
    let ld = lower_density_estimate(&sq, 1000, 1_000_000).unwrap();
    assert!(ld.value() <= 1e-3);
    // A(n) = ⌊√n⌋
    assert_eq!(counting(&sq, 999_999).unwrap(), 999);
    let b = banach_density_estimate(&sq, 10_000);
    assert!(b.last().length == 10_000 || b.last().length == 8192);
    assert!(b.points.iter().filter(|p| p.length >= 8192).all(|p| p.value() <= 0.02));
}

#[test]
fn periodic_banach_ladder() {
    let w = progression(10, 10, 200_000);
    let b = banach_density_estimate(&w, 10_000);
    for p in &b.points {
        let l = p.length as f64;
        assert!((p.value() - 0.1).abs() <= 1.0 / l, "{p:?}");
    }
}

#[test]
fn delta_probe_examples() {
    let cfg = EngineConfig::default();
    let sq = up_to("squares", 100_000);
    let e = delta_sparse_probe(&sq, 4, 100_000, 50, 20, &cfg).unwrap();
    let c = e[3].progression.witness.as_ref().unwrap();
    assert_eq!((c.modulus, c.residue, c.mode), (1, 0, CosetMode::OneSidedProgression));

    let pi2 = up_to("pi2", 10_000);
    for e in delta_sparse_probe(&pi2, 3, 10_000, 50, 20, &cfg).unwrap() {
        assert!(e.progression.witness.is_none());
        assert!(e.lower_density.value() <= 0.05, "{}", e.lower_density.value());
    }

    let odd: Vec<BigInt> = (0..400i64).map(|k| BigInt::from((2 * k + 1) * (2 * k + 1))).collect();
    let w = SequenceWindow::complete_up_to(odd, BigInt::from(100_000));
    let e = delta_sparse_probe(&w, 3, 100_000, 50, 20, &cfg).unwrap();
    let c = e[2].progression.witness.as_ref().unwrap();
    assert_eq!((c.modulus, c.residue), (8, 3));
    assert!(c.verified_range.0 <= 3);
}

#[test]
fn perturbation_examples() {
    let pi2: Vec<i64> = (0..20).map(|k| 1i64 << k).collect();
    let signed: Vec<i64> = pi2.iter().flat_map(|&x| [x, -x]).collect();
    let x = SumsetImage::from_generators("pi2", &signed, 1_000_000, true);
    let c = perturbation_density_check(&x, &[0, 1], 1_000_000);
    assert!(c.base.value() <= 0.01 && c.perturbed.value() <= 0.01);
    assert!(c.violations.is_empty());

    let evens: Vec<i64> = (-50_000..=50_000).map(|k| 2 * k).collect();
    let x = SumsetImage::from_generators("evens", &evens, 100_000, true);
    let c = perturbation_density_check(&x, &[1], 100_000);
    assert!((c.base.value() - 0.5).abs() < 0.01 && (c.perturbed.value() - 0.5).abs() < 0.01);
    assert!(c.violations.is_empty());
}

#[test]
fn log_growth_bounded_for_sparse_builtins() {
    for name in ["pi2", "factorials", "fibonacci"] {
        let g = log_growth_ratio(&up_to(name, 1_000_000), 10, 1_000_000).unwrap();
        let k = g.decade_sups.len();
        let (a, b) = (g.decade_sups[k - 3].1, g.decade_sups[k - 1].1);
        assert!(g.sup.is_finite() && (b - a) / a < 0.1, "{name}: {:?}", g.decade_sups);
    }
    let g = log_growth_ratio(&up_to("squares", 1_000_000), 10, 1_000_000).unwrap();
    assert!(g.decade_sups.last().unwrap().1 > 10.0 * g.decade_sups[0].1);
}

fn subset_pair() -> impl Strategy<Value = (Vec<u64>, Vec<u64>)> {
    proptest::collection::btree_set(1u64..2000, 0..300).prop_flat_map(|big| {
        let v: Vec<u64> = big.into_iter().collect();
        let n = v.len();
        (Just(v), proptest::collection::vec(any::<bool>(), n))
            .prop_map(|(v, keep)| (v.iter().zip(&keep).filter(|(_, &k)| k).map(|(&x, _)| x).collect(), v))
    })
}

fn complete(v: &[u64]) -> SequenceWindow {
    SequenceWindow::complete_up_to(v.iter().map(|&x| BigInt::from(x)).collect(), BigInt::from(2000))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn subsets_have_smaller_density((small, big) in subset_pair()) {
        let a = lower_density_estimate(&complete(&small), 1, 2000).unwrap();
        let b = lower_density_estimate(&complete(&big), 1, 2000).unwrap();
        for (p, q) in a.ladder.iter().zip(&b.ladder) {
            prop_assert_eq!(p.n, q.n);
            prop_assert!(p.density <= q.density);
        }
    }

    #[test]
    fn finite_changes_move_density_little((small, big) in subset_pair()) {
        let f = (big.len() - small.len()) as u64;
        let a = lower_density_estimate(&complete(&small), 1, 2000).unwrap();
        let b = lower_density_estimate(&complete(&big), 1, 2000).unwrap();
        for (p, q) in a.ladder.iter().zip(&b.ladder) {
            prop_assert!(q.count - p.count <= f);
        }
    }

    #[test]
    fn banach_dominates_and_counts_are_monotone((_, big) in subset_pair()) {
        let w = complete(&big);
        let ld = lower_density_estimate(&w, 1, 2000).unwrap();
        prop_assert!(ld.ladder.windows(2).all(|p| p[0].count <= p[1].count));
        let b = banach_density_estimate(&w, 1024);
        for p in &b.points {
            // A(ℓ)/ℓ is one placement of a window of length ℓ
            let c = counting(&w, p.length).unwrap();
            prop_assert!(p.max_count >= c);
            prop_assert!(p.density <= Ratio::new(1, 1));
        }
    }
}
