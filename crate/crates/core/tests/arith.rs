use num_bigint::BigInt;
use num_rational::BigRational;
use sparsity_core::arith::*;

#[test]
fn interval_sqrt_two() {
    let s = Interval::sqrt_int(&BigInt::from(2), 64);
    assert!((s.mid_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
    assert!(s.width_f64() < 1e-18);
}

#[test]
fn interval_division_encloses() {
    let a = Interval::from_i64(1, 40);
    let b = Interval::from_i64(3, 40);
    let q = a.div(&b).unwrap();
    let third = BigRational::new(BigInt::from(1), BigInt::from(3));
    assert!(q.contains_ratio(&third));
    assert!(Interval::from_i64(0, 40).div(&Interval::from_i64(0, 40)).is_none());
}

#[test]
fn golden_ratio_floor() {
    let phi = QuadraticNumber::parse("(1+sqrt(5))/2").unwrap();
    let c = QuadraticNumber::parse("1/sqrt(5)").unwrap();
    assert_eq!(phi.floor(), BigInt::from(1));
    let v: Vec<BigInt> = (0..8).map(|n| c.mul(&phi.pow(n)).unwrap().floor()).collect();
    let want: Vec<BigInt> = [0, 0, 1, 1, 3, 4, 8, 12].iter().map(|&x| BigInt::from(x)).collect();
    assert_eq!(v, want);
}

#[test]
fn sqrt_normalizes_square_factors() {
    let a = QuadraticNumber::parse("sqrt(8)").unwrap();
    let b = QuadraticNumber::parse("2*sqrt(2)").unwrap();
    assert_eq!(a, b);
    assert!(QuadraticNumber::parse("sqrt(9)").unwrap().is_rational());
    assert!(QuadraticNumber::parse("sqrt(2)+sqrt(3)").is_err());
}

#[test]
fn decimals_and_powers() {
    let q = QuadraticNumber::parse("1.5^2").unwrap();
    assert_eq!(q.x, BigRational::new(BigInt::from(9), BigInt::from(4)));
    assert_eq!(QuadraticNumber::parse("-2.25").unwrap().floor(), BigInt::from(-3));
}
