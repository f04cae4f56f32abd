//! Linear recurrences `a_{n+1} = c_d a_n + … + c_0 a_{n−d}`: characteristic
//! polynomials, certified root enclosures, Pisot/Salem classification, Binet
//! coefficients and zero sets of derived sequences.
//!
//! Roots are located by Durand–Kerner iteration and certified with the
//! Gerschgorin disks of the Weierstrass correction matrix: with approximations
//! `z_i` and `W_i = f(z_i) / ∏_{j≠i}(z_i − z_j)`, every root lies in the union
//! of the disks `|z − (z_i − W_i)| ≤ (n−1)|W_i|`, and a disk disjoint from all
//! others holds exactly one root.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{CInterval, Interval};
use crate::bigser;
use crate::error::{Error, Result};
use crate::sequences::{unroll_recurrence, SequenceKind, SequenceSpec};

pub const DEFAULT_PRECISION: u32 = 64;
pub const DEFAULT_PRECISION_CAP: u32 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceSpec {
    #[serde(with = "bigser::vec")]
    pub initial: Vec<BigInt>,
    #[serde(with = "bigser::vec")]
    pub coefficients: Vec<BigInt>,
}

impl RecurrenceSpec {
    pub fn new(initial: Vec<BigInt>, coefficients: Vec<BigInt>) -> Result<Self> {
        if initial.is_empty() || initial.len() != coefficients.len() {
            return Err(Error::InvalidSpec(format!(
                "recurrence needs |initial| = |coefficients| >= 1, got {} and {}",
                initial.len(),
                coefficients.len()
            )));
        }
        Ok(RecurrenceSpec { initial, coefficients })
    }

    pub fn from_i64(initial: &[i64], coefficients: &[i64]) -> Result<Self> {
        Self::new(
            initial.iter().map(|&x| x.into()).collect(),
            coefficients.iter().map(|&x| x.into()).collect(),
        )
    }

    pub fn from_sequence(spec: &SequenceSpec) -> Option<Self> {
        match &spec.kind {
            SequenceKind::Recurrence { initial, coefficients } => Self::new(initial.clone(), coefficients.clone()).ok(),
            _ => None,
        }
    }

    /// `d + 1`.
    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    /// Raw terms `a_0 .. a_{len−1}`.
    pub fn terms(&self, len: usize) -> Vec<BigInt> {
        unroll_recurrence(&self.initial, &self.coefficients, len)
    }

    /// `x^{d+1} − c_d x^d − … − c_0`, low degree first.
    pub fn char_poly(&self) -> Vec<BigInt> {
        let mut p: Vec<BigInt> = self.coefficients.iter().map(|c| -c).collect();
        p.push(BigInt::one());
        p
    }
}

pub fn char_poly(spec: &RecurrenceSpec) -> Vec<BigInt> {
    spec.char_poly()
}

pub fn poly_to_string(p: &[BigInt]) -> String {
    let mut s = String::new();
    for (k, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let coef = if a.is_one() && k > 0 { String::new() } else { a.to_string() };
        s.push_str(&match k {
            0 => coef,
            1 => format!("{coef}x"),
            _ => format!("{coef}x^{k}"),
        });
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

// ---------------------------------------------------------------------------
// exact polynomial helpers over ℚ (as primitive integer polynomials)

fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn primitive(p: Vec<BigInt>) -> Vec<BigInt> {
    let g = p.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() || g.is_one() {
        return p;
    }
    p.into_iter().map(|c| c / &g).collect()
}

fn derivative(p: &[BigInt]) -> Vec<BigInt> {
    if p.len() <= 1 {
        return vec![BigInt::zero()];
    }
    p.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect()
}

/// Pseudo-remainder of `a` by `b`, made primitive.
fn prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let lb = b.last().unwrap().clone();
    while r.len() >= b.len() && !(r.len() == 1 && r[0].is_zero()) {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - b.len();
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] -= &lr * bc;
        }
        r.pop();
        r = trim(r);
        if r.iter().all(|c| c.is_zero()) {
            return vec![BigInt::zero()];
        }
    }
    primitive(r)
}

fn poly_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let (mut x, mut y) = (primitive(trim(a.to_vec())), primitive(trim(b.to_vec())));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !(y.len() == 1 && y[0].is_zero()) {
        let r = prem(&x, &y);
        x = y;
        y = r;
    }
    x
}

/// `gcd(f, f′)` is constant.
pub fn is_squarefree(p: &[BigInt]) -> bool {
    poly_gcd(p, &derivative(p)).len() <= 1
}

fn eval_int(p: &[BigInt], x: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

const DIVISOR_LIMIT: u64 = 1_000_000_000_000;

/// Integer roots of a monic polynomial (the only possible rational roots);
/// `None` if the constant term is too large to enumerate its divisors.
pub fn integer_roots(p: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut out = Vec::new();
    let mut q = trim(p.to_vec());
    while q.len() > 1 && q[0].is_zero() {
        q.remove(0);
        if !out.contains(&BigInt::zero()) {
            out.push(BigInt::zero());
        }
    }
    let c0 = q[0].abs().to_u64().filter(|&c| c <= DIVISOR_LIMIT)?;
    let mut d = 1u64;
    while d * d <= c0 {
        if c0 % d == 0 {
            for v in [d, c0 / d] {
                for s in [BigInt::from(v), -BigInt::from(v)] {
                    if eval_int(&q, &s).is_zero() && !out.contains(&s) {
                        out.push(s);
                    }
                }
            }
        }
        d += 1;
    }
    out.sort();
    Some(out)
}

fn is_self_reciprocal(p: &[BigInt]) -> bool {
    let q = trim(p.to_vec());
    let rev: Vec<BigInt> = q.iter().rev().cloned().collect();
    rev == q || rev.iter().zip(&q).all(|(a, b)| *a == -b)
}

// ---------------------------------------------------------------------------
// root enclosures

fn ival(v: &BigInt, prec: u32) -> Interval {
    Interval::from_int(v, prec)
}

fn cpoly_eval(p: &[BigInt], z: &CInterval) -> CInterval {
    let prec = z.prec();
    let mut acc = CInterval::from_real(Interval::from_i64(0, prec));
    for c in p.iter().rev() {
        acc = acc.mul(z).add(&CInterval::from_real(ival(c, prec)));
    }
    acc
}

/// `[−r, r]` for an interval `r ≥ 0`.
fn symmetric(r: &Interval) -> Interval {
    Interval::hull(&r.neg(), r)
}

fn weierstrass(p: &[BigInt], zs: &[CInterval]) -> Option<Vec<CInterval>> {
    (0..zs.len())
        .map(|i| {
            let mut den = CInterval::from_real(Interval::from_i64(1, zs[i].prec()));
            for (j, zj) in zs.iter().enumerate() {
                if j != i {
                    den = den.mul(&zs[i].sub(zj));
                }
            }
            cpoly_eval(p, &zs[i]).div(&den)
        })
        .collect()
}

fn initial_roots(p: &[BigInt]) -> Vec<(f64, f64)> {
    let n = p.len() - 1;
    if n == 1 {
        return vec![(-p[0].to_f64().unwrap_or(0.0), 0.0)];
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -p[i].to_f64().unwrap_or(0.0);
    }
    let mut ev: Vec<(f64, f64)> = m.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    // Durand–Kerner needs distinct starting points
    for i in 0..ev.len() {
        for j in 0..i {
            if (ev[i].0 - ev[j].0).abs() + (ev[i].1 - ev[j].1).abs() < 1e-9 {
                ev[i].0 += 1e-6 * (i as f64 + 1.0);
                ev[i].1 += 1e-6;
            }
        }
    }
    ev
}

#[derive(Clone, Debug)]
struct Disk {
    center: CInterval,
    radius: Interval,
}

impl Disk {
    fn disjoint(&self, o: &Disk) -> bool {
        self.radius.add(&o.radius).lt(&self.center.sub(&o.center).abs())
    }

    fn conj(&self) -> Disk {
        Disk { center: self.center.conj(), radius: self.radius.clone() }
    }

    /// Image under `z ↦ 1/z̄`, if the disk avoids 0.
    fn inverted(&self) -> Option<Disk> {
        let m2 = self.center.abs2();
        let den = m2.sub(&self.radius.sqr());
        if !den.is_positive() {
            return None;
        }
        let center = CInterval::new(self.center.re.div(&den)?, self.center.im.div(&den)?);
        let radius = self.radius.div(&den)?;
        let hd = center.half_diag();
        Some(Disk { center: center.midpoint(), radius: radius.add(&hd) })
    }

    fn modulus(&self) -> Interval {
        let m = self.center.abs();
        let lo = m.sub(&self.radius);
        let hi = m.add(&self.radius);
        if lo.is_positive() {
            Interval::hull(&lo, &hi)
        } else {
            Interval::hull(&Interval::from_i64(0, m.prec()), &hi)
        }
    }

    fn enclosure(&self, real: bool) -> CInterval {
        let s = symmetric(&self.radius);
        let re = self.center.re.add(&s);
        let im = if real { Interval::from_i64(0, s.prec()) } else { self.center.im.add(&s) };
        CInterval::new(re, im)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootLocation {
    Dominant,
    Inside,
    OnUnitCircle,
    Outside,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootInfo {
    pub re: f64,
    pub im: f64,
    /// the root lies within this distance of `(re, im)`
    pub radius: f64,
    pub modulus: (f64, f64),
    pub real: bool,
    pub location: RootLocation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum RejectReason {
    RepeatedRoot,
    NoDominant,
    RootOutsideUnitDisc { re: f64, im: f64, modulus_lo: f64 },
    Degenerate { detail: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Classification {
    Pisot,
    Salem,
    Rejected(RejectReason),
}

impl Classification {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Classification::Pisot | Classification::Salem)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
}

impl Enclosure {
    fn of(i: &Interval) -> Self {
        Enclosure { lo: i.lo_f64(), hi: i.hi_f64() }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexEnclosure {
    pub re: Enclosure,
    pub im: Enclosure,
}

impl ComplexEnclosure {
    fn of(z: &CInterval) -> Self {
        ComplexEnclosure { re: Enclosure::of(&z.re), im: Enclosure::of(&z.im) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinetData {
    pub alpha: Enclosure,
    /// one coefficient per root, in the order of `SpectralData::roots`
    pub coefficients: Vec<ComplexEnclosure>,
    pub window: usize,
    /// upper bound of `|a_n − Σ βᵢ μᵢⁿ|` over the window
    pub max_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralData {
    #[serde(with = "bigser::vec")]
    pub polynomial: Vec<BigInt>,
    pub polynomial_text: String,
    pub roots: Vec<RootInfo>,
    pub lambda: Option<Enclosure>,
    pub classification: Classification,
    pub squarefree: bool,
    pub rational_root_free: Option<bool>,
    /// true only for degree ≤ 3 without rational roots
    pub irreducibility_verified: bool,
    pub precision_bits: u32,
    pub binet: Option<BinetData>,
    #[serde(skip)]
    root_boxes: Vec<CInterval>,
    #[serde(skip)]
    lambda_interval: Option<Interval>,
    #[serde(skip)]
    binet_coeffs: Vec<CInterval>,
}

impl SpectralData {
    pub fn lambda_interval(&self) -> Option<&Interval> {
        self.lambda_interval.as_ref()
    }

    pub fn dominant_index(&self) -> Option<usize> {
        self.roots.iter().position(|r| r.location == RootLocation::Dominant)
    }

    /// Enclosure of the dominant Binet coefficient (real part).
    pub fn alpha_interval(&self) -> Option<Interval> {
        let i = self.dominant_index()?;
        self.binet_coeffs.get(i).map(|c| c.re.clone())
    }
}

struct Certified {
    prec: u32,
    disks: Vec<Disk>,
    real: Vec<bool>,
}

fn certify_roots(p: &[BigInt], prec: u32) -> Option<Certified> {
    let n = p.len() - 1;
    let mut zs: Vec<CInterval> = initial_roots(p).into_iter().map(|(re, im)| CInterval::from_f64(re, im, prec)).collect();
    let tol = Interval::from_ratio(&num_rational::BigRational::new(BigInt::one(), BigInt::one() << (prec as usize - 8).max(8)), prec);
    for _ in 0..200 {
        let w = weierstrass(p, &zs)?;
        let mut small = true;
        for (z, wi) in zs.iter_mut().zip(&w) {
            if !wi.abs().lt(&tol) {
                small = false;
            }
            *z = z.sub(wi).midpoint();
        }
        if small {
            break;
        }
    }
    let w = weierstrass(p, &zs)?;
    let nm1 = Interval::from_i64(n as i64 - 1, prec);
    let disks: Vec<Disk> = zs
        .iter()
        .zip(&w)
        .map(|(z, wi)| {
            let c = z.sub(wi);
            let r = nm1.mul(&wi.abs()).add(&c.half_diag());
            Disk { center: c.midpoint(), radius: r }
        })
        .collect();
    for i in 0..n {
        for j in 0..i {
            if !disks[i].disjoint(&disks[j]) {
                return None;
            }
        }
    }
    let real = (0..n)
        .map(|i| {
            let cj = disks[i].conj();
            (0..n).all(|j| j == i || cj.disjoint(&disks[j]))
        })
        .collect();
    Some(Certified { prec, disks, real })
}

fn one(prec: u32) -> Interval {
    Interval::from_i64(1, prec)
}

/// Classification of a monic integer polynomial (low degree first).
pub fn classify(poly: &[BigInt]) -> Result<SpectralData> {
    classify_with(poly, DEFAULT_PRECISION, DEFAULT_PRECISION_CAP)
}

pub fn classify_with(poly: &[BigInt], start_prec: u32, cap: u32) -> Result<SpectralData> {
    let p = trim(poly.to_vec());
    if p.len() < 2 || !p.last().unwrap().is_one() {
        return Err(Error::Invalid(format!("need a monic polynomial of degree >= 1, got {}", poly_to_string(&p))));
    }
    let deg = p.len() - 1;
    let squarefree = is_squarefree(&p);
    let int_roots = integer_roots(&p);
    let rational_root_free = int_roots.as_ref().map(|r| r.is_empty());
    let mut data = SpectralData {
        polynomial: p.clone(),
        polynomial_text: poly_to_string(&p),
        roots: vec![],
        lambda: None,
        classification: Classification::Rejected(RejectReason::RepeatedRoot),
        squarefree,
        rational_root_free,
        irreducibility_verified: deg == 1 || (deg <= 3 && rational_root_free == Some(true)),
        precision_bits: 0,
        binet: None,
        root_boxes: vec![],
        lambda_interval: None,
        binet_coeffs: vec![],
    };
    if !squarefree {
        return Ok(data);
    }
    let self_recip = is_self_reciprocal(&p);
    let mut prec = start_prec.max(32);
    loop {
        if let Some(c) = certify_roots(&p, prec) {
            if let Some(()) = fill_classification(&mut data, &c, self_recip) {
                data.precision_bits = prec;
                return Ok(data);
            }
        }
        if prec >= cap {
            return Err(Error::Precision {
                bits: prec,
                reason: format!("could not certify the roots of {}", data.polynomial_text),
            });
        }
        prec = (prec * 2).min(cap);
    }
}

/// `None` when some location is still undecided at this precision.
fn fill_classification(data: &mut SpectralData, c: &Certified, self_recip: bool) -> Option<()> {
    let n = c.disks.len();
    let prec = c.prec;
    let moduli: Vec<Interval> = c.disks.iter().map(|d| d.modulus()).collect();
    let unit = one(prec);

    // dominant: the largest certified real root above 1
    let mut dominant: Option<usize> = None;
    for i in 0..n {
        if c.real[i] && unit.lt(&c.disks[i].center.re.sub(&c.disks[i].radius)) {
            let better = dominant.is_none_or(|d| c.disks[d].center.re.lo_f64() < c.disks[i].center.re.lo_f64());
            if better {
                dominant = Some(i);
            }
        }
    }

    let mut locations = vec![RootLocation::Inside; n];
    let mut undecided = false;
    for i in 0..n {
        if Some(i) == dominant {
            locations[i] = RootLocation::Dominant;
            continue;
        }
        if moduli[i].lt(&unit) {
            locations[i] = RootLocation::Inside;
        } else if unit.lt(&moduli[i]) {
            locations[i] = RootLocation::Outside;
        } else {
            let on_circle = self_recip
                && c.disks[i]
                    .inverted()
                    .is_some_and(|inv| (0..n).all(|j| j == i || inv.disjoint(&c.disks[j])));
            if on_circle {
                locations[i] = RootLocation::OnUnitCircle;
            } else {
                undecided = true;
            }
        }
    }
    // a real root near 1 from above may not yet be separated from 1
    if dominant.is_none() && undecided {
        return None;
    }
    if undecided {
        return None;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let ma = moduli[a].mid_f64();
        let mb = moduli[b].mid_f64();
        mb.partial_cmp(&ma)
            .unwrap()
            .then(c.disks[b].center.re.mid_f64().partial_cmp(&c.disks[a].center.re.mid_f64()).unwrap())
            .then(c.disks[b].center.im.mid_f64().partial_cmp(&c.disks[a].center.im.mid_f64()).unwrap())
    });
    data.roots = order
        .iter()
        .map(|&i| {
            let d = &c.disks[i];
            RootInfo {
                re: d.center.re.mid_f64(),
                im: if c.real[i] { 0.0 } else { d.center.im.mid_f64() },
                radius: d.radius.hi_f64(),
                modulus: (moduli[i].lo_f64().max(0.0), moduli[i].hi_f64()),
                real: c.real[i],
                location: locations[i],
            }
        })
        .collect();
    data.root_boxes = order.iter().map(|&i| c.disks[i].enclosure(c.real[i])).collect();
    data.lambda_interval = dominant.map(|d| c.disks[d].enclosure(true).re);
    data.lambda = data.lambda_interval.as_ref().map(Enclosure::of);

    data.classification = match dominant {
        None => Classification::Rejected(RejectReason::NoDominant),
        Some(_) => {
            if let Some(i) = (0..n).find(|&i| locations[i] == RootLocation::Outside) {
                Classification::Rejected(RejectReason::RootOutsideUnitDisc {
                    re: c.disks[i].center.re.mid_f64(),
                    im: c.disks[i].center.im.mid_f64(),
                    modulus_lo: moduli[i].lo_f64(),
                })
            } else if locations.contains(&RootLocation::OnUnitCircle) {
                Classification::Salem
            } else {
                Classification::Pisot
            }
        }
    };
    Some(())
}

// ---------------------------------------------------------------------------
// Binet decomposition

fn solve(mut m: Vec<Vec<CInterval>>, mut rhs: Vec<CInterval>) -> Option<Vec<CInterval>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| {
            m[a][col].abs().mid_f64().partial_cmp(&m[b][col].abs().mid_f64()).unwrap()
        })?;
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col].div(&m[col][col])?;
            for k in col..n {
                let t = f.mul(&m[col][k]);
                m[row][k] = m[row][k].sub(&t);
            }
            let t = f.mul(&rhs[col]);
            rhs[row] = rhs[row].sub(&t);
        }
    }
    let mut x: Vec<Option<CInterval>> = vec![None; n];
    for row in (0..n).rev() {
        let mut s = rhs[row].clone();
        for k in row + 1..n {
            s = s.sub(&m[row][k].mul(x[k].as_ref().unwrap()));
        }
        x[row] = Some(s.div(&m[row][row])?);
    }
    x.into_iter().collect()
}

fn try_binet(spec: &RecurrenceSpec, data: &SpectralData, terms: &[BigInt]) -> Option<(Vec<CInterval>, f64)> {
    let prec = data.precision_bits;
    let zs = &data.root_boxes;
    let n = zs.len();
    let mut rows = Vec::with_capacity(n);
    let mut pw: Vec<CInterval> = zs.iter().map(|z| CInterval::from_real(one(z.prec()))).collect();
    for _ in 0..n {
        rows.push(pw.clone());
        for (p, z) in pw.iter_mut().zip(zs) {
            *p = p.mul(z);
        }
    }
    let rhs: Vec<CInterval> = spec.initial.iter().map(|a| CInterval::from_real(ival(a, prec))).collect();
    let beta = solve(rows, rhs)?;

    let half = Interval::from_ratio(&num_rational::BigRational::new(BigInt::one(), BigInt::from(2)), prec);
    let mut pw: Vec<CInterval> = zs.iter().map(|z| CInterval::from_real(one(z.prec()))).collect();
    let mut worst = 0.0f64;
    for a in terms {
        let mut s = CInterval::from_real(ival(a, prec)).neg();
        for (b, p) in beta.iter().zip(&pw) {
            s = s.add(&b.mul(p));
        }
        let r = s.abs();
        if !r.lt(&half) {
            return None;
        }
        worst = worst.max(r.hi_f64());
        for (p, z) in pw.iter_mut().zip(zs) {
            *p = p.mul(z);
        }
    }
    Some((beta, worst))
}

/// Classification plus Binet coefficients, with `|a_n − Σ βᵢ μᵢⁿ| < 1/2`
/// certified for every raw index `n < window`.
pub fn binet(spec: &RecurrenceSpec, window: usize) -> Result<SpectralData> {
    binet_with(spec, window, DEFAULT_PRECISION, DEFAULT_PRECISION_CAP)
}

pub fn binet_with(spec: &RecurrenceSpec, window: usize, start_prec: u32, cap: u32) -> Result<SpectralData> {
    let poly = spec.char_poly();
    let window = window.max(spec.order());
    let terms = spec.terms(window);
    let mut prec = start_prec;
    loop {
        let mut data = classify_with(&poly, prec, cap)?;
        if !data.squarefree {
            return Err(Error::Invalid(format!("{} has a repeated root", data.polynomial_text)));
        }
        prec = prec.max(data.precision_bits);
        if let Some((beta, worst)) = try_binet(spec, &data, &terms) {
            let d = data.dominant_index();
            let alpha = d.map(|i| beta[i].clone());
            if let Some(a) = &alpha {
                if !a.im.contains_zero() {
                    return Err(Error::WitnessViolation("dominant Binet coefficient is not real".into()));
                }
            }
            data.binet = Some(BinetData {
                alpha: alpha.as_ref().map_or(Enclosure { lo: f64::NAN, hi: f64::NAN }, |a| Enclosure::of(&a.re)),
                coefficients: beta.iter().map(ComplexEnclosure::of).collect(),
                window,
                max_residual: worst,
            });
            data.binet_coeffs = beta;
            return Ok(data);
        }
        if prec >= cap {
            return Err(Error::Precision {
                bits: prec,
                reason: format!("Binet reconstruction residual not below 1/2 within {window} terms"),
            });
        }
        prec = (prec * 2).min(cap);
    }
}

// ---------------------------------------------------------------------------
// zero sets of d_n = r + Σ a_{n+u} − Σ a_{n+v}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroScanConfig {
    /// largest dominance cutoff that will be scanned
    pub max_cutoff: usize,
    pub precision_cap: u32,
}

impl Default for ZeroScanConfig {
    fn default() -> Self {
        ZeroScanConfig { max_cutoff: 100_000, precision_cap: DEFAULT_PRECISION_CAP }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ZeroVerdict {
    IdenticallyZero,
    /// every zero lies in `[0, cutoff]`, and `|d_n| > 0` beyond it by dominance
    Finite { zeros: Vec<usize>, cutoff: usize },
    EventuallyNonzeroUndetermined { reason: String, zeros_seen: Vec<usize>, scanned: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroSetReport {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    #[serde(with = "bigser")]
    pub r: BigInt,
    /// order of a recurrence satisfied by `d_n`
    pub order: usize,
    #[serde(with = "bigser::vec")]
    pub first_values: Vec<BigInt>,
    pub dominant_coefficient: Option<Enclosure>,
    pub gamma: Vec<ComplexEnclosure>,
    pub verdict: ZeroVerdict,
}

pub fn derived_terms(spec: &RecurrenceSpec, plus: &[usize], minus: &[usize], r: &BigInt, len: usize) -> Vec<BigInt> {
    let shift = plus.iter().chain(minus).copied().max().unwrap_or(0);
    let a = spec.terms(len + shift);
    (0..len)
        .map(|n| {
            let p: BigInt = plus.iter().map(|&u| &a[n + u]).sum();
            let m: BigInt = minus.iter().map(|&v| &a[n + v]).sum();
            r + p - m
        })
        .collect()
}

pub fn zero_set(
    spec: &RecurrenceSpec,
    plus: &[usize],
    minus: &[usize],
    r: &BigInt,
    cfg: &ZeroScanConfig,
) -> Result<ZeroSetReport> {
    let order = spec.order() + usize::from(!r.is_zero());
    let first = derived_terms(spec, plus, minus, r, order);
    let mut report = ZeroSetReport {
        plus: plus.to_vec(),
        minus: minus.to_vec(),
        r: r.clone(),
        order,
        first_values: first.clone(),
        dominant_coefficient: None,
        gamma: vec![],
        verdict: ZeroVerdict::IdenticallyZero,
    };
    if first.iter().all(|v| v.is_zero()) {
        return Ok(report);
    }

    let mut prec = DEFAULT_PRECISION;
    loop {
        let data = binet_with(spec, spec.order(), prec, cfg.precision_cap)?;
        if !data.classification.is_accepted() {
            return Err(Error::Invalid(format!(
                "zero-set analysis needs a Pisot or Salem recurrence, {} is not",
                data.polynomial_text
            )));
        }
        let p = data.precision_bits;
        let dom = data.dominant_index().unwrap();
        let gamma: Vec<CInterval> = data
            .root_boxes
            .iter()
            .zip(&data.binet_coeffs)
            .map(|(z, b)| {
                let mut s = CInterval::from_real(Interval::from_i64(0, p));
                for &u in plus {
                    s = s.add(&z.powi(u as u64));
                }
                for &v in minus {
                    s = s.sub(&z.powi(v as u64));
                }
                b.mul(&s)
            })
            .collect();
        report.gamma = gamma.iter().map(ComplexEnclosure::of).collect();
        let ad = gamma[dom].re.clone();
        report.dominant_coefficient = Some(Enclosure::of(&ad));
        if ad.contains_zero() {
            if p >= cfg.precision_cap {
                let scan = cfg.max_cutoff.min(10_000);
                let vals = derived_terms(spec, plus, minus, r, scan);
                report.verdict = ZeroVerdict::EventuallyNonzeroUndetermined {
                    reason: "dominant coefficient enclosure contains 0".into(),
                    zeros_seen: zeros_of(&vals),
                    scanned: scan,
                };
                return Ok(report);
            }
            prec = (p * 2).min(cfg.precision_cap);
            continue;
        }
        // |d_n| ≥ |γ_d| λⁿ − Σ_{i≠d} |γ_i| − |r|, since every other root has modulus ≤ 1
        let mut rest = ival(&r.abs(), p);
        for (i, g) in gamma.iter().enumerate() {
            if i != dom {
                rest = rest.add(&g.abs());
            }
        }
        let lam = data.lambda_interval().unwrap().clone();
        let mut lead = ad.abs();
        let mut n = 0usize;
        while !rest.lt(&lead) {
            n += 1;
            if n > cfg.max_cutoff {
                let vals = derived_terms(spec, plus, minus, r, cfg.max_cutoff);
                report.verdict = ZeroVerdict::EventuallyNonzeroUndetermined {
                    reason: format!("dominance not reached by n = {}", cfg.max_cutoff),
                    zeros_seen: zeros_of(&vals),
                    scanned: cfg.max_cutoff,
                };
                return Ok(report);
            }
            lead = lead.mul(&lam);
        }
        // dominance holds from n on; scan [0, n − 1] exactly
        let cutoff = n.saturating_sub(1);
        let vals = derived_terms(spec, plus, minus, r, cutoff + 1);
        report.verdict = ZeroVerdict::Finite { zeros: zeros_of(&vals), cutoff };
        return Ok(report);
    }
}

fn zeros_of(v: &[BigInt]) -> Vec<usize> {
    v.iter().enumerate().filter(|(_, x)| x.is_zero()).map(|(i, _)| i).collect()
}
