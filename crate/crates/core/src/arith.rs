//! Outward-rounded dyadic intervals, rectangular complex intervals, and exact
//! arithmetic in real quadratic fields.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

fn pow2(p: u32) -> BigInt {
    BigInt::one() << p as usize
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn ceil_sqrt(n: &BigInt) -> BigInt {
    let s = n.sqrt();
    if &s * &s == *n {
        s
    } else {
        s + 1
    }
}

/// Closed real interval `[lo, hi] / 2^prec`. Every operation rounds outward, so
/// the true result of the corresponding real operation always lies inside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

impl Interval {
    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn from_int(v: &BigInt, prec: u32) -> Self {
        let s = v << prec as usize;
        Interval { lo: s.clone(), hi: s, prec }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_int(&BigInt::from(v), prec)
    }

    pub fn from_ratio(q: &BigRational, prec: u32) -> Self {
        let num = q.numer() << prec as usize;
        let lo = num.div_floor(q.denom());
        let hi = ceil_div(&num, q.denom());
        Interval { lo, hi, prec }
    }

    /// Exact enclosure of a finite double.
    pub fn from_f64(x: f64, prec: u32) -> Self {
        let q = BigRational::from_float(x).unwrap_or_else(BigRational::zero);
        Self::from_ratio(&q, prec)
    }

    pub fn hull(a: &Self, b: &Self) -> Self {
        Interval {
            lo: a.lo.clone().min(b.lo.clone()),
            hi: a.hi.clone().max(b.hi.clone()),
            prec: a.prec,
        }
    }

    pub fn lo_ratio(&self) -> BigRational {
        BigRational::new(self.lo.clone(), pow2(self.prec))
    }

    pub fn hi_ratio(&self) -> BigRational {
        BigRational::new(self.hi.clone(), pow2(self.prec))
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo_ratio().to_f64().unwrap_or(f64::NAN)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi_ratio().to_f64().unwrap_or(f64::NAN)
    }

    pub fn mid_f64(&self) -> f64 {
        BigRational::new(&self.lo + &self.hi, pow2(self.prec + 1))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    pub fn width_f64(&self) -> f64 {
        BigRational::new(&self.hi - &self.lo, pow2(self.prec))
            .to_f64()
            .unwrap_or(f64::INFINITY)
    }

    /// Point interval at the (rounded down) midpoint.
    pub fn midpoint(&self) -> Self {
        let m = (&self.lo + &self.hi).div_floor(&BigInt::from(2));
        Interval { lo: m.clone(), hi: m, prec: self.prec }
    }

    /// Re-encloses at a different precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        if prec >= self.prec {
            let s = (prec - self.prec) as usize;
            Interval { lo: &self.lo << s, hi: &self.hi << s, prec }
        } else {
            let d = pow2(self.prec - prec);
            Interval { lo: self.lo.div_floor(&d), hi: ceil_div(&self.hi, &d), prec }
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Certainly `self < other`.
    pub fn lt(&self, other: &Self) -> bool {
        self.hi < other.lo
    }

    /// Certainly `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        self.hi <= other.lo
    }

    pub fn contains_ratio(&self, q: &BigRational) -> bool {
        self.lo_ratio() <= *q && *q <= self.hi_ratio()
    }

    pub fn neg(&self) -> Self {
        Interval { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.prec, o.prec);
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi, prec: self.prec }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.prec, o.prec);
        let p = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let min = p.iter().min().unwrap();
        let max = p.iter().max().unwrap();
        let s = pow2(self.prec);
        Interval { lo: min.div_floor(&s), hi: ceil_div(max, &s), prec: self.prec }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        let (a, b) = (&self.lo * k, &self.hi * k);
        if k.is_negative() {
            Interval { lo: b, hi: a, prec: self.prec }
        } else {
            Interval { lo: a, hi: b, prec: self.prec }
        }
    }

    pub fn sqr(&self) -> Self {
        let a = self.abs();
        a.mul(&a)
    }

    pub fn abs(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            Interval {
                lo: BigInt::zero(),
                hi: (-&self.lo).max(self.hi.clone()),
                prec: self.prec,
            }
        } else if self.hi.sign() != Sign::Plus && self.lo.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Division; `None` if the divisor may be zero.
    pub fn div(&self, o: &Self) -> Option<Self> {
        if o.contains_zero() {
            return None;
        }
        let s = pow2(o.prec);
        let nums = [&self.lo * &s, &self.hi * &s];
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for n in &nums {
            for d in [&o.lo, &o.hi] {
                let (f, c) = if d.is_negative() {
                    let (nn, dd) = (-n, -d);
                    (nn.div_floor(&dd), ceil_div(&nn, &dd))
                } else {
                    (n.div_floor(d), ceil_div(n, d))
                };
                lo = Some(lo.map_or(f.clone(), |x: BigInt| x.min(f.clone())));
                hi = Some(hi.map_or(c.clone(), |x: BigInt| x.max(c.clone())));
            }
        }
        Some(Interval { lo: lo.unwrap(), hi: hi.unwrap(), prec: self.prec })
    }

    /// Square root of the nonnegative part.
    pub fn sqrt(&self) -> Self {
        let s = pow2(self.prec);
        let lo = if self.lo.is_positive() { (&self.lo * &s).sqrt() } else { BigInt::zero() };
        let hi = if self.hi.is_positive() { ceil_sqrt(&(&self.hi * &s)) } else { BigInt::zero() };
        Interval { lo, hi, prec: self.prec }
    }

    pub fn powi(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Interval::from_i64(1, self.prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `sqrt(d)` for a nonnegative integer.
    pub fn sqrt_int(d: &BigInt, prec: u32) -> Self {
        Self::from_int(d, prec).sqrt()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.12e}, {:.12e}]", self.lo_f64(), self.hi_f64())
    }
}

/// Rectangle `re + i·im` of real intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CInterval {
    pub re: Interval,
    pub im: Interval,
}

impl CInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        CInterval { re, im }
    }

    pub fn from_real(re: Interval) -> Self {
        let prec = re.prec;
        CInterval { re, im: Interval::from_i64(0, prec) }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        CInterval { re: Interval::from_f64(re, prec), im: Interval::from_f64(im, prec) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        CInterval { re: self.re.with_prec(prec), im: self.im.with_prec(prec) }
    }

    pub fn midpoint(&self) -> Self {
        CInterval { re: self.re.midpoint(), im: self.im.midpoint() }
    }

    pub fn conj(&self) -> Self {
        CInterval { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn add(&self, o: &Self) -> Self {
        CInterval { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        CInterval { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn neg(&self) -> Self {
        CInterval { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        CInterval {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn scale(&self, k: &Interval) -> Self {
        CInterval { re: self.re.mul(k), im: self.im.mul(k) }
    }

    pub fn abs2(&self) -> Interval {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn abs(&self) -> Interval {
        self.abs2().sqrt()
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        let d = o.abs2();
        let n = self.mul(&o.conj());
        Some(CInterval { re: n.re.div(&d)?, im: n.im.div(&d)? })
    }

    pub fn powi(&self, mut e: u64) -> Self {
        let prec = self.prec();
        let mut base = self.clone();
        let mut acc = CInterval::from_real(Interval::from_i64(1, prec));
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    /// Upper bound on the half diagonal of the rectangle.
    pub fn half_diag(&self) -> Interval {
        let prec = self.prec();
        let w = self.re.sub(&self.re.midpoint()).abs();
        let h = self.im.sub(&self.im.midpoint()).abs();
        let r = w.sqr().add(&h.sqr()).sqrt();
        Interval::from_ratio(&r.hi_ratio(), prec)
    }
}

/// Element `x + y·√d` of a real quadratic field (or of ℚ when `y = 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticNumber {
    pub x: BigRational,
    pub y: BigRational,
    pub d: BigInt,
}

fn squarefree_split(n: &BigInt) -> (BigInt, BigInt) {
    // n = s^2 * core, trial division over small primes only
    let mut core = n.clone();
    let mut s = BigInt::one();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(1_000_000);
    while &p * &p <= core && p <= limit {
        let pp = &p * &p;
        while (&core % &pp).is_zero() {
            core /= &pp;
            s *= &p;
        }
        p += 1;
    }
    let r = core.sqrt();
    if &r * &r == core {
        s *= r;
        core = BigInt::one();
    }
    (s, core)
}

impl QuadraticNumber {
    pub fn rational(q: BigRational) -> Self {
        QuadraticNumber { x: q, y: BigRational::zero(), d: BigInt::zero() }
    }

    pub fn from_int(v: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn sqrt_of(n: &BigInt) -> Result<Self> {
        if n.is_negative() {
            return Err(Error::InvalidSpec(format!("sqrt of negative number {n}")));
        }
        let (s, core) = squarefree_split(n);
        if core.is_one() || core.is_zero() {
            let v = if core.is_zero() { BigInt::zero() } else { s };
            return Ok(Self::rational(BigRational::from_integer(v)));
        }
        Ok(QuadraticNumber {
            x: BigRational::zero(),
            y: BigRational::from_integer(s),
            d: core,
        })
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    fn field(&self, o: &Self) -> Result<BigInt> {
        match (self.is_rational(), o.is_rational()) {
            (true, true) => Ok(BigInt::zero()),
            (false, true) => Ok(self.d.clone()),
            (true, false) => Ok(o.d.clone()),
            (false, false) if self.d == o.d => Ok(self.d.clone()),
            _ => Err(Error::InvalidSpec(format!(
                "cannot mix sqrt({}) and sqrt({}) in one expression",
                self.d, o.d
            ))),
        }
    }

    fn norm(mut self) -> Self {
        if self.y.is_zero() {
            self.d = BigInt::zero();
        }
        self
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let d = self.field(o)?;
        Ok(QuadraticNumber { x: &self.x + &o.x, y: &self.y + &o.y, d }.norm())
    }

    pub fn neg(&self) -> Self {
        QuadraticNumber { x: -&self.x, y: -&self.y, d: self.d.clone() }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let d = self.field(o)?;
        let dq = BigRational::from_integer(d.clone());
        Ok(QuadraticNumber {
            x: &self.x * &o.x + &self.y * &o.y * dq,
            y: &self.x * &o.y + &self.y * &o.x,
            d,
        }
        .norm())
    }

    pub fn recip(&self) -> Result<Self> {
        // 1/(x + y√d) = (x − y√d)/(x² − d y²)
        let n = &self.x * &self.x - &self.y * &self.y * BigRational::from_integer(self.d.clone());
        if n.is_zero() {
            return Err(Error::InvalidSpec("division by zero".into()));
        }
        Ok(QuadraticNumber { x: &self.x / &n, y: -&self.y / &n, d: self.d.clone() }.norm())
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        self.field(o)?;
        self.mul(&o.recip()?)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::from_int(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same field");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same field");
            }
        }
        acc
    }

    /// Exact comparison with a rational.
    pub fn cmp_ratio(&self, t: &BigRational) -> Ordering {
        // compare y√d with u = t − x
        let u = t - &self.x;
        if self.y.is_zero() {
            return BigRational::zero().cmp(&u);
        }
        let y2d = &self.y * &self.y * BigRational::from_integer(self.d.clone());
        let u2 = &u * &u;
        let ord = if self.y.is_positive() {
            if !u.is_positive() {
                Ordering::Greater
            } else {
                y2d.cmp(&u2)
            }
        } else if !u.is_negative() {
            Ordering::Less
        } else {
            u2.cmp(&y2d)
        };
        ord
    }

    pub fn signum(&self) -> Ordering {
        self.cmp_ratio(&BigRational::zero())
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        let base = self.x.floor().to_integer();
        let est = if self.y.is_zero() {
            BigInt::zero()
        } else {
            let y2d = &self.y * &self.y * BigRational::from_integer(self.d.clone());
            let r = y2d.floor().to_integer().sqrt();
            if self.y.is_negative() {
                -r
            } else {
                r
            }
        };
        let mut n = base + est;
        // correct the estimate; it is off by at most two
        while self.cmp_ratio(&BigRational::from_integer(n.clone())) == Ordering::Less {
            n -= 1;
        }
        while self.cmp_ratio(&BigRational::from_integer(&n + 1)) != Ordering::Less {
            n += 1;
        }
        n
    }

    pub fn to_interval(&self, prec: u32) -> Interval {
        let x = Interval::from_ratio(&self.x, prec);
        if self.y.is_zero() {
            return x;
        }
        let s = Interval::sqrt_int(&self.d, prec);
        x.add(&Interval::from_ratio(&self.y, prec).mul(&s))
    }

    pub fn to_f64(&self) -> f64 {
        self.to_interval(80).mid_f64()
    }

    /// Parses expressions built from integers, decimals, `sqrt(n)`,
    /// `+ - * /`, `^` with integer exponents, and parentheses.
    pub fn parse(s: &str) -> Result<Self> {
        let toks = tokenize(s)?;
        let mut p = Parser { toks, pos: 0 };
        let v = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::InvalidSpec(format!("trailing input in expression {s:?}")));
        }
        Ok(v)
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            write!(f, "{}", self.x)
        } else {
            write!(f, "{} + {}*sqrt({})", self.x, self.y, self.d)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Sqrt,
    Op(char),
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            let lit: String = cs[st..i].iter().collect();
            out.push(Tok::Num(parse_decimal(&lit)?));
        } else if cs[i..].starts_with(&['s', 'q', 'r', 't']) {
            out.push(Tok::Sqrt);
            i += 4;
        } else if "+-*/^".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c == '(' {
            out.push(Tok::LParen);
            i += 1;
        } else if c == ')' {
            out.push(Tok::RParen);
            i += 1;
        } else {
            return Err(Error::InvalidSpec(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

fn parse_decimal(lit: &str) -> Result<BigRational> {
    let bad = || Error::InvalidSpec(format!("bad number {lit:?}"));
    let (int, frac) = match lit.split_once('.') {
        Some((a, b)) => (a, b),
        None => (lit, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    Ok(BigRational::new(n, BigInt::from(10).pow(frac.len() as u32)))
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expr(&mut self) -> Result<QuadraticNumber> {
        let mut v = self.term()?;
        while let Some(Tok::Op(c)) = self.peek().cloned() {
            if c != '+' && c != '-' {
                break;
            }
            self.pos += 1;
            let r = self.term()?;
            v = if c == '+' { v.add(&r)? } else { v.sub(&r)? };
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<QuadraticNumber> {
        let mut v = self.unary()?;
        while let Some(Tok::Op(c)) = self.peek().cloned() {
            if c != '*' && c != '/' {
                break;
            }
            self.pos += 1;
            let r = self.unary()?;
            v = if c == '*' { v.mul(&r)? } else { v.div(&r)? };
        }
        Ok(v)
    }

    fn unary(&mut self) -> Result<QuadraticNumber> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        if let Some(Tok::Op('+')) = self.peek() {
            self.pos += 1;
        }
        self.power()
    }

    fn power(&mut self) -> Result<QuadraticNumber> {
        let b = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let e = self.atom()?;
            let e = (e.is_rational() && e.x.is_integer() && !e.x.is_negative())
                .then(|| e.x.to_integer().to_u64())
                .flatten()
                .ok_or_else(|| Error::InvalidSpec("exponent must be a small nonnegative integer".into()))?;
            return Ok(b.pow(e));
        }
        Ok(b)
    }

    fn atom(&mut self) -> Result<QuadraticNumber> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(q)) => {
                self.pos += 1;
                Ok(QuadraticNumber::rational(q))
            }
            Some(Tok::Sqrt) => {
                self.pos += 1;
                let inner = self.atom()?;
                if !inner.is_rational() || !inner.x.is_integer() {
                    return Err(Error::InvalidSpec("sqrt takes an integer argument".into()));
                }
                QuadraticNumber::sqrt_of(&inner.x.to_integer())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(Error::InvalidSpec("missing ')'".into()));
                }
                self.pos += 1;
                Ok(v)
            }
            _ => Err(Error::InvalidSpec("malformed expression".into())),
        }
    }
}
