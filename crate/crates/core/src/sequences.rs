//! Sequence generators, ingestion, and canonical windows.
//!
//! A window holds the first elements of the monotone enumeration of a set
//! `A ⊆ ℕ`, together with the raw generator index each value came from.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::QuadraticNumber;
use crate::bigser;
use crate::error::{Error, Result};

const MAX_RAW_TERMS: usize = 1 << 20;
const MAX_VALUE_BITS: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    /// `q1^(q2^(…^(qt^n)))`
    PowerTower { q: Vec<u32> },
    Factorial,
    /// `⌊c·bⁿ⌋`, with `c` and `b` given as expressions over one square root.
    FloorGeometric { c: String, b: String },
    /// `a_{n+1} = c_d a_n + … + c_0 a_{n−d}` from initial values `a_0..a_d`.
    Recurrence {
        #[serde(with = "bigser::vec")]
        initial: Vec<BigInt>,
        #[serde(with = "bigser::vec")]
        coefficients: Vec<BigInt>,
    },
    /// `p(n)`, coefficients low degree first.
    Polynomial {
        #[serde(with = "bigser::vec")]
        coefficients: Vec<BigInt>,
    },
    Primes,
    Explicit {
        #[serde(with = "bigser::vec")]
        values: Vec<BigInt>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    /// every raw term `a_n` is replaced by all of `a_n + F`
    #[default]
    All,
    /// raw term `a_n` is shifted by `F[n mod |F|]`
    Cycle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perturbation {
    #[serde(with = "bigser::vec")]
    pub offsets: Vec<BigInt>,
    #[serde(default)]
    pub selector: Selector,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub kind: SequenceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Perturbation>,
    #[serde(default = "default_true")]
    pub positive_only: bool,
}

impl SequenceSpec {
    pub fn new(kind: SequenceKind) -> Self {
        SequenceSpec { kind, perturbation: None, positive_only: true }
    }

    pub fn recurrence(initial: &[i64], coefficients: &[i64]) -> Self {
        Self::new(SequenceKind::Recurrence {
            initial: initial.iter().map(|&x| x.into()).collect(),
            coefficients: coefficients.iter().map(|&x| x.into()).collect(),
        })
    }

    pub fn power_tower(q: &[u32]) -> Self {
        Self::new(SequenceKind::PowerTower { q: q.to_vec() })
    }

    pub fn polynomial(coefficients: &[i64]) -> Self {
        Self::new(SequenceKind::Polynomial {
            coefficients: coefficients.iter().map(|&x| x.into()).collect(),
        })
    }

    pub fn floor_geometric(c: &str, b: &str) -> Self {
        Self::new(SequenceKind::FloorGeometric { c: c.into(), b: b.into() })
    }

    pub fn explicit(values: &[i64]) -> Self {
        Self::new(SequenceKind::Explicit { values: values.iter().map(|&x| x.into()).collect() })
    }

    pub fn with_positive_only(mut self, flag: bool) -> Self {
        self.positive_only = flag;
        self
    }

    pub fn with_perturbation(mut self, offsets: &[i64], selector: Selector) -> Self {
        self.perturbation = Some(Perturbation {
            offsets: offsets.iter().map(|&x| x.into()).collect(),
            selector,
        });
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        match &self.kind {
            SequenceKind::PowerTower { q } => {
                if q.is_empty() || q.iter().any(|&x| x < 2) {
                    return bad("power_tower needs at least one base, each ≥ 2");
                }
            }
            SequenceKind::FloorGeometric { c, b } => {
                let (c, b) = (QuadraticNumber::parse(c)?, QuadraticNumber::parse(b)?);
                c.mul(&b)?;
                if c.signum() != std::cmp::Ordering::Greater {
                    return bad("floor_geometric requires c > 0");
                }
                if b.cmp_ratio(&num_rational::BigRational::one()) != std::cmp::Ordering::Greater {
                    return bad("floor_geometric requires b > 1");
                }
            }
            SequenceKind::Recurrence { initial, coefficients } => {
                if initial.is_empty() || initial.len() != coefficients.len() {
                    return bad("recurrence needs |initial| = |coefficients| ≥ 1");
                }
            }
            SequenceKind::Polynomial { coefficients } => {
                let deg = coefficients.iter().rposition(|c| !c.is_zero());
                match deg {
                    Some(d) if d >= 1 && coefficients[d].is_positive() => {}
                    _ => return bad("polynomial needs degree ≥ 1 and a positive leading coefficient"),
                }
            }
            SequenceKind::Explicit { values } => {
                if values.is_empty() {
                    return bad("explicit list is empty");
                }
            }
            SequenceKind::Factorial | SequenceKind::Primes => {}
        }
        if let Some(p) = &self.perturbation {
            if p.offsets.is_empty() {
                return bad("perturbation offset set is empty");
            }
        }
        Ok(())
    }

    /// Raw generator output `a_0, …, a_{len−1}` (before perturbation).
    pub fn raw_prefix(&self, len: usize) -> Result<Vec<BigInt>> {
        match &self.kind {
            SequenceKind::PowerTower { q } => (0..len).map(|n| power_tower_term(q, n as u64)).collect(),
            SequenceKind::Factorial => {
                let mut out = Vec::with_capacity(len);
                let mut f = BigInt::one();
                for n in 0..len {
                    if n > 0 {
                        f *= n;
                    }
                    out.push(f.clone());
                }
                Ok(out)
            }
            SequenceKind::FloorGeometric { c, b } => {
                let c = QuadraticNumber::parse(c)?;
                let b = QuadraticNumber::parse(b)?;
                let mut cur = c;
                let mut out = Vec::with_capacity(len);
                for _ in 0..len {
                    out.push(cur.floor());
                    cur = cur.mul(&b)?;
                }
                Ok(out)
            }
            SequenceKind::Recurrence { initial, coefficients } => {
                Ok(unroll_recurrence(initial, coefficients, len))
            }
            SequenceKind::Polynomial { coefficients } => {
                Ok((0..len).map(|n| eval_poly(coefficients, &BigInt::from(n))).collect())
            }
            SequenceKind::Primes => Ok(first_primes(len).into_iter().map(BigInt::from).collect()),
            SequenceKind::Explicit { values } => Ok(values.iter().take(len).cloned().collect()),
        }
    }

    fn initial_raw_len(&self, count: usize) -> usize {
        match &self.kind {
            SequenceKind::PowerTower { .. } | SequenceKind::Primes => count,
            SequenceKind::Factorial => count + 1,
            SequenceKind::Explicit { values } => values.len(),
            _ => count + 16,
        }
    }

    /// Lower bound on every raw term with index ≥ `raw.len()`.
    fn tail_bound(&self, raw: &[BigInt]) -> TailBound {
        let Some(last) = raw.last() else { return TailBound::Unknown };
        let base = match &self.kind {
            SequenceKind::PowerTower { .. }
            | SequenceKind::Factorial
            | SequenceKind::FloorGeometric { .. }
            | SequenceKind::Primes => TailBound::Certified(last.clone()),
            SequenceKind::Explicit { .. } => TailBound::Exhausted,
            SequenceKind::Polynomial { coefficients } => {
                if raw.len() as u64 > polynomial_monotone_from(coefficients) {
                    TailBound::Certified(last.clone())
                } else {
                    TailBound::Unknown
                }
            }
            SequenceKind::Recurrence { coefficients, .. } => {
                let order = coefficients.len();
                let nonneg = coefficients.iter().all(|c| !c.is_negative());
                let sum: BigInt = coefficients.iter().sum();
                if nonneg && sum >= BigInt::one() {
                    if raw.len() < order {
                        return TailBound::Unknown;
                    }
                    let last = &raw[raw.len() - order..];
                    if last.iter().all(|v| !v.is_positive()) {
                        // every later term is a nonnegative combination of nonpositive terms
                        return TailBound::Exhausted;
                    }
                    let m = last.iter().min().unwrap();
                    if m.is_negative() {
                        TailBound::Unknown
                    } else {
                        TailBound::Certified(m.clone())
                    }
                } else {
                    let span = 4 * order;
                    if raw.len() <= span {
                        return TailBound::Unknown;
                    }
                    let t = &raw[raw.len() - span..];
                    if t.windows(2).all(|w| w[0] < w[1]) {
                        TailBound::Heuristic(last.clone())
                    } else {
                        TailBound::Unknown
                    }
                }
            }
        };
        let shift = self
            .perturbation
            .as_ref()
            .map(|p| p.offsets.iter().min().unwrap().clone())
            .unwrap_or_default();
        match base {
            TailBound::Certified(v) => TailBound::Certified(v + shift),
            TailBound::Heuristic(v) => TailBound::Heuristic(v + shift),
            other => other,
        }
    }

    /// Applies the perturbation and canonicalizes: sorted, deduplicated,
    /// intersected with ℤ⁺ (or ℕ when `positive_only` is off).
    fn canonicalize(&self, raw: &[BigInt]) -> Result<(Vec<BigInt>, Vec<usize>)> {
        let mut seen: BTreeMap<BigInt, usize> = BTreeMap::new();
        let mut push = |v: BigInt, i: usize| -> Result<()> {
            if v.is_negative() {
                if self.positive_only {
                    return Err(Error::Diverged { raw_index: i, value: v });
                }
                return Ok(());
            }
            if v.is_zero() && self.positive_only {
                return Ok(());
            }
            seen.entry(v).or_insert(i);
            Ok(())
        };
        for (i, a) in raw.iter().enumerate() {
            match &self.perturbation {
                None => push(a.clone(), i)?,
                Some(p) => match p.selector {
                    Selector::All => {
                        for f in &p.offsets {
                            push(a + f, i)?;
                        }
                    }
                    Selector::Cycle => push(a + &p.offsets[i % p.offsets.len()], i)?,
                },
            }
        }
        Ok(seen.into_iter().unzip())
    }
}

enum TailBound {
    Certified(BigInt),
    Heuristic(BigInt),
    Exhausted,
    Unknown,
}

fn power_tower_term(q: &[u32], n: u64) -> Result<BigInt> {
    let too_big = || Error::InvalidSpec(format!("power tower term at raw index {n} is too large"));
    let mut e = BigInt::from(n);
    for &base in q.iter().rev() {
        let ex = e.to_u64().ok_or_else(too_big)?;
        let bits = ex.saturating_mul(32 - base.leading_zeros() as u64);
        if bits > MAX_VALUE_BITS {
            return Err(too_big());
        }
        e = num_traits::pow(BigInt::from(base), ex as usize);
    }
    Ok(e)
}

pub fn unroll_recurrence(initial: &[BigInt], coefficients: &[BigInt], len: usize) -> Vec<BigInt> {
    let d1 = coefficients.len();
    let mut a: Vec<BigInt> = initial.iter().take(len).cloned().collect();
    while a.len() < len {
        let n = a.len();
        let next: BigInt = (0..d1).map(|i| &coefficients[i] * &a[n - d1 + i]).sum();
        a.push(next);
    }
    a
}

pub fn eval_poly(coefficients: &[BigInt], x: &BigInt) -> BigInt {
    coefficients.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Index from which `p(n+1) > p(n)` holds for good, by a Cauchy root bound
/// on the forward difference.
pub fn polynomial_monotone_from(coefficients: &[BigInt]) -> u64 {
    let deg = coefficients.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
    // Δ(n) = p(n+1) − p(n), coefficients via binomial expansion
    let mut delta = vec![BigInt::zero(); deg.max(1)];
    for (k, ck) in coefficients.iter().enumerate().take(deg + 1) {
        let mut binom = BigInt::one();
        for j in 0..k {
            // coefficient of n^j in (n+1)^k − n^k is C(k, j)
            if j > 0 {
                binom = binom * (k - j + 1) / j;
            }
            delta[j] += ck * &binom;
        }
    }
    let lead = delta.iter().rposition(|c| !c.is_zero());
    let Some(l) = lead else { return u64::MAX };
    let lc = delta[l].abs();
    let mut bound = BigInt::zero();
    for c in &delta[..l] {
        let q = c.abs().div_ceil(&lc);
        if q > bound {
            bound = q;
        }
    }
    (bound + 1u32).to_u64().unwrap_or(u64::MAX)
}

pub fn sieve(limit: usize) -> Vec<u64> {
    if limit < 2 {
        return vec![];
    }
    let mut comp = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

fn first_primes(n: usize) -> Vec<u64> {
    let x = (n.max(6)) as f64;
    let mut limit = (x * (x.ln() + x.ln().ln())) as usize + 10;
    loop {
        let p = sieve(limit);
        if p.len() >= n {
            return p[..n].to_vec();
        }
        limit *= 2;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coverage {
    /// every element of the underlying set that is ≤ the bound is present
    UpTo(#[serde(with = "bigser")] BigInt),
    /// the window is the whole (finite) set
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "WindowData")]
pub struct SequenceWindow {
    #[serde(with = "bigser::vec")]
    pub values: Vec<BigInt>,
    pub source: Option<SequenceSpec>,
    pub raw_index_map: Option<Vec<usize>>,
    pub coverage: Coverage,
    /// false when the tail lower bound came from a monotonicity heuristic
    pub tail_certified: bool,
    #[serde(skip)]
    small: Vec<u64>,
}

#[derive(Deserialize)]
struct WindowData {
    #[serde(with = "bigser::vec")]
    values: Vec<BigInt>,
    source: Option<SequenceSpec>,
    raw_index_map: Option<Vec<usize>>,
    coverage: Coverage,
    tail_certified: bool,
}

impl From<WindowData> for SequenceWindow {
    fn from(d: WindowData) -> Self {
        let mut w = SequenceWindow::new(d.values, d.coverage);
        w.source = d.source;
        w.raw_index_map = d.raw_index_map;
        w.tail_certified = d.tail_certified;
        w
    }
}

impl SequenceWindow {
    pub fn new(values: Vec<BigInt>, coverage: Coverage) -> Self {
        let small = values.iter().map_while(|v| v.to_u64()).collect();
        SequenceWindow {
            values,
            source: None,
            raw_index_map: None,
            coverage,
            tail_certified: true,
            small,
        }
    }

    /// Whole finite set given by its elements (sorted and deduplicated here).
    pub fn from_set<I: IntoIterator<Item = BigInt>>(it: I) -> Self {
        let mut v: Vec<BigInt> = it.into_iter().collect();
        v.sort();
        v.dedup();
        Self::new(v, Coverage::Full)
    }

    pub fn from_u64s(v: &[u64]) -> Self {
        Self::from_set(v.iter().map(|&x| BigInt::from(x)))
    }

    /// Elements of an infinite set up to `bound`, declared complete there.
    pub fn complete_up_to(values: Vec<BigInt>, bound: BigInt) -> Self {
        let mut w = Self::from_set(values);
        w.values.retain(|v| *v <= bound);
        w.small = w.values.iter().map_while(|v| v.to_u64()).collect();
        w.coverage = Coverage::UpTo(bound);
        w
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Prefix of the values that fits in `u64`.
    pub fn small(&self) -> &[u64] {
        &self.small
    }

    pub fn max(&self) -> Option<&BigInt> {
        self.values.last()
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        self.values.binary_search(x).is_ok()
    }

    pub fn coverage_bound(&self) -> Option<&BigInt> {
        match &self.coverage {
            Coverage::UpTo(b) => Some(b),
            Coverage::Full => None,
        }
    }

    pub fn covers(&self, n: &BigInt) -> bool {
        self.coverage_bound().is_none_or(|b| b >= n)
    }

    pub fn ensure_covers(&self, n: &BigInt) -> Result<()> {
        match self.coverage_bound() {
            Some(b) if b < n => Err(Error::Incomplete { required: n.clone(), covered: b.clone() }),
            _ => Ok(()),
        }
    }

    /// Number of elements ≤ `x`.
    pub fn count_le(&self, x: &BigInt) -> usize {
        self.values.partition_point(|v| v <= x)
    }

    /// Raw generator index of canonical element `n`, or `n` itself.
    pub fn raw_index(&self, n: usize) -> usize {
        self.raw_index_map.as_ref().map_or(n, |m| m[n])
    }

    pub fn prefix(&self, n: usize) -> Self {
        let n = n.min(self.len());
        let mut w = self.clone();
        if n < self.len() {
            w.values.truncate(n);
            w.small.truncate(n);
            if let Some(m) = w.raw_index_map.as_mut() {
                m.truncate(n);
            }
            w.coverage = Coverage::UpTo(w.values.last().cloned().unwrap_or_default());
        }
        w
    }

    /// One base-10 integer per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in &self.values {
            s.push_str(&v.to_string());
            s.push('\n');
        }
        s
    }

    pub fn to_json_array(&self) -> String {
        let items: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        format!("[{}]", items.join(","))
    }
}

impl fmt::Display for SequenceWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<String> = self.values.iter().take(12).map(|v| v.to_string()).collect();
        write!(f, "[{}", shown.join(", "))?;
        if self.values.len() > 12 {
            write!(f, ", … ({} total)", self.values.len())?;
        }
        write!(f, "]")
    }
}

fn finish(spec: &SequenceSpec, vals: Vec<BigInt>, idx: Vec<usize>, coverage: Coverage, certified: bool) -> SequenceWindow {
    let mut w = SequenceWindow::new(vals, coverage);
    w.source = Some(spec.clone());
    w.raw_index_map = Some(idx);
    w.tail_certified = certified;
    w
}

/// First `count` canonical elements of the sequence.
pub fn generate(spec: &SequenceSpec, count: usize) -> Result<SequenceWindow> {
    if count == 0 {
        return Err(Error::InvalidSpec("count must be at least 1".into()));
    }
    spec.validate()?;
    let mut len = spec.initial_raw_len(count);
    loop {
        let raw = spec.raw_prefix(len)?;
        let (mut vals, mut idx) = spec.canonicalize(&raw)?;
        let tail = spec.tail_bound(&raw);
        if let TailBound::Exhausted = tail {
            let full = vals.len() <= count;
            vals.truncate(count);
            idx.truncate(count);
            let cov = if full { Coverage::Full } else { Coverage::UpTo(vals.last().unwrap().clone()) };
            return Ok(finish(spec, vals, idx, cov, true));
        }
        if vals.len() >= count {
            let t = vals[count - 1].clone();
            let done = match &tail {
                TailBound::Certified(b) if *b >= t => Some(true),
                TailBound::Heuristic(b) if *b >= t => Some(false),
                _ => None,
            };
            if let Some(certified) = done {
                vals.truncate(count);
                idx.truncate(count);
                return Ok(finish(spec, vals, idx, Coverage::UpTo(t), certified));
            }
        }
        if len >= MAX_RAW_TERMS {
            return Err(Error::Uncertified { raw_terms: len });
        }
        len = (len * 2).min(MAX_RAW_TERMS);
    }
}

/// All canonical elements `≤ bound`, with the window declared complete up to `bound`.
pub fn generate_up_to(spec: &SequenceSpec, bound: &BigInt) -> Result<SequenceWindow> {
    spec.validate()?;
    let mut len = spec.initial_raw_len(16);
    loop {
        let raw = spec.raw_prefix(len)?;
        let tail = spec.tail_bound(&raw);
        let done = match &tail {
            TailBound::Certified(b) if b > bound => Some(true),
            TailBound::Heuristic(b) if b > bound => Some(false),
            TailBound::Exhausted => Some(true),
            _ => None,
        };
        if let Some(certified) = done {
            let (vals, idx) = spec.canonicalize(&raw)?;
            let keep = vals.partition_point(|v| v <= bound);
            let cov = match tail {
                TailBound::Exhausted if keep == vals.len() => Coverage::Full,
                _ => Coverage::UpTo(bound.clone()),
            };
            return Ok(finish(spec, vals[..keep].to_vec(), idx[..keep].to_vec(), cov, certified));
        }
        if len >= MAX_RAW_TERMS {
            return Err(Error::Uncertified { raw_terms: len });
        }
        len = match spec.kind {
            // power towers explode; grow one term at a time
            SequenceKind::PowerTower { .. } => len + 1,
            _ => (len * 2).min(MAX_RAW_TERMS),
        };
    }
}

fn canonical_from(mut vals: Vec<BigInt>, positive_only: bool, lines: &[usize]) -> Result<SequenceWindow> {
    if vals.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (i, v) in vals.iter().enumerate() {
        if v.is_negative() && positive_only {
            return Err(Error::Parse { line: lines[i], message: format!("negative entry {v}") });
        }
    }
    vals.retain(|v| if positive_only { v.is_positive() } else { !v.is_negative() });
    Ok(SequenceWindow::from_set(vals))
}

/// Parses a list of integers, one per line or as a JSON array.
pub fn ingest_str(text: &str, positive_only: bool) -> Result<SequenceWindow> {
    let t = text.trim_start();
    if t.starts_with('[') {
        let v: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
        let arr = v.as_array().ok_or_else(|| Error::Parse { line: 1, message: "expected a JSON array".into() })?;
        let mut vals = Vec::with_capacity(arr.len());
        for item in arr {
            let n = match item {
                serde_json::Value::Number(n) => n.to_string().parse::<BigInt>().ok(),
                _ => None,
            };
            vals.push(n.ok_or_else(|| Error::Parse { line: 1, message: format!("not an integer: {item}") })?);
        }
        let lines = vec![1; vals.len()];
        return canonical_from(vals, positive_only, &lines);
    }
    let mut vals = Vec::new();
    let mut lines = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let s = line.trim();
        if s.is_empty() {
            continue;
        }
        let v = s
            .parse::<BigInt>()
            .map_err(|_| Error::Parse { line: i + 1, message: format!("not an integer: {s:?}") })?;
        vals.push(v);
        lines.push(i + 1);
    }
    canonical_from(vals, positive_only, &lines)
}

pub fn ingest_path(path: &Path, positive_only: bool) -> Result<SequenceWindow> {
    let text = std::fs::read_to_string(path)?;
    ingest_str(&text, positive_only)
}

/// Named sequences.
pub fn builtin(name: &str) -> Option<SequenceSpec> {
    let fib_order = |k: usize| {
        let mut init = vec![0i64; k];
        init[k - 1] = 1;
        SequenceSpec::recurrence(&init, &vec![1; k])
    };
    let s = match name {
        "fibonacci" => SequenceSpec::recurrence(&[0, 1], &[1, 1]),
        "lucas" => SequenceSpec::recurrence(&[2, 1], &[1, 1]),
        "pell" => SequenceSpec::recurrence(&[0, 1], &[1, 2]),
        "pell_lucas" => SequenceSpec::recurrence(&[2, 2], &[1, 2]),
        "tribonacci" | "fibonacci_order_3" => fib_order(3),
        "fibonacci_order_4" => fib_order(4),
        "fibonacci_order_5" => fib_order(5),
        "fibonacci_order_6" => fib_order(6),
        "padovan" => SequenceSpec::recurrence(&[1, 1, 1], &[1, 1, 0]),
        "perrin" => SequenceSpec::recurrence(&[3, 0, 2], &[1, 1, 0]),
        "lehmer" => {
            let mut init = vec![0i64; 10];
            init[9] = 1;
            SequenceSpec::recurrence(&init, &[-1, -1, 0, 1, 1, 1, 1, 1, 0, -1]).with_positive_only(false)
        }
        "powers_of_two" | "pi2" => SequenceSpec::power_tower(&[2]),
        "factorials" => SequenceSpec::new(SequenceKind::Factorial),
        "squares" => SequenceSpec::polynomial(&[0, 0, 1]),
        "primes" => SequenceSpec::new(SequenceKind::Primes),
        "two_pow_plus_n" => SequenceSpec::recurrence(&[1, 3, 6], &[2, -5, 4]),
        _ => return None,
    };
    Some(s)
}

pub const BUILTIN_CORPUS: [&str; 15] = [
    "fibonacci",
    "lucas",
    "pell",
    "pell_lucas",
    "fibonacci_order_3",
    "fibonacci_order_4",
    "fibonacci_order_5",
    "fibonacci_order_6",
    "padovan",
    "perrin",
    "lehmer",
    "pi2",
    "factorials",
    "squares",
    "primes",
];

fn int_list(s: &str) -> Result<Vec<BigInt>> {
    s.split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<BigInt>().map_err(|_| Error::InvalidSpec(format!("not an integer: {t:?}"))))
        .collect()
}

/// Compact text form used on the command line, e.g. `fibonacci`,
/// `R(0,1;1,1)`, `recurrence:0,1;1,1`, `power_tower:2`, `polynomial:0,0,1`,
/// `floor_geometric:1/sqrt(5);(1+sqrt(5))/2`, `explicit:1,2,5`, with optional
/// `|nonneg`, `|perturb=0,1` or `|cycle=0,1` suffixes.
impl FromStr for SequenceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split('|');
        let head = parts.next().unwrap_or("").trim();
        let mut spec = if let Some(b) = builtin(head) {
            b
        } else if let Some(inner) = head.strip_prefix("R(").and_then(|r| r.strip_suffix(')')) {
            let (a, c) = inner
                .split_once(';')
                .ok_or_else(|| Error::InvalidSpec("R(...) needs 'initial;coefficients'".into()))?;
            SequenceSpec::new(SequenceKind::Recurrence { initial: int_list(a)?, coefficients: int_list(c)? })
        } else {
            let (kind, arg) = head.split_once(':').unwrap_or((head, ""));
            let kind = match kind {
                "power_tower" => SequenceKind::PowerTower {
                    q: arg
                        .split(',')
                        .map(|t| t.trim().parse::<u32>().map_err(|_| Error::InvalidSpec(format!("bad base {t:?}"))))
                        .collect::<Result<_>>()?,
                },
                "factorial" => SequenceKind::Factorial,
                "primes" => SequenceKind::Primes,
                "floor_geometric" => {
                    let (c, b) = arg
                        .split_once(';')
                        .ok_or_else(|| Error::InvalidSpec("floor_geometric needs 'c;b'".into()))?;
                    SequenceKind::FloorGeometric { c: c.trim().into(), b: b.trim().into() }
                }
                "recurrence" => {
                    let (a, c) = arg
                        .split_once(';')
                        .ok_or_else(|| Error::InvalidSpec("recurrence needs 'initial;coefficients'".into()))?;
                    SequenceKind::Recurrence { initial: int_list(a)?, coefficients: int_list(c)? }
                }
                "polynomial" => SequenceKind::Polynomial { coefficients: int_list(arg)? },
                "explicit" => SequenceKind::Explicit { values: int_list(arg)? },
                _ => return Err(Error::InvalidSpec(format!("unknown sequence {head:?}"))),
            };
            SequenceSpec::new(kind)
        };
        for opt in parts {
            let opt = opt.trim();
            if opt == "nonneg" {
                spec.positive_only = false;
            } else if let Some(v) = opt.strip_prefix("perturb=") {
                spec.perturbation = Some(Perturbation { offsets: int_list(v)?, selector: Selector::All });
            } else if let Some(v) = opt.strip_prefix("cycle=") {
                spec.perturbation = Some(Perturbation { offsets: int_list(v)?, selector: Selector::Cycle });
            } else {
                return Err(Error::InvalidSpec(format!("unknown option {opt:?}")));
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}
