//! Signed closures, iterated sumsets `k(X)` and `Σ_n(X)` over `[−B, B]`, the
//! meet-in-the-middle membership search for huge elements, and coset detection.

use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bigser;
use crate::error::{Error, Result};
use crate::sequences::SequenceWindow;

/// Default cap on the number of bits in a dense convolution window.
pub const DEFAULT_DENSE_LIMIT: u128 = 1 << 30;
/// Largest bound handled densely in automatic mode.
pub const AUTO_DENSE_BOUND: i64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    Auto,
    Dense,
    Sparse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    pub engine: Engine,
    pub dense_limit: u128,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { engine: Engine::Auto, dense_limit: DEFAULT_DENSE_LIMIT }
    }
}

/// Bit vector over the integer range `[lo, lo + len)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitSet {
    lo: i64,
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(lo: i64, hi: i64) -> Self {
        let len = if hi >= lo { (hi - lo + 1) as usize } else { 0 };
        BitSet { lo, len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.len as i64 - 1
    }

    pub fn insert(&mut self, v: i64) {
        if v >= self.lo && v <= self.hi() {
            let i = (v - self.lo) as usize;
            self.words[i / 64] |= 1 << (i % 64);
        }
    }

    pub fn contains(&self, v: i64) -> bool {
        if v < self.lo || v > self.hi() {
            return false;
        }
        let i = (v - self.lo) as usize;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.words.iter().enumerate().flat_map(move |(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(self.lo + (wi * 64 + b) as i64)
            })
        })
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    /// `self[v + shift] |= src[v]` for every `v`, clipped to `self`'s range.
    pub fn or_shifted(&mut self, src: &BitSet, shift: i64) {
        // bit offset in self of src's bit 0
        let off = src.lo + shift - self.lo;
        if off >= self.len as i64 || off + (src.len as i64) <= 0 {
            return;
        }
        if off >= 0 {
            let q = (off / 64) as usize;
            let r = (off % 64) as u32;
            for (i, &w) in src.words.iter().enumerate() {
                if w == 0 {
                    continue;
                }
                let t = i + q;
                if t >= self.words.len() {
                    break;
                }
                self.words[t] |= w << r;
                if r != 0 && t + 1 < self.words.len() {
                    self.words[t + 1] |= w >> (64 - r);
                }
            }
        } else {
            let neg = (-off) as usize;
            let q = neg / 64;
            let r = (neg % 64) as u32;
            for t in 0..self.words.len() {
                let i = t + q;
                if i >= src.words.len() {
                    break;
                }
                let mut w = src.words[i] >> r;
                if r != 0 && i + 1 < src.words.len() {
                    w |= src.words[i + 1] << (64 - r);
                }
                self.words[t] |= w;
            }
        }
        self.clear_tail();
    }

    pub fn or_with(&mut self, other: &BitSet) {
        self.or_shifted(other, 0);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Members {
    Dense(BitSet),
    Sparse(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    Generators,
    Iterated { k: usize },
    Sigma { n: usize },
    Realized { n: usize, index_bound: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub operation: Operation,
    pub signed: bool,
    /// number of generators the image was built from
    pub generators: usize,
    /// smallest nonzero |x| over the generators
    pub min_abs_generator: i64,
}

impl Provenance {
    /// Maximum number of summands behind an element of the image.
    pub fn terms(&self) -> usize {
        match self.operation {
            Operation::Generators => 1,
            Operation::Iterated { k } => k,
            Operation::Sigma { n } | Operation::Realized { n, .. } => n,
        }
    }
}

/// Finite image of a sumset intersected with `[−B, B]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumsetImage {
    pub bound: i64,
    pub members: Members,
    pub provenance: Provenance,
    /// set when source elements above the bound were left out, so the image is
    /// only an inner approximation of the sumset of the infinite set
    pub truncation_note: Option<String>,
    /// generators of the image (signed or not), kept for further sums
    generators: Vec<i64>,
}

impl SumsetImage {
    /// Builds an image directly from a finite generator set.
    pub fn from_generators(source: &str, gens: &[i64], bound: i64, signed: bool) -> Self {
        let mut g: Vec<i64> = gens.iter().copied().filter(|x| x.abs() <= bound).collect();
        g.sort_unstable();
        g.dedup();
        let min_abs = g.iter().filter(|&&x| x != 0).map(|x| x.abs()).min().unwrap_or(0);
        let truncation_note = (g.len() < gens.len())
            .then(|| format!("{} generator(s) outside [-{bound}, {bound}] excluded", gens.len() - g.len()));
        SumsetImage {
            bound,
            members: Members::Sparse(g.clone()),
            provenance: Provenance {
                source: source.to_string(),
                operation: Operation::Generators,
                signed,
                generators: g.len(),
                min_abs_generator: min_abs,
            },
            truncation_note,
            generators: g,
        }
    }

    pub fn generators(&self) -> &[i64] {
        &self.generators
    }

    pub fn contains(&self, v: i64) -> bool {
        match &self.members {
            Members::Dense(b) => b.contains(v),
            Members::Sparse(s) => s.binary_search(&v).is_ok(),
        }
    }

    pub fn len(&self) -> usize {
        match &self.members {
            Members::Dense(b) => b.count(),
            Members::Sparse(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_vec(&self) -> Vec<i64> {
        match &self.members {
            Members::Dense(b) => b.iter().collect(),
            Members::Sparse(s) => s.clone(),
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.members, Members::Dense(_))
    }

    pub fn is_symmetric(&self) -> bool {
        self.to_vec().iter().all(|&x| self.contains(-x))
    }

    /// Members in `[1, n]`.
    pub fn count_positive_upto(&self, n: i64) -> usize {
        match &self.members {
            Members::Dense(b) => (1..=n.min(self.bound)).filter(|&v| b.contains(v)).count(),
            Members::Sparse(s) => {
                let a = s.partition_point(|&x| x < 1);
                let b = s.partition_point(|&x| x <= n);
                b.saturating_sub(a)
            }
        }
    }

    /// Dense indicator of the members in `[0, B]`, as prefix counts.
    pub fn positive_prefix_counts(&self) -> Vec<u64> {
        let b = self.bound.max(0) as usize;
        let mut c = vec![0u64; b + 1];
        for v in self.to_vec() {
            if v >= 1 && v <= self.bound {
                c[v as usize] = 1;
            }
        }
        for i in 1..=b {
            c[i] += c[i - 1];
        }
        c
    }

    pub fn to_json(&self) -> serde_json::Value {
        let v = self.to_vec();
        let mut runs: Vec<[i64; 2]> = Vec::new();
        for x in v {
            match runs.last_mut() {
                Some(r) if r[0] + r[1] == x => r[1] += 1,
                _ => runs.push([x, 1]),
            }
        }
        serde_json::json!({
            "bound": self.bound,
            "members": runs,
            "count": self.len(),
            "representation": if self.is_dense() { "dense" } else { "sparse" },
            "provenance": self.provenance,
            "truncation_note": self.truncation_note,
        })
    }
}

fn window_label(w: &SequenceWindow) -> String {
    match &w.source {
        Some(s) => serde_json::to_string(&s.kind).unwrap_or_default(),
        None => format!("window of {} values", w.len()),
    }
}

fn truncation(w: &SequenceWindow, bound: i64, signed: bool, excluded: usize) -> Option<String> {
    let mut notes = Vec::new();
    if excluded > 0 {
        notes.push(format!("{excluded} element(s) above {bound} excluded"));
    }
    if !w.covers(&BigInt::from(bound)) {
        notes.push(format!(
            "window complete only up to {}",
            w.coverage_bound().map(|b| b.to_string()).unwrap_or_default()
        ));
    } else if signed && w.coverage_bound().is_some() {
        notes.push("elements above the bound may still contribute to signed sums".into());
    }
    (!notes.is_empty()).then(|| notes.join("; "))
}

/// `{±a : a ∈ w, a ≤ B}`.
pub fn signed_closure(w: &SequenceWindow, bound: i64) -> SumsetImage {
    closure_impl(w, bound, true)
}

/// `{a ∈ w : a ≤ B}`.
pub fn unsigned_image(w: &SequenceWindow, bound: i64) -> SumsetImage {
    closure_impl(w, bound, false)
}

fn closure_impl(w: &SequenceWindow, bound: i64, signed: bool) -> SumsetImage {
    let b = BigInt::from(bound);
    let kept: Vec<i64> = w.values.iter().take_while(|v| **v <= b).map(|v| v.to_i64().unwrap()).collect();
    let excluded = w.len() - kept.len();
    let mut gens = kept.clone();
    if signed {
        gens.extend(kept.iter().map(|x| -x));
    }
    let mut img = SumsetImage::from_generators(&window_label(w), &gens, bound, signed);
    img.truncation_note = truncation(w, bound, signed, excluded);
    img
}

fn partial_window(bound: i64, gmin: i64, gmax: i64, j: usize, remaining_lo: usize, remaining_hi: usize) -> (i64, i64) {
    // partial sums of j generators that can still end inside [−B, B] after
    // adding between remaining_lo and remaining_hi further generators
    let j = j as i64;
    let (rlo, rhi) = (remaining_lo as i64, remaining_hi as i64);
    let up_shift = (rlo * gmin).min(rhi * gmin).min(0);
    let down_shift = (rlo * gmax).max(rhi * gmax).max(0);
    let lo = (j * gmin).max(-bound - down_shift);
    let hi = (j * gmax).min(bound - up_shift);
    (lo, hi)
}

fn choose_dense(cfg: &EngineConfig, bound: i64) -> bool {
    match cfg.engine {
        Engine::Dense => true,
        Engine::Sparse => false,
        Engine::Auto => bound <= AUTO_DENSE_BOUND,
    }
}

/// Layered sums. `keep(j)` says whether j-term sums belong to the output.
fn layered(img: &SumsetImage, n: usize, keep_all: bool, cfg: &EngineConfig) -> Result<Members> {
    let gens = &img.generators;
    let bound = img.bound;
    if gens.is_empty() {
        return Ok(Members::Sparse(vec![]));
    }
    let (gmin, gmax) = (*gens.first().unwrap(), *gens.last().unwrap());
    let rem = |j: usize| if keep_all { (0, n - j) } else { (n - j, n - j) };
    if choose_dense(cfg, bound) {
        let mut widest: u128 = (2 * bound + 1) as u128;
        for j in 1..=n {
            let (r0, r1) = rem(j);
            let (lo, hi) = partial_window(bound, gmin, gmax, j, r0, r1);
            widest = widest.max((hi - lo + 1).max(0) as u128);
        }
        if widest > cfg.dense_limit {
            return Err(Error::DenseLimit { width: widest, limit: cfg.dense_limit });
        }
        let mut out = BitSet::new(-bound, bound);
        let mut gbits = BitSet::new(gmin, gmax);
        for &g in gens {
            gbits.insert(g);
        }
        let (r0, r1) = rem(1);
        let (lo, hi) = partial_window(bound, gmin, gmax, 1, r0, r1);
        let mut cur = BitSet::new(lo, hi);
        cur.or_with(&gbits);
        if keep_all || n == 1 {
            out.or_with(&cur);
        }
        for j in 2..=n {
            let (r0, r1) = rem(j);
            let (lo, hi) = partial_window(bound, gmin, gmax, j, r0, r1);
            let mut next = BitSet::new(lo, hi);
            for &g in gens {
                next.or_shifted(&cur, g);
            }
            if keep_all || j == n {
                out.or_with(&next);
            }
            cur = next;
        }
        Ok(Members::Dense(out))
    } else {
        let mut out: BTreeSet<i64> = BTreeSet::new();
        let mut cur: BTreeSet<i64> = gens.iter().copied().collect();
        let (r0, r1) = rem(1);
        let (lo, hi) = partial_window(bound, gmin, gmax, 1, r0, r1);
        cur.retain(|&x| x >= lo && x <= hi);
        if keep_all || n == 1 {
            out.extend(cur.iter().copied().filter(|x| x.abs() <= bound));
        }
        for j in 2..=n {
            let (r0, r1) = rem(j);
            let (lo, hi) = partial_window(bound, gmin, gmax, j, r0, r1);
            let mut next = BTreeSet::new();
            for &s in &cur {
                for &g in gens {
                    let v = s + g;
                    if v >= lo && v <= hi {
                        next.insert(v);
                    }
                }
            }
            if keep_all || j == n {
                out.extend(next.iter().copied().filter(|x| x.abs() <= bound));
            }
            cur = next;
        }
        Ok(Members::Sparse(out.into_iter().collect()))
    }
}

fn derived(img: &SumsetImage, members: Members, op: Operation) -> SumsetImage {
    let mut p = img.provenance.clone();
    p.operation = op;
    SumsetImage {
        bound: img.bound,
        members,
        provenance: p,
        truncation_note: img.truncation_note.clone(),
        generators: img.generators.clone(),
    }
}

/// Exact `k(X) ∩ [−B, B]` for the generators `X` of `img`.
pub fn iterated_sumset(img: &SumsetImage, k: usize, cfg: &EngineConfig) -> Result<SumsetImage> {
    if k == 0 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    let m = layered(img, k, false, cfg)?;
    Ok(derived(img, m, Operation::Iterated { k }))
}

/// Exact `Σ_n(X) ∩ [−B, B]`.
pub fn sigma(img: &SumsetImage, n: usize, cfg: &EngineConfig) -> Result<SumsetImage> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let m = layered(img, n, true, cfg)?;
    Ok(derived(img, m, Operation::Sigma { n }))
}

/// Integer type usable by the meet-in-the-middle search.
pub trait SearchNum: Clone + Eq + Hash + Ord + Zero + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> {
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl SearchNum for i128 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl SearchNum for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedTerm {
    /// canonical index into the window
    pub index: usize,
    pub negative: bool,
    #[serde(with = "bigser")]
    pub value: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Representation {
    #[serde(with = "bigser")]
    pub target: BigInt,
    pub terms: Vec<SignedTerm>,
}

impl Representation {
    pub fn sum(&self) -> BigInt {
        self.terms.iter().map(|t| if t.negative { -&t.value } else { t.value.clone() }).sum()
    }

    pub fn verify(&self, w: &SequenceWindow) -> bool {
        self.sum() == self.target
            && self.terms.iter().all(|t| w.values.get(t.index) == Some(&t.value))
    }
}

/// Meet-in-the-middle search for sums of at most `n` (signed) elements with
/// canonical index `< M`. Built once, queried per target.
pub struct SignedSumSearch<T: SearchNum> {
    // (value, index, negative)
    elems: Vec<(T, usize, bool)>,
    max_terms: usize,
    tables: Vec<HashMap<T, Vec<usize>>>,
    pub index_bound: usize,
    pub signed: bool,
}

fn multisets(e: usize, h: usize, mut f: impl FnMut(&[usize]) -> bool) {
    // nondecreasing tuples over 0..e, lexicographic; f returns false to stop
    if h == 0 {
        f(&[]);
        return;
    }
    if e == 0 {
        return;
    }
    let mut t = vec![0usize; h];
    loop {
        if !f(&t) {
            return;
        }
        let mut i = h;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if t[i] + 1 < e {
                let v = t[i] + 1;
                for x in &mut t[i..] {
                    *x = v;
                }
                break;
            }
        }
    }
}

impl<T: SearchNum> SignedSumSearch<T> {
    /// `None` when some element does not fit in `T`.
    pub fn new(w: &SequenceWindow, max_terms: usize, signed: bool, index_bound: usize) -> Option<Self> {
        Self::with_depth(w, max_terms, signed, index_bound, max_terms.div_ceil(2))
    }

    /// Tables only up to `max_terms / 2` terms; cheaper to build, slower per query.
    pub fn one_shot(w: &SequenceWindow, max_terms: usize, signed: bool, index_bound: usize) -> Option<Self> {
        Self::with_depth(w, max_terms, signed, index_bound, max_terms / 2)
    }

    fn with_depth(w: &SequenceWindow, max_terms: usize, signed: bool, index_bound: usize, depth: usize) -> Option<Self> {
        let m = index_bound.min(w.len());
        let mut elems = Vec::new();
        for (i, v) in w.values[..m].iter().enumerate() {
            let x = T::from_big(v)?;
            // also make sure n-fold sums cannot overflow
            T::from_big(&(v * BigInt::from(max_terms.max(1) as u64 * 2)))?;
            elems.push((x.clone(), i, false));
            if signed && !x.is_zero() {
                elems.push((-x, i, true));
            }
        }
        let mut tables = Vec::with_capacity(depth + 1);
        for h in 0..=depth {
            let mut tab: HashMap<T, Vec<usize>> = HashMap::new();
            multisets(elems.len(), h, |t| {
                let s = t.iter().fold(T::zero(), |acc, &i| acc + elems[i].0.clone());
                tab.entry(s).or_insert_with(|| t.to_vec());
                true
            });
            tables.push(tab);
        }
        Some(SignedSumSearch { elems, max_terms, tables, index_bound: m, signed })
    }

    fn rep(&self, target: &T, idx: &[usize]) -> Representation {
        let mut terms: Vec<SignedTerm> = idx
            .iter()
            .map(|&i| {
                let (v, index, negative) = &self.elems[i];
                let value = if *negative { -v.to_big() } else { v.to_big() };
                SignedTerm { index: *index, negative: *negative, value }
            })
            .collect();
        terms.sort_by(|a, b| (a.negative, a.index).cmp(&(b.negative, b.index)));
        Representation { target: target.to_big(), terms }
    }

    /// Fewest-term representation of `target`, if one exists within bounds.
    pub fn find(&self, target: &T) -> Option<Representation> {
        for t in 1..=self.max_terms {
            // h1 terms from a table, h2 enumerated
            let (h1, h2) = if t.div_ceil(2) < self.tables.len() { (t.div_ceil(2), t / 2) } else { (t / 2, t.div_ceil(2)) };
            let mut hit: Option<Vec<usize>> = None;
            multisets(self.elems.len(), h2, |right| {
                let s = right.iter().fold(T::zero(), |acc, &i| acc + self.elems[i].0.clone());
                if let Some(left) = self.tables[h1].get(&(target.clone() - s)) {
                    let mut all = left.clone();
                    all.extend_from_slice(right);
                    hit = Some(all);
                    return false;
                }
                true
            });
            if let Some(idx) = hit {
                return Some(self.rep(target, &idx));
            }
        }
        None
    }
}

/// One-off membership query: a representation of `target` as a sum of at most
/// `n` elements of the window (signed if requested) with index below `M`, or
/// `None` if there is none within those bounds.
pub fn sparse_membership(
    w: &SequenceWindow,
    target: &BigInt,
    n: usize,
    signed: bool,
    index_bound: usize,
) -> Option<Representation> {
    if let (Some(s), Some(t)) = (SignedSumSearch::<i128>::one_shot(w, n, signed, index_bound), target.to_i128()) {
        return s.find(&t);
    }
    SignedSumSearch::<BigInt>::one_shot(w, n, signed, index_bound)?.find(target)
}

/// `Σ_n(±A) ∩ [−B, B]` realized element by element with the sparse search.
pub fn realize_sigma(w: &SequenceWindow, n: usize, signed: bool, bound: i64, index_bound: usize) -> SumsetImage {
    let mut members = Vec::new();
    let mut collect = |f: &dyn Fn(i64) -> bool| {
        for v in -bound..=bound {
            if f(v) {
                members.push(v);
            }
        }
    };
    if let Some(s) = SignedSumSearch::<i128>::new(w, n, signed, index_bound) {
        collect(&|v| s.find(&(v as i128)).is_some());
    } else {
        let s = SignedSumSearch::<BigInt>::new(w, n, signed, index_bound).expect("BigInt never overflows");
        collect(&|v| s.find(&BigInt::from(v)).is_some());
    }
    let m = index_bound.min(w.len());
    let min_abs = w.values[..m].iter().filter(|v| !v.is_zero()).min().and_then(|v| v.to_i64()).unwrap_or(0);
    SumsetImage {
        bound,
        members: Members::Sparse(members),
        provenance: Provenance {
            source: window_label(w),
            operation: Operation::Realized { n, index_bound: m },
            signed,
            generators: m,
            min_abs_generator: min_abs,
        },
        truncation_note: Some(format!("only elements with index below {m} were used")),
        generators: vec![],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CosetMode {
    FullCoset,
    OneSidedProgression,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetWitness {
    pub modulus: i64,
    pub residue: i64,
    /// inclusive
    pub verified_range: (i64, i64),
    pub mode: CosetMode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetSearch {
    pub mode: CosetMode,
    pub max_modulus: i64,
    pub requested_max_modulus: i64,
    pub margin: i64,
    pub slack: i64,
    pub bound: i64,
    pub witness: Option<CosetWitness>,
}

/// Every element of `(mℤ + r) ∩ range` lies in the image.
pub fn verify_coset(img: &SumsetImage, w: &CosetWitness) -> bool {
    let (lo, hi) = w.verified_range;
    if lo > hi || w.modulus < 1 {
        return false;
    }
    let first = lo + (w.residue - lo).rem_euclid(w.modulus);
    (first..=hi).step_by(w.modulus as usize).all(|v| img.contains(v))
}

/// Smallest `(m, r)` such that the image contains the coset (full mode) or a
/// progression tail (one-sided mode) over the slack-reduced range. One-sided
/// tails must start after the last missing progression point and cover at
/// least half of `[0, B − slack]`.
pub fn detect_coset(img: &SumsetImage, max_modulus: i64, margin: i64, mode: CosetMode) -> CosetSearch {
    let bound = img.bound;
    let slack = img.provenance.terms() as i64 * img.provenance.min_abs_generator;
    let cap = (bound / margin.max(1)).max(1);
    let mm = max_modulus.min(cap).max(1);
    let mut search = CosetSearch {
        mode,
        max_modulus: mm,
        requested_max_modulus: max_modulus,
        margin,
        slack,
        bound,
        witness: None,
    };
    let hi = bound - slack;
    match mode {
        CosetMode::FullCoset => {
            let lo = -bound + slack;
            if lo > hi {
                return search;
            }
            for m in 1..=mm {
                for r in 0..m {
                    let w = CosetWitness { modulus: m, residue: r, verified_range: (lo, hi), mode };
                    if verify_coset(img, &w) {
                        search.witness = Some(w);
                        return search;
                    }
                }
            }
        }
        CosetMode::OneSidedProgression => {
            if hi < 1 {
                return search;
            }
            for m in 1..=mm {
                for r in 0..m {
                    let mut start = r;
                    let mut v = r;
                    while v <= hi {
                        if !img.contains(v) {
                            start = v + m;
                        }
                        v += m;
                    }
                    if start <= hi && 2 * (hi - start) >= hi {
                        let w = CosetWitness { modulus: m, residue: r, verified_range: (start, hi), mode };
                        search.witness = Some(w);
                        return search;
                    }
                }
            }
        }
    }
    search
}
