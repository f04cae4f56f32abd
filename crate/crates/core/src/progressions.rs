//! Arithmetic progressions in finite sets and sumset images, strongly
//! contained progressions, and half-graph witnesses for `y − x ∈ A`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequences::SequenceWindow;
use crate::sumset::{self, EngineConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct APWitness {
    pub start: i64,
    pub difference: i64,
    pub length: usize,
    pub strongly_contained: bool,
}

impl APWitness {
    pub fn terms(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.length as i64).map(move |i| self.start + i * self.difference)
    }
}

/// Membership oracle over a sorted set of integers.
pub struct IntSet {
    sorted: Vec<i64>,
    dense: Option<(i64, Vec<bool>)>,
    hashed: Option<HashSet<i64>>,
}

impl IntSet {
    pub fn new(values: &[i64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let (dense, hashed) = match (sorted.first(), sorted.last()) {
            (Some(&lo), Some(&hi)) if ((hi - lo) as u128) < 64 * sorted.len() as u128 + 4096 => {
                let mut bits = vec![false; (hi - lo + 1) as usize];
                for &v in &sorted {
                    bits[(v - lo) as usize] = true;
                }
                (Some((lo, bits)), None)
            }
            _ => (None, Some(sorted.iter().copied().collect())),
        };
        IntSet { sorted, dense, hashed }
    }

    pub fn contains(&self, v: i64) -> bool {
        if let Some((lo, bits)) = &self.dense {
            return v >= *lo && ((v - lo) as u64) < bits.len() as u64 && bits[(v - lo) as usize];
        }
        self.hashed.as_ref().is_some_and(|h| h.contains(&v))
    }

    pub fn sorted(&self) -> &[i64] {
        &self.sorted
    }

    fn forward_len(&self, a: i64, d: i64) -> usize {
        let mut n = 0;
        let mut v = a;
        while self.contains(v) {
            n += 1;
            v += d;
        }
        n
    }

    /// Length of the strongly contained progression starting at `(a, d)`.
    fn strong_len(&self, a: i64, d: i64, forward: usize) -> usize {
        let lo = self.sorted.first().copied().unwrap_or(0);
        for i in 1..forward as i64 {
            let v = a - i * d;
            if v < lo {
                break;
            }
            if self.contains(v) {
                return i as usize;
            }
        }
        forward
    }
}

/// A longest progression in `s` (ties: smallest difference, then smallest
/// start), or `None` if it is shorter than `min_length`.
pub fn longest_ap(s: &[i64], min_length: usize) -> Option<APWitness> {
    let set = IntSet::new(s);
    let v = set.sorted();
    if v.is_empty() {
        return None;
    }
    let mut best = APWitness { start: v[0], difference: 1, length: 1, strongly_contained: true };
    let vmax = *v.last().unwrap();
    for i in 0..v.len() {
        let a = v[i];
        for &b in &v[i + 1..] {
            let d = b - a;
            let cap = ((vmax - a) / d + 1) as usize;
            if cap < best.length || (cap == best.length && d > best.difference) {
                break;
            }
            if set.contains(a - d) {
                continue;
            }
            let n = set.forward_len(a, d);
            let better = n > best.length
                || (n == best.length && (d < best.difference || (d == best.difference && a < best.start)));
            if better {
                best = APWitness { start: a, difference: d, length: n, strongly_contained: false };
            }
        }
    }
    if best.length >= 2 {
        best.strongly_contained = set.strong_len(best.start, best.difference, best.length) >= best.length;
    }
    (best.length >= min_length).then_some(best)
}

/// Every maximal strongly contained progression of length ≥ `min_length`:
/// `a + i d ∈ A` for `i < n` and `a − i d ∉ A` for `1 ≤ i < n`.
pub fn strongly_contained_aps(values: &[i64], min_length: usize) -> Vec<APWitness> {
    let set = IntSet::new(values);
    let v = set.sorted();
    let vmax = v.last().copied().unwrap_or(0);
    let mut out = Vec::new();
    for i in 0..v.len() {
        let a = v[i];
        for &b in &v[i + 1..] {
            let d = b - a;
            if (((vmax - a) / d + 1) as usize) < min_length {
                break;
            }
            if set.contains(a - d) {
                continue;
            }
            let f = set.forward_len(a, d);
            let n = set.strong_len(a, d, f);
            if n >= min_length {
                out.push(APWitness { start: a, difference: d, length: n, strongly_contained: true });
            }
        }
    }
    out.sort_by_key(|w| (w.difference, w.start));
    out
}

/// A longest strongly contained progression (ties: smallest difference, then
/// smallest start), or `None` below `min_length`.
pub fn longest_strong_ap(values: &[i64], min_length: usize) -> Option<APWitness> {
    let set = IntSet::new(values);
    let v = set.sorted();
    let vmax = v.last().copied().unwrap_or(0);
    let mut best: Option<APWitness> = None;
    let floor = min_length.max(2);
    for i in 0..v.len() {
        let a = v[i];
        for &b in &v[i + 1..] {
            let d = b - a;
            let cap = ((vmax - a) / d + 1) as usize;
            let need = best.map_or(floor, |w| w.length);
            if cap < need || best.is_some_and(|w| cap == w.length && d > w.difference) {
                break;
            }
            if set.contains(a - d) {
                continue;
            }
            let n = set.strong_len(a, d, set.forward_len(a, d));
            let better = match best {
                None => n >= floor,
                Some(w) => n > w.length || (n == w.length && (d, a) < (w.difference, w.start)),
            };
            if better {
                best = Some(APWitness { start: a, difference: d, length: n, strongly_contained: true });
            }
        }
    }
    best
}

pub fn verify_ap(set: &IntSet, w: &APWitness) -> bool {
    w.difference > 0
        && w.terms().all(|v| set.contains(v))
        && (!w.strongly_contained || (1..w.length as i64).all(|i| !set.contains(w.start - i * w.difference)))
}

/// Elements of a window as `i64`, requiring completeness up to `limit`.
pub fn window_values(w: &SequenceWindow, limit: i64) -> Result<Vec<i64>> {
    w.ensure_covers(&BigInt::from(limit))?;
    Ok(w.values
        .iter()
        .map_while(|v| v.to_i64())
        .filter(|&x| x >= 0)
        .take_while(|&x| x <= limit)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApProbeEntry {
    pub n: usize,
    pub longest: Option<APWitness>,
    /// longest progression length inside `Σ_n(A) ∩ [0, b]` for growing `b`
    pub trend: Vec<(i64, usize)>,
}

/// Longest progression in `Σ_k(A) ∩ [0, B]` for each `k ≤ max_n`.
pub fn ap_sparse_probe(
    w: &SequenceWindow,
    max_n: usize,
    bound: i64,
    min_length: usize,
    cfg: &EngineConfig,
) -> Result<Vec<ApProbeEntry>> {
    let base = sumset::unsigned_image(w, bound);
    let mut out = Vec::new();
    for k in 1..=max_n {
        let img = sumset::sigma(&base, k, cfg)?;
        let members: Vec<i64> = img.to_vec().into_iter().filter(|&x| x >= 0).collect();
        let mut trend = Vec::new();
        let mut longest = None;
        for b in [bound / 4, bound / 2, bound] {
            let part: Vec<i64> = members.iter().copied().take_while(|&x| x <= b).collect();
            let l = longest_ap(&part, min_length.min(2));
            trend.push((b, l.map_or(part.len().min(1), |w| w.length)));
            if b == bound {
                longest = l.filter(|w| w.length >= min_length);
            }
        }
        out.push(ApProbeEntry { n: k, longest, trend });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderPropertyWitness {
    pub k: usize,
    pub b: Vec<i64>,
    pub c: Vec<i64>,
}

impl OrderPropertyWitness {
    /// `c_j − b_i ∈ A ⇔ i ≤ j` by direct membership.
    pub fn verify(&self, member: impl Fn(i64) -> bool) -> bool {
        self.b.len() == self.k
            && self.c.len() == self.k
            && (0..self.k).all(|i| (0..self.k).all(|j| member(self.c[j] - self.b[i]) == (i <= j)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderSearchBounds {
    /// `c_j ∈ A ∩ [0, C]` and `b_i ∈ c_i − (A ∩ [0, C])`
    pub value_bound: i64,
    pub node_budget: u64,
    pub nodes_used: u64,
    pub exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderRoute {
    StronglyContainedAp(APWitness),
    Search,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderPropertyResult {
    pub k: usize,
    pub witness: Option<OrderPropertyWitness>,
    pub route: Option<OrderRoute>,
    pub bounds: OrderSearchBounds,
}

/// Half-graph of length `k` for the formula `y − x ∈ A`: first from strongly
/// contained progressions (`b_i = (i−1)d`, `c_i = a + b_i`), then by a bounded
/// backtracking search with `b_1 = 0`.
pub fn order_property_witness(
    w: &SequenceWindow,
    k: usize,
    value_bound: i64,
    node_budget: u64,
) -> Result<OrderPropertyResult> {
    if k < 2 {
        return Err(Error::Invalid("order property length must be at least 2".into()));
    }
    let values = window_values(w, 2 * value_bound).map_err(|e| match e {
        Error::Incomplete { covered, .. } => Error::Invalid(format!(
            "membership queries need the window complete on [0, {}], but it stops at {covered}",
            2 * value_bound
        )),
        other => other,
    })?;
    let set = IntSet::new(&values);
    let member = |v: i64| set.contains(v);
    let mut bounds = OrderSearchBounds { value_bound, node_budget, nodes_used: 0, exhausted: true };

    let inside: Vec<i64> = values.iter().copied().filter(|&x| x <= value_bound).collect();
    if let Some(ap) = strongly_contained_aps(&inside, k).into_iter().next() {
        let b: Vec<i64> = (0..k as i64).map(|i| i * ap.difference).collect();
        let c: Vec<i64> = b.iter().map(|x| ap.start + x).collect();
        let wit = OrderPropertyWitness { k, b, c };
        if wit.verify(member) {
            return Ok(OrderPropertyResult {
                k,
                witness: Some(wit),
                route: Some(OrderRoute::StronglyContainedAp(ap)),
                bounds,
            });
        }
    }

    let mut b = vec![0i64; k];
    let mut c = vec![0i64; k];
    let mut nodes = 0u64;
    let found = search(&inside, &member, k, 0, &mut b, &mut c, &mut nodes, node_budget);
    bounds.nodes_used = nodes;
    bounds.exhausted = nodes < node_budget;
    let witness = found.then(|| OrderPropertyWitness { k, b, c });
    let route = witness.as_ref().map(|_| OrderRoute::Search);
    Ok(OrderPropertyResult { k, witness, route, bounds })
}

#[allow(clippy::too_many_arguments)]
fn search(
    a_c: &[i64],
    member: &impl Fn(i64) -> bool,
    k: usize,
    i: usize,
    b: &mut [i64],
    c: &mut [i64],
    nodes: &mut u64,
    budget: u64,
) -> bool {
    if i == k {
        return true;
    }
    for &ci in a_c {
        // c_i − b_j ∈ A for every j ≤ i (b_1 = 0 makes c_i itself an element)
        if !(0..i).all(|j| member(ci - b[j])) {
            continue;
        }
        let b_choices: Vec<i64> = if i == 0 { vec![0] } else { a_c.iter().map(|&x| ci - x).collect() };
        for bi in b_choices {
            *nodes += 1;
            if *nodes >= budget {
                return false;
            }
            // c_j − b_i ∉ A for every earlier j
            if !(0..i).all(|j| !member(c[j] - bi)) {
                continue;
            }
            b[i] = bi;
            c[i] = ci;
            if search(a_c, member, k, i + 1, b, c, nodes, budget) {
                return true;
            }
        }
    }
    false
}
