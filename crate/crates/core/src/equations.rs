//! Solutions of `r + a_{m_1} + … + a_{m_k} = a_{n_1} + … + a_{n_l}` over a
//! window, their decompositions into two balanced sub-equations, and the
//! bounded-spread slices grouped by offset pattern.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::bigser;
use crate::error::{Error, Result};
use crate::geometry::GeometricWitness;
use crate::sequences::SequenceWindow;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SolutionTuple {
    /// weakly decreasing
    pub m: Vec<usize>,
    /// weakly decreasing
    pub n: Vec<usize>,
    #[serde(with = "bigser")]
    pub r: BigInt,
    pub spread: usize,
}

impl SolutionTuple {
    pub fn new(mut m: Vec<usize>, mut n: Vec<usize>, r: BigInt) -> Self {
        m.sort_unstable_by(|a, b| b.cmp(a));
        n.sort_unstable_by(|a, b| b.cmp(a));
        let all = m.iter().chain(&n);
        let spread = match (all.clone().max(), all.min()) {
            (Some(hi), Some(lo)) => hi - lo,
            _ => 0,
        };
        SolutionTuple { m, n, r, spread }
    }

    pub fn k(&self) -> usize {
        self.m.len()
    }

    pub fn l(&self) -> usize {
        self.n.len()
    }

    pub fn verify(&self, a: &[BigInt]) -> bool {
        let lhs: BigInt = &self.r + self.m.iter().map(|&i| &a[i]).sum::<BigInt>();
        let rhs: BigInt = self.n.iter().map(|&j| &a[j]).sum();
        lhs == rhs
    }

    fn min_index(&self) -> usize {
        self.m.iter().chain(&self.n).copied().min().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Completeness {
    /// only solutions with every index ≤ M were searched
    BoundedOnly,
    /// no solution has one index above M and all others ≤ `m_prime`
    Partial { m_prime: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enumeration {
    pub k: usize,
    pub l: usize,
    #[serde(with = "bigser")]
    pub r: BigInt,
    pub index_bound: usize,
    pub solutions: Vec<SolutionTuple>,
    pub completeness: Completeness,
}

fn window_terms(w: &SequenceWindow, index_bound: usize) -> Result<&[BigInt]> {
    if w.len() <= index_bound {
        return Err(Error::Invalid(format!(
            "index bound {index_bound} needs more than {index_bound} elements, window has {}",
            w.len()
        )));
    }
    Ok(&w.values)
}

/// Weakly decreasing `k`-tuples over `[0, bound]`, in lexicographic order.
fn multisets(k: usize, bound: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(k: usize, hi: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..=hi {
            cur.push(i);
            rec(k, i, cur, out);
            cur.pop();
        }
    }
    rec(k, bound, &mut cur, &mut out);
    out
}

fn tuple_sum(a: &[BigInt], t: &[usize]) -> BigInt {
    t.iter().map(|&i| &a[i]).sum()
}

/// All solutions with indices ≤ `index_bound`, by meet-in-the-middle on the
/// two side sums.
pub fn enumerate_solutions(w: &SequenceWindow, k: usize, l: usize, r: &BigInt, index_bound: usize) -> Result<Enumeration> {
    let a = window_terms(w, index_bound)?;
    let right = multisets(l, index_bound);
    let mut by_sum: HashMap<BigInt, Vec<usize>> = HashMap::new();
    for (i, t) in right.iter().enumerate() {
        by_sum.entry(tuple_sum(a, t)).or_default().push(i);
    }
    let mut solutions = Vec::new();
    for t in multisets(k, index_bound) {
        let s = r + tuple_sum(a, &t);
        if let Some(hits) = by_sum.get(&s) {
            for &j in hits {
                solutions.push(SolutionTuple::new(t.clone(), right[j].clone(), r.clone()));
            }
        }
    }
    solutions.sort();
    let completeness = completeness(a, k, l, r, index_bound);
    Ok(Enumeration { k, l, r: r.clone(), index_bound, solutions, completeness })
}

fn completeness(a: &[BigInt], k: usize, l: usize, r: &BigInt, bound: usize) -> Completeness {
    if bound + 1 >= a.len() || a.iter().any(|x| !x.is_positive()) || k == 0 || l == 0 {
        return Completeness::BoundedOnly;
    }
    // the side holding a_N ≥ a_{M+1} outweighs the other side
    let next = &a[bound + 1];
    let kk = BigInt::from(k.max(l));
    let m_prime = (0..=bound).rev().find(|&i| *next > &kk * &a[i] + r.abs());
    match m_prime {
        Some(m) => Completeness::Partial { m_prime: m },
        None => Completeness::BoundedOnly,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Direct,
    LambdaBalance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionCertificate {
    pub base: SolutionTuple,
    #[serde(with = "bigser")]
    pub s_prime: BigInt,
    #[serde(with = "bigser")]
    pub s: BigInt,
    /// 1-based positions into `base.m`
    pub i_set: Vec<usize>,
    /// 1-based positions into `base.n`
    pub j_set: Vec<usize>,
    pub route: Route,
}

impl DecompositionCertificate {
    /// Both sub-equations hold exactly, the base is a solution, and the index
    /// sets are proper and not both empty.
    pub fn verify(&self, a: &[BigInt]) -> bool {
        let (k, l) = (self.base.k(), self.base.l());
        let proper = self.i_set.len() < k && self.j_set.len() < l && !(self.i_set.is_empty() && self.j_set.is_empty());
        let in_range = self.i_set.iter().all(|&p| p >= 1 && p <= k) && self.j_set.iter().all(|&p| p >= 1 && p <= l);
        if !proper || !in_range || !self.base.verify(a) || self.s_prime.abs() > self.s {
            return false;
        }
        let sum = |idx: &[usize], set: &[usize], inside: bool| -> BigInt {
            idx.iter()
                .enumerate()
                .filter(|(p, _)| set.contains(&(p + 1)) == inside)
                .map(|(_, &i)| &a[i])
                .sum()
        };
        let first = &self.base.r + &self.s_prime + sum(&self.base.m, &self.i_set, true) == sum(&self.base.n, &self.j_set, true);
        let second = sum(&self.base.m, &self.i_set, false) == &self.s_prime + sum(&self.base.n, &self.j_set, false);
        first && second
    }
}

fn subset(mask: u32, len: usize) -> Vec<usize> {
    (0..len).filter(|p| mask >> p & 1 == 1).map(|p| p + 1).collect()
}

/// Proper subsets `(I, J)`, not both empty, in mask order. Nothing when a
/// side is empty, since `[0]` has no proper subset.
fn index_pairs(k: usize, l: usize) -> impl Iterator<Item = (u32, u32)> {
    let ki = if k == 0 { 0 } else { (1u32 << k) - 1 };
    let lj = if l == 0 { 0 } else { (1u32 << l) - 1 };
    (0..ki).flat_map(move |i| (0..lj).map(move |j| (i, j))).filter(|&(i, j)| i != 0 || j != 0)
}

fn masked_sum(a: &[BigInt], idx: &[usize], mask: u32) -> BigInt {
    idx.iter().enumerate().filter(|(p, _)| mask >> p & 1 == 1).map(|(_, &i)| &a[i]).sum()
}

/// Certificate with the smallest `|s′| ≤ s`, ties broken by `(I, J)` mask order.
pub fn decompose(a: &[BigInt], sol: &SolutionTuple, s: &BigInt) -> Option<DecompositionCertificate> {
    let (k, l) = (sol.k(), sol.l());
    let mut best: Option<(BigInt, u32, u32)> = None;
    for (im, jm) in index_pairs(k, l) {
        let sp = masked_sum(a, &sol.n, jm) - &sol.r - masked_sum(a, &sol.m, im);
        if sp.abs() <= *s && best.as_ref().is_none_or(|(b, _, _)| sp.abs() < b.abs()) {
            best = Some((sp, im, jm));
        }
    }
    let (sp, im, jm) = best?;
    let cert = DecompositionCertificate {
        base: sol.clone(),
        s_prime: sp,
        s: s.clone(),
        i_set: subset(im, k),
        j_set: subset(jm, l),
        route: Route::Direct,
    };
    cert.verify(a).then_some(cert)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum DecompositionBound {
    Found { s: usize, t: usize, solutions: usize, high_spread: usize },
    /// undecomposable solutions with spread above `t_max` at `s_max`
    NotFound { s_max: usize, t_max: usize, exceptions: Vec<SolutionTuple> },
}

/// Lexicographically smallest `(s, t)` with every enumerated solution of
/// spread above `t` decomposable at bound `s`.
pub fn find_decomposition_bound(
    w: &SequenceWindow,
    k: usize,
    l: usize,
    r: &BigInt,
    index_bound: usize,
    s_max: usize,
    t_max: usize,
) -> Result<DecompositionBound> {
    let e = enumerate_solutions(w, k, l, r, index_bound)?;
    let a = &w.values;
    // smallest s at which each solution decomposes
    let need: Vec<Option<usize>> = e
        .solutions
        .iter()
        .map(|sol| {
            let (k, l) = (sol.k(), sol.l());
            index_pairs(k, l)
                .map(|(im, jm)| (masked_sum(a, &sol.n, jm) - &sol.r - masked_sum(a, &sol.m, im)).abs())
                .min()
                .and_then(|v| v.to_usize())
        })
        .collect();
    for s in 0..=s_max {
        for t in 0..=t_max {
            let ok = e
                .solutions
                .iter()
                .zip(&need)
                .all(|(sol, n)| sol.spread <= t || n.is_some_and(|n| n <= s));
            if ok {
                let high = e.solutions.iter().filter(|x| x.spread > t).count();
                return Ok(DecompositionBound::Found { s, t, solutions: e.solutions.len(), high_spread: high });
            }
        }
    }
    let exceptions = e
        .solutions
        .iter()
        .zip(&need)
        .filter(|(sol, n)| sol.spread > t_max && !n.is_some_and(|n| n <= s_max))
        .map(|(sol, _)| sol.clone())
        .collect();
    Ok(DecompositionBound::NotFound { s_max, t_max, exceptions })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "shape")]
pub enum PSummary {
    /// every base from `from` up to the largest testable base
    Cofinite { from: usize },
    /// all bases lie in the lower half of the testable range
    Finite,
    Periodic { period: usize, residues: Vec<usize>, from: usize },
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OffsetPattern {
    /// offsets of `m̄` relative to the smallest index
    pub u: Vec<usize>,
    pub v: Vec<usize>,
    /// `P_σ`: smallest indices of the solutions with this pattern
    pub bases: Vec<usize>,
    /// largest base whose solution fits under the index bound
    pub max_base: usize,
    pub summary: PSummary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadSlice {
    pub t: usize,
    pub solutions: Vec<SolutionTuple>,
    pub patterns: Vec<OffsetPattern>,
}

fn summarize(bases: &[usize], max_base: usize) -> PSummary {
    let Some(&last) = bases.last() else { return PSummary::Finite };
    if last == max_base {
        let mut from = last;
        while from > 0 && bases.binary_search(&(from - 1)).is_ok() {
            from -= 1;
        }
        if last - from >= 2 {
            return PSummary::Cofinite { from };
        }
        for period in 2..=6usize {
            let start = max_base.saturating_sub(3 * period);
            let tail: Vec<usize> = (start..=max_base).collect();
            let inside = |x: usize| bases.binary_search(&x).is_ok();
            if tail.iter().all(|&x| x < start + period || inside(x) == inside(x - period)) {
                let residues: Vec<usize> = (start..start + period).filter(|&x| inside(x)).map(|x| x % period).collect();
                if !residues.is_empty() {
                    return PSummary::Periodic { period, residues, from: start };
                }
            }
        }
        return PSummary::Undetermined;
    }
    if 2 * last <= max_base {
        PSummary::Finite
    } else {
        PSummary::Undetermined
    }
}

/// Solutions with spread ≤ `t`, grouped by offset pattern `σ = (ū, v̄)`.
pub fn bounded_spread_slice(w: &SequenceWindow, k: usize, l: usize, r: &BigInt, t: usize, index_bound: usize) -> Result<SpreadSlice> {
    let e = enumerate_solutions(w, k, l, r, index_bound)?;
    let solutions: Vec<SolutionTuple> = e.solutions.into_iter().filter(|s| s.spread <= t).collect();
    let mut groups: BTreeMap<(Vec<usize>, Vec<usize>), Vec<usize>> = BTreeMap::new();
    for s in &solutions {
        let b = s.min_index();
        let u = s.m.iter().map(|x| x - b).collect();
        let v = s.n.iter().map(|x| x - b).collect();
        groups.entry((u, v)).or_default().push(b);
    }
    let patterns = groups
        .into_iter()
        .map(|((u, v), mut bases)| {
            bases.sort_unstable();
            bases.dedup();
            let width = u.iter().chain(&v).copied().max().unwrap_or(0);
            let max_base = index_bound - width;
            let summary = summarize(&bases, max_base);
            OffsetPattern { u, v, bases, max_base, summary }
        })
        .collect();
    Ok(SpreadSlice { t, solutions, patterns })
}

/// Decomposition through a pair `(I*, J*)` with balanced λ-sums; `s′` is read
/// off the deviations `θ` and must round unambiguously.
pub fn lambda_balance_decompose(
    a: &[BigInt],
    sol: &SolutionTuple,
    witness: &GeometricWitness,
    tolerance: f64,
) -> Result<Option<DecompositionCertificate>> {
    let pos = |i: usize| -> Result<usize> {
        i.checked_sub(witness.first_index)
            .filter(|p| *p < witness.f.len())
            .ok_or_else(|| Error::Invalid(format!("index {i} is outside the witness window")))
    };
    let lam = |i: usize| -> Result<f64> { Ok(witness.lambda[witness.f[pos(i)?]]) };
    let th = |i: usize| -> Result<f64> { Ok(witness.theta[pos(i)?]) };
    let (k, l) = (sol.k(), sol.l());
    let theta_sum = (k + l) as f64 * witness.theta_bound_f64;
    let s = BigInt::from(sol.r.abs().to_u64().unwrap_or(u64::MAX).max(theta_sum.ceil() as u64));
    let r = sol.r.to_f64().unwrap_or(f64::NAN);
    for (im, jm) in index_pairs(k, l) {
        let mut li = 0.0;
        let mut lj = 0.0;
        let mut ti = 0.0;
        let mut tj = 0.0;
        for (p, &i) in sol.m.iter().enumerate() {
            if im >> p & 1 == 1 {
                li += lam(i)?;
                ti += th(i)?;
            }
        }
        for (p, &j) in sol.n.iter().enumerate() {
            if jm >> p & 1 == 1 {
                lj += lam(j)?;
                tj += th(j)?;
            }
        }
        let scale = li.abs().max(lj.abs()).max(1.0);
        if (li - lj).abs() > tolerance * scale {
            continue;
        }
        let sp = tj - ti - r;
        let rounded = sp.round();
        if (sp - rounded).abs() > tolerance.max(1e-6) * scale {
            return Err(Error::Precision {
                bits: 53,
                reason: format!("s' = {sp} does not round unambiguously"),
            });
        }
        let cert = DecompositionCertificate {
            base: sol.clone(),
            s_prime: BigInt::from(rounded as i64),
            s: s.clone(),
            i_set: subset(im, k),
            j_set: subset(jm, l),
            route: Route::LambdaBalance,
        };
        if cert.verify(a) {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}
