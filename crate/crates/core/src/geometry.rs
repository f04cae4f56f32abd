//! Ratio sets, discreteness evidence, ε-tables of signed ratio sums, and
//! explicit geometric-sparsity witnesses with growth constants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{Interval, QuadraticNumber};
use crate::error::{Error, Result};
use crate::recurrence::{self, RecurrenceSpec};
use crate::sequences::{SequenceKind, SequenceWindow};

const PREC: u32 = 128;

fn ratio_str(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn ratio_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

mod ratio_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(ratio_str))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigRational>, D::Error> {
        let v: Vec<String> = Deserialize::deserialize(d)?;
        v.iter()
            .map(|t| t.parse::<BigRational>().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// `{s/t : s, t ∈ S, t ≤ s}` for the first `depth` positive values of `S`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioSet {
    pub depth: usize,
    #[serde(with = "ratio_serde")]
    pub ratios: Vec<BigRational>,
}

impl RatioSet {
    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }

    pub fn count_le(&self, b: &BigRational) -> usize {
        self.ratios.partition_point(|q| q <= b)
    }
}

fn positive_prefix(values: &[BigInt], depth: usize) -> Vec<BigInt> {
    let mut v: Vec<BigInt> = values.iter().filter(|x| x.is_positive()).cloned().collect();
    v.sort();
    v.dedup();
    v.truncate(depth);
    v
}

pub fn ratio_set(values: &[BigInt], depth: usize) -> RatioSet {
    let s = positive_prefix(values, depth);
    let mut ratios = Vec::with_capacity(s.len() * (s.len() + 1) / 2);
    for (i, t) in s.iter().enumerate() {
        for x in &s[i..] {
            ratios.push(BigRational::new(x.clone(), t.clone()));
        }
    }
    ratios.sort();
    ratios.dedup();
    RatioSet { depth: s.len(), ratios }
}

/// Members of the ratio set of the first `depth` values that are at most `b`.
fn ratios_below(s: &[BigInt], b: &BigRational) -> Vec<BigRational> {
    let mut out = Vec::new();
    for (i, t) in s.iter().enumerate() {
        let cap = b * BigRational::from_integer(t.clone());
        for x in &s[i..] {
            let q = BigRational::from_integer(x.clone());
            if q > cap {
                break;
            }
            out.push(q / BigRational::from_integer(t.clone()));
        }
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretenessLevel {
    pub depth: usize,
    pub count: usize,
    pub min_gap: Option<String>,
    pub min_gap_f64: Option<f64>,
    /// consecutive members realizing the minimum gap
    pub closest_pair: Option<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretenessReport {
    pub threshold: String,
    pub levels: Vec<DiscretenessLevel>,
    /// count and minimum gap identical over the last two depths
    pub stable: bool,
}

/// `|Q ∩ [1, b]|` and its minimum gap as the depth grows along `depths`.
pub fn discreteness_proxy(values: &[BigInt], depths: &[usize], b: &BigRational) -> Result<DiscretenessReport> {
    if *b <= BigRational::one() {
        return Err(Error::Invalid("discreteness threshold must exceed 1".into()));
    }
    let mut levels = Vec::new();
    let mut gaps: Vec<Option<BigRational>> = Vec::new();
    for &d in depths {
        let s = positive_prefix(values, d);
        let q = ratios_below(&s, b);
        let mut best: Option<(BigRational, usize)> = None;
        for i in 1..q.len() {
            let g = &q[i] - &q[i - 1];
            if best.as_ref().is_none_or(|(bg, _)| g < *bg) {
                best = Some((g, i));
            }
        }
        levels.push(DiscretenessLevel {
            depth: s.len(),
            count: q.len(),
            min_gap: best.as_ref().map(|(g, _)| ratio_str(g)),
            min_gap_f64: best.as_ref().map(|(g, _)| ratio_f64(g)),
            closest_pair: best.as_ref().map(|(_, i)| (ratio_str(&q[i - 1]), ratio_str(&q[*i]))),
        });
        gaps.push(best.map(|(g, _)| g));
    }
    let n = levels.len();
    let stable = n >= 2 && levels[n - 1].count == levels[n - 2].count && gaps[n - 1] == gaps[n - 2];
    Ok(DiscretenessReport { threshold: ratio_str(b), levels, stable })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonEntry {
    pub k: usize,
    /// minimum of `|q_1 + … + q_j|` over admissible tuples with `j ≤ k`
    pub epsilon: String,
    pub epsilon_f64: f64,
    pub tuple: Vec<String>,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonTable {
    pub depth: usize,
    pub entries: Vec<EpsilonEntry>,
}

impl EpsilonTable {
    pub fn epsilon(&self, k: usize) -> Option<BigRational> {
        self.entries.iter().find(|e| e.k == k).and_then(|e| e.epsilon.parse().ok())
    }
}

struct EpsSearch<'a> {
    mags: &'a [BigRational],
    k: usize,
    best: Option<(BigRational, Vec<BigRational>)>,
    tuple: Vec<BigRational>,
    sums: Vec<BigRational>,
    nodes: u64,
}

impl EpsSearch<'_> {
    fn run(&mut self, pos: usize, total: &BigRational) -> Result<()> {
        self.nodes += 1;
        let i = self.tuple.len();
        if i == self.k {
            if total.is_zero() {
                return Err(Error::WitnessViolation(format!(
                    "admissible tuple {:?} sums to zero",
                    self.tuple.iter().map(ratio_str).collect::<Vec<_>>()
                )));
            }
            let a = total.abs();
            if self.best.as_ref().is_none_or(|(b, _)| a < *b) {
                self.best = Some((a, self.tuple.clone()));
            }
            return Ok(());
        }
        for p in pos..self.mags.len() {
            let m = &self.mags[p];
            // remaining terms have magnitude at most m, and the bound only grows with p
            if let Some((b, _)) = &self.best {
                let left = BigRational::from_integer(BigInt::from(self.k - i)) * m;
                if total.abs() - left >= *b {
                    break;
                }
            }
            for q in [-m.clone(), m.clone()] {
                if self.sums.iter().any(|s| (s + &q).is_zero()) {
                    continue;
                }
                let before = self.sums.len();
                for j in 0..before {
                    let s = &self.sums[j] + &q;
                    self.sums.push(s);
                }
                self.tuple.push(q.clone());
                self.run(p, &(total + &q))?;
                self.tuple.pop();
                self.sums.truncate(before);
            }
        }
        Ok(())
    }
}

/// `ε_k` for `k ≤ max_k` over `Q_k = {q_1 + … + q_k : q_i ∈ ±Q⁻¹, |q_1| = 1,
/// magnitudes nonincreasing, no nonempty subset summing to 0}`.
pub fn epsilon_table(q: &RatioSet, max_k: usize) -> Result<EpsilonTable> {
    if max_k == 0 {
        return Err(Error::Invalid("epsilon table needs K >= 1".into()));
    }
    let mut mags: Vec<BigRational> = q.ratios.iter().map(|r| r.recip()).collect();
    mags.sort_by(|a, b| b.cmp(a));
    mags.dedup();
    let one = BigRational::one();
    let mut entries: Vec<EpsilonEntry> = Vec::new();
    let mut running: Option<(BigRational, Vec<BigRational>)> = None;
    for k in 1..=max_k {
        let mut s = EpsSearch {
            mags: &mags,
            k,
            best: None,
            tuple: vec![one.clone()],
            sums: vec![BigRational::zero(), one.clone()],
            nodes: 0,
        };
        s.run(0, &one)?;
        if let Some((v, t)) = s.best {
            if running.as_ref().is_none_or(|(b, _)| v < *b) {
                running = Some((v, t));
            }
        }
        let (v, t) = running.clone().expect("k = 1 always admits (1)");
        entries.push(EpsilonEntry {
            k,
            epsilon: ratio_str(&v),
            epsilon_f64: ratio_f64(&v),
            tuple: t.iter().map(ratio_str).collect(),
            nodes: s.nodes,
        });
    }
    Ok(EpsilonTable { depth: q.depth, entries })
}

// ---------------------------------------------------------------------------
// witnesses

/// Candidate `g` with `sup |a − g(a)|` bounded, evaluated per canonical index.
#[derive(Clone, Debug)]
pub enum LambdaModel {
    Identity,
    /// `g(a_n) = α·λ^{raw n}`
    Exponential { alpha: Interval, base: Interval, label: String },
    /// one enclosure per canonical element
    Explicit(Vec<Interval>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Auto,
    Identity,
    Recurrence,
    FloorGeometric,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => ModelKind::Auto,
            "identity" => ModelKind::Identity,
            "recurrence" => ModelKind::Recurrence,
            "floor_geometric" => ModelKind::FloorGeometric,
            _ => return Err(Error::Invalid(format!("unknown model {s:?}"))),
        })
    }
}

impl LambdaModel {
    pub fn label(&self) -> String {
        match self {
            LambdaModel::Identity => "identity".into(),
            LambdaModel::Exponential { label, .. } => label.clone(),
            LambdaModel::Explicit(_) => "explicit".into(),
        }
    }

    /// The model suggested by the window's generator.
    pub fn for_window(w: &SequenceWindow, kind: ModelKind) -> Result<Self> {
        Self::for_window_with(w, kind, recurrence::DEFAULT_PRECISION_CAP)
    }

    pub fn for_window_with(w: &SequenceWindow, kind: ModelKind, precision_cap: u32) -> Result<Self> {
        let src = w.source.as_ref().map(|s| &s.kind);
        let kind = match (kind, src) {
            (ModelKind::Auto, Some(SequenceKind::Recurrence { .. })) => ModelKind::Recurrence,
            (ModelKind::Auto, Some(SequenceKind::FloorGeometric { .. })) => ModelKind::FloorGeometric,
            (ModelKind::Auto, _) => ModelKind::Identity,
            (k, _) => k,
        };
        match (kind, src) {
            (ModelKind::Identity, _) => Ok(LambdaModel::Identity),
            (ModelKind::Recurrence, Some(SequenceKind::Recurrence { initial, coefficients })) => {
                let spec = RecurrenceSpec::new(initial.clone(), coefficients.clone())?;
                let last_raw = w.raw_index(w.len().saturating_sub(1)) + 1;
                let data = recurrence::binet_with(&spec, last_raw.max(spec.order()), recurrence::DEFAULT_PRECISION, precision_cap)?;
                if !data.classification.is_accepted() {
                    return Err(Error::Invalid(format!(
                        "{} is neither Pisot nor Salem, no exponential model",
                        data.polynomial_text
                    )));
                }
                let alpha = data.alpha_interval().ok_or_else(|| Error::Invalid("no dominant root".into()))?;
                let base = data.lambda_interval().unwrap().clone();
                Ok(LambdaModel::Exponential {
                    alpha: alpha.with_prec(PREC),
                    base: base.with_prec(PREC),
                    label: format!("{:.6}*{:.6}^n", data.binet.as_ref().unwrap().alpha.mid(), data.lambda.unwrap().mid()),
                })
            }
            (ModelKind::FloorGeometric, Some(SequenceKind::FloorGeometric { c, b })) => {
                let ci = QuadraticNumber::parse(c)?.to_interval(PREC);
                let bi = QuadraticNumber::parse(b)?.to_interval(PREC);
                Ok(LambdaModel::Exponential { alpha: ci, base: bi, label: format!("({c})*({b})^n") })
            }
            (k, _) => Err(Error::Invalid(format!("model {k:?} does not apply to this sequence"))),
        }
    }

    fn eval(&self, w: &SequenceWindow, n: usize) -> Interval {
        match self {
            LambdaModel::Identity => Interval::from_int(&w.values[n], PREC),
            LambdaModel::Exponential { alpha, base, .. } => alpha.mul(&base.powi(w.raw_index(n) as u64)),
            LambdaModel::Explicit(v) => v[n].with_prec(PREC),
        }
    }

    fn exact(&self) -> bool {
        matches!(self, LambdaModel::Identity)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClauseCheck {
    pub clause: String,
    pub checked: usize,
    pub passed: bool,
    /// smallest certified margin by which the inequality holds
    pub min_slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthConstants {
    pub delta: String,
    pub delta_f64: f64,
    pub b: String,
    pub b_f64: f64,
    pub pairs_checked: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricWitness {
    pub model: String,
    /// certified upper bound of `max |a − g(a)|` on the window
    pub r: String,
    pub r_f64: f64,
    /// canonical indices of the anchors `b_m`
    pub anchors: Vec<usize>,
    pub lambda: Vec<f64>,
    pub c: String,
    pub c_f64: f64,
    /// the construction's bound `3r`
    pub theta_bound: String,
    pub theta_bound_f64: f64,
    /// largest `|θ_n|` actually observed
    pub theta_max: f64,
    pub f: Vec<usize>,
    pub theta: Vec<f64>,
    pub growth: GrowthConstants,
    pub checks: Vec<ClauseCheck>,
    /// canonical index of the first element covered (negative values are skipped)
    pub first_index: usize,
    pub window_len: usize,
}

fn max_rat(a: BigRational, b: BigRational) -> BigRational {
    if a >= b {
        a
    } else {
        b
    }
}

/// Greedy anchor construction: `b_0 = a_0`, `b_{m+1}` the least element with
/// `b_{m+1} ≥ b_m + 2r` and `b_{m+1} > b_m`; `λ_m = g(b_m)`, `Θ = 3r`.
pub fn construct_witness(w: &SequenceWindow, model: &LambdaModel, r_bound: Option<&BigRational>) -> Result<GeometricWitness> {
    let start = w.values.partition_point(|v| v.is_negative());
    let idx: Vec<usize> = (start..w.len()).collect();
    if idx.len() < 2 {
        return Err(Error::Invalid("witness construction needs at least two nonnegative elements".into()));
    }
    if let LambdaModel::Explicit(v) = model {
        if v.len() < w.len() {
            return Err(Error::Invalid(format!("explicit model has {} values for {} elements", v.len(), w.len())));
        }
    }
    let g: Vec<Interval> = idx.iter().map(|&n| model.eval(w, n)).collect();
    let a: Vec<Interval> = idx.iter().map(|&n| Interval::from_int(&w.values[n], PREC)).collect();
    for (i, gi) in g.iter().enumerate() {
        if !gi.is_positive() {
            return Err(Error::WitnessViolation(format!("model value at index {} is not positive", idx[i])));
        }
    }

    // r: certified bound on the deviation
    let mut r = BigRational::zero();
    for (ai, gi) in a.iter().zip(&g) {
        r = max_rat(r, ai.sub(gi).abs().hi_ratio());
    }
    if let Some(rb) = r_bound {
        if r > *rb {
            let worst = (0..a.len()).find(|&i| a[i].sub(&g[i]).abs().hi_ratio() > *rb).unwrap();
            return Err(Error::WitnessViolation(format!(
                "model deviation at index {} exceeds r = {}",
                idx[worst],
                ratio_str(rb)
            )));
        }
        r = rb.clone();
    }
    let two_r = &r * BigRational::from_integer(2.into());

    let vals: Vec<BigRational> = idx.iter().map(|&n| BigRational::from_integer(w.values[n].clone())).collect();
    let mut anchors = vec![0usize];
    let mut f = vec![0usize; idx.len()];
    for i in 1..idx.len() {
        let b = &vals[*anchors.last().unwrap()];
        if vals[i] >= b + &two_r && vals[i] > *b {
            anchors.push(i);
        }
        f[i] = anchors.len() - 1;
    }
    let lambda: Vec<Interval> = anchors.iter().map(|&i| g[i].clone()).collect();

    // c: exact minimum consecutive ratio, or a certified lower bound of it
    let c = if model.exact() {
        let mut c: Option<BigRational> = None;
        for m in 1..lambda.len() {
            let q = lambda[m].lo_ratio() / lambda[m - 1].lo_ratio();
            if c.as_ref().is_none_or(|x| q < *x) {
                c = Some(q);
            }
        }
        c
    } else {
        let mut c: Option<BigRational> = None;
        for m in 1..lambda.len() {
            let q = lambda[m].div(&lambda[m - 1]).unwrap().lo_ratio();
            if c.as_ref().is_none_or(|x| q < *x) {
                c = Some(q);
            }
        }
        c.map(|c| c - BigRational::new(BigInt::one(), BigInt::one() << 40))
    };
    let c = c.ok_or_else(|| Error::Invalid("window yields a single anchor; c is undetermined".into()))?;
    let theta_bound = &r * BigRational::from_integer(3.into());

    let mut checks = Vec::new();
    // (i): positive, strictly lacunary λ, so each bounded ratio window is finite
    let one = BigRational::one();
    checks.push(ClauseCheck {
        clause: "(i) lambda_0 > 0 and c > 1, so lambda is lacunary and its ratio set meets every [1, b] finitely".into(),
        checked: 1,
        passed: lambda[0].is_positive() && c > one,
        min_slack: ratio_f64(&(&c - &one)),
    });
    // (ii)
    let ci = Interval::from_ratio(&c, PREC);
    let mut slack = f64::INFINITY;
    for m in 1..lambda.len() {
        let d = if model.exact() {
            let e = lambda[m].lo_ratio() - &c * lambda[m - 1].lo_ratio();
            Interval::from_ratio(&e, PREC)
        } else {
            lambda[m].sub(&ci.mul(&lambda[m - 1]))
        };
        if d.hi_ratio().is_negative() || (!model.exact() && d.lo_ratio().is_negative()) {
            return Err(Error::WitnessViolation(format!("clause (ii) fails at anchors {} and {}", m - 1, m)));
        }
        slack = slack.min(d.lo_f64());
    }
    checks.push(ClauseCheck {
        clause: "(ii) lambda_{m+1} >= c * lambda_m".into(),
        checked: lambda.len() - 1,
        passed: true,
        min_slack: slack,
    });
    // (iii)
    let mut slack = f64::INFINITY;
    let mut theta = Vec::with_capacity(idx.len());
    let mut theta_max = 0f64;
    for i in 0..idx.len() {
        let d = a[i].sub(&lambda[f[i]]);
        let hi = d.abs().hi_ratio();
        if hi > theta_bound {
            return Err(Error::WitnessViolation(format!("clause (iii) fails at index {}", idx[i])));
        }
        slack = slack.min(ratio_f64(&(&theta_bound - &hi)));
        theta.push(d.mid_f64());
        theta_max = theta_max.max(d.abs().hi_f64());
    }
    checks.push(ClauseCheck {
        clause: "(iii) |a_n - lambda_f(n)| <= Theta".into(),
        checked: idx.len(),
        passed: true,
        min_slack: slack,
    });
    let surjective = f.windows(2).all(|p| p[1] == p[0] || p[1] == p[0] + 1) && f[0] == 0;
    if !surjective {
        return Err(Error::WitnessViolation("f is not a weakly increasing surjection".into()));
    }
    checks.push(ClauseCheck {
        clause: "f weakly increasing onto [0, max f]".into(),
        checked: idx.len(),
        passed: true,
        min_slack: 0.0,
    });

    let block = (0..anchors.len())
        .map(|m| f.iter().filter(|&&x| x == m).count())
        .max()
        .unwrap_or(1);
    let growth = growth_constants(&vals, &c, block)?;
    checks.push(ClauseCheck {
        clause: "a_n / a_m >= delta * b^(n-m) for all m < n with a_m > 0".into(),
        checked: growth.pairs_checked,
        passed: true,
        min_slack: 0.0,
    });

    Ok(GeometricWitness {
        model: model.label(),
        r: ratio_str(&r),
        r_f64: ratio_f64(&r),
        anchors: anchors.iter().map(|&i| idx[i]).collect(),
        lambda: lambda.iter().map(|l| l.mid_f64()).collect(),
        c: ratio_str(&c),
        c_f64: ratio_f64(&c),
        theta_bound: ratio_str(&theta_bound),
        theta_bound_f64: ratio_f64(&theta_bound),
        theta_max,
        f,
        theta,
        growth,
        checks,
        first_index: start,
        window_len: idx.len(),
    })
}

/// `b` is the largest grid point below `c^{1/κ}` (κ the largest block), `δ`
/// the exact minimum of `a_n / (a_m b^{n−m})` over the window.
pub fn growth_constants(vals: &[BigRational], c: &BigRational, block: usize) -> Result<GrowthConstants> {
    let target = ratio_f64(c).powf(1.0 / block.max(1) as f64);
    let mut b: Option<BigRational> = None;
    for den in [100i64, 10_000, 1_000_000] {
        let num = (target * den as f64).floor() as i64;
        let cand = BigRational::new(num.into(), den.into());
        // step below the float estimate if it overshoots c^{1/κ}
        let cand = if num_traits::pow(cand.clone(), block.max(1)) > *c {
            BigRational::new((num - 1).into(), den.into())
        } else {
            cand
        };
        if cand > BigRational::one() {
            b = Some(cand);
            break;
        }
    }
    let b = b.ok_or_else(|| Error::Invalid("growth base would not exceed 1".into()))?;
    let n = vals.len();
    let mut powers = vec![BigRational::one()];
    for k in 1..n {
        let next = &powers[k - 1] * &b;
        powers.push(next);
    }
    let mut delta: Option<BigRational> = None;
    let mut pairs = 0;
    for m in 0..n {
        if !vals[m].is_positive() {
            continue;
        }
        for k in m + 1..n {
            pairs += 1;
            let q = &vals[k] / (&vals[m] * &powers[k - m]);
            if delta.as_ref().is_none_or(|d| q < *d) {
                delta = Some(q);
            }
        }
    }
    let delta = delta.unwrap_or_else(BigRational::one);
    Ok(GrowthConstants {
        delta: ratio_str(&delta),
        delta_f64: ratio_f64(&delta),
        b: ratio_str(&b),
        b_f64: ratio_f64(&b),
        pairs_checked: pairs,
    })
}
