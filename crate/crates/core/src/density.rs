//! Counting function, lower asymptotic density and upper Banach density
//! estimates on geometric ladders, logarithmic growth, and the δ-sparse probe.

use num_bigint::BigInt;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequences::SequenceWindow;
use crate::sumset::{self, CosetMode, CosetSearch, EngineConfig, SumsetImage};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub n: u64,
    pub count: u64,
    /// `count / n`, exact
    pub density: Ratio<u64>,
}

impl DensityPoint {
    pub fn value(&self) -> f64 {
        *self.density.numer() as f64 / *self.density.denom() as f64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerDensity {
    pub ladder: Vec<DensityPoint>,
    pub estimate: Ratio<u64>,
    pub argmin: u64,
    pub n_range: (u64, u64),
}

impl LowerDensity {
    pub fn value(&self) -> f64 {
        *self.estimate.numer() as f64 / *self.estimate.denom() as f64
    }

    pub fn at(&self, n: u64) -> Option<&DensityPoint> {
        self.ladder.iter().find(|p| p.n == n)
    }
}

/// `n_min, 2 n_min, 4 n_min, …` up to `n_max`, always ending at `n_max`.
pub fn ladder(n_min: u64, n_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = n_min.max(1);
    while n < n_max {
        out.push(n);
        n = n.saturating_mul(2);
    }
    out.push(n_max.max(1));
    out
}

/// Minimum of `count(n)/n` over the ladder; ties go to the smaller `n`.
pub fn ladder_min(count: impl Fn(u64) -> u64, n_min: u64, n_max: u64) -> LowerDensity {
    let pts: Vec<DensityPoint> = ladder(n_min, n_max)
        .into_iter()
        .map(|n| {
            let c = count(n);
            DensityPoint { n, count: c, density: Ratio::new(c, n) }
        })
        .collect();
    let best = pts.iter().min_by(|a, b| a.density.cmp(&b.density).then(a.n.cmp(&b.n))).unwrap();
    LowerDensity { estimate: best.density, argmin: best.n, n_range: (n_min.max(1), n_max.max(1)), ladder: pts.clone() }
}

/// `|w ∩ [1, n]|`.
pub fn counting(w: &SequenceWindow, n: u64) -> Result<u64> {
    w.ensure_covers(&BigInt::from(n))?;
    Ok(count_small(w, n))
}

fn count_small(w: &SequenceWindow, n: u64) -> u64 {
    let s = w.small();
    let hi = s.partition_point(|&x| x <= n);
    let lo = s.partition_point(|&x| x < 1);
    (hi - lo) as u64
}

pub fn lower_density_estimate(w: &SequenceWindow, n_min: u64, n_max: u64) -> Result<LowerDensity> {
    if n_min == 0 || n_min > n_max {
        return Err(Error::Invalid(format!("bad range [{n_min}, {n_max}]")));
    }
    w.ensure_covers(&BigInt::from(n_max))?;
    Ok(ladder_min(|n| count_small(w, n), n_min, n_max))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BanachPoint {
    pub length: u64,
    pub max_count: u64,
    pub density: Ratio<u64>,
    /// left end `m` of the best window `(m, m + length]`
    pub placement: u64,
}

impl BanachPoint {
    pub fn value(&self) -> f64 {
        *self.density.numer() as f64 / *self.density.denom() as f64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BanachLadder {
    pub points: Vec<BanachPoint>,
    /// the window was complete only up to this point
    pub coverage: u64,
    pub clamped: Option<String>,
}

impl BanachLadder {
    pub fn last(&self) -> &BanachPoint {
        self.points.last().expect("ladder is never empty")
    }
}

fn coverage_u64(w: &SequenceWindow) -> u64 {
    match w.coverage_bound() {
        Some(b) => b.try_into().unwrap_or(u64::MAX),
        None => w.small().last().copied().unwrap_or(0),
    }
}

/// Max over placements of `|A ∩ (m, m+ℓ]| / ℓ` for `ℓ = 1, 2, 4, …, L`.
pub fn banach_density_estimate(w: &SequenceWindow, max_len: u64) -> BanachLadder {
    let cov = coverage_u64(w);
    let s: Vec<u64> = w.small().iter().copied().filter(|&x| x >= 1 && x <= cov).collect();
    let mut clamped = None;
    let mut l_max = max_len.max(1);
    if l_max > cov.max(1) {
        clamped = Some(format!("window length {l_max} clamped to coverage {}", cov.max(1)));
        l_max = cov.max(1);
    }
    let points = ladder(1, l_max)
        .into_iter()
        .map(|l| {
            let (mut best, mut at) = (0u64, 0u64);
            for &e in &s {
                // window (m, m+l] opening just before e, unless it would run past coverage
                let m = (e - 1).min(cov.saturating_sub(l));
                let c = (s.partition_point(|&x| x <= m + l) - s.partition_point(|&x| x <= m)) as u64;
                if c > best {
                    best = c;
                    at = m;
                }
            }
            BanachPoint { length: l, max_count: best, density: Ratio::new(best, l), placement: at }
        })
        .collect();
    BanachLadder { points, coverage: cov, clamped }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogGrowth {
    pub sup: f64,
    pub argsup: u64,
    /// `(10^j, sup over [n_min, 10^j])` for each decade inside the range
    pub decade_sups: Vec<(u64, f64)>,
}

/// `sup A(n)/ln n` over `n_min ≤ n ≤ n_max`; the supremum is attained at
/// `n_min` or at an element, so only those points are evaluated.
pub fn log_growth_ratio(w: &SequenceWindow, n_min: u64, n_max: u64) -> Result<LogGrowth> {
    if n_min < 2 {
        return Err(Error::Invalid("log growth needs n_min ≥ 2".into()));
    }
    w.ensure_covers(&BigInt::from(n_max))?;
    let mut cands: Vec<u64> = vec![n_min];
    cands.extend(w.small().iter().copied().filter(|&a| a >= n_min && a <= n_max));
    cands.sort_unstable();
    cands.dedup();
    let val = |n: u64| count_small(w, n) as f64 / (n as f64).ln();
    let mut sup = f64::MIN;
    let mut argsup = n_min;
    let mut decade_sups = Vec::new();
    let mut next_decade = {
        let mut d = 10u64;
        while d < n_min {
            d *= 10;
        }
        d
    };
    for &n in &cands {
        while n > next_decade && next_decade <= n_max {
            decade_sups.push((next_decade, sup));
            next_decade *= 10;
        }
        let v = val(n);
        if v > sup {
            sup = v;
            argsup = n;
        }
    }
    while next_decade <= n_max {
        decade_sups.push((next_decade, sup));
        next_decade *= 10;
    }
    Ok(LogGrowth { sup, argsup, decade_sups })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaEvidence {
    pub n: usize,
    pub bound: i64,
    pub lower_density: LowerDensity,
    pub progression: CosetSearch,
}

/// For each `k ≤ max_n`: density of `Σ_k(A) ∩ [1, B]` and any one-sided
/// progression found in it.
pub fn delta_sparse_probe(
    w: &SequenceWindow,
    max_n: usize,
    bound: i64,
    max_modulus: i64,
    margin: i64,
    cfg: &EngineConfig,
) -> Result<Vec<DeltaEvidence>> {
    let base = sumset::unsigned_image(w, bound);
    let mut out = Vec::new();
    for k in 1..=max_n {
        let img = sumset::sigma(&base, k, cfg)?;
        let lower_density = image_lower_density(&img, (bound as u64 / 1024).max(1), bound as u64);
        let progression = sumset::detect_coset(&img, max_modulus, margin, CosetMode::OneSidedProgression);
        out.push(DeltaEvidence { n: k, bound, lower_density, progression });
    }
    Ok(out)
}

/// Ladder estimate of the lower density of `img ∩ ℕ`.
pub fn image_lower_density(img: &SumsetImage, n_min: u64, n_max: u64) -> LowerDensity {
    let pc = img.positive_prefix_counts();
    let top = pc.len() as u64 - 1;
    let n_max = n_max.min(top).max(1);
    ladder_min(|n| pc[n.min(top) as usize], n_min.min(n_max), n_max)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationCheck {
    /// `X ∩ ℕ`
    pub base: LowerDensity,
    /// `(X + F) ∩ ℕ`
    pub perturbed: LowerDensity,
    pub t: usize,
    pub s: i64,
    pub checked_up_to: i64,
    /// scales `n` where `C(n) > B(n+s)·t`, with `C = ((X∩ℕ) + F) ∩ ℕ`
    pub violations: Vec<i64>,
}

/// Densities of `X ∩ ℕ` and `(X+F) ∩ ℕ` side by side, with the counting
/// inequality `C(n) ≤ B(n+s)·t` checked at every `n` in range. `B(m)` counts
/// `X ∩ [0, m]`, so `0 ∈ X` is accounted for.
pub fn perturbation_density_check(x: &SumsetImage, f: &[i64], bound: i64) -> PerturbationCheck {
    let mut fs = f.to_vec();
    fs.sort_unstable();
    fs.dedup();
    let t = fs.len();
    let s = fs.iter().map(|v| v.abs()).max().unwrap_or(0);
    let b = bound.min(x.bound);
    let top = (b - s).max(1);
    let members = x.to_vec();
    let mut in_x = vec![false; (b + 1) as usize];
    for &v in &members {
        if (0..=b).contains(&v) {
            in_x[v as usize] = true;
        }
    }
    let mut in_d = vec![false; (top + 1) as usize];
    let mut in_c = vec![false; (top + 1) as usize];
    for &v in &members {
        for &g in &fs {
            let y = v + g;
            if (1..=top).contains(&y) {
                in_d[y as usize] = true;
                if v >= 0 {
                    in_c[y as usize] = true;
                }
            }
        }
    }
    let prefix = |v: &[bool]| {
        let mut c = vec![0u64; v.len()];
        let mut acc = 0;
        for (i, &b) in v.iter().enumerate() {
            if i > 0 && b {
                acc += 1;
            }
            c[i] = acc;
        }
        c
    };
    let px = prefix(&in_x);
    let pd = prefix(&in_d);
    let pc = prefix(&in_c);
    let zero = u64::from(in_x[0]);
    let mut violations = Vec::new();
    for n in 1..=top {
        let bn = px[((n + s).min(b)) as usize] + zero;
        if pc[n as usize] > bn * t as u64 {
            violations.push(n);
        }
    }
    let lo = ((top as u64) / 1024).max(1);
    PerturbationCheck {
        base: ladder_min(|n| px[n as usize], lo, top as u64),
        perturbed: ladder_min(|n| pd[n as usize], lo, top as u64),
        t,
        s,
        checked_up_to: top,
        violations,
    }
}
