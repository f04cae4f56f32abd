//! Property reports: every probe run against one sequence, refutations
//! propagated along the known implications between the properties, and a
//! consistency check over the result.
//!
//! Verdicts are three-valued. A finite window can exhibit a witness against a
//! limit property, or evidence for one, but never a proof of absence, so every
//! `no_counterexample` carries the bounds it searched.
//!
//! Refuting witnesses from bounded sumset images must persist when the bound
//! grows by `confirm_factor`: small sumsets of slowly growing sets cover long
//! initial intervals without having positive density.

use std::cell::OnceCell;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::density::{self, LogGrowth};
use crate::error::{Error, Result};
use crate::geometry::{self, DiscretenessReport, GeometricWitness, LambdaModel, ModelKind};
use crate::progressions::{self, APWitness, IntSet, OrderPropertyWitness, OrderRoute};
use crate::sequences::{self, SequenceSpec, SequenceWindow};
use crate::sumset::{self, CosetMode, CosetWitness, Engine, EngineConfig, Representation, SumsetImage};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    /// sumset images are computed over `[−B, B]`
    pub bound: i64,
    /// refuting witnesses are re-checked at `confirm_factor · B`
    pub confirm_factor: i64,
    /// `Σ_n` for `n ≤ max_sum`
    pub max_sum: usize,
    pub max_modulus: i64,
    pub margin: i64,
    pub engine: Engine,
    /// longest window in the Banach ladder
    pub banach_max_len: u64,
    pub ap_min_length: usize,
    /// progressions (and intervals) at least this long are candidates for refutation
    pub ap_refute_length: usize,
    /// signed representations searched by index instead of by value
    pub signed_terms: usize,
    pub index_bounds: [usize; 2],
    pub log_growth_range: [u64; 2],
    /// growth of `sup A(n)/ln n` over the top three decades that refutes `O(log n)`
    pub log_growth_factor: f64,
    pub geometry_window: usize,
    pub discreteness_depths: Vec<usize>,
    pub discreteness_threshold: String,
    pub precision_cap: u32,
    pub order_k: usize,
    pub order_value_bound: i64,
    pub order_node_budget: u64,
    /// record wall-clock timings (makes the output nondeterministic)
    pub timings: bool,
    /// in a suite, entries that fail to load make the exit code nonzero
    pub strict: bool,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            bound: 10_000,
            confirm_factor: 10,
            max_sum: 4,
            max_modulus: 50,
            margin: 20,
            engine: Engine::Auto,
            banach_max_len: 1024,
            ap_min_length: 3,
            ap_refute_length: 64,
            signed_terms: 3,
            index_bounds: [128, 256],
            log_growth_range: [10, 1_000_000],
            log_growth_factor: 3.0,
            geometry_window: 60,
            discreteness_depths: vec![20, 40, 60],
            discreteness_threshold: "8".into(),
            precision_cap: crate::recurrence::DEFAULT_PRECISION_CAP,
            order_k: 3,
            order_value_bound: 1000,
            order_node_budget: 1_000_000,
            timings: false,
            strict: false,
        }
    }
}

impl ReportConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ReportConfig = toml::from_str(text).map_err(|e| Error::Invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Invalid(format!("config: {m}")));
        if self.bound < 16 {
            return bad("bound must be at least 16");
        }
        if self.confirm_factor < 2 {
            return bad("confirm_factor must be at least 2");
        }
        if self.max_sum == 0 || self.max_sum > 16 {
            return bad("max_sum must be in 1..=16");
        }
        if self.max_modulus < 1 || self.margin < 1 {
            return bad("max_modulus and margin must be positive");
        }
        if self.signed_terms == 0 || self.index_bounds[0] < 2 || self.index_bounds[0] >= self.index_bounds[1] {
            return bad("need signed_terms ≥ 1 and 2 ≤ index_bounds[0] < index_bounds[1]");
        }
        if self.log_growth_range[0] < 2 || self.log_growth_range[0] >= self.log_growth_range[1] {
            return bad("log_growth_range must satisfy 2 ≤ lo < hi");
        }
        if self.log_growth_factor <= 1.0 {
            return bad("log_growth_factor must exceed 1");
        }
        if self.geometry_window < 2 || self.discreteness_depths.is_empty() {
            return bad("geometry_window ≥ 2 and at least one discreteness depth required");
        }
        if self.discreteness_threshold.parse::<BigRational>().is_err() {
            return bad("discreteness_threshold must be a rational such as \"8\" or \"5/2\"");
        }
        if self.order_k < 2 || self.order_value_bound < 1 {
            return bad("order_k ≥ 2 and order_value_bound ≥ 1 required");
        }
        if self.ap_min_length < 2 || self.ap_refute_length < self.ap_min_length {
            return bad("need 2 ≤ ap_min_length ≤ ap_refute_length");
        }
        Ok(())
    }

    fn engine_config(&self) -> EngineConfig {
        EngineConfig { engine: self.engine, ..EngineConfig::default() }
    }

    fn confirm_bound(&self) -> i64 {
        self.bound.saturating_mul(self.confirm_factor)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    SufficientlySparse,
    DeltaSparse,
    #[serde(rename = "delta_b_sparse")]
    BanachSparse,
    ApSparse,
    #[serde(rename = "ap_star_sparse")]
    ApStarSparse,
    GeometricallySparse,
    Raab,
    OrderProperty,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::SufficientlySparse,
        Property::DeltaSparse,
        Property::BanachSparse,
        Property::ApSparse,
        Property::ApStarSparse,
        Property::GeometricallySparse,
        Property::Raab,
        Property::OrderProperty,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::SufficientlySparse => "sufficiently_sparse",
            Property::DeltaSparse => "delta_sparse",
            Property::BanachSparse => "delta_b_sparse",
            Property::ApSparse => "ap_sparse",
            Property::ApStarSparse => "ap_star_sparse",
            Property::GeometricallySparse => "geometrically_sparse",
            Property::Raab => "raab",
            Property::OrderProperty => "order_property",
        }
    }
}

/// `(P, Q)` with `P ⇒ Q` for subsets of ℕ.
pub const IMPLICATIONS: [(Property, Property); 6] = [
    (Property::GeometricallySparse, Property::SufficientlySparse),
    (Property::SufficientlySparse, Property::BanachSparse),
    (Property::BanachSparse, Property::DeltaSparse),
    (Property::ApSparse, Property::BanachSparse),
    (Property::ApSparse, Property::ApStarSparse),
    (Property::ApStarSparse, Property::DeltaSparse),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// a coset (or one-sided progression) inside `Σ_n(±A)` or `Σ_n(A)`,
    /// found at `bound` and re-verified at `confirm_bound`
    Coset { n: usize, signed: bool, bound: i64, coset: CosetWitness, confirm_bound: i64, confirmed: CosetWitness },
    /// `[−L, L] ⊆ Σ_terms(±{a_i : i < M})` with `L` growing along with `M`
    IndexScaling { terms: usize, index_bounds: [usize; 2], covered: [i64; 2], extremes: Vec<Representation> },
    /// an interval in `Σ_n(A)` whose length grows with the bound
    Interval { n: usize, bound: i64, start: i64, length: i64, confirm_bound: i64, confirm_start: i64, confirm_length: i64 },
    Progression { n: usize, bound: i64, ap: APWitness, confirm_bound: i64, confirmed: APWitness },
    LogGrowth { n_range: [u64; 2], growth: LogGrowth, ratio: f64, factor: f64 },
    Geometric { witness: Box<GeometricWitness>, discreteness: Option<DiscretenessReport> },
    OrderProperty { witness: OrderPropertyWitness, route: OrderRoute, value_bound: i64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    WitnessRefuted {
        witness: Witness,
        #[serde(skip_serializing_if = "Option::is_none")]
        derived_from: Option<Property>,
    },
    NoCounterexample {
        bounds: Value,
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    },
    WitnessSupported {
        witness: Witness,
        #[serde(skip_serializing_if = "Option::is_none")]
        derived_from: Option<Property>,
    },
}

impl Verdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::WitnessRefuted { .. })
    }

    pub fn is_supported(&self) -> bool {
        matches!(self, Verdict::WitnessSupported { .. })
    }

    pub fn is_open(&self) -> bool {
        matches!(self, Verdict::NoCounterexample { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::WitnessRefuted { .. } => "witness_refuted",
            Verdict::NoCounterexample { .. } => "no_counterexample",
            Verdict::WitnessSupported { .. } => "witness_supported",
        }
    }

    fn own_witness(&self) -> Option<&Witness> {
        match self {
            Verdict::WitnessRefuted { witness, derived_from: None }
            | Verdict::WitnessSupported { witness, derived_from: None } => Some(witness),
            _ => None,
        }
    }

    fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::WitnessRefuted { witness, .. } | Verdict::WitnessSupported { witness, .. } => Some(witness),
            Verdict::NoCounterexample { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyEntry {
    pub property: Property,
    #[serde(flatten)]
    pub verdict: Verdict,
    /// what the probe saw, whatever the verdict
    pub evidence: Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `P ⇒ Q`, yet `P` is supported while `Q` is refuted
    Implication,
    /// RAAB supported without δ refuted, or the reverse
    Equivalence,
    /// an embedded witness failed its re-check
    UnsoundWitness,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EngineInfo {
    pub name: &'static str,
    pub version: &'static str,
}

pub const ENGINE: EngineInfo = EngineInfo { name: "sparsity-core", version: env!("CARGO_PKG_VERSION") };

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RuntimeStats {
    pub total_ms: u128,
    pub per_property_ms: Vec<(Property, u128)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SequenceInfo {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<SequenceSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub schema_version: u32,
    pub engine: EngineInfo,
    pub sequence: SequenceInfo,
    pub config: ReportConfig,
    pub properties: Vec<PropertyEntry>,
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime: Option<RuntimeStats>,
}

impl PropertyReport {
    pub fn get(&self, p: Property) -> &PropertyEntry {
        self.properties.iter().find(|e| e.property == p).expect("every property is reported")
    }

    pub fn verdict(&self, p: Property) -> &Verdict {
        &self.get(p).verdict
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Where the values come from: a generator (windows are produced at whatever
/// bound a probe needs) or a fixed window read from a file.
#[derive(Clone, Debug)]
pub enum SequenceSource {
    Spec { label: String, spec: SequenceSpec },
    Window { label: String, file: Option<PathBuf>, window: SequenceWindow },
}

impl SequenceSource {
    pub fn builtin(name: &str) -> Result<Self> {
        let spec = sequences::builtin(name).ok_or_else(|| Error::InvalidSpec(format!("unknown builtin {name:?}")))?;
        Ok(SequenceSource::Spec { label: name.into(), spec })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let spec: SequenceSpec = text.parse()?;
        spec.validate()?;
        Ok(SequenceSource::Spec { label: text.into(), spec })
    }

    pub fn file(path: &Path, positive_only: bool) -> Result<Self> {
        let window = sequences::ingest_path(path, positive_only)?;
        Ok(SequenceSource::Window { label: path.display().to_string(), file: Some(path.into()), window })
    }

    pub fn label(&self) -> &str {
        match self {
            SequenceSource::Spec { label, .. } | SequenceSource::Window { label, .. } => label,
        }
    }

    /// Elements `≤ b` (complete up to `b` for generators).
    pub fn up_to(&self, b: i64) -> Result<SequenceWindow> {
        match self {
            SequenceSource::Spec { spec, .. } => sequences::generate_up_to(spec, &BigInt::from(b)),
            SequenceSource::Window { window, .. } => Ok(window.clone()),
        }
    }

    /// The first `n` elements.
    pub fn first(&self, n: usize) -> Result<SequenceWindow> {
        match self {
            SequenceSource::Spec { spec, .. } => sequences::generate(spec, n),
            SequenceSource::Window { window, .. } => Ok(window.prefix(n.min(window.len()))),
        }
    }

    fn info(&self) -> SequenceInfo {
        match self {
            SequenceSource::Spec { label, spec } => SequenceInfo { label: label.clone(), spec: Some(spec.clone()), file: None },
            SequenceSource::Window { label, file, .. } => SequenceInfo {
                label: label.clone(),
                spec: None,
                file: file.as_ref().map(|f| f.display().to_string()),
            },
        }
    }
}

// ---------------------------------------------------------------------------
// shared images

struct Images {
    signed: Vec<SumsetImage>,
    unsigned: Vec<SumsetImage>,
}

impl Images {
    fn build(w: &SequenceWindow, bound: i64, max_sum: usize, cfg: &EngineConfig) -> Result<Self> {
        let s = sumset::signed_closure(w, bound);
        let u = sumset::unsigned_image(w, bound);
        let mut signed = Vec::with_capacity(max_sum);
        let mut unsigned = Vec::with_capacity(max_sum);
        for n in 1..=max_sum {
            signed.push(sumset::sigma(&s, n, cfg)?);
            unsigned.push(sumset::sigma(&u, n, cfg)?);
        }
        Ok(Images { signed, unsigned })
    }

    fn get(&self, n: usize, signed: bool) -> &SumsetImage {
        if signed {
            &self.signed[n - 1]
        } else {
            &self.unsigned[n - 1]
        }
    }
}

fn slack(img: &SumsetImage) -> i64 {
    img.provenance.terms() as i64 * img.provenance.min_abs_generator
}

fn nonneg_members(img: &SumsetImage) -> Vec<i64> {
    img.to_vec().into_iter().filter(|&x| x >= 0).collect()
}

/// Longest run of consecutive members inside `[0, B]`: `(start, length)`.
fn longest_run(img: &SumsetImage) -> (i64, i64) {
    let (mut best, mut cur) = ((0, 0), (0, 0));
    let mut prev = None;
    for v in nonneg_members(img) {
        if prev == Some(v - 1) {
            cur.1 += 1;
        } else {
            cur = (v, 1);
        }
        if cur.1 > best.1 {
            best = cur;
        }
        prev = Some(v);
    }
    best
}

/// Stretches a coset witness to the full range of a larger image.
fn extend_coset(w: &CosetWitness, img: &SumsetImage) -> CosetWitness {
    let hi = img.bound - slack(img);
    let lo = match w.mode {
        CosetMode::FullCoset => -img.bound + slack(img),
        CosetMode::OneSidedProgression => w.verified_range.0,
    };
    CosetWitness { verified_range: (lo, hi), ..w.clone() }
}

/// Tail of `m ℕ + r` inside the image, accepted under the same rule as the
/// one-sided detector: it covers at least half of `[0, B − slack]`.
fn progression_tail(img: &SumsetImage, m: i64, r: i64) -> Option<CosetWitness> {
    let hi = img.bound - slack(img);
    if hi < 1 {
        return None;
    }
    let top = hi - (hi - r).rem_euclid(m);
    let mut start = None;
    let mut v = top;
    while v >= 0 && img.contains(v) {
        start = Some(v);
        v -= m;
    }
    let start = start?;
    let hi = top;
    (2 * (hi - start) >= hi).then(|| CosetWitness {
        modulus: m,
        residue: r.rem_euclid(m),
        verified_range: (start, hi),
        mode: CosetMode::OneSidedProgression,
    })
}

/// `L` with `[−L, L] ⊆ Σ_terms(±{a_i : i < M})`, capped.
fn symmetric_coverage(w: &SequenceWindow, terms: usize, index_bound: usize, cap: i64) -> i64 {
    let img = sumset::realize_sigma(w, terms, true, cap, index_bound);
    let mut l = 0;
    while l < cap && img.contains(l + 1) && img.contains(-(l + 1)) {
        l += 1;
    }
    if img.contains(0) {
        l
    } else {
        -1
    }
}

struct Ctx<'a> {
    src: &'a SequenceSource,
    cfg: &'a ReportConfig,
    ecfg: EngineConfig,
    base: Result<SequenceWindow>,
    images: OnceCell<Result<Images>>,
    confirm: OnceCell<Result<Images>>,
}

impl<'a> Ctx<'a> {
    fn new(src: &'a SequenceSource, cfg: &'a ReportConfig) -> Self {
        Ctx {
            src,
            cfg,
            ecfg: cfg.engine_config(),
            base: src.up_to(cfg.bound),
            images: OnceCell::new(),
            confirm: OnceCell::new(),
        }
    }

    fn base(&self) -> Result<&SequenceWindow> {
        self.base.as_ref().map_err(Clone::clone)
    }

    fn images(&self) -> Result<&Images> {
        self.images
            .get_or_init(|| Images::build(self.base()?, self.cfg.bound, self.cfg.max_sum, &self.ecfg))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn confirm_images(&self) -> Result<&Images> {
        self.confirm
            .get_or_init(|| {
                let b = self.cfg.confirm_bound();
                Images::build(&self.src.up_to(b)?, b, self.cfg.max_sum, &self.ecfg)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn sumset_bounds(&self) -> Value {
        json!({
            "bound": self.cfg.bound,
            "confirm_bound": self.cfg.confirm_bound(),
            "max_sum": self.cfg.max_sum,
            "max_modulus": self.cfg.max_modulus,
            "margin": self.cfg.margin,
        })
    }
}

struct Probe {
    verdict: Verdict,
    evidence: Value,
}

fn open(bounds: Value, evidence: Value) -> Probe {
    Probe { verdict: Verdict::NoCounterexample { bounds, error: None }, evidence }
}

fn refuted(witness: Witness, evidence: Value) -> Probe {
    Probe { verdict: Verdict::WitnessRefuted { witness, derived_from: None }, evidence }
}

fn supported(witness: Witness, evidence: Value) -> Probe {
    Probe { verdict: Verdict::WitnessSupported { witness, derived_from: None }, evidence }
}

fn errored(bounds: Value, e: Error) -> Probe {
    Probe { verdict: Verdict::NoCounterexample { bounds, error: Some(e.to_string()) }, evidence: Value::Null }
}

fn density_f64(img: &SumsetImage) -> f64 {
    img.count_positive_upto(img.bound) as f64 / img.bound as f64
}

// ---------------------------------------------------------------------------
// probes

fn probe_sufficient(ctx: &Ctx) -> Result<Probe> {
    let cfg = ctx.cfg;
    let imgs = ctx.images()?;
    let mut per_n = Vec::new();
    for n in 1..=cfg.max_sum {
        let img = imgs.get(n, true);
        let found = sumset::detect_coset(img, cfg.max_modulus, cfg.margin, CosetMode::FullCoset);
        if let Some(c) = &found.witness {
            let big = ctx.confirm_images()?.get(n, true);
            let ext = extend_coset(c, big);
            if sumset::verify_coset(big, &ext) {
                let w = Witness::Coset {
                    n,
                    signed: true,
                    bound: cfg.bound,
                    coset: c.clone(),
                    confirm_bound: cfg.confirm_bound(),
                    confirmed: ext,
                };
                return Ok(refuted(w, json!({ "route": "dense" })));
            }
        }
        per_n.push(json!({
            "n": n,
            "density": density_f64(img),
            "unconfirmed_candidate": found.witness,
            "effective_max_modulus": found.max_modulus,
        }));
    }

    let [m1, m2] = cfg.index_bounds;
    let t = cfg.signed_terms;
    let cap = 2 * m2 as i64;
    let w = ctx.src.first(m2)?;
    let l1 = symmetric_coverage(&w, t, m1, cap);
    let l2 = symmetric_coverage(&w, t, m2, cap);
    let scaling = json!({ "terms": t, "index_bounds": [m1, m2], "covered": [l1, l2], "cap": cap });
    let grows = l1 >= (m1 / 2) as i64 && l2 < cap && (l2 - l1) >= ((m2 - m1) / 2) as i64;
    if grows && w.len() >= m2 {
        let extremes: Vec<Representation> = [l2, -l2]
            .iter()
            .filter_map(|&v| sumset::sparse_membership(&w, &BigInt::from(v), t, true, m2))
            .collect();
        let wit = Witness::IndexScaling { terms: t, index_bounds: [m1, m2], covered: [l1, l2], extremes };
        return Ok(refuted(wit, json!({ "route": "index_scaling", "per_n": per_n })));
    }
    let mut bounds = ctx.sumset_bounds();
    bounds["index_scaling"] = scaling;
    Ok(open(bounds, json!({ "per_n": per_n })))
}

fn probe_delta(ctx: &Ctx) -> Result<Probe> {
    let cfg = ctx.cfg;
    let imgs = ctx.images()?;
    let mut per_n = Vec::new();
    for n in 1..=cfg.max_sum {
        let img = imgs.get(n, false);
        let ld = density::image_lower_density(img, (cfg.bound as u64 / 1024).max(1), cfg.bound as u64);
        let found = sumset::detect_coset(img, cfg.max_modulus, cfg.margin, CosetMode::OneSidedProgression);
        if let Some(c) = &found.witness {
            let big = ctx.confirm_images()?.get(n, false);
            let ext = extend_coset(c, big);
            if sumset::verify_coset(big, &ext) {
                let w = Witness::Coset {
                    n,
                    signed: false,
                    bound: cfg.bound,
                    coset: c.clone(),
                    confirm_bound: cfg.confirm_bound(),
                    confirmed: ext,
                };
                return Ok(refuted(w, json!({ "lower_density": ld.value(), "argmin": ld.argmin })));
            }
        }
        per_n.push(json!({
            "n": n,
            "lower_density": ld.value(),
            "argmin": ld.argmin,
            "unconfirmed_candidate": found.witness,
        }));
    }
    Ok(open(ctx.sumset_bounds(), json!({ "per_n": per_n })))
}

fn probe_raab(ctx: &Ctx) -> Result<Probe> {
    let cfg = ctx.cfg;
    let base = ctx.base()?;
    let g = base
        .values
        .iter()
        .filter_map(|v| v.to_i64())
        .filter(|&v| v > 0 && v <= cfg.bound)
        .fold(0i64, |acc, v| acc.gcd(&v));
    if g == 0 {
        return Ok(open(ctx.sumset_bounds(), json!({ "gcd": null, "note": "no positive element up to the bound" })));
    }
    let imgs = ctx.images()?;
    for n in 1..=cfg.max_sum {
        if let Some(c) = progression_tail(imgs.get(n, false), g, 0) {
            let big = ctx.confirm_images()?.get(n, false);
            let ext = extend_coset(&c, big);
            if sumset::verify_coset(big, &ext) {
                let w = Witness::Coset {
                    n,
                    signed: false,
                    bound: cfg.bound,
                    coset: c,
                    confirm_bound: cfg.confirm_bound(),
                    confirmed: ext,
                };
                return Ok(supported(w, json!({ "gcd": g })));
            }
        }
    }
    Ok(open(ctx.sumset_bounds(), json!({ "gcd": g })))
}

fn probe_banach(ctx: &Ctx) -> Result<Probe> {
    let cfg = ctx.cfg;
    let imgs = ctx.images()?;
    let mut per_n = Vec::new();
    let min_len = cfg.ap_refute_length as i64;
    for n in 1..=cfg.max_sum {
        let img = imgs.get(n, false);
        let pos: Vec<BigInt> = nonneg_members(img).into_iter().filter(|&x| x >= 1).map(BigInt::from).collect();
        let win = SequenceWindow::complete_up_to(pos, BigInt::from(cfg.bound));
        let ladder = density::banach_density_estimate(&win, cfg.banach_max_len);
        let last = ladder.last();
        let (start, length) = longest_run(img);
        if length >= min_len {
            let big = ctx.confirm_images()?.get(n, false);
            let (cs, cl) = longest_run(big);
            if 2 * cl >= cfg.confirm_factor * length {
                let w = Witness::Interval {
                    n,
                    bound: cfg.bound,
                    start,
                    length,
                    confirm_bound: cfg.confirm_bound(),
                    confirm_start: cs,
                    confirm_length: cl,
                };
                return Ok(refuted(w, json!({ "banach_at_max_len": last.value() })));
            }
        }
        per_n.push(json!({
            "n": n,
            "window_length": last.length,
            "banach_density": last.value(),
            "longest_interval": [start, length],
        }));
    }
    let mut bounds = ctx.sumset_bounds();
    bounds["banach_max_len"] = json!(cfg.banach_max_len);
    bounds["interval_length_threshold"] = json!(min_len);
    Ok(open(bounds, json!({ "per_n": per_n })))
}

fn probe_progressions(ctx: &Ctx, strong: bool) -> Result<Probe> {
    let cfg = ctx.cfg;
    let imgs = ctx.images()?;
    let find = |vals: &[i64], min: usize| {
        if strong {
            progressions::longest_strong_ap(vals, min)
        } else {
            progressions::longest_ap(vals, min)
        }
    };
    let mut per_n = Vec::new();
    for n in 1..=cfg.max_sum {
        let members = nonneg_members(imgs.get(n, false));
        let mut trend = Vec::new();
        for b in [cfg.bound / 4, cfg.bound / 2, cfg.bound] {
            let part: Vec<i64> = members.iter().copied().take_while(|&x| x <= b).collect();
            trend.push((b, find(&part, 2).map_or(0, |w| w.length)));
        }
        let longest = find(&members, cfg.ap_min_length);
        if let Some(ap) = longest.filter(|w| w.length >= cfg.ap_refute_length) {
            let big = nonneg_members(ctx.confirm_images()?.get(n, false));
            let need = (ap.length * cfg.confirm_factor as usize).div_ceil(2);
            if let Some(c) = find(&big, need) {
                let w = Witness::Progression { n, bound: cfg.bound, ap, confirm_bound: cfg.confirm_bound(), confirmed: c };
                return Ok(refuted(w, json!({ "trend": trend })));
            }
        }
        per_n.push(json!({ "n": n, "longest": longest, "trend": trend }));
    }
    let mut bounds = ctx.sumset_bounds();
    bounds["min_length"] = json!(cfg.ap_min_length);
    bounds["refute_length"] = json!(cfg.ap_refute_length);
    Ok(open(bounds, json!({ "per_n": per_n })))
}

fn log_growth_witness(ctx: &Ctx) -> Result<(LogGrowth, f64)> {
    let [lo, hi] = ctx.cfg.log_growth_range;
    let w = ctx.src.up_to(hi.min(i64::MAX as u64) as i64)?;
    let g = density::log_growth_ratio(&w, lo, hi)?;
    // sup at the top against the sup three decades lower (or at the first decade)
    let sups = &g.decade_sups;
    let ratio = match sups.len() {
        0 | 1 => 1.0,
        k => sups[k - 1].1 / sups[k.saturating_sub(4)].1,
    };
    Ok((g, ratio))
}

fn probe_geometric(ctx: &Ctx) -> Result<Probe> {
    let cfg = ctx.cfg;
    let mut evidence = json!({});
    match log_growth_witness(ctx) {
        Ok((g, ratio)) => {
            if ratio >= cfg.log_growth_factor {
                let w = Witness::LogGrowth { n_range: cfg.log_growth_range, growth: g, ratio, factor: cfg.log_growth_factor };
                return Ok(refuted(w, json!({})));
            }
            evidence["log_growth"] = json!({ "sup": g.sup, "argsup": g.argsup, "top_decades_ratio": ratio });
        }
        Err(e) => evidence["log_growth_error"] = json!(e.to_string()),
    }
    let bounds = json!({
        "log_growth_range": cfg.log_growth_range,
        "log_growth_factor": cfg.log_growth_factor,
        "window": cfg.geometry_window,
        "discreteness_depths": cfg.discreteness_depths,
    });
    let w = ctx.src.first(cfg.geometry_window)?;
    let model = match LambdaModel::for_window_with(&w, ModelKind::Auto, cfg.precision_cap) {
        Ok(m) => m,
        Err(e) => {
            evidence["model_note"] = json!(format!("{e}; falling back to the identity model"));
            LambdaModel::Identity
        }
    };
    evidence["model"] = json!(model.label());
    let witness = match geometry::construct_witness(&w, &model, None) {
        Ok(wit) => wit,
        Err(e) => {
            evidence["witness_error"] = json!(e.to_string());
            return Ok(open(bounds, evidence));
        }
    };
    if !witness.checks.iter().all(|c| c.passed) {
        evidence["failed_checks"] = json!(witness.checks);
        return Ok(open(bounds, evidence));
    }
    let discreteness = if matches!(model, LambdaModel::Identity) {
        let b: BigRational = cfg.discreteness_threshold.parse().expect("validated");
        let start = w.values.partition_point(|v| v < &BigInt::from(1));
        let d = geometry::discreteness_proxy(&w.values[start..], &cfg.discreteness_depths, &b)?;
        if !d.stable {
            evidence["discreteness"] = serde_json::to_value(&d).unwrap_or(Value::Null);
            return Ok(open(bounds, evidence));
        }
        Some(d)
    } else {
        None
    };
    Ok(supported(Witness::Geometric { witness: Box::new(witness), discreteness }, evidence))
}

fn probe_order(ctx: &Ctx) -> Result<Probe> {
    let cfg = ctx.cfg;
    let c = cfg.order_value_bound;
    let owned;
    let w = if cfg.bound >= 2 * c {
        ctx.base()?
    } else {
        owned = ctx.src.up_to(2 * c)?;
        &owned
    };
    let r = progressions::order_property_witness(w, cfg.order_k, c, cfg.order_node_budget)?;
    match (r.witness, r.route) {
        (Some(witness), Some(route)) => Ok(supported(Witness::OrderProperty { witness, route, value_bound: c }, json!({}))),
        _ => Ok(open(json!({ "k": r.k, "search": r.bounds }), json!({}))),
    }
}

// ---------------------------------------------------------------------------
// propagation and checks

fn propagate(entries: &mut [PropertyEntry]) {
    let idx = |p: Property| Property::ALL.iter().position(|&q| q == p).unwrap();
    loop {
        let mut changed = false;
        for &(p, q) in &IMPLICATIONS {
            let (pi, qi) = (idx(p), idx(q));
            if entries[qi].verdict.is_refuted() && entries[pi].verdict.is_open() {
                let witness = entries[qi].verdict.witness().unwrap().clone();
                entries[pi].verdict = Verdict::WitnessRefuted { witness, derived_from: Some(q) };
                changed = true;
            }
        }
        let (r, d) = (idx(Property::Raab), idx(Property::DeltaSparse));
        if entries[r].verdict.is_supported() && entries[d].verdict.is_open() {
            let witness = entries[r].verdict.witness().unwrap().clone();
            entries[d].verdict = Verdict::WitnessRefuted { witness, derived_from: Some(Property::Raab) };
            changed = true;
        }
        if entries[d].verdict.is_refuted() && entries[r].verdict.is_open() {
            let witness = entries[d].verdict.witness().unwrap().clone();
            entries[r].verdict = Verdict::WitnessSupported { witness, derived_from: Some(Property::DeltaSparse) };
            changed = true;
        }
        if !changed {
            break;
        }
    }
}

/// Everything `p` implies, directly or through a chain of implications.
pub fn implied_by(p: Property) -> Vec<Property> {
    let mut seen = vec![p];
    let mut i = 0;
    while i < seen.len() {
        for &(a, b) in &IMPLICATIONS {
            if a == seen[i] && !seen.contains(&b) {
                seen.push(b);
            }
        }
        i += 1;
    }
    seen.remove(0);
    seen.sort();
    seen
}

/// Implication and equivalence conflicts among final verdicts.
pub fn consistency_violations(entries: &[PropertyEntry]) -> Vec<Violation> {
    let get = |p: Property| &entries.iter().find(|e| e.property == p).expect("all properties present").verdict;
    let mut out = Vec::new();
    for p in Property::ALL {
        if !get(p).is_supported() {
            continue;
        }
        for q in implied_by(p) {
            if get(q).is_refuted() {
                out.push(Violation {
                    kind: ViolationKind::Implication,
                    detail: format!("{} is supported but {} is refuted, and the first implies the second", p.name(), q.name()),
                });
            }
        }
    }
    let (raab, delta) = (get(Property::Raab), get(Property::DeltaSparse));
    if raab.is_supported() != delta.is_refuted() {
        out.push(Violation {
            kind: ViolationKind::Equivalence,
            detail: format!("raab is {} while delta_sparse is {}", raab.label(), delta.label()),
        });
    }
    out
}

/// Re-checks a witness from scratch against freshly generated windows.
pub fn reverify(w: &Witness, src: &SequenceSource, cfg: &ReportConfig) -> Result<bool> {
    let ecfg = cfg.engine_config();
    let image = |b: i64, n: usize, signed: bool| -> Result<SumsetImage> {
        let win = src.up_to(b)?;
        let base = if signed { sumset::signed_closure(&win, b) } else { sumset::unsigned_image(&win, b) };
        sumset::sigma(&base, n, &ecfg)
    };
    Ok(match w {
        Witness::Coset { n, signed, bound, coset, confirm_bound, confirmed } => {
            sumset::verify_coset(&image(*bound, *n, *signed)?, coset)
                && sumset::verify_coset(&image(*confirm_bound, *n, *signed)?, confirmed)
                && confirmed.modulus == coset.modulus
                && confirmed.residue == coset.residue
        }
        Witness::IndexScaling { terms, index_bounds, covered, extremes } => {
            let win = src.first(index_bounds[1])?;
            let sound = extremes.iter().all(|r| {
                r.verify(&win) && r.terms.len() <= *terms && r.terms.iter().all(|t| t.index < index_bounds[1])
            });
            let cap = 2 * index_bounds[1] as i64;
            sound
                && symmetric_coverage(&win, *terms, index_bounds[0], cap) >= covered[0]
                && symmetric_coverage(&win, *terms, index_bounds[1], cap) >= covered[1]
        }
        Witness::Interval { n, bound, start, length, confirm_bound, confirm_start, confirm_length } => {
            let a = image(*bound, *n, false)?;
            let b = image(*confirm_bound, *n, false)?;
            (*start..*start + *length).all(|v| a.contains(v))
                && (*confirm_start..*confirm_start + *confirm_length).all(|v| b.contains(v))
        }
        Witness::Progression { n, bound, ap, confirm_bound, confirmed } => {
            let a = IntSet::new(&image(*bound, *n, false)?.to_vec());
            let b = IntSet::new(&image(*confirm_bound, *n, false)?.to_vec());
            progressions::verify_ap(&a, ap) && progressions::verify_ap(&b, confirmed)
        }
        Witness::LogGrowth { n_range, growth, factor, .. } => {
            let win = src.up_to(n_range[1] as i64)?;
            let g = density::log_growth_ratio(&win, n_range[0], n_range[1])?;
            let k = g.decade_sups.len();
            k >= 2 && g == *growth && g.decade_sups[k - 1].1 >= factor * g.decade_sups[k.saturating_sub(4)].1
        }
        Witness::Geometric { witness, discreteness } => {
            let f_ok = witness.f.windows(2).all(|p| p[0] <= p[1] && p[1] <= p[0] + 1)
                && witness.f.first() == Some(&0)
                && witness.f.last().map(|&x| x + 1) == Some(witness.anchors.len());
            witness.checks.iter().all(|c| c.passed)
                && witness.theta_max <= witness.theta_bound_f64 + 1e-9
                && f_ok
                && discreteness.as_ref().is_none_or(|d| d.stable)
        }
        Witness::OrderProperty { witness, value_bound, .. } => {
            let win = src.up_to(2 * value_bound)?;
            let set = IntSet::new(&progressions::window_values(&win, 2 * value_bound)?);
            witness.verify(|v| set.contains(v))
        }
    })
}

/// Runs every probe on one sequence. Probe failures are embedded in the
/// affected verdict; only an invalid configuration is an error.
pub fn classify_sequence(src: &SequenceSource, cfg: &ReportConfig) -> Result<PropertyReport> {
    cfg.validate()?;
    let t0 = Instant::now();
    let ctx = Ctx::new(src, cfg);
    let mut timings = Vec::new();
    let mut entries = Vec::new();
    for p in Property::ALL {
        let t = Instant::now();
        let res = match p {
            Property::SufficientlySparse => probe_sufficient(&ctx),
            Property::DeltaSparse => probe_delta(&ctx),
            Property::BanachSparse => probe_banach(&ctx),
            Property::ApSparse => probe_progressions(&ctx, false),
            Property::ApStarSparse => probe_progressions(&ctx, true),
            Property::GeometricallySparse => probe_geometric(&ctx),
            Property::Raab => probe_raab(&ctx),
            Property::OrderProperty => probe_order(&ctx),
        };
        let probe = res.unwrap_or_else(|e| errored(ctx.sumset_bounds(), e));
        timings.push((p, t.elapsed().as_millis()));
        entries.push(PropertyEntry { property: p, verdict: probe.verdict, evidence: probe.evidence });
    }

    let mut violations = Vec::new();
    for e in &entries {
        if let Some(w) = e.verdict.own_witness() {
            match reverify(w, src, cfg) {
                Ok(true) => {}
                Ok(false) => violations.push(Violation {
                    kind: ViolationKind::UnsoundWitness,
                    detail: format!("{} witness failed its re-check", e.property.name()),
                }),
                Err(err) => violations.push(Violation {
                    kind: ViolationKind::UnsoundWitness,
                    detail: format!("{} witness could not be re-checked: {err}", e.property.name()),
                }),
            }
        }
    }
    propagate(&mut entries);
    violations.extend(consistency_violations(&entries));

    let runtime = cfg.timings.then(|| RuntimeStats { total_ms: t0.elapsed().as_millis(), per_property_ms: timings });
    Ok(PropertyReport {
        schema_version: SCHEMA_VERSION,
        engine: ENGINE,
        sequence: src.info(),
        config: cfg.clone(),
        properties: entries,
        violations,
        runtime,
    })
}

// ---------------------------------------------------------------------------
// suites

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub spec: Option<String>,
    #[serde(default)]
    pub file: Option<PathBuf>,
    #[serde(default = "default_true")]
    pub positive_only: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corpus {
    /// include the built-in corpus ahead of the listed entries
    #[serde(default)]
    pub builtin: bool,
    #[serde(default, rename = "sequence")]
    pub entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn builtin() -> Self {
        Corpus { builtin: true, entries: vec![] }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Invalid(format!("corpus: {e}")))
    }

    /// Relative file paths resolve against `base`.
    pub fn resolve(&self, base: Option<&Path>) -> Vec<(String, Result<SequenceSource>)> {
        let mut out: Vec<(String, Result<SequenceSource>)> = Vec::new();
        if self.builtin {
            for name in sequences::BUILTIN_CORPUS {
                out.push((name.to_string(), SequenceSource::builtin(name)));
            }
        }
        for (i, e) in self.entries.iter().enumerate() {
            let fallback = e
                .spec
                .clone()
                .or_else(|| e.file.as_ref().map(|f| f.display().to_string()))
                .unwrap_or_else(|| format!("entry {}", i + 1));
            let label = e.label.clone().unwrap_or(fallback);
            let src = match (&e.spec, &e.file) {
                (Some(s), None) => SequenceSource::parse(s),
                (None, Some(f)) => {
                    let path = match base {
                        Some(b) if f.is_relative() => b.join(f),
                        _ => f.clone(),
                    };
                    SequenceSource::file(&path, e.positive_only)
                }
                _ => Err(Error::InvalidSpec("a corpus entry needs exactly one of `spec` or `file`".into())),
            };
            let src = src.map(|s| match s {
                SequenceSource::Spec { spec, .. } => SequenceSource::Spec { label: label.clone(), spec },
                SequenceSource::Window { file, window, .. } => SequenceSource::Window { label: label.clone(), file, window },
            });
            out.push((label, src));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BundleEntry {
    pub label: String,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub violations: usize,
    pub verdicts: Vec<(Property, &'static str)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bundle {
    pub schema_version: u32,
    pub engine: EngineInfo,
    pub config: ReportConfig,
    pub index: Vec<BundleEntry>,
    pub reports: Vec<PropertyReport>,
}

impl Bundle {
    pub fn errors(&self) -> usize {
        self.index.iter().filter(|e| e.error.is_some()).count()
    }

    pub fn violations(&self) -> usize {
        self.index.iter().map(|e| e.violations).sum()
    }

    /// 1 when any report has a violation, or (strict) when an entry failed to load.
    pub fn exit_code(&self) -> i32 {
        let failed = self.violations() > 0 || (self.config.strict && self.errors() > 0);
        i32::from(failed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }
}

/// One report per entry, computed in parallel, in corpus order.
pub fn run_suite(entries: Vec<(String, Result<SequenceSource>)>, cfg: &ReportConfig) -> Result<Bundle> {
    cfg.validate()?;
    let results: Vec<(String, Result<PropertyReport>)> = entries
        .into_par_iter()
        .map(|(label, src)| {
            let r = src.and_then(|s| classify_sequence(&s, cfg));
            (label, r)
        })
        .collect();
    let mut index = Vec::new();
    let mut reports = Vec::new();
    for (label, r) in results {
        match r {
            Ok(rep) => {
                index.push(BundleEntry {
                    label,
                    status: "ok",
                    error: None,
                    violations: rep.violations.len(),
                    verdicts: rep.properties.iter().map(|e| (e.property, e.verdict.label())).collect(),
                });
                reports.push(rep);
            }
            Err(e) => index.push(BundleEntry {
                label,
                status: "error",
                error: Some(e.to_string()),
                violations: 0,
                verdicts: vec![],
            }),
        }
    }
    Ok(Bundle { schema_version: SCHEMA_VERSION, engine: ENGINE, config: cfg.clone(), index, reports })
}
