//! `sparsity-lab`: command line front end for the sparsity probes.
//!
//! Every subcommand prints JSON (or writes it to `--json <path>`). Exit codes:
//! 0 ok, 1 a report or suite has invariant violations, 2 usage or input error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use sparsity_core::density;
use sparsity_core::equations;
use sparsity_core::geometry::{self, LambdaModel, ModelKind};
use sparsity_core::progressions;
use sparsity_core::recurrence::{self, RecurrenceSpec, ZeroScanConfig};
use sparsity_core::report::{self, Corpus, ReportConfig, SequenceSource};
use sparsity_core::sequences::{self, SequenceSpec, SequenceWindow};
use sparsity_core::sumset::{self, CosetMode, Engine, EngineConfig};
use sparsity_core::Error;

#[derive(Parser)]
#[command(name = "sparsity-lab", version, about = "Finite probes of sparsity properties of integer sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or ingest a sequence window
    Generate(GenerateArgs),
    /// Signed closures, iterated sumsets and coset detection
    Sumset(SumsetArgs),
    /// Counting function, density ladders and growth
    Density(DensityArgs),
    /// Arithmetic progressions and order-property witnesses
    Aps(ApsArgs),
    /// Ratio sets, epsilon tables, discreteness and geometric witnesses
    Geometry(GeometryArgs),
    /// Solutions of a_{m1}+…+a_{mk} + r = a_{n1}+…+a_{nl} and their decompositions
    Equations(EquationsArgs),
    /// Pisot/Salem classification, Binet data and zero sets
    Recurrence(RecurrenceArgs),
    /// Full property report for one sequence
    Classify(ClassifyArgs),
    /// Property reports for a corpus
    Suite(SuiteArgs),
}

#[derive(Args, Clone)]
struct SeqArgs {
    /// Sequence spec, e.g. `fibonacci`, `R(0,1;1,1)`, `power_tower:2`, `floor_geometric:1;2`
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    spec: Option<String>,
    /// File with one integer per line or a JSON array
    #[arg(long)]
    file: Option<PathBuf>,
    /// Keep 0 (and reject nothing) when ingesting a file
    #[arg(long)]
    nonneg: bool,
}

#[derive(Args)]
struct Out {
    /// Write JSON here instead of stdout
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    seq: SeqArgs,
    /// Number of elements
    #[arg(long, conflicts_with = "up_to")]
    count: Option<usize>,
    /// All elements up to this value
    #[arg(long)]
    up_to: Option<BigInt>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    out: Out,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Auto,
    Dense,
    Sparse,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Auto => Engine::Auto,
            EngineArg::Dense => Engine::Dense,
            EngineArg::Sparse => Engine::Sparse,
        }
    }
}

#[derive(Args)]
struct SumsetArgs {
    #[command(flatten)]
    seq: SeqArgs,
    #[arg(long, default_value_t = 1000)]
    bound: i64,
    /// k-fold sumset k(X)
    #[arg(long, conflicts_with = "sigma")]
    k: Option<usize>,
    /// Σ_n(X), all sums of at most n terms
    #[arg(long)]
    sigma: Option<usize>,
    /// Use ±A instead of A
    #[arg(long)]
    signed: bool,
    #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
    engine: EngineArg,
    /// Realize Σ_n(±A) by index search over the first M elements instead of by value
    #[arg(long, value_name = "M")]
    index_bound: Option<usize>,
    /// Look for a coset (or, with --one-sided, a progression tail) in the image
    #[arg(long)]
    coset: bool,
    #[arg(long)]
    one_sided: bool,
    #[arg(long, default_value_t = 50)]
    max_modulus: i64,
    #[arg(long, default_value_t = 20)]
    margin: i64,
    /// Also print the members (run-length encoded)
    #[arg(long)]
    members: bool,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    seq: SeqArgs,
    /// Largest scale n
    #[arg(long, default_value_t = 100_000)]
    bound: u64,
    /// Smallest ladder scale
    #[arg(long, default_value_t = 10)]
    n_min: u64,
    /// Lower density ladder over [n_min, bound]
    #[arg(long)]
    ladder: bool,
    /// Banach ladder up to this window length
    #[arg(long, value_name = "L")]
    banach: Option<u64>,
    /// δ-sparse probe over Σ_k(A) for k ≤ max_n
    #[arg(long)]
    max_n: Option<usize>,
    /// sup A(n)/ln n with decade maxima
    #[arg(long)]
    log_growth: bool,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct ApsArgs {
    #[command(flatten)]
    seq: SeqArgs,
    #[arg(long, default_value_t = 10_000)]
    bound: i64,
    /// Longest progression in the sequence itself
    #[arg(long)]
    longest: bool,
    /// Maximal strongly contained progressions
    #[arg(long)]
    strong: bool,
    /// Half-graph witness of this length for y − x ∈ A
    #[arg(long, value_name = "K")]
    order_property: Option<usize>,
    #[arg(long, default_value_t = 3)]
    min_length: usize,
    /// Longest progression in Σ_k(A) for k ≤ n
    #[arg(long, value_name = "N")]
    max_sum: Option<usize>,
    #[arg(long, default_value_t = 1_000_000)]
    node_budget: u64,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct GeometryArgs {
    #[command(flatten)]
    seq: SeqArgs,
    /// Window length
    #[arg(long, default_value_t = 60)]
    count: usize,
    /// Λ model: auto, identity, recurrence, floor_geometric
    #[arg(long, default_value = "auto")]
    model: String,
    /// ε_k for k ≤ K over the ratio set at depth --depth
    #[arg(long, value_name = "K")]
    epsilon: Option<usize>,
    #[arg(long, default_value_t = 30)]
    depth: usize,
    /// Discreteness proxy at these depths, e.g. 20,40,60
    #[arg(long, value_delimiter = ',')]
    discreteness: Vec<usize>,
    /// Window (0, b] for the discreteness proxy
    #[arg(long, default_value = "8")]
    threshold: String,
    /// Skip the witness construction
    #[arg(long)]
    no_witness: bool,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct EquationsArgs {
    #[command(flatten)]
    seq: SeqArgs,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    l: usize,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    r: BigInt,
    /// Largest index M
    #[arg(long, default_value_t = 30)]
    index_bound: usize,
    /// Window length (must exceed M)
    #[arg(long, default_value_t = 60)]
    count: usize,
    /// Search the smallest (s, t) decomposing every solution of spread above t
    #[arg(long)]
    decompose: bool,
    #[arg(long, default_value_t = 16)]
    s_max: usize,
    #[arg(long, default_value_t = 30)]
    t_max: usize,
    /// Bounded-spread slice with spread ≤ t
    #[arg(long, value_name = "T")]
    slice: Option<usize>,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct RecurrenceArgs {
    /// Recurrence spec, e.g. `R(0,1;1,1)` or `fibonacci`
    #[arg(long, conflicts_with = "poly", required_unless_present = "poly")]
    spec: Option<String>,
    /// Characteristic polynomial coefficients, low degree first
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    poly: Vec<i64>,
    /// Binet data fitted over this many terms
    #[arg(long, value_name = "N")]
    binet: Option<usize>,
    /// Zero set of d_n = r + Σ a_{n+u} − Σ a_{n+v}
    #[arg(long)]
    zero_set: bool,
    #[arg(long, value_delimiter = ',')]
    plus: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    minus: Vec<usize>,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    r: BigInt,
    #[arg(long, default_value_t = 100_000)]
    max_cutoff: usize,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    seq: SeqArgs,
    /// TOML config; flags below override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    bound: Option<i64>,
    #[arg(long)]
    max_sum: Option<usize>,
    /// Record wall-clock timings in the report
    #[arg(long)]
    timings: bool,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct SuiteArgs {
    /// Corpus TOML; without it the built-in corpus is used
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    bound: Option<i64>,
    #[arg(long)]
    max_sum: Option<usize>,
    /// Failed entries make the exit code nonzero
    #[arg(long)]
    strict: bool,
    /// Print only the index, not the full reports
    #[arg(long)]
    summary: bool,
    #[command(flatten)]
    out: Out,
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(e.into())
    }
}

type Res<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Res<u8> {
    match cmd {
        Command::Generate(a) => generate(a),
        Command::Sumset(a) => sumset_cmd(a),
        Command::Density(a) => density_cmd(a),
        Command::Aps(a) => aps(a),
        Command::Geometry(a) => geometry_cmd(a),
        Command::Equations(a) => equations_cmd(a),
        Command::Recurrence(a) => recurrence_cmd(a),
        Command::Classify(a) => classify(a),
        Command::Suite(a) => suite(a),
    }
}

fn emit(out: &Out, v: &Value) -> Res<()> {
    emit_text(out, &serde_json::to_string_pretty(v).expect("json"))
}

fn emit_text(out: &Out, text: &str) -> Res<()> {
    match &out.json {
        Some(p) => std::fs::write(p, format!("{text}\n"))?,
        None => {
            let mut s = std::io::stdout().lock();
            match writeln!(s, "{text}") {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                r => r?,
            }
        }
    }
    Ok(())
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn source(a: &SeqArgs) -> Res<SequenceSource> {
    match (&a.spec, &a.file) {
        (Some(s), None) => Ok(SequenceSource::parse(s)?),
        (None, Some(f)) => Ok(SequenceSource::file(f, !a.nonneg)?),
        _ => Err(Failure::Usage("give exactly one of --spec or --file".into())),
    }
}

fn window_up_to(a: &SeqArgs, b: i64) -> Res<SequenceWindow> {
    Ok(source(a)?.up_to(b)?)
}

fn window_count(a: &SeqArgs, n: usize) -> Res<SequenceWindow> {
    Ok(source(a)?.first(n)?)
}

fn generate(a: GenerateArgs) -> Res<u8> {
    let src = source(&a.seq)?;
    let w = match (a.count, &a.up_to) {
        (Some(n), None) => src.first(n)?,
        (None, Some(b)) => match &src {
            SequenceSource::Spec { spec, .. } => sequences::generate_up_to(spec, b)?,
            SequenceSource::Window { window, .. } => {
                let v = window.values.iter().filter(|x| *x <= b).cloned().collect();
                SequenceWindow::complete_up_to(v, b.clone())
            }
        },
        (None, None) => src.first(20)?,
        _ => return Err(Failure::Usage("--count and --up-to are exclusive".into())),
    };
    match a.format {
        Format::Json => emit_text(&a.out, &w.to_json_array()),
        Format::Text => emit_text(&a.out, w.to_text().trim_end()),
    }?;
    Ok(0)
}

fn sumset_cmd(a: SumsetArgs) -> Res<u8> {
    if a.bound < 1 {
        return Err(Failure::Usage("--bound must be positive".into()));
    }
    let cfg = EngineConfig { engine: a.engine.into(), ..EngineConfig::default() };
    let img = if let Some(m) = a.index_bound {
        let n = a.sigma.or(a.k).unwrap_or(1);
        sumset::realize_sigma(&window_count(&a.seq, m)?, n, a.signed, a.bound, m)
    } else {
        let w = window_up_to(&a.seq, a.bound)?;
        let base = if a.signed { sumset::signed_closure(&w, a.bound) } else { sumset::unsigned_image(&w, a.bound) };
        match (a.k, a.sigma) {
            (Some(k), _) => sumset::iterated_sumset(&base, k, &cfg)?,
            (None, Some(n)) => sumset::sigma(&base, n, &cfg)?,
            (None, None) => base,
        }
    };
    let mut v = img.to_json();
    if !a.members {
        if let Some(o) = v.as_object_mut() {
            o.remove("members");
        }
    }
    v["positive_count"] = json!(img.count_positive_upto(a.bound));
    if a.coset {
        let mode = if a.one_sided { CosetMode::OneSidedProgression } else { CosetMode::FullCoset };
        v["coset_search"] = to_value(&sumset::detect_coset(&img, a.max_modulus, a.margin, mode));
    }
    emit(&a.out, &v)?;
    Ok(0)
}

fn density_cmd(a: DensityArgs) -> Res<u8> {
    let b = i64::try_from(a.bound).map_err(|_| Failure::Usage("--bound too large".into()))?;
    let w = window_up_to(&a.seq, b)?;
    let mut v = json!({ "bound": a.bound, "count": density::counting(&w, a.bound)? });
    let none = !a.ladder && a.banach.is_none() && a.max_n.is_none() && !a.log_growth;
    if a.ladder || none {
        v["lower_density"] = to_value(&density::lower_density_estimate(&w, a.n_min.max(1), a.bound)?);
    }
    if let Some(l) = a.banach {
        v["banach"] = to_value(&density::banach_density_estimate(&w, l));
    }
    if let Some(n) = a.max_n {
        v["delta_probe"] = to_value(&density::delta_sparse_probe(&w, n, b, 50, 20, &EngineConfig::default())?);
    }
    if a.log_growth {
        v["log_growth"] = to_value(&density::log_growth_ratio(&w, a.n_min.max(2), a.bound)?);
    }
    emit(&a.out, &v)?;
    Ok(0)
}

fn aps(a: ApsArgs) -> Res<u8> {
    let w = window_up_to(&a.seq, a.bound)?;
    let vals = progressions::window_values(&w, a.bound)?;
    let mut v = json!({ "bound": a.bound, "min_length": a.min_length });
    let none = !a.longest && !a.strong && a.order_property.is_none() && a.max_sum.is_none();
    if a.longest || none {
        v["longest"] = to_value(&progressions::longest_ap(&vals, a.min_length));
    }
    if a.strong {
        v["strongly_contained"] = to_value(&progressions::strongly_contained_aps(&vals, a.min_length));
    }
    if let Some(n) = a.max_sum {
        v["ap_probe"] = to_value(&progressions::ap_sparse_probe(&w, n, a.bound, a.min_length, &EngineConfig::default())?);
    }
    if let Some(k) = a.order_property {
        let c = a.bound / 2;
        let r = progressions::order_property_witness(&w, k, c, a.node_budget)?;
        v["order_property"] = to_value(&r);
    }
    emit(&a.out, &v)?;
    Ok(0)
}

fn parse_rational(s: &str) -> Res<BigRational> {
    s.parse().map_err(|_| Failure::Usage(format!("not a rational number: {s:?}")))
}

fn geometry_cmd(a: GeometryArgs) -> Res<u8> {
    let kind: ModelKind = a.model.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let n = a.count.max(a.depth).max(a.discreteness.iter().copied().max().unwrap_or(0));
    let w = window_count(&a.seq, n)?;
    let mut v = json!({ "window": w.len() });
    if let Some(k) = a.epsilon {
        let q = geometry::ratio_set(&w.values, a.depth.min(w.len()));
        v["epsilon"] = to_value(&geometry::epsilon_table(&q, k)?);
    }
    if !a.discreteness.is_empty() {
        let b = parse_rational(&a.threshold)?;
        let start = w.values.partition_point(|x| x < &BigInt::from(1));
        v["discreteness"] = to_value(&geometry::discreteness_proxy(&w.values[start..], &a.discreteness, &b)?);
    }
    if !a.no_witness {
        let ww = w.prefix(a.count.min(w.len()));
        let model = LambdaModel::for_window(&ww, kind)?;
        v["model"] = json!(model.label());
        v["witness"] = to_value(&geometry::construct_witness(&ww, &model, None)?);
    }
    emit(&a.out, &v)?;
    Ok(0)
}

fn equations_cmd(a: EquationsArgs) -> Res<u8> {
    if a.count <= a.index_bound {
        return Err(Failure::Usage("--count must exceed --index-bound".into()));
    }
    let w = window_count(&a.seq, a.count)?;
    let mut v = json!({});
    if a.decompose {
        let d = equations::find_decomposition_bound(&w, a.k, a.l, &a.r, a.index_bound, a.s_max, a.t_max)?;
        v["decomposition"] = to_value(&d);
    } else if let Some(t) = a.slice {
        v["slice"] = to_value(&equations::bounded_spread_slice(&w, a.k, a.l, &a.r, t, a.index_bound)?);
    } else {
        v["enumeration"] = to_value(&equations::enumerate_solutions(&w, a.k, a.l, &a.r, a.index_bound)?);
    }
    emit(&a.out, &v)?;
    Ok(0)
}

fn recurrence_cmd(a: RecurrenceArgs) -> Res<u8> {
    let spec = match &a.spec {
        Some(s) => {
            let seq: SequenceSpec = s.parse()?;
            Some(RecurrenceSpec::from_sequence(&seq).ok_or_else(|| Failure::Usage(format!("{s:?} is not a linear recurrence")))?)
        }
        None => None,
    };
    let mut v = json!({});
    match &spec {
        Some(s) => {
            let d = match a.binet {
                Some(n) => recurrence::binet(s, n)?,
                None => recurrence::classify(&recurrence::char_poly(s))?,
            };
            v["spectral"] = to_value(&d);
            if a.zero_set {
                let cfg = ZeroScanConfig { max_cutoff: a.max_cutoff, ..ZeroScanConfig::default() };
                v["zero_set"] = to_value(&recurrence::zero_set(s, &a.plus, &a.minus, &a.r, &cfg)?);
            }
        }
        None => {
            if a.zero_set || a.binet.is_some() {
                return Err(Failure::Usage("--binet and --zero-set need --spec".into()));
            }
            let p: Vec<BigInt> = a.poly.iter().map(|&c| c.into()).collect();
            v["spectral"] = to_value(&recurrence::classify(&p)?);
        }
    }
    emit(&a.out, &v)?;
    Ok(0)
}

fn load_config(path: Option<&Path>, bound: Option<i64>, max_sum: Option<usize>) -> Res<ReportConfig> {
    let mut c = match path {
        Some(p) => ReportConfig::from_path(p)?,
        None => ReportConfig::default(),
    };
    if let Some(b) = bound {
        c.bound = b;
    }
    if let Some(n) = max_sum {
        c.max_sum = n;
    }
    c.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(c)
}

fn classify(a: ClassifyArgs) -> Res<u8> {
    let mut cfg = load_config(a.config.as_deref(), a.bound, a.max_sum)?;
    cfg.timings |= a.timings;
    let src = source(&a.seq)?;
    let r = report::classify_sequence(&src, &cfg)?;
    emit_text(&a.out, &r.to_json())?;
    for v in &r.violations {
        eprintln!("violation: {}", v.detail);
    }
    Ok(u8::from(!r.violations.is_empty()))
}

fn suite(a: SuiteArgs) -> Res<u8> {
    let mut cfg = load_config(a.config.as_deref(), a.bound, a.max_sum)?;
    cfg.strict |= a.strict;
    let (corpus, base) = match &a.corpus {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            (Corpus::from_toml_str(&text)?, p.parent().map(Path::to_path_buf))
        }
        None => (Corpus::builtin(), None),
    };
    let bundle = report::run_suite(corpus.resolve(base.as_deref()), &cfg)?;
    if a.summary {
        let v = json!({
            "schema_version": bundle.schema_version,
            "engine": to_value(&bundle.engine),
            "index": to_value(&bundle.index),
        });
        emit(&a.out, &v)?;
    } else {
        emit_text(&a.out, &bundle.to_json())?;
    }
    for e in &bundle.index {
        if let Some(err) = &e.error {
            eprintln!("{}: {err}", e.label);
        }
    }
    Ok(bundle.exit_code() as u8)
}

