//! Command-line driver: model selection, parameter sweeps, and plot-ready
//! CSV/JSON artifacts. Identical configurations produce byte-identical
//! outputs (fixed seeds, deterministic reductions, stable orderings).

mod artifacts;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use artifacts::{fmt, write_csv, write_json, ArtifactError, SCHEMA_VERSION};
use subshift_spectra::cmv::{cmv_spectrum_approx, verblunsky_from_subshift, DiskSampling};
use subshift_spectra::dynamics::{
    abelian_moments, plancherel_check, resolvent_row, transport_exponents, upper_bound_integrals,
    LatticeOperator, WavePacket,
};
use subshift_spectra::generators::ContinuedFraction;
use subshift_spectra::model::{default_catalog, PotentialModel};
use subshift_spectra::spectrum::{box_dimension, spectrum_approx, zset_scan, ApproximantModel};
use subshift_spectra::tracemap::{complex_escape_time, escape_classify, fib_orbit, sigma_levels};
use subshift_spectra::words::{self, Word};

#[derive(Parser)]
#[command(
    name = "subshift",
    version,
    about = "strictly ergodic sequences and their operators"
)]
struct Cli {
    /// Worker thread count (also SUBSHIFT_WORKERS).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit symbol windows or the model catalog.
    Generate(GenerateArgs),
    /// Word combinatorics of a window: complexity, graphs, palindromes, powers.
    Words(WordsArgs),
    /// Spectral approximants, Lyapunov scans, box dimensions.
    Spectrum(SpectrumArgs),
    /// Trace orbits, band sets, complex escape times.
    Trace(TraceArgs),
    /// Lattice transport: moments, exponents, resolvent, identity checks.
    Dynamics(DynamicsArgs),
    /// Unit-circle spectra from unit-disk coefficient sequences.
    Cmv(CmvArgs),
    /// Diff two artifacts of the same kind.
    Compare(CompareArgs),
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct GenerateArgs {
    #[arg(long, default_value = "fibonacci")]
    model: String,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    from: i64,
    #[arg(long, default_value_t = 256, allow_negative_numbers = true)]
    to: i64,
    #[arg(long, default_value_t = 0)]
    phase: usize,
    #[arg(long, default_value_t = 1)]
    phases: usize,
    /// Write the model catalog instead of a window.
    #[arg(long, default_value_t = false)]
    emit_catalog: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct WordsArgs {
    #[arg(long, default_value = "fibonacci")]
    model: String,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 4096)]
    length: usize,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    start: i64,
    /// Complexity profile up to this factor length.
    #[arg(long)]
    complexity: Option<usize>,
    /// Rauzy graph at this factor length.
    #[arg(long)]
    rauzy: Option<usize>,
    /// Special factor counts at this length.
    #[arg(long)]
    special: Option<usize>,
    /// Maximal palindromes of at least this length.
    #[arg(long)]
    palindromes: Option<usize>,
    /// Power index of this word (digit string).
    #[arg(long)]
    index: Option<String>,
    /// Minimal cylinder quantity n * min freq for n = 1..=N.
    #[arg(long)]
    bosh: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct SpectrumArgs {
    /// fibonacci, or comma-separated continued fraction coefficients.
    #[arg(long, default_value = "fibonacci")]
    model: String,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Band-set approximant level (sigma_k union sigma_{k+1}).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    resolution: f64,
    /// Box-counting scales for the approximant, comma separated.
    #[arg(long)]
    box_scales: Option<String>,
    /// Lyapunov scan grid as lo:hi:steps.
    #[arg(long)]
    lyapunov_grid: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    phase_samples: usize,
    #[arg(long, default_value_t = 0.02)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct TraceArgs {
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Energy for a single orbit dump.
    #[arg(long, allow_negative_numbers = true)]
    energy: Option<f64>,
    #[arg(long, default_value_t = 30)]
    kmax: usize,
    /// Band sets sigma_1..sigma_k.
    #[arg(long)]
    sigma: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    resolution: f64,
    /// Complex escape probe "re,im".
    #[arg(long)]
    complex: Option<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct DynamicsArgs {
    #[arg(long, default_value = "fibonacci")]
    model: String,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1024)]
    half_width: i64,
    /// Averaging times as lo:hi:count (log spaced).
    #[arg(long, default_value = "10:1000:10")]
    t_grid: String,
    /// Moment orders, comma separated.
    #[arg(long, default_value = "1,2")]
    p: String,
    /// Identity checks "site,T" (semicolon separated pairs).
    #[arg(long)]
    plancherel: Option<String>,
    /// Resolvent row at "re,im".
    #[arg(long)]
    resolvent: Option<String>,
    /// Inverse-max-norm integrals: "alpha,c,T1,T2,...".
    #[arg(long)]
    upper_bounds: Option<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct CmvArgs {
    #[arg(long, default_value = "fibonacci")]
    model: String,
    /// Coefficient value on symbol 0.
    #[arg(long, default_value_t = 0.3)]
    g0: f64,
    /// Coefficient value on symbol 1.
    #[arg(long, default_value_t = 0.7)]
    g1: f64,
    #[arg(long, default_value = "128,256,512")]
    sizes: String,
    #[arg(long, default_value_t = 2)]
    phase_samples: usize,
    #[arg(long, default_value = "0.02,0.01,0.005")]
    eps: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Artifact(#[from] ArtifactError),
    #[error("{0}")]
    Invalid(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Invalid(format!("config: {e}"))
    }
}

macro_rules! bail {
    ($($t:tt)*) => { return Err(CliError::Invalid(format!($($t)*))) };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.workers.or_else(|| {
        std::env::var("SUBSHIFT_WORKERS")
            .ok()
            .and_then(|w| w.parse().ok())
    });
    if let Some(w) = workers {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global();
    }
    let result = match cli.command {
        Command::Generate(args) => run_generate(with_config(args)),
        Command::Words(args) => run_words(with_config(args)),
        Command::Spectrum(args) => run_spectrum(with_config(args)),
        Command::Trace(args) => run_trace(with_config(args)),
        Command::Dynamics(args) => run_dynamics(with_config(args)),
        Command::Cmv(args) => run_cmv(with_config(args)),
        Command::Compare(args) => run_compare(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

trait HasConfig: Sized + Serialize + for<'de> Deserialize<'de> + Clone {
    fn config_path(&self) -> Option<&PathBuf>;
}

macro_rules! has_config {
    ($t:ty) => {
        impl HasConfig for $t {
            fn config_path(&self) -> Option<&PathBuf> {
                self.config.as_ref()
            }
        }
    };
}
has_config!(GenerateArgs);
has_config!(WordsArgs);
has_config!(SpectrumArgs);
has_config!(TraceArgs);
has_config!(DynamicsArgs);
has_config!(CmvArgs);

/// Overlays the JSON config file (if given) on top of the flag values:
/// config keys win.
fn with_config<T: HasConfig>(args: T) -> Result<T, CliError> {
    let Some(path) = args.config_path() else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))?;
    let overlay: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))?;
    let mut base = serde_json::to_value(&args)?;
    if let (Some(base_map), Some(over_map)) = (base.as_object_mut(), overlay.as_object()) {
        for (k, v) in over_map {
            base_map.insert(k.clone(), v.clone());
        }
    }
    Ok(serde_json::from_value(base)?)
}

fn run_generate(args: Result<GenerateArgs, CliError>) -> Result<ExitCode, CliError> {
    let args = args?;
    std::fs::create_dir_all(&args.out)?;
    if args.emit_catalog {
        let mut doc = serde_json::to_value(default_catalog())?;
        doc["kind"] = "model_catalog".into();
        write_json(&args.out.join("catalog.json"), &doc)?;
        write_manifest(&args.out, "generate", &args)?;
        return Ok(ExitCode::SUCCESS);
    }
    if args.to <= args.from {
        bail!("empty range [{}, {})", args.from, args.to);
    }
    let model = model_of(&args.model, args.lambda)?;
    let w = model
        .window(args.phase, args.phases.max(1), args.from, args.to)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    write_csv(
        &args.out.join("window.csv"),
        "window",
        &["n", "label"],
        (args.from..args.to).map(|n| vec![n.to_string(), w.label_at(n).unwrap().to_string()]),
    )?;
    std::fs::write(args.out.join("window.txt"), w.label_string())?;
    let window_doc = serde_json::json!({
        "kind": "window",
        "schema_version": SCHEMA_VERSION,
        "start": w.start(),
        "labels": w.labels(),
    });
    write_json(&args.out.join("window.json"), &window_doc)?;
    let sampling = model.sampling();
    if let Ok(pot) = model.potential(0, args.phases.max(1), args.from, args.to) {
        write_csv(
            &args.out.join("potential.csv"),
            "potential",
            &["n", "v"],
            (args.from..args.to).map(|n| vec![n.to_string(), fmt(pot.value(n).unwrap())]),
        )?;
    }
    let table = serde_json::json!({
        "kind": "sampling_table",
        "schema_version": SCHEMA_VERSION,
        "table": sampling.table_json(),
    });
    write_json(&args.out.join("sampling.json"), &table)?;
    write_manifest(&args.out, "generate", &args)?;
    Ok(ExitCode::SUCCESS)
}

fn run_words(args: Result<WordsArgs, CliError>) -> Result<ExitCode, CliError> {
    let args = args?;
    std::fs::create_dir_all(&args.out)?;
    let model = model_of(&args.model, args.lambda)?;
    let window = model
        .window(0, 1, args.start, args.start + args.length as i64)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let fail = |e: words::WordsError| CliError::Invalid(e.to_string());
    if let Some(n_max) = args.complexity {
        let profile = words::complexity_profile(&window, n_max).map_err(fail)?;
        write_csv(
            &args.out.join("complexity.csv"),
            "complexity",
            &["n", "p", "saturated"],
            profile.values.iter().enumerate().map(|(i, &p)| {
                vec![
                    (i + 1).to_string(),
                    p.to_string(),
                    profile.saturated[i].to_string(),
                ]
            }),
        )?;
        let mut doc = serde_json::to_value(&profile)?;
        doc["kind"] = "complexity_profile".into();
        doc["schema_version"] = SCHEMA_VERSION.into();
        write_json(&args.out.join("complexity.json"), &doc)?;
    }
    if let Some(n) = args.rauzy {
        let g = words::rauzy_graph(&window, n).map_err(fail)?;
        write_csv(
            &args.out.join("rauzy.csv"),
            "rauzy_edges",
            &["from", "to", "witness"],
            g.edges.iter().map(|(a, b, w)| {
                vec![
                    g.vertices[*a].label_string(window.alphabet()),
                    g.vertices[*b].label_string(window.alphabet()),
                    w.label_string(window.alphabet()),
                ]
            }),
        )?;
    }
    if let Some(n) = args.special {
        let sp = words::special_factors(&window, n).map_err(fail)?;
        let mut doc = serde_json::to_value(&sp)?;
        doc["kind"] = "special_factors".into();
        doc["schema_version"] = SCHEMA_VERSION.into();
        write_json(&args.out.join("special.json"), &doc)?;
    }
    if let Some(min_len) = args.palindromes {
        let pals = words::palindrome_scan(&window, min_len).map_err(fail)?;
        write_csv(
            &args.out.join("palindromes.csv"),
            "palindromes",
            &["center_two", "length"],
            pals.iter()
                .map(|p| vec![p.center_two.to_string(), p.length.to_string()]),
        )?;
    }
    if let Some(word) = &args.index {
        let word = Word::from_digits(word, window.alphabet()).map_err(fail)?;
        let rep = words::index_of(&word, &window).map_err(fail)?;
        let mut doc = serde_json::to_value(&rep)?;
        doc["kind"] = "power_index".into();
        doc["schema_version"] = SCHEMA_VERSION.into();
        write_json(&args.out.join("index.json"), &doc)?;
    }
    if let Some(n_max) = args.bosh {
        let lengths: Vec<usize> = (1..=n_max).collect();
        let profile = words::boshernitzan_profile(&window, &lengths).map_err(fail)?;
        write_csv(
            &args.out.join("boshernitzan.csv"),
            "boshernitzan",
            &["n", "value"],
            profile.iter().map(|&(n, v)| vec![n.to_string(), fmt(v)]),
        )?;
    }
    write_manifest(&args.out, "words", &args)?;
    Ok(ExitCode::SUCCESS)
}

fn run_spectrum(args: Result<SpectrumArgs, CliError>) -> Result<ExitCode, CliError> {
    let args = args?;
    std::fs::create_dir_all(&args.out)?;
    if let Some(k) = args.k {
        let approximant = if args.model == "fibonacci" {
            ApproximantModel::Fibonacci
        } else {
            ApproximantModel::Sturmian {
                coefficients: parse_u64_list(&args.model)?,
            }
        };
        let s = spectrum_approx(&approximant, args.lambda, k, args.resolution)
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        write_csv(
            &args.out.join("sigma.csv"),
            "sigma_intervals",
            &["level", "band", "left", "right"],
            artifacts::interval_rows(k, &s.set).into_iter(),
        )?;
        if let Some(scales) = &args.box_scales {
            let scales = parse_f64_list(scales)?;
            let d = box_dimension(&s.set, &scales).map_err(|e| CliError::Invalid(e.to_string()))?;
            write_csv(
                &args.out.join("boxcounts.csv"),
                "box_counts",
                &["epsilon", "count"],
                d.counts
                    .iter()
                    .map(|&(eps, n)| vec![fmt(eps), n.to_string()]),
            )?;
            let mut doc = serde_json::to_value(&d)?;
            doc["kind"] = "box_dimension".into();
            doc["schema_version"] = SCHEMA_VERSION.into();
            write_json(&args.out.join("boxdim.json"), &doc)?;
        }
    }
    if let Some(grid) = &args.lyapunov_grid {
        let (lo, hi, steps) = parse_grid(grid)?;
        let e_grid: Vec<f64> = (0..steps)
            .map(|i| lo + (hi - lo) * i as f64 / (steps - 1).max(1) as f64)
            .collect();
        let model = model_of(&args.model, args.lambda)?;
        let scan = zset_scan(&model, &e_grid, args.n, args.phase_samples, args.tol)
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        write_csv(
            &args.out.join("lyapunov.csv"),
            "lyapunov",
            &["energy", "gamma", "spread"],
            scan.samples
                .iter()
                .map(|&(e, g, s)| vec![fmt(e), fmt(g), fmt(s)]),
        )?;
        write_csv(
            &args.out.join("zset.csv"),
            "zset_intervals",
            &["level", "band", "left", "right"],
            artifacts::interval_rows(0, &scan.set).into_iter(),
        )?;
    }
    write_manifest(&args.out, "spectrum", &args)?;
    Ok(ExitCode::SUCCESS)
}

fn run_trace(args: Result<TraceArgs, CliError>) -> Result<ExitCode, CliError> {
    let args = args?;
    std::fs::create_dir_all(&args.out)?;
    if let Some(e) = args.energy {
        let orbit = fib_orbit(args.lambda, e, args.kmax);
        let classification = escape_classify(&orbit);
        write_csv(
            &args.out.join("orbit.csv"),
            "trace_orbit",
            &["k", "re", "im", "ln_abs", "log_scaled"],
            (-1..=orbit.k_max()).map(|k| {
                let v = orbit.x(k);
                vec![
                    k.to_string(),
                    fmt(v.plain().unwrap_or(v.sign() as f64 * f64::INFINITY)),
                    fmt(0.0),
                    fmt(v.ln_abs()),
                    v.is_log_scaled().to_string(),
                ]
            }),
        )?;
        let mut doc = serde_json::to_value(&classification)?;
        if let Some(obj) = doc.as_object_mut() {
            obj.insert("kind".into(), "escape_classification".into());
            obj.insert("schema_version".into(), SCHEMA_VERSION.into());
        } else {
            doc = serde_json::json!({
                "kind": "escape_classification",
                "schema_version": SCHEMA_VERSION,
                "class": doc,
            });
        }
        write_json(&args.out.join("escape.json"), &doc)?;
    }
    if let Some(k) = args.sigma {
        let levels = sigma_levels(args.lambda, k, args.resolution)
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        let rows = levels
            .iter()
            .enumerate()
            .flat_map(|(i, set)| artifacts::interval_rows(i + 1, set));
        write_csv(
            &args.out.join("sigma_levels.csv"),
            "sigma_intervals",
            &["level", "band", "left", "right"],
            rows,
        )?;
    }
    if let Some(spec) = &args.complex {
        let parts = parse_f64_list(spec)?;
        if parts.len() != 2 {
            bail!("--complex wants re,im");
        }
        let r = complex_escape_time(args.lambda, Complex64::new(parts[0], parts[1]), args.kmax);
        let doc = serde_json::json!({
            "kind": "complex_escape",
            "schema_version": SCHEMA_VERSION,
            "escape_at": r.escape_at,
            "checked_to": r.checked_to,
        });
        write_json(&args.out.join("complex_escape.json"), &doc)?;
    }
    write_manifest(&args.out, "trace", &args)?;
    Ok(ExitCode::SUCCESS)
}

fn run_dynamics(args: Result<DynamicsArgs, CliError>) -> Result<ExitCode, CliError> {
    let args = args?;
    std::fs::create_dir_all(&args.out)?;
    let model = model_of(&args.model, args.lambda)?;
    let h = LatticeOperator::from_model(&model, 0, 1, args.half_width)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let psi0 = WavePacket::delta(args.half_width);
    let (lo, hi, count) = parse_grid(&args.t_grid)?;
    if count < 2 || lo <= 0.0 || hi <= lo {
        bail!("t grid must be log-spaced with at least 2 points");
    }
    let t_grid: Vec<f64> = (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect();
    let p_set = parse_f64_list(&args.p)?;
    let report = abelian_moments(&h, &psi0, &t_grid, &p_set);
    let mut rows = Vec::new();
    for (pi, &p) in p_set.iter().enumerate() {
        let beta = transport_exponents(&report, p).map_err(|e| CliError::Invalid(e.to_string()));
        let (bm, bp, res) = match beta {
            Ok(b) => (b.beta_minus, b.beta_plus, b.residual),
            Err(_) => (f64::NAN, f64::NAN, f64::NAN),
        };
        for (ti, &t) in t_grid.iter().enumerate() {
            rows.push(vec![
                fmt(t),
                fmt(p),
                fmt(report.moments[pi][ti]),
                fmt(bm),
                fmt(bp),
                fmt(report.leakage[ti]),
            ]);
        }
        let _ = res;
    }
    write_csv(
        &args.out.join("transport.csv"),
        "transport",
        &["T", "p", "moment", "beta_minus", "beta_plus", "leakage"],
        rows.into_iter(),
    )?;
    if let Some(spec) = &args.plancherel {
        let mut rows = Vec::new();
        for pair in spec.split(';') {
            let v = parse_f64_list(pair)?;
            if v.len() != 2 {
                bail!("--plancherel wants site,T pairs");
            }
            let rep = plancherel_check(&h, &psi0, v[0] as i64, v[1])
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            rows.push(vec![
                fmt(v[0]),
                fmt(v[1]),
                fmt(rep.lhs),
                fmt(rep.rhs),
                fmt(rep.rel_discrepancy),
            ]);
        }
        write_csv(
            &args.out.join("plancherel.csv"),
            "plancherel",
            &["site", "T", "lhs", "rhs", "rel_discrepancy"],
            rows.into_iter(),
        )?;
    }
    if let Some(spec) = &args.resolvent {
        let v = parse_f64_list(spec)?;
        if v.len() != 2 {
            bail!("--resolvent wants re,im");
        }
        let row = resolvent_row(&h, Complex64::new(v[0], v[1]))
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        write_csv(
            &args.out.join("resolvent.csv"),
            "resolvent_row",
            &["n", "re", "im"],
            row.u
                .iter()
                .enumerate()
                .map(|(i, u)| vec![h.site_of(i).to_string(), fmt(u.re), fmt(u.im)]),
        )?;
    }
    if let Some(spec) = &args.upper_bounds {
        let v = parse_f64_list(spec)?;
        if v.len() < 3 {
            bail!("--upper-bounds wants alpha,c,T1[,T2...]");
        }
        let out = upper_bound_integrals(&model, &v[2..], v[0], v[1], 1025)
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        write_csv(
            &args.out.join("upper_bounds.csv"),
            "upper_bounds",
            &[
                "T",
                "n_max",
                "integral_right",
                "integral_left",
                "integral_escape_bound",
            ],
            out.entries.iter().map(|e| {
                vec![
                    fmt(e.t),
                    e.n_max.to_string(),
                    fmt(e.integral_right),
                    fmt(e.integral_left),
                    fmt(e.integral_escape_bound),
                ]
            }),
        )?;
    }
    write_manifest(&args.out, "dynamics", &args)?;
    Ok(ExitCode::SUCCESS)
}

fn run_cmv(args: Result<CmvArgs, CliError>) -> Result<ExitCode, CliError> {
    let args = args?;
    std::fs::create_dir_all(&args.out)?;
    let model = model_of(&args.model, 1.0)?;
    let sampling = DiskSampling::binary(args.g0, args.g1);
    let sizes: Vec<usize> = parse_f64_list(&args.sizes)?
        .into_iter()
        .map(|s| s as usize)
        .collect();
    let eps = parse_f64_list(&args.eps)?;
    // coefficient dump for the zero phase
    let max_size = *sizes.iter().max().unwrap_or(&128);
    let w = model
        .window(0, 1, 0, max_size as i64 + 2)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let coeffs =
        verblunsky_from_subshift(&w, &sampling).map_err(|e| CliError::Invalid(e.to_string()))?;
    write_csv(
        &args.out.join("alpha.csv"),
        "verblunsky",
        &["n", "re", "im"],
        (coeffs.start()..coeffs.end()).map(|n| {
            let a = coeffs.alpha_at(n).unwrap();
            vec![n.to_string(), fmt(a.re), fmt(a.im)]
        }),
    )?;
    let approx = cmv_spectrum_approx(&model, &sampling, &sizes, args.phase_samples, &eps)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    write_csv(
        &args.out.join("eigenphases.csv"),
        "eigenphases",
        &["size", "phase_index", "theta"],
        approx.clouds.iter().flat_map(|(size, phase, thetas)| {
            let (size, phase) = (*size, *phase);
            thetas
                .iter()
                .map(move |&t| vec![size.to_string(), phase.to_string(), fmt(t)])
                .collect::<Vec<_>>()
        }),
    )?;
    write_csv(
        &args.out.join("arc_measure.csv"),
        "arc_measure",
        &["eps", "size", "covered"],
        approx
            .arc_measures
            .iter()
            .map(|&(e, s, m)| vec![fmt(e), s.to_string(), fmt(m)]),
    )?;
    write_manifest(&args.out, "cmv", &args)?;
    Ok(ExitCode::SUCCESS)
}

fn run_compare(args: CompareArgs) -> Result<ExitCode, CliError> {
    let report = artifacts::compare(&args.a, &args.b, args.tolerance)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    if report.within_tolerance {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::FAILURE)
    }
}

fn model_of(name: &str, lambda: f64) -> Result<PotentialModel, CliError> {
    if let Ok(m) = PotentialModel::preset(name, lambda) {
        return Ok(m);
    }
    // comma-separated continued fraction coefficients name a rotation model
    if name.chars().all(|c| c.is_ascii_digit() || c == ',') {
        let coefficients = parse_u64_list(name)?;
        let _ = ContinuedFraction::from_coefficients(&coefficients)
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        return Ok(PotentialModel {
            name: name.to_string(),
            kind: subshift_spectra::model::ModelKind::Sturmian { coefficients },
            lambda,
        });
    }
    bail!("unknown model `{name}`")
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Invalid(format!("bad number `{p}`: {e}")))
        })
        .collect()
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|e| CliError::Invalid(format!("bad integer `{p}`: {e}")))
        })
        .collect()
}

fn parse_grid(s: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        bail!("grid spec wants lo:hi:count, got `{s}`");
    }
    let lo = parts[0]
        .parse()
        .map_err(|e| CliError::Invalid(format!("grid lo: {e}")))?;
    let hi = parts[1]
        .parse()
        .map_err(|e| CliError::Invalid(format!("grid hi: {e}")))?;
    let count = parts[2]
        .parse()
        .map_err(|e| CliError::Invalid(format!("grid count: {e}")))?;
    if count == 0 {
        bail!("empty grid");
    }
    Ok((lo, hi, count))
}

fn write_manifest<T: Serialize>(out: &Path, command: &str, params: &T) -> Result<(), CliError> {
    let mut params = serde_json::to_value(params)?;
    if let Some(map) = params.as_object_mut() {
        // artifact locations are not part of the scientific configuration
        map.remove("out");
        map.remove("config");
    }
    let doc = serde_json::json!({
        "kind": "manifest",
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "package_version": env!("CARGO_PKG_VERSION"),
        "params": params,
    });
    write_json(&out.join("manifest.json"), &doc)?;
    Ok(())
}
