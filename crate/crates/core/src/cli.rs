//! The `oscint` command line. Every flag may also come from a JSON config file (`--config`);
//! flags win. Exit codes: 0 success, 1 computation failure, 2 usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::decomposition::{default_window, good_components, BadSets, IntegerInterval};
use crate::error::Error;
use crate::experiments::{self, GrowthSummary, SweepConfig, SweepRecord};
use crate::fewnomial::{Fewnomial, FewnomialJson};
use crate::quadrature::{self, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "oscint", version, about = "Oscillatory singular integrals with fewnomial phases")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Bad scales and good components
    Decompose,
    /// m(ξ) at the given frequencies
    Multiplier,
    /// sup of |m| over a frequency grid
    Sup,
    /// Decay of the per-scale pieces on one good component
    Decay,
    /// Sup across exponent sets of fixed size
    Sweep,
    /// Sup at ξ = 0 for full polynomials of growing degree
    Parissis,
    /// Exploratory scan of the sup against the number of terms
    Logd,
    /// Structural property suite for the scale decomposition
    Check,
}

/// Flags shared by all subcommands; every field can also be set in the config file.
#[derive(Debug, Clone, Default, clap::Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    /// Fewnomial as inline JSON or a path to a JSON file
    #[arg(long, global = true)]
    pub input: Option<String>,
    /// Comparability exponent Γ
    #[arg(long, global = true)]
    pub gamma: Option<u32>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Frequencies (comma separated)
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub xi: Option<Vec<f64>>,
    /// Dyadic grid half-width K: ξ' = ±2^{k/p}, |k| <= K
    #[arg(long, global = true)]
    pub grid_k: Option<u32>,
    /// Grid points per octave p
    #[arg(long, global = true)]
    pub per_octave: Option<u32>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub draws: Option<usize>,
    #[arg(long, global = true)]
    pub coeff_decades: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Remove a linear term from the input instead of rejecting it
    #[arg(long, global = true)]
    #[serde(default)]
    pub drop_linear: bool,
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true, env = "OSCINT_THREADS")]
    pub threads: Option<usize>,
    /// JSON config file mirroring these flags
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Record wall-clock time per sweep record (output is then not reproducible)
    #[arg(long, global = true)]
    #[serde(default)]
    pub timing: bool,
    /// Term count for `sweep`
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Exponent sets for `sweep`, e.g. "2,3;2,8"
    #[arg(long, global = true)]
    pub exponent_sets: Option<String>,
    /// Degrees for `parissis`
    #[arg(long, global = true, value_delimiter = ',')]
    pub n_values: Option<Vec<u32>>,
    /// Term counts for `logd`
    #[arg(long, global = true, value_delimiter = ',')]
    pub d_values: Option<Vec<usize>>,
    #[arg(long, global = true)]
    pub max_exp: Option<u32>,
    /// Component index for `decay`
    #[arg(long, global = true)]
    pub component: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub l_min: Option<i64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub l_max: Option<i64>,
    /// Instances for `check`
    #[arg(long, global = true)]
    pub instances: Option<usize>,
    /// Γ values for `check`
    #[arg(long, global = true, value_delimiter = ',')]
    pub gammas: Option<Vec<u32>>,
}

impl Options {
    /// Fills every unset field from `base`.
    fn merged_over(self, base: Options) -> Options {
        Options {
            input: self.input.or(base.input),
            gamma: self.gamma.or(base.gamma),
            tol: self.tol.or(base.tol),
            xi: self.xi.or(base.xi),
            grid_k: self.grid_k.or(base.grid_k),
            per_octave: self.per_octave.or(base.per_octave),
            seed: self.seed.or(base.seed),
            draws: self.draws.or(base.draws),
            coeff_decades: self.coeff_decades.or(base.coeff_decades),
            format: self.format.or(base.format),
            output: self.output.or(base.output),
            drop_linear: self.drop_linear || base.drop_linear,
            threads: self.threads.or(base.threads),
            config: self.config,
            timing: self.timing || base.timing,
            d: self.d.or(base.d),
            exponent_sets: self.exponent_sets.or(base.exponent_sets),
            n_values: self.n_values.or(base.n_values),
            d_values: self.d_values.or(base.d_values),
            max_exp: self.max_exp.or(base.max_exp),
            component: self.component.or(base.component),
            l_min: self.l_min.or(base.l_min),
            l_max: self.l_max.or(base.l_max),
            instances: self.instances.or(base.instances),
            gammas: self.gammas.or(base.gammas),
        }
    }
}

/// Fully resolved configuration, echoed into every output and hashed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliConfig {
    pub subcommand: Command,
    pub input: Option<String>,
    pub gamma: u32,
    pub tol: f64,
    pub xi: Option<Vec<f64>>,
    pub grid_k: Option<u32>,
    pub per_octave: u32,
    pub seed: u64,
    pub draws: usize,
    pub coeff_decades: f64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub drop_linear: bool,
    pub threads: Option<usize>,
    pub timing: bool,
    pub d: usize,
    pub exponent_sets: Vec<Vec<u32>>,
    pub n_values: Vec<u32>,
    pub d_values: Vec<usize>,
    pub max_exp: u32,
    pub component: usize,
    pub l_min: i64,
    pub l_max: i64,
    pub instances: usize,
    pub gammas: Vec<u32>,
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::LengthMismatch { .. }
            | Error::NonIncreasingExponents { .. }
            | Error::ZeroCoefficient { .. }
            | Error::NonFiniteCoefficient { .. }
            | Error::LinearTermPresent { .. }
            | Error::InvalidTolerance(_)
            | Error::InvalidDimensions(_)
            | Error::InvalidArgument(_)
            | Error::IndexOutOfRange { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

fn parse_sets(s: &str) -> Result<Vec<Vec<u32>>, Failure> {
    s.split(';')
        .map(|set| {
            set.split(',')
                .map(|x| x.trim().parse::<u32>().map_err(|e| Failure::Usage(format!("bad exponent set '{set}': {e}"))))
                .collect()
        })
        .collect()
}

fn resolve(command: Command, opts: Options) -> Result<CliConfig, Failure> {
    let opts = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let file: Options = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            opts.merged_over(file)
        }
        None => opts,
    };
    let default_draws = match command {
        Command::Parissis | Command::Logd => 100,
        _ => 50,
    };
    Ok(CliConfig {
        subcommand: command,
        input: opts.input,
        gamma: opts.gamma.unwrap_or(crate::decomposition::DEFAULT_GAMMA),
        tol: opts.tol.unwrap_or(1e-6),
        xi: opts.xi,
        grid_k: opts.grid_k,
        per_octave: opts.per_octave.unwrap_or(4),
        seed: opts.seed.unwrap_or(0),
        draws: opts.draws.unwrap_or(default_draws),
        coeff_decades: opts.coeff_decades.unwrap_or(12.0),
        format: opts.format.unwrap_or(Format::Json),
        output: opts.output,
        drop_linear: opts.drop_linear,
        threads: opts.threads,
        timing: opts.timing,
        d: opts.d.unwrap_or(2),
        exponent_sets: match opts.exponent_sets {
            Some(s) => parse_sets(&s)?,
            None => vec![vec![2, 3], vec![2, 8], vec![2, 20], vec![2, 50]],
        },
        n_values: opts.n_values.unwrap_or_else(|| vec![3, 6, 12, 24]),
        d_values: opts.d_values.unwrap_or_else(|| vec![1, 2, 3, 4]),
        max_exp: opts.max_exp.unwrap_or(16),
        component: opts.component.unwrap_or(0),
        l_min: opts.l_min.unwrap_or(4),
        l_max: opts.l_max.unwrap_or(16),
        instances: opts.instances.unwrap_or(1000),
        gammas: opts.gammas.unwrap_or_else(|| vec![1, 2, 4]),
    })
}

/// Removes an `α = 1` monomial (a frequency shift of the input function). Returns the
/// remaining terms and whether anything was dropped.
pub fn drop_linear(raw: FewnomialJson) -> (FewnomialJson, bool) {
    let mut out = FewnomialJson { coeffs: Vec::new(), exponents: Vec::new() };
    let mut dropped = false;
    for (c, e) in raw.coeffs.into_iter().zip(raw.exponents) {
        if e == 1 {
            dropped = true;
        } else {
            out.coeffs.push(c);
            out.exponents.push(e);
        }
    }
    (out, dropped)
}

fn load_fewnomial(cfg: &CliConfig) -> Result<Fewnomial, Failure> {
    let src = cfg.input.as_deref().ok_or_else(|| Failure::Usage("--input is required".into()))?;
    let text = if src.trim_start().starts_with('{') {
        src.to_string()
    } else {
        std::fs::read_to_string(src).map_err(|e| Failure::Usage(format!("{src}: {e}")))?
    };
    let raw: FewnomialJson = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid fewnomial JSON: {e}")))?;
    let raw = if cfg.drop_linear {
        let (kept, dropped) = drop_linear(raw);
        if dropped {
            eprintln!("warning: dropped the linear term; it only shifts the frequency of the input function");
            if kept.coeffs.is_empty() {
                eprintln!("warning: nothing but the linear term was given, continuing with the zero phase");
            }
        }
        kept
    } else {
        raw
    };
    Ok(Fewnomial::try_from(raw)?)
}

fn meta(cfg: &CliConfig) -> Value {
    let canonical = serde_json::to_string(cfg).expect("config serializes");
    let hash = Sha256::digest(canonical.as_bytes());
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config_hash": format!("{hash:x}"),
        "seed": cfg.seed,
        "config": cfg,
    })
}

fn grid(cfg: &CliConfig, default: GridSpec) -> GridSpec {
    match (&cfg.xi, cfg.grid_k) {
        (Some(xi), _) => GridSpec::Explicit { xi: xi.clone() },
        (None, Some(k)) => GridSpec::Dyadic { k_max: k, per_octave: cfg.per_octave },
        (None, None) => default,
    }
}

struct Sink {
    path: Option<PathBuf>,
}

impl Sink {
    fn write(&self, text: &str) -> Result<(), Failure> {
        match &self.path {
            Some(p) => std::fs::write(p, text).map_err(|e| Failure::Compute(format!("{}: {e}", p.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Compute(e.to_string()))
            }
        }
    }

    fn sidecar(&self) -> Option<PathBuf> {
        self.path.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".meta.json");
            PathBuf::from(s)
        })
    }
}

fn with_meta(cfg: &CliConfig, payload: Value) -> String {
    let mut obj = serde_json::Map::new();
    obj.insert("meta".into(), meta(cfg));
    if let Value::Object(m) = payload {
        obj.extend(m);
    }
    serde_json::to_string_pretty(&Value::Object(obj)).expect("json") + "\n"
}

fn sample_json(xi: f64, s: Result<quadrature::MultiplierSample, Error>) -> Value {
    match s {
        Ok(s) => json!({ "xi": xi, "re": s.value.re, "im": s.value.im, "abs": s.value.norm(), "err": s.abs_err_estimate }),
        Err(e) => json!({ "xi": xi, "re": null, "im": null, "abs": null, "err": null, "error": e.to_string() }),
    }
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Failure::Compute(e.to_string()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| Failure::Compute(e.to_string()))?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Failure::Compute(e.to_string()))?).map_err(|e| Failure::Compute(e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn emit_table(cfg: &CliConfig, sink: &Sink, payload: Value, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), Failure> {
    match cfg.format {
        Format::Json => sink.write(&with_meta(cfg, payload)),
        Format::Csv => {
            sink.write(&csv_text(header, rows)?)?;
            match sink.sidecar() {
                Some(p) => std::fs::write(&p, with_meta(cfg, payload)).map_err(|e| Failure::Compute(format!("{}: {e}", p.display()))),
                None => {
                    // the rows already went to stdout; only the header goes to the diagnostic stream
                    eprint!("{}", with_meta(cfg, json!({})));
                    Ok(())
                }
            }
        }
    }
}

fn cmd_decompose(cfg: &CliConfig, sink: &Sink) -> Result<(), Failure> {
    let q = load_fewnomial(cfg)?;
    let frame = q.scale_frame()?;
    let bad = BadSets::new(&frame, cfg.gamma)?;
    let window = default_window(&frame, cfg.gamma)?;
    let comps = good_components(&frame, cfg.gamma, window)?;
    let payload = json!({
        "fewnomial": q,
        "gamma": cfg.gamma,
        "window": window,
        "bad0": bad.level0,
        "bad1": bad.level1,
        "components": comps,
    });
    sink.write(&with_meta(cfg, payload))
}

fn cmd_multiplier(cfg: &CliConfig, sink: &Sink) -> Result<(), Failure> {
    use rayon::prelude::*;
    let q = load_fewnomial(cfg)?;
    let xis = cfg.xi.clone().unwrap_or_else(|| vec![0.0]);
    let results: Vec<_> = xis.par_iter().map(|&x| (x, quadrature::pv_multiplier(&q, x, cfg.tol))).collect();
    let all_failed = results.iter().all(|r| r.1.is_err());
    let rows = results
        .iter()
        .map(|(x, r)| {
            let s = r.as_ref().ok();
            vec![
                x.to_string(),
                opt(s.map(|s| s.value.re)),
                opt(s.map(|s| s.value.im)),
                opt(s.map(|s| s.value.norm())),
                opt(s.map(|s| s.abs_err_estimate)),
            ]
        })
        .collect();
    let samples: Vec<Value> = results.into_iter().map(|(x, r)| sample_json(x, r)).collect();
    emit_table(cfg, sink, json!({ "fewnomial": q, "samples": samples }), &["xi", "re", "im", "abs", "err"], rows)?;
    if all_failed {
        return Err(Failure::Compute("no frequency met the tolerance".into()));
    }
    Ok(())
}

fn cmd_sup(cfg: &CliConfig, sink: &Sink) -> Result<(), Failure> {
    let q = load_fewnomial(cfg)?;
    let g = grid(cfg, GridSpec::Auto { per_octave: cfg.per_octave });
    let r = quadrature::multiplier_sup(&q, &g, cfg.tol)?;
    let samples: Vec<Value> = r
        .samples
        .iter()
        .map(|s| {
            if s.is_certified(cfg.tol) {
                sample_json(s.xi, Ok(*s))
            } else {
                let e = Error::ToleranceNotMet { requested: cfg.tol, achieved: s.abs_err_estimate };
                sample_json(s.xi, Err(e))
            }
        })
        .collect();
    let rows = r
        .samples
        .iter()
        .map(|s| {
            let ok = s.is_certified(cfg.tol);
            vec![
                s.xi.to_string(),
                opt(ok.then_some(s.value.re)),
                opt(ok.then_some(s.value.im)),
                opt(ok.then_some(s.value.norm())),
                opt(ok.then_some(s.abs_err_estimate)),
            ]
        })
        .collect();
    let payload = json!({
        "fewnomial": q,
        "grid": g,
        "samples": samples,
        "sup": r.sup,
        "argmax_xi": r.argmax_xi,
        "certified_fraction": r.certified_fraction,
        "asymptote_gap": r.asymptote_gap,
    });
    emit_table(cfg, sink, payload, &["xi", "re", "im", "abs", "err"], rows)
}

fn cmd_decay(cfg: &CliConfig, sink: &Sink) -> Result<(), Failure> {
    let q = load_fewnomial(cfg)?;
    let frame = q.scale_frame()?;
    let comps = good_components(&frame, cfg.gamma, default_window(&frame, cfg.gamma)?)?;
    let comp = *comps.get(cfg.component).ok_or(Error::IndexOutOfRange { index: cfg.component, len: comps.len() })?;
    let l_range = IntegerInterval::new(cfg.l_min, cfg.l_max)?;
    let xi_grid = match &cfg.xi {
        Some(x) => x.clone(),
        None => quadrature::stationary_xi_grid(&q, &comp, l_range, 16)?,
    };
    let fit = quadrature::decay_fit(&q, &comp, &xi_grid, l_range, cfg.tol)?;
    let payload = json!({ "fewnomial": q, "component": comp, "xi_points": xi_grid.len(), "fit": fit });
    sink.write(&with_meta(cfg, payload))
}

fn emit_sweep(cfg: &CliConfig, sink: &Sink, records: &[SweepRecord], summary: &GrowthSummary) -> Result<(), Failure> {
    match cfg.format {
        Format::Json => sink.write(&with_meta(cfg, json!({ "records": records, "summary": summary }))),
        Format::Csv => {
            let mut buf = Vec::new();
            experiments::write_csv(records, &mut buf)?;
            sink.write(&String::from_utf8(buf).map_err(|e| Failure::Compute(e.to_string()))?)?;
            let side = with_meta(cfg, json!({ "summary": summary }));
            match sink.sidecar() {
                Some(p) => std::fs::write(&p, side).map_err(|e| Failure::Compute(format!("{}: {e}", p.display()))),
                None => {
                    eprint!("{side}");
                    Ok(())
                }
            }
        }
    }
}

fn sweep_config(cfg: &CliConfig, default_grid: GridSpec) -> SweepConfig {
    SweepConfig {
        draws: cfg.draws,
        coeff_decades: cfg.coeff_decades,
        grid: grid(cfg, default_grid),
        tol: cfg.tol,
        seed: cfg.seed,
        timing: cfg.timing,
    }
}

fn all_uncertified(records: &[SweepRecord]) -> bool {
    !records.is_empty() && records.iter().all(|r| r.certified_fraction == 0.0)
}

fn cmd_check(cfg: &CliConfig, sink: &Sink) -> Result<(), Failure> {
    let report = experiments::structure_suite(cfg.instances, cfg.seed, &cfg.gammas);
    sink.write(&with_meta(cfg, json!({ "report": report })))?;
    if report.total_failures() > 0 {
        return Err(Failure::Compute(format!("{} property failures", report.total_failures())));
    }
    Ok(())
}

fn dispatch(cfg: &CliConfig) -> Result<(), Failure> {
    let sink = Sink { path: cfg.output.clone() };
    let auto = GridSpec::Auto { per_octave: cfg.per_octave };
    match cfg.subcommand {
        Command::Decompose => cmd_decompose(cfg, &sink),
        Command::Multiplier => cmd_multiplier(cfg, &sink),
        Command::Sup => cmd_sup(cfg, &sink),
        Command::Decay => cmd_decay(cfg, &sink),
        Command::Sweep => {
            let (r, s) = experiments::uniformity_sweep(cfg.d, &cfg.exponent_sets, &sweep_config(cfg, auto))?;
            emit_sweep(cfg, &sink, &r, &s)?;
            if all_uncertified(&r) {
                return Err(Failure::Compute("no record was certified".into()));
            }
            Ok(())
        }
        Command::Parissis => {
            let sc = sweep_config(cfg, GridSpec::Explicit { xi: vec![0.0] });
            let (r, s) = experiments::parissis_growth(&cfg.n_values, &sc)?;
            emit_sweep(cfg, &sink, &r, &s)?;
            if all_uncertified(&r) {
                return Err(Failure::Compute("no record was certified".into()));
            }
            Ok(())
        }
        Command::Logd => {
            let (r, s) = experiments::logd_scan(&cfg.d_values, cfg.max_exp, &sweep_config(cfg, auto))?;
            emit_sweep(cfg, &sink, &r, &s)?;
            if all_uncertified(&r) {
                return Err(Failure::Compute("no record was certified".into()));
            }
            Ok(())
        }
        Command::Check => cmd_check(cfg, &sink),
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let cfg = match resolve(cli.command, cli.opts) {
        Ok(c) => c,
        Err(Failure::Usage(m)) | Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            return 2;
        }
    };
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not size the worker pool: {e}");
        }
    }
    match dispatch(&cfg) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            1
        }
    }
}

/// Path of the metadata file written next to a CSV output.
pub fn sidecar_path(output: &Path) -> PathBuf {
    Sink { path: Some(output.to_path_buf()) }.sidecar().expect("path given")
}
