//! Command-line front end: bound sweeps, planning, simulated sessions, exact
//! secrecy checks and positivity thresholds.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use omska::planner::{
    evaluate, min_positive_n, plan_berry_esseen, plan_desk_exact, plan_remark, plan_theorem_main,
    BoundKind, CsvRow, Plan, PlanError, PlanMode, MAX_SEARCH_CEILING,
};
use omska::protocol::{
    budget_from_env, field_bits, run_session, Decoder, ProtocolError, SessionOptions, Transcript,
};
use omska::source_model::{
    entropy_profile, load_joint_pmf_file, BscChainParams, EntropyProfile, JointSource, SourceError,
};
use omska::uhash::GfContext;
use omska::verifier::{
    estimate_reliability, secrecy_sd_exact, trial_seed, ReliabilityEstimate, SecrecyOptions,
    SecrecyReport, VerifyError,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "omska",
    version,
    about = "One-message secret key agreement toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Key-length bounds over a range of block lengths.
    Bounds(Opts),
    /// Protocol parameters for one block length.
    Plan(Opts),
    /// Monte Carlo reliability of simulated sessions.
    Run(Opts),
    /// Exact secrecy at a tiny block length.
    Verify(Opts),
    /// Smallest block length at which each bound is positive.
    Threshold(Opts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand. Values from `--config` fill in whatever
/// the command line leaves unset.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Opts {
    /// JSON source description.
    #[arg(long)]
    pub source: Option<PathBuf>,
    /// Built-in binary symmetric chain, as `p,q`.
    #[arg(long)]
    pub bsc: Option<String>,
    #[arg(long)]
    pub n: Option<u64>,
    /// Inclusive range `a:b:step`.
    #[arg(long)]
    pub n_range: Option<String>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// theorem_main | remark | berry_esseen | desk_exact | manual
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Hash length for manual plans.
    #[arg(long)]
    pub t: Option<u64>,
    /// Key length for manual plans.
    #[arg(long)]
    pub ell: Option<u64>,
    /// Guess-set threshold for manual plans, bits.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Comma-separated bound names.
    #[arg(long)]
    pub bounds: Option<String>,
    /// auto | ball | general | exhaustive
    #[arg(long)]
    pub decoder: Option<String>,
    /// Reconciliation seeds sampled by `verify`.
    #[arg(long)]
    pub seed_samples: Option<usize>,
    /// Session transcripts to include in `run` output.
    #[arg(long)]
    pub transcripts: Option<usize>,
    /// Upper end of the threshold search.
    #[arg(long)]
    pub ceiling: Option<f64>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Opts {
    /// Fields set here win over `base`.
    pub fn over(self, base: Opts) -> Opts {
        Opts {
            source: self.source.or(base.source),
            bsc: self.bsc.or(base.bsc),
            n: self.n.or(base.n),
            n_range: self.n_range.or(base.n_range),
            eps: self.eps.or(base.eps),
            sigma: self.sigma.or(base.sigma),
            mode: self.mode.or(base.mode),
            trials: self.trials.or(base.trials),
            seed: self.seed.or(base.seed),
            jobs: self.jobs.or(base.jobs),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            t: self.t.or(base.t),
            ell: self.ell.or(base.ell),
            lambda: self.lambda.or(base.lambda),
            bounds: self.bounds.or(base.bounds),
            decoder: self.decoder.or(base.decoder),
            seed_samples: self.seed_samples.or(base.seed_samples),
            transcripts: self.transcripts.or(base.transcripts),
            ceiling: self.ceiling.or(base.ceiling),
            config: self.config,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Resource(String),
    /// Verification ran and failed; the report is still written.
    Verify(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Resource(_) => EXIT_RESOURCE,
            CliError::Verify(_) => EXIT_VERIFY,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Resource(m) => write!(f, "resource limit: {m}"),
            CliError::Verify(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<SourceError> for CliError {
    fn from(e: SourceError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<PlanError> for CliError {
    fn from(e: PlanError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::Budget { .. } => CliError::Resource(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Infeasible { .. } => CliError::Resource(e.to_string()),
            VerifyError::Protocol(p) => p.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

/// Parsed and checked configuration.
pub struct RunConfig {
    pub src: JointSource,
    pub bsc: Option<BscChainParams>,
    pub eps: f64,
    pub sigma: f64,
    pub seed: u64,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub opts: Opts,
}

fn parse_bsc(s: &str) -> Result<BscChainParams, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [p, q] = parts.as_slice() else {
        return Err(CliError::Config(format!("--bsc expects p,q, got {s:?}")));
    };
    let num = |v: &str| {
        v.parse::<f64>()
            .map_err(|_| CliError::Config(format!("--bsc: {v:?} is not a number")))
    };
    Ok(BscChainParams::new(num(p)?, num(q)?)?)
}

/// `a:b:step`, inclusive of `b` when it lies on the grid.
pub fn parse_range(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Config(format!("--n-range expects a:b:step, got {s:?}"));
    let parts: Vec<u64> = s
        .split(':')
        .map(|v| v.trim().parse::<u64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [a, b, step] = parts.as_slice() else {
        return Err(bad());
    };
    if *step == 0 || a > b || *a == 0 {
        return Err(CliError::Config(format!(
            "--n-range {s:?} is empty or has a zero step"
        )));
    }
    Ok((*a..=*b).step_by(*step as usize).collect())
}

fn unit(what: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!(
            "{what} must lie in (0, 1), got {v}"
        )))
    }
}

impl RunConfig {
    pub fn resolve(opts: Opts) -> Result<Self, CliError> {
        let opts = match &opts.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                let base: Opts = serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                opts.over(base)
            }
            None => opts,
        };
        let (src, bsc) = match (&opts.source, &opts.bsc) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "give either --source or --bsc, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Config(
                    "a source is required: --source or --bsc".into(),
                ))
            }
            (Some(path), None) => {
                let src: JointSource = load_joint_pmf_file(path)?;
                let bsc = src.bsc_params();
                (src, bsc)
            }
            (None, Some(s)) => {
                let params = parse_bsc(s)?;
                (JointSource::bsc_chain(params), Some(params))
            }
        };
        if let Some(j) = opts.jobs {
            if j == 0 {
                return Err(CliError::Config("--jobs must be positive".into()));
            }
            // A second call in one process keeps the first pool.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build_global();
        }
        Ok(RunConfig {
            src,
            bsc,
            eps: unit("--eps", opts.eps.unwrap_or(0.05))?,
            sigma: unit("--sigma", opts.sigma.unwrap_or(0.05))?,
            seed: opts.seed.unwrap_or(0),
            format: opts.format,
            out: opts.out.clone(),
            opts,
        })
    }

    pub fn ns(&self) -> Result<Vec<u64>, CliError> {
        match (self.opts.n, &self.opts.n_range) {
            (Some(_), Some(_)) => Err(CliError::Config("give either --n or --n-range".into())),
            (Some(0), None) => Err(CliError::Config("--n must be positive".into())),
            (Some(n), None) => Ok(vec![n]),
            (None, Some(r)) => parse_range(r),
            (None, None) => Err(CliError::Config("--n or --n-range is required".into())),
        }
    }

    pub fn single_n(&self) -> Result<u64, CliError> {
        match self.opts.n {
            Some(0) => Err(CliError::Config("--n must be positive".into())),
            Some(n) if self.opts.n_range.is_none() => Ok(n),
            _ => Err(CliError::Config("this command needs a single --n".into())),
        }
    }

    fn profile(&self) -> EntropyProfile {
        entropy_profile(&self.src)
    }

    fn mode(&self, default: PlanMode) -> Result<PlanMode, CliError> {
        match &self.opts.mode {
            Some(m) => m.parse().map_err(CliError::Config),
            None => Ok(default),
        }
    }

    fn decoder(&self) -> Result<Decoder, CliError> {
        match &self.opts.decoder {
            Some(d) => d.parse().map_err(CliError::Config),
            None => Ok(Decoder::Auto),
        }
    }

    pub fn plan(&self, n: u64, mode: PlanMode) -> Result<Plan, CliError> {
        let prof = self.profile();
        let ax = self.src.sizes().x;
        Ok(match mode {
            PlanMode::TheoremMain => plan_theorem_main(n, self.eps, self.sigma, &prof, ax)?,
            PlanMode::Remark => plan_remark(n, self.eps, self.sigma, &prof, ax)?,
            PlanMode::BerryEsseen => plan_berry_esseen(n, self.eps, self.sigma, &prof)?,
            PlanMode::DeskExact => {
                let bsc = self.bsc.ok_or_else(|| {
                    CliError::Config("desk_exact needs a binary symmetric chain source".into())
                })?;
                plan_desk_exact(n, self.eps, bsc, self.sigma)?
            }
            PlanMode::Manual => {
                let (Some(t), Some(ell)) = (self.opts.t, self.opts.ell) else {
                    return Err(CliError::Config("manual plans need --t and --ell".into()));
                };
                Plan::manual(
                    n,
                    self.eps,
                    self.sigma,
                    self.opts.lambda.unwrap_or(0.0),
                    t,
                    ell,
                )
            }
        })
    }
}

/// Bound names accepted by `bounds` and `threshold`, plus `capacity`.
pub const CAPACITY: &str = "capacity";

fn bound_list(spec: Option<&str>, default: &[&str]) -> Result<Vec<Option<BoundKind>>, CliError> {
    let names: Vec<String> = match spec {
        Some(s) => s
            .split(',')
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect(),
        None => default.iter().map(|s| s.to_string()).collect(),
    };
    if names.is_empty() {
        return Err(CliError::Config("--bounds is empty".into()));
    }
    names
        .iter()
        .map(|n| {
            if n == CAPACITY {
                Ok(None)
            } else {
                n.parse::<BoundKind>().map(Some).map_err(CliError::Config)
            }
        })
        .collect()
}

pub const DEFAULT_CURVES: [&str; 6] = [
    "theorem_main",
    "remark",
    "berry_esseen",
    "hr_linear",
    "hr_concat",
    CAPACITY,
];

pub fn cmd_bounds(cfg: &RunConfig) -> Result<Vec<CsvRow>, CliError> {
    let kinds = bound_list(cfg.opts.bounds.as_deref(), &DEFAULT_CURVES)?;
    let ns = cfg.ns()?;
    let prof = cfg.profile();
    let sizes = cfg.src.sizes();
    let capacity = prof.capacity();
    let grid: Vec<(Option<BoundKind>, u64)> = kinds
        .iter()
        .flat_map(|&k| ns.iter().map(move |&n| (k, n)))
        .collect();
    grid.par_iter()
        .map(|&(kind, n)| match kind {
            Some(k) => Ok(CsvRow::from(&evaluate(
                k, n, cfg.eps, cfg.sigma, &prof, sizes,
            )?)),
            None => Ok(CsvRow {
                bound_name: CAPACITY.into(),
                n,
                eps: cfg.eps,
                sigma: cfg.sigma,
                value_bits: capacity * n as f64,
                rate: capacity,
            }),
        })
        .collect()
}

/// Flat view of a [`Plan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRow {
    pub mode: String,
    pub n: u64,
    pub eps: f64,
    pub sigma: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps_prime: f64,
    pub delta1: f64,
    pub delta_prime: f64,
    pub lambda: f64,
    pub t: u64,
    pub ell: u64,
    pub ell_exact: f64,
    pub rate: f64,
    pub feasible: bool,
    pub approximate: bool,
    pub d_max: Option<u64>,
    pub guess_set_size: Option<u128>,
}

impl From<&Plan> for PlanRow {
    fn from(p: &Plan) -> Self {
        PlanRow {
            mode: p.mode.name().into(),
            n: p.n,
            eps: p.eps,
            sigma: p.sigma,
            eps1: p.eps1,
            eps2: p.eps2,
            eps_prime: p.eps_prime,
            delta1: p.delta1,
            delta_prime: p.delta_prime,
            lambda: p.lambda,
            t: p.t,
            ell: p.ell,
            ell_exact: p.ell_exact,
            rate: p.rate(),
            feasible: p.feasible,
            approximate: p.approximate,
            d_max: p.desk.as_ref().map(|d| d.radius),
            guess_set_size: p.desk.as_ref().map(|d| d.guess_set_size),
        }
    }
}

pub fn cmd_plan(cfg: &RunConfig) -> Result<Plan, CliError> {
    let n = cfg.single_n()?;
    cfg.plan(n, cfg.mode(PlanMode::TheoremMain)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub plan: Plan,
    pub estimate: ReliabilityEstimate,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transcripts: Vec<Transcript>,
}

/// Flat view of a [`RunReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityRow {
    pub mode: String,
    pub n: u64,
    pub eps: f64,
    pub t: u64,
    pub ell: u64,
    pub seed: u64,
    pub trials: u64,
    pub failures: u64,
    pub aborts: u64,
    pub mismatches: u64,
    pub misreconciled: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_scanned: f64,
}

impl From<&RunReport> for ReliabilityRow {
    fn from(r: &RunReport) -> Self {
        let e = &r.estimate;
        ReliabilityRow {
            mode: r.plan.mode.name().into(),
            n: r.plan.n,
            eps: r.plan.eps,
            t: r.plan.t,
            ell: r.plan.ell,
            seed: r.seed,
            trials: e.trials,
            failures: e.failures,
            aborts: e.aborts,
            mismatches: e.mismatches,
            misreconciled: e.misreconciled,
            p_hat: e.p_hat,
            ci_low: e.ci95.0,
            ci_high: e.ci95.1,
            mean_scanned: e.mean_scanned,
        }
    }
}

pub fn cmd_run(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let trials = match cfg.opts.trials {
        Some(0) | None => return Err(CliError::Config("--trials must be a positive count".into())),
        Some(t) => t,
    };
    let n = cfg.single_n()?;
    let default_mode = if cfg.bsc.is_some() {
        PlanMode::DeskExact
    } else {
        PlanMode::TheoremMain
    };
    let plan = cfg.plan(n, cfg.mode(default_mode)?)?;
    let opts = SessionOptions {
        decoder: cfg.decoder()?,
        budget: budget_from_env(),
    };
    let estimate = estimate_reliability(&cfg.src, &plan, trials, cfg.seed, opts)?;
    let shown = cfg.opts.transcripts.unwrap_or(0).min(trials as usize);
    let transcripts = (0..shown as u64)
        .map(|i| run_session(&cfg.src, &plan, trial_seed(cfg.seed, i), opts).map(|r| r.transcript))
        .collect::<Result<_, _>>()?;
    Ok(RunReport {
        seed: cfg.seed,
        plan,
        estimate,
        transcripts,
    })
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<SecrecyReport, CliError> {
    let n = cfg.single_n()?;
    let plan = cfg.plan(n, cfg.mode(PlanMode::Manual)?)?;
    let m = field_bits(n as usize, cfg.src.sizes().x);
    let ctx = GfContext::new(m).map_err(|e| CliError::Config(e.to_string()))?;
    let opts = SecrecyOptions {
        seed_samples: cfg
            .opts
            .seed_samples
            .unwrap_or(SecrecyOptions::default().seed_samples),
        rng_seed: cfg.seed,
    };
    Ok(secrecy_sd_exact(&cfg.src, &plan, &ctx, opts)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub bound_name: String,
    pub eps: f64,
    pub sigma: f64,
    /// Smallest positive block length, or `none` below the search ceiling.
    pub n_star: String,
}

pub fn cmd_threshold(cfg: &RunConfig) -> Result<Vec<ThresholdRow>, CliError> {
    let kinds = bound_list(cfg.opts.bounds.as_deref(), &["hr_linear", "hr_concat"])?;
    let ceiling = cfg.opts.ceiling.unwrap_or(MAX_SEARCH_CEILING as f64);
    if !(ceiling >= 1.0 && ceiling <= MAX_SEARCH_CEILING as f64) {
        return Err(CliError::Config(format!(
            "--ceiling must lie in [1, {MAX_SEARCH_CEILING}]"
        )));
    }
    let prof = cfg.profile();
    kinds
        .par_iter()
        .map(|k| {
            let k = k.ok_or_else(|| CliError::Config("capacity has no threshold".into()))?;
            let found = min_positive_n(
                k,
                cfg.eps,
                cfg.sigma,
                &prof,
                cfg.src.sizes(),
                ceiling as u64,
            )?;
            Ok(ThresholdRow {
                bound_name: k.name().into(),
                eps: cfg.eps,
                sigma: cfg.sigma,
                n_star: found.map_or_else(|| "none".into(), |n| n.to_string()),
            })
        })
        .collect()
}

pub fn to_csv<S: Serialize>(rows: &[S]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| CliError::Resource(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Resource(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn from_csv<D: serde::de::DeserializeOwned>(text: &str) -> Result<Vec<D>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect()
}

fn to_json<S: Serialize + ?Sized>(v: &S) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Resource(e.to_string());
    match out {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).map_err(io)?;
            so.flush().map_err(io)
        }
    }
}

fn render<S: Serialize>(
    format: Format,
    rows: &[S],
    whole: &impl Serialize,
) -> Result<String, CliError> {
    match format {
        Format::Csv => to_csv(rows),
        Format::Json => Ok(to_json(whole)),
    }
}

/// Runs one parsed command and writes its output. Returns the exit code.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    let (opts, which) = match cli.command {
        Command::Bounds(o) => (o, 0),
        Command::Plan(o) => (o, 1),
        Command::Run(o) => (o, 2),
        Command::Verify(o) => (o, 3),
        Command::Threshold(o) => (o, 4),
    };
    let cfg = RunConfig::resolve(opts)?;
    let out = cfg.out.as_deref();
    match which {
        0 => {
            let rows = cmd_bounds(&cfg)?;
            emit(
                out,
                &render(cfg.format.unwrap_or(Format::Csv), &rows, &rows)?,
            )
        }
        1 => {
            let plan = cmd_plan(&cfg)?;
            let row = PlanRow::from(&plan);
            emit(
                out,
                &render(cfg.format.unwrap_or(Format::Json), &[row], &plan)?,
            )
        }
        2 => {
            let report = cmd_run(&cfg)?;
            let row = ReliabilityRow::from(&report);
            emit(
                out,
                &render(cfg.format.unwrap_or(Format::Json), &[row], &report)?,
            )
        }
        3 => {
            let report = cmd_verify(&cfg)?;
            emit(
                out,
                &render(
                    cfg.format.unwrap_or(Format::Json),
                    std::slice::from_ref(&report),
                    &report,
                )?,
            )?;
            if report.dominated {
                Ok(())
            } else {
                Err(CliError::Verify(format!(
                    "statistical distance {} exceeds the leftover-hash bound {}",
                    report.sd_exact, report.lhl_bound
                )))
            }
        }
        _ => {
            let rows = cmd_threshold(&cfg)?;
            emit(
                out,
                &render(cfg.format.unwrap_or(Format::Csv), &rows, &rows)?,
            )
        }
    }
}

/// Entry point shared by the binary and the tests.
pub fn main_with<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("omska: {e}");
            e.code()
        }
    }
}
