//! Experiment runner behind the `fso-acq` binary.
//!
//! Every command resolves a parameter set (defaults, then `--config`, then
//! `--set` overrides, then `--mode`), writes its CSVs plus `manifest.cfg`,
//! `plot.py` and `schemas.md` into the output directory, and returns the
//! list of files written. Output bytes depend only on the inputs, never on
//! the worker count.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fso_acq::acqstats::expected_time;
use fso_acq::optimizer::{
    alpha_grid, optimize_alpha_cdf, optimize_alpha_mean_time, optimize_n0, sweep_alpha, Objective,
};
use fso_acq::simulator::{SimFidelity, SimSummary, Simulator, RNG_ALGORITHM};
use fso_acq::{NormalizationMode, Params};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "FSO_ACQ_THREADS";

const SCHEMAS: &str = include_str!("../schemas.md");
const PLOT_SCRIPT: &str = include_str!("plot.py");

/// Golden-section stopping width for the `alpha` optimizers.
const ALPHA_TOL: f64 = 1e-6;
/// Pulse budgets scanned by `sweep-n0` and the `N₀` optimizer by default.
const DEFAULT_N0_RANGE: (u32, u32) = (2, 50);

/// Failures that map to a dedicated exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// Bad flags, config file or override.
    Config(String),
    /// At least one `|z| > 3` in `validate`.
    Validation(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(msg) => write!(f, "configuration error: {msg}"),
            Failure::Validation(msg) => write!(f, "validation failed: {msg}"),
        }
    }
}

impl std::error::Error for Failure {}

/// Exit status for an error: 1 configuration, 2 numeric or geometric
/// infeasibility, 3 validation failure.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(f) = cause.downcast_ref::<Failure>() {
            return match f {
                Failure::Config(_) => 1,
                Failure::Validation(_) => 3,
            };
        }
        if let Some(e) = cause.downcast_ref::<fso_acq::Error>() {
            return match e {
                fso_acq::Error::Config { .. } | fso_acq::Error::InvalidParameter { .. } => 1,
                _ => 2,
            };
        }
    }
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Paper,
    Corrected,
}

impl From<ModeArg> for NormalizationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Paper => NormalizationMode::PaperFaithful,
            ModeArg::Corrected => NormalizationMode::Corrected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FidelityArg {
    Faithful,
    Physical,
}

impl From<FidelityArg> for SimFidelity {
    fn from(f: FidelityArg) -> Self {
        match f {
            FidelityArg::Faithful => SimFidelity::FaithfulToAnalytic,
            FidelityArg::Physical => SimFidelity::Physical,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fso-acq",
    version,
    about = "Acquisition-time model for lidar-assisted FSO links"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Mean acquisition time over an alpha grid, one curve per N0.
    SweepAlpha(Opts),
    /// Mean acquisition time over a range of N0, one curve per alpha.
    SweepN0(Opts),
    /// P(T <= t) over an alpha grid.
    Cdf(Opts),
    /// Optimal alpha for E[T] and for P(T <= t), and optimal N0.
    Optimize(Opts),
    /// Monte Carlo runs of the acquisition procedure.
    Simulate(Opts),
    /// Monte Carlo against the analytic model, with z-scores.
    Validate(Opts),
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Config file (`key = value` per line).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Parameter override, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Points in the alpha grid (cell midpoints of (0, 1)).
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    /// Comma-separated pulse budgets.
    #[arg(long, value_delimiter = ',')]
    pub n0: Vec<u32>,
    /// Comma-separated energy splits.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    /// Comma-separated deadlines in seconds.
    #[arg(long, value_delimiter = ',')]
    pub t: Vec<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value = "faithful")]
    pub fidelity: FidelityArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SweepAlpha,
    SweepN0,
    Cdf,
    Optimize,
    Simulate,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SweepAlpha => "sweep-alpha",
            Command::SweepN0 => "sweep-n0",
            Command::Cdf => "cdf",
            Command::Optimize => "optimize",
            Command::Simulate => "simulate",
            Command::Validate => "validate",
        }
    }
}

/// Everything one run needs.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub command: Command,
    pub config_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub overrides: Vec<String>,
    pub seed: u64,
    pub trials: u64,
    pub grid_size: usize,
    pub n0: Vec<u32>,
    pub alpha: Vec<f64>,
    pub t: Vec<f64>,
    pub mode: Option<NormalizationMode>,
    pub fidelity: SimFidelity,
    /// Worker threads; `None` defers to `FSO_ACQ_THREADS`, then rayon's default.
    pub threads: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(command: Command, output_dir: impl Into<PathBuf>) -> Self {
        ExperimentSpec {
            command,
            config_path: None,
            output_dir: output_dir.into(),
            overrides: Vec::new(),
            seed: 42,
            trials: 100_000,
            grid_size: 200,
            n0: Vec::new(),
            alpha: Vec::new(),
            t: Vec::new(),
            mode: None,
            fidelity: SimFidelity::FaithfulToAnalytic,
            threads: None,
        }
    }
}

impl From<Cli> for ExperimentSpec {
    fn from(cli: Cli) -> Self {
        let (command, o) = match cli.command {
            CommandArgs::SweepAlpha(o) => (Command::SweepAlpha, o),
            CommandArgs::SweepN0(o) => (Command::SweepN0, o),
            CommandArgs::Cdf(o) => (Command::Cdf, o),
            CommandArgs::Optimize(o) => (Command::Optimize, o),
            CommandArgs::Simulate(o) => (Command::Simulate, o),
            CommandArgs::Validate(o) => (Command::Validate, o),
        };
        ExperimentSpec {
            command,
            config_path: o.config,
            output_dir: o.out,
            overrides: o.set,
            seed: o.seed,
            trials: o.trials,
            grid_size: o.grid,
            n0: o.n0,
            alpha: o.alpha,
            t: o.t,
            mode: o.mode.map(Into::into),
            fidelity: o.fidelity.into(),
            threads: None,
        }
    }
}

/// Files written by a successful run and a short human-readable report.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub report: String,
}

/// Defaults, then the config file, then overrides, then `--mode`; validated.
pub fn resolve_params(spec: &ExperimentSpec) -> Result<Params> {
    let mut params = Params::default();
    if let Some(path) = &spec.config_path {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        params
            .apply_config(&text)
            .with_context(|| format!("in config file {}", path.display()))?;
    }
    for item in &spec.overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("override `{item}` is not KEY=VALUE")))?;
        params
            .set(key.trim(), value)
            .map_err(|msg| Failure::Config(format!("override `{item}`: {msg}")))?;
    }
    if let Some(mode) = spec.mode {
        params.normalization_mode = mode;
    }
    Ok(params.validate()?)
}

fn thread_count(spec: &ExperimentSpec) -> Result<Option<usize>> {
    if let Some(n) = spec.threads {
        return Ok(Some(n.max(1)));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v.trim().parse().map_err(|_| {
                Failure::Config(format!("{THREADS_ENV}=`{v}` is not a positive integer"))
            })?;
            if n == 0 {
                return Err(Failure::Config(format!("{THREADS_ENV} must be >= 1")).into());
            }
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

/// Runs one experiment.
pub fn run(spec: &ExperimentSpec) -> Result<Outcome> {
    let params = resolve_params(spec)?;
    check_lists(spec)?;
    match thread_count(spec)? {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("building worker pool")?;
            pool.install(|| dispatch(spec, &params))
        }
        None => dispatch(spec, &params),
    }
}

fn check_lists(spec: &ExperimentSpec) -> Result<()> {
    if spec.grid_size < 1 {
        return Err(Failure::Config("--grid must be >= 1".into()).into());
    }
    if let Some(a) = spec.alpha.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        return Err(Failure::Config(format!("--alpha {a} outside (0, 1)")).into());
    }
    if let Some(n) = spec.n0.iter().find(|n| **n < 2) {
        return Err(Failure::Config(format!("--n0 {n} must be >= 2")).into());
    }
    if let Some(t) = spec.t.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Failure::Config(format!("--t {t} must be finite and >= 0")).into());
    }
    if matches!(spec.command, Command::Simulate | Command::Validate) && spec.trials < 1 {
        return Err(Failure::Config("--trials must be >= 1".into()).into());
    }
    Ok(())
}

fn dispatch(spec: &ExperimentSpec, params: &Params) -> Result<Outcome> {
    let dir = &spec.output_dir;
    fs::create_dir_all(dir)
        .map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))?;
    let mut out = Writer::new(dir);
    let mut report = String::new();
    match spec.command {
        Command::SweepAlpha => cmd_sweep_alpha(spec, params, &mut out, &mut report)?,
        Command::SweepN0 => cmd_sweep_n0(spec, params, &mut out, &mut report)?,
        Command::Cdf => cmd_cdf(spec, params, &mut out, &mut report)?,
        Command::Optimize => cmd_optimize(spec, params, &mut out, &mut report)?,
        Command::Simulate => cmd_simulate(spec, params, &mut out, &mut report)?,
        Command::Validate => {
            let failures = cmd_validate(spec, params, &mut out, &mut report)?;
            out.finish(spec, params)?;
            if failures > 0 {
                return Err(Failure::Validation(format!(
                    "{failures} z-score(s) exceed 3; see {}",
                    dir.join("validate.csv").display()
                ))
                .into());
            }
            return Ok(Outcome {
                files: out.files,
                report,
            });
        }
    }
    out.finish(spec, params)?;
    Ok(Outcome {
        files: out.files,
        report,
    })
}

/// Real number in round-trip-safe scientific notation.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    fn new(dir: &'a Path) -> Self {
        Writer {
            dir,
            files: Vec::new(),
        }
    }

    fn write(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(path);
        Ok(())
    }

    fn finish(&mut self, spec: &ExperimentSpec, params: &Params) -> Result<()> {
        self.write("manifest.cfg", &manifest(spec, params))?;
        self.write("plot.py", PLOT_SCRIPT)?;
        self.write("schemas.md", SCHEMAS)
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Resolved parameters in config syntax, preceded by run metadata as
/// comments. Feeding it back through `--config` reproduces the run.
pub fn manifest(spec: &ExperimentSpec, params: &Params) -> String {
    let mut m = String::new();
    let _ = writeln!(m, "# fso-acq run manifest");
    let _ = writeln!(m, "# command: {}", spec.command.name());
    let _ = writeln!(m, "# version: {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(m, "# seed: {}", spec.seed);
    let _ = writeln!(m, "# trials: {}", spec.trials);
    let _ = writeln!(m, "# grid: {}", spec.grid_size);
    let _ = writeln!(m, "# n0: {}", join(&spec.n0));
    let _ = writeln!(m, "# alpha: {}", join(&spec.alpha));
    let _ = writeln!(m, "# t_s: {}", join(&spec.t));
    let _ = writeln!(m, "# normalization_mode: {}", params.normalization_mode);
    let _ = writeln!(m, "# fidelity: {}", spec.fidelity);
    let _ = writeln!(m, "# rng: {RNG_ALGORITHM}");
    m.push_str(&params.to_config_string());
    m
}

fn with_n0(params: &Params, n0: u32) -> Result<Params> {
    Ok(Params {
        max_pulses: n0,
        ..params.clone()
    }
    .validate()?)
}

fn n0_list(spec: &ExperimentSpec, params: &Params) -> Vec<u32> {
    if spec.n0.is_empty() {
        vec![params.max_pulses]
    } else {
        spec.n0.clone()
    }
}

fn cmd_sweep_alpha(
    spec: &ExperimentSpec,
    params: &Params,
    out: &mut Writer,
    report: &mut String,
) -> Result<()> {
    let grid = alpha_grid(spec.grid_size);
    let mut csv = String::from("n0,alpha,expected_time_s,p_pulse,p_attempt\n");
    let mut rows = 0;
    for n0 in n0_list(spec, params) {
        let p = with_n0(params, n0)?;
        for s in sweep_alpha(&p, &grid, Objective::MeanTime)? {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                s.n0,
                real(s.alpha),
                real(s.objective),
                real(s.p_pulse),
                real(s.p_attempt)
            );
            rows += 1;
        }
    }
    out.write("sweep_alpha.csv", &csv)?;
    let _ = writeln!(report, "sweep_alpha.csv: {rows} rows");
    Ok(())
}

fn cmd_sweep_n0(
    spec: &ExperimentSpec,
    params: &Params,
    out: &mut Writer,
    report: &mut String,
) -> Result<()> {
    let alphas = if spec.alpha.is_empty() {
        vec![0.6]
    } else {
        spec.alpha.clone()
    };
    let n0s: Vec<u32> = if spec.n0.is_empty() {
        (DEFAULT_N0_RANGE.0..=DEFAULT_N0_RANGE.1).collect()
    } else {
        spec.n0.clone()
    };
    let mut csv = String::from("alpha,n0,expected_time_s,p_pulse,p_attempt\n");
    let mut rows = 0;
    for &alpha in &alphas {
        for &n0 in &n0s {
            let p = with_n0(params, n0)?;
            let s = sweep_alpha(&p, &[alpha], Objective::MeanTime)?[0];
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                real(alpha),
                n0,
                real(s.objective),
                real(s.p_pulse),
                real(s.p_attempt)
            );
            rows += 1;
        }
    }
    out.write("sweep_n0.csv", &csv)?;
    let _ = writeln!(report, "sweep_n0.csv: {rows} rows");
    Ok(())
}

fn t_list(spec: &ExperimentSpec, default: &[f64]) -> Vec<f64> {
    if spec.t.is_empty() {
        default.to_vec()
    } else {
        spec.t.clone()
    }
}

fn cmd_cdf(
    spec: &ExperimentSpec,
    params: &Params,
    out: &mut Writer,
    report: &mut String,
) -> Result<()> {
    let grid = alpha_grid(spec.grid_size);
    let mut csv = String::from("n0,t_s,alpha,cdf\n");
    let mut rows = 0;
    for n0 in n0_list(spec, params) {
        let p = with_n0(params, n0)?;
        for t in t_list(spec, &[12.0]) {
            for s in sweep_alpha(&p, &grid, Objective::CdfAtT(t))? {
                let _ = writeln!(
                    csv,
                    "{},{},{},{}",
                    n0,
                    real(t),
                    real(s.alpha),
                    real(s.objective)
                );
                rows += 1;
            }
        }
    }
    out.write("cdf.csv", &csv)?;
    let _ = writeln!(report, "cdf.csv: {rows} rows");
    Ok(())
}

fn cmd_optimize(
    spec: &ExperimentSpec,
    params: &Params,
    out: &mut Writer,
    report: &mut String,
) -> Result<()> {
    let half = 0.5 / spec.grid_size.max(1) as f64;
    let bracket = (half, 1.0 - half);
    let mut csv = String::from("problem,n0,alpha,t_s,objective,refinement_iterations\n");
    for n0 in n0_list(spec, params) {
        let p = with_n0(params, n0)?;
        let r = optimize_alpha_mean_time(&p, bracket, ALPHA_TOL)?;
        let a = r.argument.alpha().unwrap_or(f64::NAN);
        let _ = writeln!(
            csv,
            "mean_time_alpha,{n0},{},,{},{}",
            real(a),
            real(r.objective_value),
            r.refinement_iterations
        );
        let _ = writeln!(
            report,
            "N0={n0}: alpha*={a:.6} E[T]={:.9e} s",
            r.objective_value
        );
        for t in t_list(spec, &[12.0]) {
            let r = optimize_alpha_cdf(&p, bracket, ALPHA_TOL, t)?;
            let a = r.argument.alpha().unwrap_or(f64::NAN);
            let _ = writeln!(
                csv,
                "cdf_alpha,{n0},{},{},{},{}",
                real(a),
                real(t),
                real(r.objective_value),
                r.refinement_iterations
            );
            let _ = writeln!(
                report,
                "N0={n0} t={t} s: alpha*={a:.6} P(T<=t)={}",
                r.objective_value
            );
        }
    }
    let alphas = if spec.alpha.is_empty() {
        vec![0.6]
    } else {
        spec.alpha.clone()
    };
    for alpha in alphas {
        let r = optimize_n0(params, DEFAULT_N0_RANGE.0, DEFAULT_N0_RANGE.1, alpha)?;
        let n = r.argument.n0().unwrap_or(0);
        let _ = writeln!(
            csv,
            "mean_time_n0,{n},{},,{},{}",
            real(alpha),
            real(r.objective_value),
            r.refinement_iterations
        );
        let _ = writeln!(
            report,
            "alpha={alpha}: N0*={n} E[T]={:.9e} s",
            r.objective_value
        );
    }
    out.write("optimize.csv", &csv)
}

/// Deadlines checked by `simulate`/`validate` when `--t` is absent: the
/// reference deadlines plus the first few points of the support, where the
/// distribution is not yet saturated.
fn default_sim_times(params: &Params) -> Vec<f64> {
    let (t1, t2, n0) = (params.t1, params.t2, f64::from(params.max_pulses));
    vec![
        t1 + t2,
        t1 + 2.0 * t2,
        t1 + n0 * t2,
        2.0 * t1 + (n0 + 1.0) * t2,
        6.0,
        12.0,
        24.0,
    ]
}

fn simulate_all(
    spec: &ExperimentSpec,
    params: &Params,
    alphas: &[f64],
    times: &[f64],
) -> Result<Vec<SimSummary>> {
    alphas
        .iter()
        .map(|&alpha| {
            Ok(Simulator::new(params, alpha, spec.fidelity)?.run_trials(
                spec.trials,
                spec.seed,
                times,
            )?)
        })
        .collect()
}

fn cmd_simulate(
    spec: &ExperimentSpec,
    params: &Params,
    out: &mut Writer,
    report: &mut String,
) -> Result<()> {
    let alphas = if spec.alpha.is_empty() {
        vec![0.5]
    } else {
        spec.alpha.clone()
    };
    let times = t_list(spec, &default_sim_times(params));
    let summaries = simulate_all(spec, params, &alphas, &times)?;
    let mut csv = String::from(
        "alpha,trials,mean_time_s,mean_time_stderr_s,p_pulse,p_pulse_stderr,total_pulses,mean_attempts\n",
    );
    let mut cdf = String::from("alpha,t_s,cdf,stderr\n");
    for s in &summaries {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            real(s.alpha),
            s.trials,
            real(s.mean_time),
            real(s.mean_time_stderr),
            real(s.empirical_p_pulse),
            real(s.p_pulse_stderr),
            s.total_pulses,
            real(s.mean_attempts)
        );
        for c in &s.empirical_cdf {
            let _ = writeln!(
                cdf,
                "{},{},{},{}",
                real(s.alpha),
                real(c.t),
                real(c.probability),
                real(c.stderr)
            );
        }
        let _ = writeln!(
            report,
            "alpha={}: mean T={:.9e} ± {:.2e} s over {} trials",
            s.alpha, s.mean_time, s.mean_time_stderr, s.trials
        );
    }
    out.write("simulate.csv", &csv)?;
    out.write("simulate_cdf.csv", &cdf)
}

/// z-score of `empirical` against `analytic`. Falls back to the binomial
/// standard error `sqrt(F(1-F)/n)` when the sample one is zero.
pub fn z_score(empirical: f64, analytic: f64, stderr: f64, binomial_n: Option<u64>) -> f64 {
    let diff = empirical - analytic;
    let mut se = stderr;
    if se == 0.0 {
        if let Some(n) = binomial_n {
            se = (analytic * (1.0 - analytic) / n as f64).max(0.0).sqrt();
        }
    }
    if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn cmd_validate(
    spec: &ExperimentSpec,
    params: &Params,
    out: &mut Writer,
    report: &mut String,
) -> Result<usize> {
    let alphas = if spec.alpha.is_empty() {
        vec![0.3, 0.5, 0.7]
    } else {
        spec.alpha.clone()
    };
    let times = t_list(spec, &default_sim_times(params));
    let summaries = simulate_all(spec, params, &alphas, &times)?;
    let mut csv = String::from("alpha,quantity,t_s,analytic,empirical,stderr,z\n");
    let mut failures = 0;
    let mut max_z: f64 = 0.0;
    let mut row = |csv: &mut String,
                   alpha: f64,
                   quantity: &str,
                   t: Option<f64>,
                   a: f64,
                   e: f64,
                   se: f64,
                   z: f64| {
        let t = t.map(real).unwrap_or_default();
        let _ = writeln!(
            csv,
            "{},{quantity},{t},{},{},{},{}",
            real(alpha),
            real(a),
            real(e),
            real(se),
            real(z)
        );
        if z.is_nan() || z.abs() > 3.0 {
            failures += 1;
        }
        max_z = max_z.max(z.abs());
    };
    for s in &summaries {
        let model = expected_time(params, s.alpha)?;
        let z = z_score(s.mean_time, model.expected_time, s.mean_time_stderr, None);
        row(
            &mut csv,
            s.alpha,
            "mean_time_s",
            None,
            model.expected_time,
            s.mean_time,
            s.mean_time_stderr,
            z,
        );
        let z = z_score(
            s.empirical_p_pulse,
            model.p_pulse,
            s.p_pulse_stderr,
            Some(s.total_pulses),
        );
        row(
            &mut csv,
            s.alpha,
            "p_pulse",
            None,
            model.p_pulse,
            s.empirical_p_pulse,
            s.p_pulse_stderr,
            z,
        );
        for c in &s.empirical_cdf {
            let analytic = model.cdf(c.t);
            let z = z_score(c.probability, analytic, c.stderr, Some(s.trials));
            row(
                &mut csv,
                s.alpha,
                "cdf",
                Some(c.t),
                analytic,
                c.probability,
                c.stderr,
                z,
            );
        }
    }
    out.write("validate.csv", &csv)?;
    let _ = writeln!(
        report,
        "validate: {} alpha value(s), {} trials each, max |z| = {max_z:.3}, {failures} above 3",
        alphas.len(),
        spec.trials
    );
    Ok(failures)
}
