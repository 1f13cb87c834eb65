//! Command-line front end: `simulate`, `estimate` and `check-bounds`.
//!
//! Exit codes: `0` success, `1` runtime failure, `2` invalid configuration or arguments.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::estimation::{
    alpha_bound, fit_erm_report, h_bound, match_neurons, t0_schedule, zeta_bound, BoundParams, FitConfig, Sample,
};
use crate::relu_model::eval_f;
use crate::seeding::{derive_seed, rng_from, stream};
use crate::sim::{format_number, gen_instance, run_experiment, sample_arms, write_outputs};

pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "relu-bandit",
    version,
    about = "ReLU bandit simulations and bound evaluators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every (algorithm, trial) cell of an experiment and write CSV/JSON/SVG.
    Simulate(CommonArgs),
    /// Fit a network to noisy samples and report recovery errors.
    Estimate(CommonArgs),
    /// Evaluate the closed-form bounds.
    CheckBounds(BoundArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output directory; overrides the config.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the available cores.
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
    /// Master seed; overrides the config.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
}

/// Bound inputs. `--jobs` and `--seed` are accepted for uniformity; the
/// evaluation is deterministic and single-threaded.
#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Also write the report to `DIR/bounds.txt`.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long = "horizon", value_name = "T")]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    /// Sample count for `ζ`.
    #[arg(long)]
    pub n: Option<usize>,
}

/// A CLI failure tagged with its exit code.
#[derive(Debug)]
pub enum Failure {
    Invalid(Error),
    Runtime(Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => EXIT_INVALID,
            Failure::Runtime(_) => EXIT_RUNTIME,
        }
    }

    pub fn error(&self) -> &Error {
        match self {
            Failure::Invalid(e) | Failure::Runtime(e) => e,
        }
    }
}

fn invalid(e: Error) -> Failure {
    Failure::Invalid(e)
}

fn runtime(e: Error) -> Failure {
    Failure::Runtime(e)
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::config("<json>", e.to_string()))
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { 0 };
        }
    };
    match dispatch(&cli.command) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(f) => {
            eprintln!("error: {}", f.error());
            f.exit_code()
        }
    }
}

/// Runs a parsed command and returns its stdout text.
pub fn dispatch(cmd: &Command) -> Result<String, Failure> {
    match cmd {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::CheckBounds(a) => cmd_check_bounds(a),
    }
}

pub fn cmd_simulate(args: &CommonArgs) -> Result<String, Failure> {
    let mut cfg = ExperimentConfig::from_path(&args.config).map_err(|e| match e {
        Error::Io { .. } => invalid(Error::config("--config", e.to_string())),
        e => invalid(e),
    })?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = &args.out {
        cfg.output_dir = Some(o.clone());
    }
    let jobs = args.jobs.unwrap_or_else(default_jobs);
    if jobs == 0 {
        return Err(invalid(Error::config("--jobs", "must be positive")));
    }
    let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    let result = run_experiment(&cfg, jobs).map_err(runtime)?;
    write_outputs(&result, &cfg, &dir).map_err(runtime)?;
    let mut out = String::new();
    for a in &result.aggregates {
        let _ = writeln!(
            out,
            "{:<14} final regret {} ± {}",
            a.algorithm,
            format_number(a.final_mean()),
            format_number(a.final_ci_half())
        );
    }
    let _ = writeln!(out, "wrote {}", dir.display());
    Ok(out)
}

fn default_est_sigma() -> f64 {
    0.1
}
fn default_est_alpha0() -> f64 {
    0.1
}
fn default_instances() -> usize {
    5
}
fn default_est_delta() -> f64 {
    0.05
}

/// Input of the `estimate` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    pub k: usize,
    pub d: usize,
    #[serde(default = "default_est_sigma")]
    pub sigma: f64,
    #[serde(default = "default_est_alpha0")]
    pub alpha0: f64,
    pub seed: u64,
    /// Sample sizes to sweep.
    pub n: Vec<usize>,
    /// Independent instances averaged per sample size.
    #[serde(default = "default_instances")]
    pub instances: usize,
    /// Confidence level for the printed `ζ` and `α`.
    #[serde(default = "default_est_delta")]
    pub delta: f64,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl EstimateConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |f: &str, m: &str| Err(Error::config(f, m));
        if self.k == 0 {
            return bad("k", "must be positive");
        }
        if self.d < 2 {
            return bad("d", "must be at least 2");
        }
        if !(self.sigma >= 0.0) {
            return bad("sigma", "must be nonnegative");
        }
        if !(self.alpha0 >= 0.0) {
            return bad("alpha0", "must be nonnegative");
        }
        if self.n.is_empty() || self.n.contains(&0) {
            return bad("n", "needs at least one positive sample size");
        }
        if self.instances == 0 {
            return bad("instances", "must be positive");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta", "must be in (0, 1)");
        }
        self.fit.validate()
    }
}

/// Recovery statistics for one sample size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRow {
    pub n: usize,
    pub mean_max_error: f64,
    pub mean_loss: f64,
    /// Per-neuron errors on the first instance.
    pub first_errors: Vec<f64>,
    pub zeta: f64,
    pub alpha: f64,
}

/// Runs the sample-size sweep of an [`EstimateConfig`].
pub fn run_estimate(cfg: &EstimateConfig) -> Result<Vec<EstimateRow>> {
    cfg.validate()?;
    let params = BoundParams::new(cfg.k, cfg.d, cfg.sigma, cfg.delta, 2.0);
    let mut rows = Vec::with_capacity(cfg.n.len());
    for &n in &cfg.n {
        let (mut err_sum, mut loss_sum) = (0.0, 0.0);
        let mut first_errors = Vec::new();
        for j in 0..cfg.instances {
            let seed = derive_seed(cfg.seed, &[j as u64]);
            let inst = gen_instance(
                cfg.k,
                cfg.d,
                cfg.alpha0,
                cfg.sigma,
                &mut rng_from(seed, &[stream::INSTANCE]),
            )?;
            // Nested sample sets: a larger n extends the smaller ones.
            let mut arm_rng = rng_from(seed, &[stream::ARMS]);
            let mut noise_rng = rng_from(seed, &[stream::NOISE]);
            let arms = sample_arms(n, cfg.d, 0, &mut arm_rng);
            let mut data = Vec::with_capacity(n);
            for x in arms.arms() {
                let z: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut noise_rng);
                data.push(Sample::new(x.clone(), eval_f(&inst.truth, x)? + cfg.sigma * z));
            }
            let fit = FitConfig {
                seed: derive_seed(seed, &[stream::ESTIMATE, cfg.fit.seed]),
                ..cfg.fit.clone()
            };
            let report = fit_erm_report(&data, cfg.k, &fit)?;
            let m = match_neurons(&report.net, &inst.truth)?;
            err_sum += m.max_error;
            loss_sum += report.loss;
            if j == 0 {
                first_errors = m.errors;
            }
        }
        let zeta = zeta_bound(n, &params)?;
        rows.push(EstimateRow {
            n,
            mean_max_error: err_sum / cfg.instances as f64,
            mean_loss: loss_sum / cfg.instances as f64,
            first_errors,
            zeta,
            alpha: alpha_bound(zeta, &params)?,
        });
    }
    Ok(rows)
}

pub fn cmd_estimate(args: &CommonArgs) -> Result<String, Failure> {
    let mut cfg: EstimateConfig = read_json(&args.config).map_err(invalid)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    cfg.validate().map_err(invalid)?;
    let rows = run_estimate(&cfg).map_err(runtime)?;
    let mut out = String::new();
    let _ = writeln!(out, "n,mean_max_error,mean_loss,zeta,alpha");
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            format_number(r.mean_max_error),
            format_number(r.mean_loss),
            format_number(r.zeta),
            format_number(r.alpha)
        );
    }
    for r in &rows {
        let errs: Vec<String> = r.first_errors.iter().map(|&e| format_number(e)).collect();
        let _ = writeln!(out, "n={} neuron errors: {}", r.n, errs.join(" "));
    }
    if let Some(dir) = args.out.clone().or(cfg.output_dir.clone()) {
        std::fs::create_dir_all(&dir).map_err(|e| runtime(Error::io(&dir, e)))?;
        let path = dir.join("estimate.json");
        let body = serde_json::json!({ "config": cfg, "rows": rows });
        let text = serde_json::to_string_pretty(&body).expect("estimate serializes") + "\n";
        std::fs::write(&path, text).map_err(|e| runtime(Error::io(&path, e)))?;
    }
    Ok(out)
}

fn default_eps_grid() -> Vec<f64> {
    vec![0.001, 0.002, 0.005]
}

/// Inputs of `check-bounds`; flags override values read from `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub k: Option<usize>,
    pub d: Option<usize>,
    pub sigma: Option<f64>,
    pub delta: Option<f64>,
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    pub nu: Option<f64>,
    pub n: Option<usize>,
    #[serde(rename = "C1", default)]
    pub c1: Option<f64>,
    #[serde(rename = "C2", default)]
    pub c2: Option<f64>,
    #[serde(default)]
    pub eta: f64,
    #[serde(default = "default_eps_grid")]
    pub eps: Vec<f64>,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            k: None,
            d: None,
            sigma: None,
            delta: None,
            horizon: None,
            nu: None,
            n: None,
            c1: None,
            c2: None,
            eta: 0.0,
            eps: default_eps_grid(),
        }
    }
}

fn required<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::config(name, "missing; pass it as a flag or in --config"))
}

/// Evaluates the bounds and renders one `name = value` line each.
pub fn render_bounds(cfg: &BoundsConfig) -> Result<String, Failure> {
    let k = required(cfg.k, "k").map_err(invalid)?;
    let d = required(cfg.d, "d").map_err(invalid)?;
    let p = BoundParams {
        k,
        d,
        sigma: required(cfg.sigma, "sigma").map_err(invalid)?,
        delta: required(cfg.delta, "delta").map_err(invalid)?,
        c1: cfg.c1.unwrap_or(1.0),
        c2: cfg.c2.unwrap_or(1.0),
        horizon: required(cfg.horizon, "T").map_err(invalid)?,
    };
    let nu = required(cfg.nu, "nu").map_err(invalid)?;
    let n = required(cfg.n, "n").map_err(invalid)?;
    p.validate().map_err(invalid)?;
    if !(nu > 0.0) {
        return Err(invalid(Error::config("nu", "must be positive")));
    }
    if n == 0 {
        return Err(invalid(Error::config("n", "must be positive")));
    }
    let zeta = zeta_bound(n, &p).map_err(runtime)?;
    let alpha = alpha_bound(zeta, &p).map_err(runtime)?;
    let t0 = t0_schedule(nu, &p).map_err(runtime)?;
    let mut out = String::new();
    let _ = writeln!(out, "zeta = {}", format_number(zeta));
    let _ = writeln!(out, "alpha = {}", format_number(alpha));
    let _ = writeln!(out, "t0 = {}", format_number(t0));
    for &eps in &cfg.eps {
        let line = match h_bound(cfg.eta, eps, k, d) {
            Ok(h) => format_number(h),
            Err(Error::UnsupportedDimension(..)) => "unsupported (d < 3)".to_string(),
            Err(Error::BoundVacuous(den)) => format!("vacuous (denominator {})", format_number(den)),
            Err(e) => return Err(runtime(e)),
        };
        let _ = writeln!(
            out,
            "h(eta={}, eps={}) = {line}",
            format_number(cfg.eta),
            format_number(eps)
        );
    }
    Ok(out)
}

pub fn cmd_check_bounds(args: &BoundArgs) -> Result<String, Failure> {
    let mut cfg = match &args.config {
        Some(path) => read_json::<BoundsConfig>(path).map_err(invalid)?,
        None => BoundsConfig::default(),
    };
    cfg.k = args.k.or(cfg.k);
    cfg.d = args.d.or(cfg.d);
    cfg.sigma = args.sigma.or(cfg.sigma);
    cfg.delta = args.delta.or(cfg.delta);
    cfg.horizon = args.horizon.or(cfg.horizon);
    cfg.nu = args.nu.or(cfg.nu);
    cfg.n = args.n.or(cfg.n);
    let text = render_bounds(&cfg)?;
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|e| runtime(Error::io(dir, e)))?;
        let path = dir.join("bounds.txt");
        std::fs::write(&path, &text).map_err(|e| runtime(Error::io(&path, e)))?;
    }
    Ok(text)
}
