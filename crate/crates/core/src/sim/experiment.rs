use std::path::Path;

use rayon::prelude::*;

use super::aggregate::{aggregate, AggregateResult};
use super::instance::gen_instance;
use super::output::{summaries, write_aggregate_csv, write_summary_json, write_svg, write_traces_csv};
use super::trial::{run_trial, ArmSource, TrialTrace};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::seeding::{derive_seed, rng_from, stream};

/// Traces and aggregates of every configured algorithm, in config order.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    /// `traces[a][i]` is trial `i` of algorithm `a`.
    pub traces: Vec<Vec<TrialTrace>>,
    pub aggregates: Vec<AggregateResult>,
}

impl ExperimentResult {
    pub fn all_traces(&self) -> Vec<TrialTrace> {
        self.traces.iter().flatten().cloned().collect()
    }
}

/// Seed shared by every algorithm in trial `trial`.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    derive_seed(master, &[trial as u64])
}

/// Runs `trials × algorithms` independent cells on a pool of `jobs` threads.
///
/// The output does not depend on `jobs`.
pub fn run_experiment(cfg: &ExperimentConfig, jobs: usize) -> Result<ExperimentResult> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Numeric(format!("thread pool: {e}")))?;
    let n_alg = cfg.algorithms.len();
    let cells: Vec<(usize, usize)> = (0..cfg.trials).flat_map(|i| (0..n_alg).map(move |a| (i, a))).collect();
    let source = ArmSource::Sphere { m: cfg.arms_per_round };
    let done: Vec<TrialTrace> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(i, a)| {
                let seed = trial_seed(cfg.seed, i);
                let mut rng = rng_from(seed, &[stream::INSTANCE]);
                let mut instance = gen_instance(cfg.k, cfg.d, cfg.alpha0, cfg.sigma, &mut rng)?;
                instance.seed = Some(seed);
                let mut agent = cfg.build_agent(&cfg.algorithms[a], seed)?;
                run_trial(&instance, agent.as_mut(), cfg.horizon, &source, seed)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut traces: Vec<Vec<TrialTrace>> = vec![Vec::with_capacity(cfg.trials); n_alg];
    for ((_, a), tr) in cells.into_iter().zip(done) {
        traces[a].push(tr);
    }
    let aggregates = traces.iter().map(|t| aggregate(t)).collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult { traces, aggregates })
}

/// Writes `traces.csv`, `aggregate.csv`, `summary.json` and `regret.svg` into `dir`.
pub fn write_outputs(result: &ExperimentResult, cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_traces_csv(&result.all_traces(), &dir.join("traces.csv"))?;
    write_aggregate_csv(&result.aggregates, &dir.join("aggregate.csv"))?;
    let echo = serde_json::to_value(cfg.resolved()).expect("config serializes");
    write_summary_json(&summaries(&result.aggregates, &echo), &dir.join("summary.json"))?;
    write_svg(&result.aggregates, &dir.join("regret.svg"))
}
