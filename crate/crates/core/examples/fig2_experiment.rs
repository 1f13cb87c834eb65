//! Runs a JSON experiment config and writes traces, aggregates, summary and plot.
//!
//! ```text
//! cargo run --release --example fig2_experiment -- configs/fig2a.json out/fig2a
//! ```

use std::path::PathBuf;

use relu_bandit::sim::{run_experiment, write_outputs};
use relu_bandit::ExperimentConfig;

fn main() -> relu_bandit::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = PathBuf::from(args.next().unwrap_or_else(|| "configs/fig2a.json".into()));
    let out = PathBuf::from(args.next().unwrap_or_else(|| "out/fig2a".into()));

    let cfg = ExperimentConfig::from_path(&config)?;
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let result = run_experiment(&cfg, jobs)?;
    write_outputs(&result, &cfg, &out)?;
    for a in &result.aggregates {
        println!("{:<14} {:9.2} ± {:.2}", a.algorithm, a.final_mean(), a.final_ci_half());
    }
    Ok(())
}
