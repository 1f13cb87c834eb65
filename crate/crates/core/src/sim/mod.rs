//! Environment generation, trial execution, aggregation and persistence.

mod aggregate;
mod experiment;
mod instance;
mod output;
mod trial;

pub use aggregate::{aggregate, AggregateResult, CI_Z};
pub use experiment::{run_experiment, trial_seed, write_outputs, ExperimentResult};
pub use instance::{gen_instance, sample_arms, Instance, MAX_REJECTIONS};
pub use output::{
    format_number, render_svg, summaries, write_aggregate_csv, write_summary_json, write_svg, write_traces_csv,
    Summary, AGGREGATE_HEADER, TRACE_HEADER,
};
pub use trial::{run_trial, ArmSource, RoundRecord, TrialTrace};
