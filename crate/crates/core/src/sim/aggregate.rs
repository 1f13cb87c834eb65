use serde::Serialize;

use super::trial::TrialTrace;
use crate::error::{Error, Result};

/// Normal quantile for a two-sided 95% interval.
pub const CI_Z: f64 = 1.96;

/// Mean cumulative regret per round with normal-approximation 95% half-widths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateResult {
    pub algorithm: String,
    pub trials: usize,
    pub mean: Vec<f64>,
    pub ci_half: Vec<f64>,
}

impl AggregateResult {
    pub fn horizon(&self) -> usize {
        self.mean.len()
    }

    pub fn final_mean(&self) -> f64 {
        self.mean.last().copied().unwrap_or(0.0)
    }

    pub fn final_ci_half(&self) -> f64 {
        self.ci_half.last().copied().unwrap_or(0.0)
    }
}

/// Reduces traces of one algorithm to `mean ± 1.96·s/√n` per round, with `s`
/// the sample standard deviation (`n − 1` denominator).
pub fn aggregate(traces: &[TrialTrace]) -> Result<AggregateResult> {
    if traces.len() < 2 {
        return Err(Error::arg("traces", "need at least two traces for an interval"));
    }
    let algorithm = &traces[0].algorithm;
    let horizon = traces[0].len();
    for tr in traces {
        if &tr.algorithm != algorithm {
            return Err(Error::arg(
                "traces",
                format!("mixed algorithms `{algorithm}` and `{}`", tr.algorithm),
            ));
        }
        if tr.len() != horizon {
            return Err(Error::arg(
                "traces",
                format!("lengths {horizon} and {} differ", tr.len()),
            ));
        }
    }
    let n = traces.len() as f64;
    let mut mean = Vec::with_capacity(horizon);
    let mut ci_half = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let m = traces.iter().map(|tr| tr.records[t].cum_regret).sum::<f64>() / n;
        let var = traces
            .iter()
            .map(|tr| (tr.records[t].cum_regret - m).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        mean.push(m);
        ci_half.push(CI_Z * var.sqrt() / n.sqrt());
    }
    Ok(AggregateResult {
        algorithm: algorithm.clone(),
        trials: traces.len(),
        mean,
        ci_half,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::trial::RoundRecord;

    fn trace(alg: &str, cum: &[f64]) -> TrialTrace {
        TrialTrace {
            algorithm: alg.into(),
            seed: 0,
            records: cum
                .iter()
                .enumerate()
                .map(|(i, &c)| RoundRecord {
                    t: i + 1,
                    offered_set_id: i + 1,
                    chosen_index: 0,
                    reward: 0.0,
                    inst_regret: 0.0,
                    cum_regret: c,
                })
                .collect(),
        }
    }

    #[test]
    fn identical_traces_have_zero_width() {
        let a = trace("x", &[1.0, 2.0, 3.0]);
        let agg = aggregate(&[a.clone(), a]).unwrap();
        assert_eq!(agg.mean, vec![1.0, 2.0, 3.0]);
        assert!(agg.ci_half.iter().all(|&h| h == 0.0));
    }

    #[test]
    fn two_trace_interval() {
        // Sample std of {10, 14} is √8, so the half-width is 1.96·√8/√2 = 3.92.
        let agg = aggregate(&[trace("x", &[10.0]), trace("x", &[14.0])]).unwrap();
        assert_eq!(agg.final_mean(), 12.0);
        assert!((agg.final_ci_half() - 3.92).abs() < 1e-12);
    }

    #[test]
    fn rejects_mixed_inputs() {
        assert!(aggregate(&[trace("x", &[1.0])]).is_err());
        assert!(aggregate(&[trace("x", &[1.0]), trace("y", &[1.0])]).is_err());
        assert!(aggregate(&[trace("x", &[1.0]), trace("x", &[1.0, 2.0])]).is_err());
    }
}
