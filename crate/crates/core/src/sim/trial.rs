use rand_distr::{Distribution, Normal};

use super::instance::{sample_arms, Instance};
use crate::agents::Agent;
use crate::error::{Error, Result};
use crate::relu_model::ArmSet;
use crate::seeding::{rng_from, stream};

/// Where each round's offered arms come from.
#[derive(Debug, Clone)]
pub enum ArmSource {
    /// `m` fresh uniform arms every round.
    Sphere { m: usize },
    /// The same set every round.
    Fixed(ArmSet),
}

/// One round of a trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    pub t: usize,
    pub offered_set_id: usize,
    pub chosen_index: usize,
    pub reward: f64,
    pub inst_regret: f64,
    pub cum_regret: f64,
}

/// Per-round log of one seeded run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialTrace {
    pub algorithm: String,
    pub seed: u64,
    pub records: Vec<RoundRecord>,
}

impl TrialTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn final_regret(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.cum_regret)
    }

    pub fn cumulative(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.cum_regret).collect()
    }
}

/// Plays `horizon` rounds of `agent` against `instance`.
///
/// Arms, reward noise and the agent's own randomness use separate streams keyed
/// by `seed`, so different agents run with the same seed see the same arm sets.
/// Regret is measured against the best arm of each round's offered set.
pub fn run_trial(
    instance: &Instance,
    agent: &mut dyn Agent,
    horizon: usize,
    arms: &ArmSource,
    seed: u64,
) -> Result<TrialTrace> {
    if horizon == 0 {
        return Err(Error::arg("T", "must be at least 1"));
    }
    let truth = &instance.truth;
    let noise = Normal::new(0.0, instance.sigma).map_err(|e| Error::arg("sigma", e.to_string()))?;
    let mut arm_rng = rng_from(seed, &[stream::ARMS]);
    let mut noise_rng = rng_from(seed, &[stream::NOISE]);
    let mut agent_rng = rng_from(seed, &[stream::AGENT]);

    let mut records = Vec::with_capacity(horizon);
    let mut cum = 0.0;
    let mut values = Vec::new();
    for t in 1..=horizon {
        let fresh;
        let (offered, set_id) = match arms {
            ArmSource::Sphere { m } => {
                fresh = sample_arms(*m, truth.d(), t, &mut arm_rng);
                (&fresh, t)
            }
            ArmSource::Fixed(set) => (set, 0),
        };
        if offered.dim() != truth.d() {
            return Err(Error::DimensionMismatch {
                expected: truth.d(),
                actual: offered.dim(),
            });
        }
        values.clear();
        values.extend(offered.arms().iter().map(|x| truth.value_unchecked(x.as_slice())));
        let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        let chosen = agent.select(offered, &mut agent_rng)?;
        if chosen >= offered.len() {
            return Err(Error::Protocol(format!(
                "agent chose arm {chosen} of {}",
                offered.len()
            )));
        }
        let mean = values[chosen];
        let reward = mean
            + if instance.sigma > 0.0 {
                noise.sample(&mut noise_rng)
            } else {
                0.0
            };
        agent.observe(reward)?;

        let inst_regret = (best - mean).max(0.0);
        cum += inst_regret;
        records.push(RoundRecord {
            t,
            offered_set_id: set_id,
            chosen_index: chosen,
            reward,
            inst_regret,
            cum_regret: cum,
        });
    }
    Ok(TrialTrace {
        algorithm: agent.name().to_string(),
        seed,
        records,
    })
}
