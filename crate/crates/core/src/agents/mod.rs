//! Bandit policies behind a common select/observe protocol.
//!
//! Each round the harness calls [`Agent::select`] with the offered arms and then
//! [`Agent::observe`] with the reward of the chosen arm. Calling either twice in
//! a row is a protocol error.

mod baselines;
mod ofu_relu;
mod ofu_relu_plus;
mod scorer;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::relu_model::{Action, ArmSet};

pub use baselines::{OfulBaseline, RandomAgent};
pub use ofu_relu::{OfuRelu, OfuReluConfig};
pub use ofu_relu_plus::{build_batch_grid, BatchGrid, OfuReluPlus, OfuReluPlusConfig};
pub use scorer::LinearizedScorer;

/// One completed round as seen by an agent.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentObservation {
    pub round: usize,
    pub action: Action,
    pub chosen: usize,
    pub reward: f64,
}

/// Diagnostics of the most recent optimistic choice.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub round: usize,
    pub beta: f64,
    /// `‖x‖_{V⁻¹}` of the chosen feature vector.
    pub width: f64,
    pub ucb: f64,
    /// The margin filter removed every arm and the full set was used.
    pub fallback: bool,
}

/// Which branch of its policy an agent took in a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Explore,
    Exploit,
}

pub trait Agent: Send {
    /// Algorithm tag written to traces.
    fn name(&self) -> &'static str;

    /// Picks an index into `arms` for the next round.
    fn select(&mut self, arms: &ArmSet, rng: &mut dyn RngCore) -> Result<usize>;

    /// Reports the reward of the arm returned by the last [`Agent::select`].
    fn observe(&mut self, reward: f64) -> Result<()>;

    /// Number of rounds completed so far.
    fn rounds(&self) -> usize;
}

/// Enforces alternating select/observe calls and tracks the round counter.
#[derive(Debug, Clone, Default)]
pub(crate) struct Protocol {
    completed: usize,
    pending: Option<(Action, usize)>,
}

impl Protocol {
    /// 1-based index of the round about to be played.
    pub fn next_round(&self) -> usize {
        self.completed + 1
    }

    pub fn completed(&self) -> usize {
        self.completed
    }

    pub fn begin(&self) -> Result<()> {
        if self.pending.is_some() {
            return Err(Error::Protocol(format!(
                "select called twice in round {} without observe",
                self.next_round()
            )));
        }
        Ok(())
    }

    pub fn choose(&mut self, arms: &ArmSet, index: usize) -> usize {
        self.pending = Some((arms.arms()[index].clone(), index));
        index
    }

    pub fn finish(&mut self, reward: f64) -> Result<AgentObservation> {
        let (action, chosen) = self
            .pending
            .take()
            .ok_or_else(|| Error::Protocol(format!("observe called before select in round {}", self.next_round())))?;
        self.completed += 1;
        Ok(AgentObservation {
            round: self.completed,
            action,
            chosen,
            reward,
        })
    }
}

pub(crate) fn uniform_index(arms: &ArmSet, rng: &mut dyn RngCore) -> usize {
    rng.random_range(0..arms.len())
}
