use rand::RngCore;

use super::{uniform_index, Agent, Protocol};
use crate::error::{Error, Result};
use crate::linear_ucb::{LinearUcbState, UcbConfig};
use crate::relu_model::ArmSet;

/// OFUL on the raw `d`-dimensional arms, i.e. under a (misspecified) linear
/// reward model.
pub struct OfulBaseline {
    ucb: UcbConfig,
    state: LinearUcbState,
    protocol: Protocol,
}

impl OfulBaseline {
    pub fn new(ucb: UcbConfig, d: usize) -> Result<Self> {
        ucb.validate()?;
        Ok(Self {
            state: LinearUcbState::new(d, ucb.lambda)?,
            ucb,
            protocol: Protocol::default(),
        })
    }

    pub fn state(&self) -> &LinearUcbState {
        &self.state
    }
}

impl Agent for OfulBaseline {
    fn name(&self) -> &'static str {
        "oful"
    }

    fn select(&mut self, arms: &ArmSet, _rng: &mut dyn RngCore) -> Result<usize> {
        self.protocol.begin()?;
        if arms.dim() != self.state.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.state.dim(),
                actual: arms.dim(),
            });
        }
        let beta = self.state.conf_radius(&self.ucb)?;
        let mut best = (0, f64::NEG_INFINITY);
        for (i, x) in arms.arms().iter().enumerate() {
            let v = self.state.ucb_value(x.as_slice(), beta);
            if v > best.1 {
                best = (i, v);
            }
        }
        Ok(self.protocol.choose(arms, best.0))
    }

    fn observe(&mut self, reward: f64) -> Result<()> {
        let obs = self.protocol.finish(reward)?;
        self.state.ridge_update(obs.action.as_slice(), reward)
    }

    fn rounds(&self) -> usize {
        self.protocol.completed()
    }
}

/// Uniformly random arm every round.
#[derive(Default)]
pub struct RandomAgent {
    protocol: Protocol,
}

impl RandomAgent {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Agent for RandomAgent {
    fn name(&self) -> &'static str {
        "random"
    }

    fn select(&mut self, arms: &ArmSet, rng: &mut dyn RngCore) -> Result<usize> {
        self.protocol.begin()?;
        let i = uniform_index(arms, rng);
        Ok(self.protocol.choose(arms, i))
    }

    fn observe(&mut self, reward: f64) -> Result<()> {
        self.protocol.finish(reward).map(|_| ())
    }

    fn rounds(&self) -> usize {
        self.protocol.completed()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::rng_from;

    #[test]
    fn random_histogram_is_flat() {
        let arms = ArmSet::from_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, 0.0], &[0.0, -1.0], &[0.6, 0.8]], 0).unwrap();
        let mut agent = RandomAgent::new();
        let mut rng = rng_from(21, &[]);
        let n = 100_000;
        let mut counts = [0usize; 5];
        for _ in 0..n {
            counts[agent.select(&arms, &mut rng).unwrap()] += 1;
            agent.observe(0.0).unwrap();
        }
        let p = 0.2;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - n as f64 * p).abs() < 3.0 * sd, "{counts:?}");
        }
    }

    #[test]
    fn random_is_seed_reproducible() {
        let arms = ArmSet::from_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, 0.0]], 0).unwrap();
        let run = |seed| {
            let mut agent = RandomAgent::new();
            let mut rng = rng_from(seed, &[]);
            (0..50)
                .map(|_| {
                    let i = agent.select(&arms, &mut rng).unwrap();
                    agent.observe(0.0).unwrap();
                    i
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(3), run(3));
        assert_ne!(run(3), run(4));
    }

    #[test]
    fn oful_prefers_known_good_arm() {
        let ucb = UcbConfig {
            sigma: 0.01,
            s_bound: 1.0,
            delta: 0.05,
            lambda: 1.0,
        };
        let arms = ArmSet::from_rows(&[&[1.0, 0.0], &[0.0, 1.0]], 0).unwrap();
        let mut agent = OfulBaseline::new(ucb, 2).unwrap();
        let mut rng = rng_from(0, &[]);
        let mut last = Vec::new();
        for _ in 0..300 {
            let i = agent.select(&arms, &mut rng).unwrap();
            agent.observe(if i == 0 { 1.0 } else { 0.2 }).unwrap();
            last.push(i);
        }
        assert!(last[200..].iter().all(|&i| i == 0));
    }
}
