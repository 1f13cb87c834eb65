use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{uniform_index, Agent, AgentObservation, Decision, LinearizedScorer, Phase, Protocol};
use crate::error::{Error, Result};
use crate::estimation::{fit_erm, FitConfig, Sample};
use crate::linear_ucb::{LinearUcbState, UcbConfig};
use crate::relu_model::{restricted_indices, write_feature_ddagger, ArmSet, ReluNetwork};

/// Settings for [`OfuRelu`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfuReluConfig {
    /// Rounds of uniform exploration before the neurons are fitted.
    pub t0: usize,
    /// Assumed gap; arms are filtered with margin `nu/2`. Zero disables the filter.
    pub nu: f64,
    pub ucb: UcbConfig,
    pub fit: FitConfig,
}

impl OfuReluConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t0 == 0 {
            return Err(Error::config("t0", "must be at least 1"));
        }
        if !(self.nu >= 0.0) {
            return Err(Error::config("nu", "must be nonnegative"));
        }
        self.ucb.validate()?;
        self.fit.validate()
    }
}

/// Explore uniformly for `t0` rounds, fit `Θ̃` by least squares, then run OFUL on
/// the `2kd` lifted features of the arms that clear the `ν/2` margin.
pub struct OfuRelu {
    cfg: OfuReluConfig,
    k: usize,
    protocol: Protocol,
    exploration: Vec<Sample>,
    estimate: Option<ReluNetwork>,
    ridge: Option<LinearUcbState>,
    phase: Option<Phase>,
    last: Option<Decision>,
    fallback_rounds: usize,
    buf: Vec<f64>,
}

impl OfuRelu {
    pub fn new(cfg: OfuReluConfig, k: usize) -> Result<Self> {
        cfg.validate()?;
        if k == 0 {
            return Err(Error::arg("k", "must be positive"));
        }
        Ok(Self {
            cfg,
            k,
            protocol: Protocol::default(),
            exploration: Vec::new(),
            estimate: None,
            ridge: None,
            phase: None,
            last: None,
            fallback_rounds: 0,
            buf: Vec::new(),
        })
    }

    /// Skips exploration and starts OFUL from a supplied estimate.
    pub fn with_estimate(mut cfg: OfuReluConfig, estimate: ReluNetwork) -> Result<Self> {
        cfg.t0 = 1;
        let k = estimate.k();
        let mut agent = Self::new(cfg, k)?;
        agent.cfg.t0 = 0;
        agent.install_estimate(estimate)?;
        Ok(agent)
    }

    pub fn config(&self) -> &OfuReluConfig {
        &self.cfg
    }

    pub fn estimate(&self) -> Option<&ReluNetwork> {
        self.estimate.as_ref()
    }

    pub fn ridge_state(&self) -> Option<&LinearUcbState> {
        self.ridge.as_ref()
    }

    pub fn last_decision(&self) -> Option<&Decision> {
        self.last.as_ref()
    }

    /// Phase used for the most recent selection.
    pub fn last_phase(&self) -> Option<Phase> {
        self.phase
    }

    /// Rounds in which the margin filter emptied the arm set.
    pub fn fallback_rounds(&self) -> usize {
        self.fallback_rounds
    }

    fn install_estimate(&mut self, est: ReluNetwork) -> Result<()> {
        let dim = 2 * est.k() * est.d();
        let mut ridge = LinearUcbState::new(dim, self.cfg.ucb.lambda)?;
        self.buf.resize(dim, 0.0);
        // Exploration samples stay in the regression data.
        for s in &self.exploration {
            write_feature_ddagger(&est, s.x.as_slice(), &mut self.buf);
            ridge.ridge_update(&self.buf, s.y)?;
        }
        self.ridge = Some(ridge);
        self.estimate = Some(est);
        Ok(())
    }

    fn absorb(&mut self, obs: &AgentObservation) -> Result<()> {
        if obs.round <= self.cfg.t0 {
            self.exploration.push(Sample::new(obs.action.clone(), obs.reward));
            if obs.round == self.cfg.t0 {
                let est = fit_erm(&self.exploration, self.k, &self.cfg.fit)?;
                self.install_estimate(est)?;
            }
            return Ok(());
        }
        let (Some(est), Some(ridge)) = (&self.estimate, &mut self.ridge) else {
            return Err(Error::Protocol("OFUL round without an estimate".into()));
        };
        write_feature_ddagger(est, obs.action.as_slice(), &mut self.buf);
        ridge.ridge_update(&self.buf, obs.reward)
    }
}

impl Agent for OfuRelu {
    fn name(&self) -> &'static str {
        "ofu_relu"
    }

    fn select(&mut self, arms: &ArmSet, rng: &mut dyn RngCore) -> Result<usize> {
        self.protocol.begin()?;
        let t = self.protocol.next_round();
        if t <= self.cfg.t0 {
            self.phase = Some(Phase::Explore);
            let i = uniform_index(arms, rng);
            return Ok(self.protocol.choose(arms, i));
        }
        let (Some(est), Some(ridge)) = (&self.estimate, &self.ridge) else {
            return Err(Error::Protocol("OFUL round without an estimate".into()));
        };
        if arms.dim() != est.d() {
            return Err(Error::DimensionMismatch {
                expected: est.d(),
                actual: arms.dim(),
            });
        }
        let mut kept = restricted_indices(arms, est, self.cfg.nu / 2.0)?;
        let fallback = kept.is_empty();
        if fallback {
            self.fallback_rounds += 1;
            kept = (0..arms.len()).collect();
        }
        let beta = ridge.conf_radius(&self.cfg.ucb)?;
        let mut scorer = LinearizedScorer::new(est, ridge, beta);
        let (i, ucb, width) = scorer
            .argmax(kept.iter().map(|&i| (i, arms.arms()[i].as_slice())))
            .expect("kept is nonempty");
        self.phase = Some(Phase::Exploit);
        self.last = Some(Decision {
            round: t,
            beta,
            width,
            ucb,
            fallback,
        });
        Ok(self.protocol.choose(arms, i))
    }

    fn observe(&mut self, reward: f64) -> Result<()> {
        let obs = self.protocol.finish(reward)?;
        self.absorb(&obs)
    }

    fn rounds(&self) -> usize {
        self.protocol.completed()
    }
}
