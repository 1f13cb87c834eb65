use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{uniform_index, Agent, AgentObservation, Decision, LinearizedScorer, Phase, Protocol};
use crate::error::{Error, Result};
use crate::estimation::{fit_erm, t0_schedule, BoundParams, FitConfig, Sample};
use crate::linear_ucb::{LinearUcbState, UcbConfig};
use crate::relu_model::{restricted_indices, write_feature_ddagger, ArmSet, ReluNetwork};

/// Settings for [`OfuReluPlus`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfuReluPlusConfig {
    /// Initial gap guess.
    pub nu0: f64,
    /// Length of the first batch.
    pub t1: usize,
    /// Batch growth factor.
    pub a: f64,
    /// Gap shrink factor.
    pub b: f64,
    /// Constants for the theoretical exploration schedule.
    pub schedule: BoundParams,
    /// Per-batch exploration lengths used verbatim instead of the schedule.
    pub practical_override: Option<Vec<usize>>,
    pub ucb: UcbConfig,
    pub fit: FitConfig,
}

impl OfuReluPlusConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu0 > 0.0) {
            return Err(Error::config("nu0", "must be positive"));
        }
        if self.t1 == 0 {
            return Err(Error::config("T1", "must be at least 1"));
        }
        if !(self.a > 1.0) {
            return Err(Error::config("a", "must exceed 1"));
        }
        if !(self.b > 1.0) {
            return Err(Error::config("b", "must exceed 1"));
        }
        self.ucb.validate()?;
        self.fit.validate()
    }
}

/// Batch boundaries, gap guesses and exploration lengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchGrid {
    pub m: usize,
    /// `T₀ = 0, T₁, …, T_M = T`.
    pub boundaries: Vec<usize>,
    /// `ν₀, ν₁, …, ν_M` with `νᵢ = ν₀/bⁱ`.
    pub nus: Vec<f64>,
    /// `t₀,ᵢ` for batches `1..=M` (index `i − 1`).
    pub explore: Vec<usize>,
    /// Batches whose exploration length was cut to the batch length.
    pub clamped: Vec<bool>,
}

impl BatchGrid {
    /// Batch (1-based) containing round `t`.
    pub fn batch_of(&self, t: usize) -> usize {
        self.boundaries.iter().position(|&b| t <= b).unwrap_or(self.m).max(1)
    }

    pub fn batch_len(&self, i: usize) -> usize {
        self.boundaries[i] - self.boundaries[i - 1]
    }
}

/// Builds the geometric grid `Tᵢ = (aⁱ − 1)·T₁` (rounded, last one clamped to
/// `T`), with `M = ⌈log(T/T₁ + 1)/log a⌉` batches.
pub fn build_batch_grid(cfg: &OfuReluPlusConfig, horizon: usize) -> Result<BatchGrid> {
    cfg.validate()?;
    if horizon < cfg.t1 {
        return Err(Error::config(
            "T",
            format!("horizon {horizon} is shorter than T1 = {}", cfg.t1),
        ));
    }
    let t1 = cfg.t1 as f64;
    let target = horizon as f64 / t1 + 1.0;
    // Smallest M with a^M ≥ T/T₁ + 1, i.e. the ceiling without log round-off.
    let mut m = 1usize;
    while cfg.a.powi(m as i32) < target * (1.0 - 1e-12) {
        m += 1;
    }

    let mut boundaries = vec![0usize];
    for i in 1..=m {
        let raw = ((cfg.a.powi(i as i32) - 1.0) * t1).round() as usize;
        let prev = boundaries[i - 1];
        let b = if i == m {
            horizon
        } else {
            raw.max(prev + 1).min(horizon)
        };
        boundaries.push(b);
    }
    let nus: Vec<f64> = (0..=m).map(|i| cfg.nu0 / cfg.b.powi(i as i32)).collect();

    let wanted: Vec<f64> = match &cfg.practical_override {
        Some(list) => {
            if list.len() < m {
                return Err(Error::config(
                    "overrides",
                    format!("{} entries for {m} batches", list.len()),
                ));
            }
            list[..m].iter().map(|&v| v as f64).collect()
        }
        None => {
            let mut cum_prev = 0.0;
            let mut out = Vec::with_capacity(m);
            for nu in &nus[1..] {
                let cum = t0_schedule(*nu, &cfg.schedule)?.ceil();
                out.push((cum - cum_prev).max(0.0));
                cum_prev = cum;
            }
            out
        }
    };
    let mut explore = Vec::with_capacity(m);
    let mut clamped = Vec::with_capacity(m);
    for i in 1..=m {
        let len = (boundaries[i] - boundaries[i - 1]) as f64;
        let want = wanted[i - 1];
        clamped.push(want > len);
        explore.push(want.min(len) as usize);
    }
    Ok(BatchGrid {
        m,
        boundaries,
        nus,
        explore,
        clamped,
    })
}

/// OFU-ReLU with an unknown gap: geometrically growing batches, each starting
/// with a top-up of uniform exploration, a refit on the whole exploration pool,
/// and OFUL on features rebuilt from the entire history with the new estimate.
pub struct OfuReluPlus {
    cfg: OfuReluPlusConfig,
    k: usize,
    grid: BatchGrid,
    protocol: Protocol,
    history: Vec<Sample>,
    pool: Vec<Sample>,
    estimate: Option<ReluNetwork>,
    fitted_batch: usize,
    fitted_pool_len: usize,
    ridge: Option<LinearUcbState>,
    phase: Option<Phase>,
    last: Option<Decision>,
    buf: Vec<f64>,
}

impl OfuReluPlus {
    pub fn new(cfg: OfuReluPlusConfig, k: usize, horizon: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::arg("k", "must be positive"));
        }
        let grid = build_batch_grid(&cfg, horizon)?;
        Ok(Self {
            cfg,
            k,
            grid,
            protocol: Protocol::default(),
            history: Vec::new(),
            pool: Vec::new(),
            estimate: None,
            fitted_batch: 0,
            fitted_pool_len: 0,
            ridge: None,
            phase: None,
            last: None,
            buf: Vec::new(),
        })
    }

    pub fn grid(&self) -> &BatchGrid {
        &self.grid
    }

    pub fn estimate(&self) -> Option<&ReluNetwork> {
        self.estimate.as_ref()
    }

    pub fn ridge_state(&self) -> Option<&LinearUcbState> {
        self.ridge.as_ref()
    }

    /// Every observed `(x, y)` so far.
    pub fn history(&self) -> &[Sample] {
        &self.history
    }

    /// The cumulative exploration pool `E`.
    pub fn exploration_pool(&self) -> &[Sample] {
        &self.pool
    }

    pub fn last_decision(&self) -> Option<&Decision> {
        self.last.as_ref()
    }

    pub fn last_phase(&self) -> Option<Phase> {
        self.phase
    }

    /// Batch index of the round about to be played.
    pub fn current_batch(&self) -> usize {
        self.grid.batch_of(self.protocol.next_round())
    }

    fn exploring(&self, t: usize) -> bool {
        let i = self.grid.batch_of(t);
        t <= self.grid.boundaries[i - 1] + self.grid.explore[i - 1]
    }

    /// Ridge state over `x‡(x_τ, est)` for the whole history.
    pub fn replay(history: &[Sample], est: &ReluNetwork, lambda: f64) -> Result<LinearUcbState> {
        let dim = 2 * est.k() * est.d();
        let mut state = LinearUcbState::new(dim, lambda)?;
        let mut buf = vec![0.0; dim];
        for s in history {
            write_feature_ddagger(est, s.x.as_slice(), &mut buf);
            state.ridge_update(&buf, s.y)?;
        }
        Ok(state)
    }

    /// Refits on the pool and rebuilds the ridge state when entering the OFUL
    /// part of batch `i` for the first time.
    fn prepare_batch(&mut self, i: usize) -> Result<()> {
        if self.fitted_batch == i {
            return Ok(());
        }
        self.fitted_batch = i;
        if self.pool.is_empty() {
            return Ok(());
        }
        if self.estimate.is_some() && self.pool.len() == self.fitted_pool_len {
            return Ok(());
        }
        let mut fit = self.cfg.fit.clone();
        fit.seed = crate::seeding::derive_seed(fit.seed, &[i as u64]);
        let est = fit_erm(&self.pool, self.k, &fit)?;
        self.ridge = Some(Self::replay(&self.history, &est, self.cfg.ucb.lambda)?);
        self.buf.resize(2 * est.k() * est.d(), 0.0);
        self.estimate = Some(est);
        self.fitted_pool_len = self.pool.len();
        Ok(())
    }

    fn absorb(&mut self, obs: AgentObservation, explored: bool) -> Result<()> {
        let sample = Sample::new(obs.action, obs.reward);
        if let (Some(est), Some(ridge)) = (&self.estimate, &mut self.ridge) {
            write_feature_ddagger(est, sample.x.as_slice(), &mut self.buf);
            ridge.ridge_update(&self.buf, sample.y)?;
        }
        if explored {
            self.pool.push(sample.clone());
        }
        self.history.push(sample);
        Ok(())
    }
}

impl Agent for OfuReluPlus {
    fn name(&self) -> &'static str {
        "ofu_relu_plus"
    }

    fn select(&mut self, arms: &ArmSet, rng: &mut dyn RngCore) -> Result<usize> {
        self.protocol.begin()?;
        let t = self.protocol.next_round();
        if self.exploring(t) {
            self.phase = Some(Phase::Explore);
            let i = uniform_index(arms, rng);
            return Ok(self.protocol.choose(arms, i));
        }
        let batch = self.grid.batch_of(t);
        self.prepare_batch(batch)?;
        let (Some(est), Some(ridge)) = (&self.estimate, &self.ridge) else {
            // Nothing explored yet: keep sampling uniformly.
            self.phase = Some(Phase::Explore);
            let i = uniform_index(arms, rng);
            return Ok(self.protocol.choose(arms, i));
        };
        let margin = self.grid.nus[batch] / 2.0;
        let mut kept = restricted_indices(arms, est, margin)?;
        let fallback = kept.is_empty();
        if fallback {
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
        let explored = self.phase == Some(Phase::Explore) && self.exploring(self.protocol.next_round());
        let obs = self.protocol.finish(reward)?;
        self.absorb(obs, explored)
    }

    fn rounds(&self) -> usize {
        self.protocol.completed()
    }
}
