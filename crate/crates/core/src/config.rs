//! JSON experiment configuration with strict key checking.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::agents::{Agent, OfuRelu, OfuReluConfig, OfuReluPlus, OfuReluPlusConfig, OfulBaseline, RandomAgent};
use crate::error::{Error, Result};
use crate::estimation::{BoundParams, FitConfig};
use crate::linear_ucb::UcbConfig;
use crate::seeding::{derive_seed, stream};

fn default_alpha0() -> f64 {
    0.1
}
fn default_t0() -> usize {
    20
}
fn default_lambda() -> f64 {
    1.0
}
fn default_nu0() -> f64 {
    1.0
}
fn default_t1() -> usize {
    20
}
fn default_a() -> f64 {
    2.0
}
fn default_b() -> f64 {
    2f64.powf(1.0 / 32.0)
}
fn default_c() -> f64 {
    1.0
}

/// One algorithm entry of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgorithmConfig {
    OfuRelu {
        #[serde(default = "default_t0")]
        t0: usize,
        /// Gap surrogate; `0` disables the margin filter.
        #[serde(default)]
        nu: f64,
        #[serde(default = "default_lambda")]
        lambda: f64,
        /// Defaults to `1/√T`.
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default)]
        fit: FitConfig,
    },
    OfuReluPlus {
        #[serde(default = "default_nu0")]
        nu0: f64,
        #[serde(rename = "T1", default = "default_t1")]
        t1: usize,
        #[serde(default = "default_a")]
        a: f64,
        #[serde(default = "default_b")]
        b: f64,
        #[serde(rename = "C1", default = "default_c")]
        c1: f64,
        #[serde(rename = "C2", default = "default_c")]
        c2: f64,
        #[serde(default)]
        overrides: Option<Vec<usize>>,
        #[serde(default = "default_lambda")]
        lambda: f64,
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default)]
        fit: FitConfig,
    },
    Oful {
        #[serde(default = "default_lambda")]
        lambda: f64,
        /// Norm bound; defaults to `√k`.
        #[serde(rename = "S", default)]
        s: Option<f64>,
        #[serde(default)]
        delta: Option<f64>,
    },
    Random,
}

impl AlgorithmConfig {
    pub fn tag(&self) -> &'static str {
        match self {
            AlgorithmConfig::OfuRelu { .. } => "ofu_relu",
            AlgorithmConfig::OfuReluPlus { .. } => "ofu_relu_plus",
            AlgorithmConfig::Oful { .. } => "oful",
            AlgorithmConfig::Random => "random",
        }
    }
}

/// A full simulation setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub k: usize,
    pub d: usize,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub trials: usize,
    pub arms_per_round: usize,
    /// Noise standard deviation.
    pub sigma: f64,
    #[serde(default = "default_alpha0")]
    pub alpha0: f64,
    pub seed: u64,
    pub algorithms: Vec<AlgorithmConfig>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn check(cond: bool, field: impl Into<String>, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::config(field, msg))
    }
}

fn check_delta(delta: Option<f64>, field: String) -> Result<()> {
    match delta {
        Some(v) => check(v > 0.0 && v < 1.0, field, "must be in (0, 1)"),
        None => Ok(()),
    }
}

fn check_fit(fit: &FitConfig, prefix: &str) -> Result<()> {
    fit.validate().map_err(|e| match e {
        Error::Config { field, message } => Error::config(format!("{prefix}.{field}"), message),
        other => other,
    })
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::config("<json>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        check(self.k >= 1, "k", "must be positive")?;
        check(self.d >= 2, "d", "must be at least 2")?;
        check(self.horizon >= 1, "T", "must be positive")?;
        check(
            self.trials >= 2,
            "trials",
            "need at least 2 trials for confidence intervals",
        )?;
        check(self.arms_per_round >= 1, "arms_per_round", "must be positive")?;
        check(
            self.sigma >= 0.0 && self.sigma.is_finite(),
            "sigma",
            "must be nonnegative",
        )?;
        check(self.alpha0 >= 0.0, "alpha0", "must be nonnegative")?;
        check(
            !self.algorithms.is_empty(),
            "algorithms",
            "at least one algorithm is required",
        )?;
        for (i, alg) in self.algorithms.iter().enumerate() {
            let f = |name: &str| format!("algorithms[{i}].{name}");
            if self.algorithms[..i].iter().any(|a| a.tag() == alg.tag()) {
                return Err(Error::config(f("algorithm"), "listed twice"));
            }
            match alg {
                AlgorithmConfig::OfuRelu {
                    t0,
                    nu,
                    lambda,
                    delta,
                    fit,
                } => {
                    check(*t0 >= 1, f("t0"), "must be at least 1")?;
                    check(*nu >= 0.0, f("nu"), "must be nonnegative")?;
                    check(*lambda > 0.0, f("lambda"), "must be positive")?;
                    check_delta(*delta, f("delta"))?;
                    check_fit(fit, &format!("algorithms[{i}]"))?;
                }
                AlgorithmConfig::OfuReluPlus {
                    nu0,
                    t1,
                    a,
                    b,
                    c1,
                    c2,
                    overrides,
                    lambda,
                    delta,
                    fit,
                } => {
                    check(*nu0 > 0.0, f("nu0"), "must be positive")?;
                    check(*t1 >= 1 && *t1 <= self.horizon, f("T1"), "must be in [1, T]")?;
                    check(*a > 1.0, f("a"), "must exceed 1")?;
                    check(*b > 1.0, f("b"), "must exceed 1")?;
                    check(*c1 > 0.0, f("C1"), "must be positive")?;
                    check(*c2 > 0.0, f("C2"), "must be positive")?;
                    check(*lambda > 0.0, f("lambda"), "must be positive")?;
                    check_delta(*delta, f("delta"))?;
                    check_fit(fit, &format!("algorithms[{i}]"))?;
                    if overrides.is_some() {
                        let plus = self.plus_config(alg, 0)?;
                        crate::agents::build_batch_grid(&plus, self.horizon)
                            .map_err(|e| Error::config(f("overrides"), e.to_string()))?;
                    }
                }
                AlgorithmConfig::Oful { lambda, s, delta } => {
                    check(*lambda > 0.0, f("lambda"), "must be positive")?;
                    check(s.is_none_or(|v| v > 0.0), f("S"), "must be positive")?;
                    check_delta(*delta, f("delta"))?;
                }
                AlgorithmConfig::Random => {}
            }
        }
        Ok(())
    }

    /// Confidence level used when an algorithm does not set one: `1/√T`.
    pub fn default_delta(&self) -> f64 {
        (1.0 / (self.horizon as f64).sqrt()).min(0.5)
    }

    /// The config with every optional value filled in.
    pub fn resolved(&self) -> Self {
        let mut out = self.clone();
        let dflt = self.default_delta();
        for alg in &mut out.algorithms {
            match alg {
                AlgorithmConfig::OfuRelu { delta, .. } | AlgorithmConfig::OfuReluPlus { delta, .. } => {
                    delta.get_or_insert(dflt);
                }
                AlgorithmConfig::Oful { s, delta, .. } => {
                    s.get_or_insert((self.k as f64).sqrt());
                    delta.get_or_insert(dflt);
                }
                AlgorithmConfig::Random => {}
            }
        }
        out
    }

    fn relu_ucb(&self, lambda: f64, delta: Option<f64>) -> UcbConfig {
        UcbConfig {
            sigma: self.sigma,
            s_bound: (5.0 * self.k as f64).sqrt(),
            delta: delta.unwrap_or_else(|| self.default_delta()),
            lambda,
        }
    }

    fn trial_fit(fit: &FitConfig, trial_seed: u64) -> FitConfig {
        FitConfig {
            seed: derive_seed(trial_seed, &[stream::ESTIMATE, fit.seed]),
            ..fit.clone()
        }
    }

    fn plus_config(&self, alg: &AlgorithmConfig, trial_seed: u64) -> Result<OfuReluPlusConfig> {
        let AlgorithmConfig::OfuReluPlus {
            nu0,
            t1,
            a,
            b,
            c1,
            c2,
            overrides,
            lambda,
            delta,
            fit,
        } = alg
        else {
            return Err(Error::arg("algorithm", "not an ofu_relu_plus entry"));
        };
        let ucb = self.relu_ucb(*lambda, *delta);
        Ok(OfuReluPlusConfig {
            nu0: *nu0,
            t1: *t1,
            a: *a,
            b: *b,
            schedule: BoundParams {
                k: self.k,
                d: self.d,
                sigma: self.sigma,
                delta: ucb.delta,
                c1: *c1,
                c2: *c2,
                horizon: self.horizon as f64,
            },
            practical_override: overrides.clone(),
            ucb,
            fit: Self::trial_fit(fit, trial_seed),
        })
    }

    /// Instantiates the agent for one trial.
    pub fn build_agent(&self, alg: &AlgorithmConfig, trial_seed: u64) -> Result<Box<dyn Agent>> {
        Ok(match alg {
            AlgorithmConfig::OfuRelu {
                t0,
                nu,
                lambda,
                delta,
                fit,
            } => Box::new(OfuRelu::new(
                OfuReluConfig {
                    t0: *t0,
                    nu: *nu,
                    ucb: self.relu_ucb(*lambda, *delta),
                    fit: Self::trial_fit(fit, trial_seed),
                },
                self.k,
            )?),
            AlgorithmConfig::OfuReluPlus { .. } => Box::new(OfuReluPlus::new(
                self.plus_config(alg, trial_seed)?,
                self.k,
                self.horizon,
            )?),
            AlgorithmConfig::Oful { lambda, s, delta } => Box::new(OfulBaseline::new(
                UcbConfig {
                    sigma: self.sigma,
                    s_bound: s.unwrap_or((self.k as f64).sqrt()),
                    delta: delta.unwrap_or_else(|| self.default_delta()),
                    lambda: *lambda,
                },
                self.d,
            )?),
            AlgorithmConfig::Random => Box::new(RandomAgent::new()),
        })
    }
}
