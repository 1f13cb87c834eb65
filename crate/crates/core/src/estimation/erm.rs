use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relu_model::{Action, ReluNetwork};
use crate::seeding::rng_from;

/// One observed `(action, reward)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: Action,
    pub y: f64,
}

impl Sample {
    pub fn new(x: Action, y: f64) -> Self {
        Self { x, y }
    }
}

/// Settings for the multi-restart projected gradient descent used by [`fit_erm`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Initial step; backtracking halves it whenever a step would raise the loss.
    pub step_size: f64,
    /// Stop once the tangential gradient norm falls below this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iters: 500,
            step_size: 0.5,
            tol: 1e-8,
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::config("fit.restarts", "must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::config("fit.max_iters", "must be positive"));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::config("fit.step_size", "must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::config("fit.tol", "must be positive"));
        }
        Ok(())
    }
}

/// `L̂(Θ) = (1/n) Σ (f_Θ(xⱼ) − yⱼ)²`.
pub fn empirical_sq_loss(net: &ReluNetwork, data: &[Sample]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::arg("data", "empirical loss of an empty sample"));
    }
    if let Some(s) = data.iter().find(|s| s.x.dim() != net.d()) {
        return Err(Error::DimensionMismatch {
            expected: net.d(),
            actual: s.x.dim(),
        });
    }
    Ok(loss_flat(&flatten(net), net.k(), net.d(), data))
}

/// Result of a fit with per-restart diagnostics.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub net: ReluNetwork,
    pub loss: f64,
    pub best_restart: usize,
    /// Final loss of every restart; `None` for discarded ones.
    pub restart_losses: Vec<Option<f64>>,
}

/// Least-squares fit of a `k`-neuron network with unit-norm rows.
pub fn fit_erm(data: &[Sample], k: usize, cfg: &FitConfig) -> Result<ReluNetwork> {
    fit_erm_report(data, k, cfg).map(|r| r.net)
}

/// [`fit_erm`] returning the losses of all restarts.
pub fn fit_erm_report(data: &[Sample], k: usize, cfg: &FitConfig) -> Result<FitReport> {
    if data.is_empty() {
        return Err(Error::arg("data", "cannot fit without samples"));
    }
    if k == 0 {
        return Err(Error::arg("k", "need at least one neuron"));
    }
    cfg.validate()?;
    let d = data[0].x.dim();
    if let Some(s) = data.iter().find(|s| s.x.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: s.x.dim(),
        });
    }

    let mut restart_losses = Vec::with_capacity(cfg.restarts);
    let mut best: Option<(usize, Vec<f64>, f64)> = None;
    for restart in 0..cfg.restarts {
        let outcome = descend(data, k, d, cfg, restart as u64);
        restart_losses.push(outcome.as_ref().map(|(_, l)| *l));
        if let Some((w, l)) = outcome {
            if best.as_ref().is_none_or(|(_, _, bl)| l < *bl) {
                best = Some((restart, w, l));
            }
        }
    }
    let (best_restart, w, loss) = best.ok_or_else(|| Error::Fit(format!("all {} restarts diverged", cfg.restarts)))?;
    let net = ReluNetwork::normalized(w.chunks(d).map(|c| c.to_vec()).collect())?;
    Ok(FitReport {
        net,
        loss,
        best_restart,
        restart_losses,
    })
}

fn flatten(net: &ReluNetwork) -> Vec<f64> {
    net.rows().flat_map(|r| r.iter().copied()).collect()
}

fn loss_flat(w: &[f64], k: usize, d: usize, data: &[Sample]) -> f64 {
    let mut acc = 0.0;
    for s in data {
        let x = s.x.as_slice();
        let mut f = 0.0;
        for i in 0..k {
            let z: f64 = w[i * d..(i + 1) * d].iter().zip(x).map(|(a, b)| a * b).sum();
            f += z.max(0.0);
        }
        acc += (f - s.y).powi(2);
    }
    acc / data.len() as f64
}

fn loss_and_grad(w: &[f64], k: usize, d: usize, data: &[Sample], grad: &mut [f64]) -> f64 {
    grad.iter_mut().for_each(|g| *g = 0.0);
    let n = data.len() as f64;
    let mut acc = 0.0;
    let mut pre = vec![0.0; k];
    for s in data {
        let x = s.x.as_slice();
        let mut f = 0.0;
        for i in 0..k {
            let z: f64 = w[i * d..(i + 1) * d].iter().zip(x).map(|(a, b)| a * b).sum();
            pre[i] = z;
            f += z.max(0.0);
        }
        let r = f - s.y;
        acc += r * r;
        // ReLU subgradient 𝟙(z > 0).
        for i in 0..k {
            if pre[i] > 0.0 {
                for j in 0..d {
                    grad[i * d + j] += 2.0 * r * x[j] / n;
                }
            }
        }
    }
    acc / n
}

fn normalize_rows(w: &mut [f64], d: usize) -> bool {
    for row in w.chunks_mut(d) {
        let n = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(n.is_finite() && n > 0.0) {
            return false;
        }
        row.iter_mut().for_each(|v| *v /= n);
    }
    true
}

/// One restart; `None` when the iterate stops being finite.
fn descend(data: &[Sample], k: usize, d: usize, cfg: &FitConfig, restart: u64) -> Option<(Vec<f64>, f64)> {
    let mut rng = rng_from(cfg.seed, &[restart]);
    let mut w: Vec<f64> = (0..k * d).map(|_| rng.sample(StandardNormal)).collect();
    if !normalize_rows(&mut w, d) {
        return None;
    }
    let mut grad = vec![0.0; k * d];
    let mut trial = vec![0.0; k * d];
    let mut step = cfg.step_size;
    let mut loss = loss_and_grad(&w, k, d, data, &mut grad);

    for _ in 0..cfg.max_iters {
        if !loss.is_finite() {
            return None;
        }
        // Stationarity on the sphere: the radial part of each row gradient is
        // removed by the projection anyway.
        let tangential: f64 = grad
            .chunks(d)
            .zip(w.chunks(d))
            .map(|(g, row)| {
                let radial: f64 = g.iter().zip(row).map(|(a, b)| a * b).sum();
                g.iter().zip(row).map(|(a, b)| (a - radial * b).powi(2)).sum::<f64>()
            })
            .sum::<f64>()
            .sqrt();
        if tangential < cfg.tol {
            break;
        }

        let mut accepted = false;
        while step > 1e-14 {
            for ((t, wi), gi) in trial.iter_mut().zip(&w).zip(&grad) {
                *t = wi - step * gi;
            }
            if normalize_rows(&mut trial, d) {
                let cand = loss_flat(&trial, k, d, data);
                if cand.is_finite() && cand <= loss {
                    std::mem::swap(&mut w, &mut trial);
                    step *= 1.25;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        loss = loss_and_grad(&w, k, d, data, &mut grad);
    }
    loss.is_finite().then_some((w, loss))
}
