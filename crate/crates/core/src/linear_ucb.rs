//! OFUL over finite feature sets: online ridge regression with a self-normalized
//! confidence ellipsoid and optimistic arm selection.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rank-one inverse updates between full re-factorizations of the Gram matrix.
pub const REFACTOR_EVERY: usize = 512;

/// Confidence-set parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UcbConfig {
    /// Subgaussian noise scale.
    pub sigma: f64,
    /// Bound on the norm of the unknown parameter.
    pub s_bound: f64,
    pub delta: f64,
    pub lambda: f64,
}

impl UcbConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) {
            return Err(Error::arg("sigma", "must be nonnegative"));
        }
        if !(self.s_bound > 0.0) {
            return Err(Error::arg("S", "must be positive"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::arg("delta", format!("{} is not in (0, 1)", self.delta)));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::arg("lambda", "must be positive"));
        }
        Ok(())
    }
}

/// Ridge state `V = λI + Σ xxᵀ`, `b = Σ y·x`, `θ̂ = V⁻¹b`.
#[derive(Debug, Clone)]
pub struct LinearUcbState {
    lambda: f64,
    gram: DMatrix<f64>,
    gram_inv: DMatrix<f64>,
    moment: DVector<f64>,
    theta_hat: DVector<f64>,
    log_det: f64,
    count: usize,
    since_refactor: usize,
}

impl LinearUcbState {
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::arg("dim", "must be positive"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::arg("lambda", "must be positive"));
        }
        Ok(Self {
            lambda,
            gram: DMatrix::identity(dim, dim) * lambda,
            gram_inv: DMatrix::identity(dim, dim) / lambda,
            moment: DVector::zeros(dim),
            theta_hat: DVector::zeros(dim),
            log_det: dim as f64 * lambda.ln(),
            count: 0,
            since_refactor: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.moment.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn gram_inv(&self) -> &DMatrix<f64> {
        &self.gram_inv
    }

    pub fn moment(&self) -> &DVector<f64> {
        &self.moment
    }

    pub fn theta_hat(&self) -> &DVector<f64> {
        &self.theta_hat
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// `log det V`.
    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// Absorbs one `(x, y)` observation.
    pub fn ridge_update(&mut self, x: &[f64], y: f64) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let x = DVector::from_column_slice(x);
        self.gram.ger(1.0, &x, &x, 1.0);
        self.moment.axpy(y, &x, 1.0);
        self.count += 1;
        self.since_refactor += 1;

        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
        } else {
            // Sherman–Morrison plus the matrix determinant lemma.
            let vx = &self.gram_inv * &x;
            let denom = 1.0 + x.dot(&vx);
            if !(denom > 0.0 && denom.is_finite()) {
                return Err(Error::Numeric(format!("rank-one update denominator {denom}")));
            }
            self.gram_inv.ger(-1.0 / denom, &vx, &vx, 1.0);
            self.log_det += denom.ln();
        }
        self.theta_hat = &self.gram_inv * &self.moment;
        Ok(())
    }

    /// Recomputes `V⁻¹` and `log det V` from a Cholesky factorization.
    pub fn refactor(&mut self) -> Result<()> {
        let chol = self
            .gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Numeric("Gram matrix is not positive definite".into()))?;
        self.log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        self.gram_inv = chol.inverse();
        self.since_refactor = 0;
        Ok(())
    }

    /// `β = σ·sqrt(2·log(det(V)^{1/2}·det(λI)^{−1/2}/δ)) + √λ·S`.
    pub fn conf_radius(&self, cfg: &UcbConfig) -> Result<f64> {
        let ratio = self.log_det - self.dim() as f64 * self.lambda.ln();
        if !ratio.is_finite() {
            return Err(Error::Numeric(format!("log det ratio {ratio}")));
        }
        let inner = 2.0 * (0.5 * ratio.max(0.0) - cfg.delta.ln());
        Ok(cfg.sigma * inner.max(0.0).sqrt() + self.lambda.sqrt() * cfg.s_bound)
    }

    /// `‖x‖_{V⁻¹}`.
    pub fn inv_norm(&self, x: &[f64]) -> f64 {
        let x = DVector::from_column_slice(x);
        x.dot(&(&self.gram_inv * &x)).max(0.0).sqrt()
    }

    /// `xᵀθ̂ + β‖x‖_{V⁻¹}`: the largest value of `xᵀθ` over the ellipsoid
    /// `‖θ − θ̂‖_V ≤ β`.
    pub fn ucb_value(&self, x: &[f64], beta: f64) -> f64 {
        let mean: f64 = x.iter().zip(self.theta_hat.iter()).map(|(a, b)| a * b).sum();
        mean + beta * self.inv_norm(x)
    }

    /// Optimistic choice among `candidates`; lowest index on ties.
    pub fn ucb_select(&self, cfg: &UcbConfig, candidates: &[DVector<f64>]) -> Result<usize> {
        if candidates.is_empty() {
            return Err(Error::arg("candidates", "no candidates to select from"));
        }
        if let Some(c) = candidates.iter().find(|c| c.len() != self.dim()) {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: c.len(),
            });
        }
        let beta = self.conf_radius(cfg)?;
        let mut best = (0, f64::NEG_INFINITY);
        for (i, c) in candidates.iter().enumerate() {
            let v = self.ucb_value(c.as_slice(), beta);
            if v > best.1 {
                best = (i, v);
            }
        }
        Ok(best.0)
    }
}

/// Free-function form of [`LinearUcbState::ridge_update`].
pub fn ridge_update(state: &mut LinearUcbState, x: &[f64], y: f64) -> Result<()> {
    state.ridge_update(x, y)
}

/// Free-function form of [`LinearUcbState::conf_radius`].
pub fn conf_radius(state: &LinearUcbState, cfg: &UcbConfig) -> Result<f64> {
    state.conf_radius(cfg)
}

/// Free-function form of [`LinearUcbState::ucb_select`].
pub fn ucb_select(state: &LinearUcbState, cfg: &UcbConfig, candidates: &[DVector<f64>]) -> Result<usize> {
    state.ucb_select(cfg, candidates)
}

/// Batch ridge solution `(λI + XᵀX)⁻¹Xᵀy` computed from scratch.
pub fn ridge_solution(lambda: f64, xs: &[DVector<f64>], ys: &[f64]) -> Result<DVector<f64>> {
    let dim = xs.first().map(|x| x.len()).unwrap_or(0);
    if dim == 0 {
        return Err(Error::arg("xs", "no observations"));
    }
    let mut gram = DMatrix::identity(dim, dim) * lambda;
    let mut moment = DVector::zeros(dim);
    for (x, &y) in xs.iter().zip(ys) {
        gram += x * x.transpose();
        moment += x * y;
    }
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Numeric("Gram matrix is not positive definite".into()))?;
    Ok(chol.solve(&moment))
}
