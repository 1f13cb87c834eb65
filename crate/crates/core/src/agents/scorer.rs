use std::collections::HashMap;

use crate::linear_ucb::LinearUcbState;
use crate::relu_model::ReluNetwork;

/// UCB scores of raw arms under the `x‡` lift without materializing `2kd`-vectors.
///
/// `x‡ = s ⊗ x` where `s ∈ ℝ^{2k}` only depends on the activation pattern of `x`
/// under the estimate. Per pattern we cache `g_s = Σₐ sₐθ̂ₐ` and the `d×d` block
/// `M_s = Σₐ,ᵦ sₐsᵦ(V⁻¹)ₐᵦ`, so that `x‡ᵀθ̂ = xᵀg_s` and `‖x‡‖²_{V⁻¹} = xᵀM_s x`.
pub struct LinearizedScorer<'a> {
    est: &'a ReluNetwork,
    state: &'a LinearUcbState,
    beta: f64,
    cache: HashMap<Vec<u64>, (Vec<f64>, Vec<f64>)>,
}

impl<'a> LinearizedScorer<'a> {
    pub fn new(est: &'a ReluNetwork, state: &'a LinearUcbState, beta: f64) -> Self {
        debug_assert_eq!(state.dim(), 2 * est.k() * est.d());
        Self {
            est,
            state,
            beta,
            cache: HashMap::new(),
        }
    }

    fn coefficients(&self, pattern: &[u64]) -> Vec<f64> {
        let k = self.est.k();
        let mut s = vec![0.0; 2 * k];
        for i in 0..k {
            let on = pattern[i / 64] >> (i % 64) & 1 == 1;
            s[i] = if on { 1.0 } else { 0.0 };
            s[k + i] = 0.5 - s[i];
        }
        s
    }

    fn entry(&mut self, x: &[f64]) -> &(Vec<f64>, Vec<f64>) {
        let pattern = self.est.pattern(x);
        if !self.cache.contains_key(&pattern) {
            let s = self.coefficients(&pattern);
            let d = self.est.d();
            let inv = self.state.gram_inv();
            let theta = self.state.theta_hat();
            let mut g = vec![0.0; d];
            let mut m = vec![0.0; d * d];
            for (a, &sa) in s.iter().enumerate() {
                if sa == 0.0 {
                    continue;
                }
                for p in 0..d {
                    g[p] += sa * theta[a * d + p];
                }
                for (b, &sb) in s.iter().enumerate() {
                    if sb == 0.0 {
                        continue;
                    }
                    let w = sa * sb;
                    for p in 0..d {
                        for q in 0..d {
                            m[p * d + q] += w * inv[(a * d + p, b * d + q)];
                        }
                    }
                }
            }
            self.cache.insert(pattern.clone(), (m, g));
        }
        &self.cache[&pattern]
    }

    /// Returns `(x‡ᵀθ̂ + β‖x‡‖_{V⁻¹}, ‖x‡‖_{V⁻¹})`.
    pub fn score(&mut self, x: &[f64]) -> (f64, f64) {
        let beta = self.beta;
        let d = x.len();
        let (m, g) = self.entry(x);
        let mean: f64 = x.iter().zip(g).map(|(a, b)| a * b).sum();
        let mut quad = 0.0;
        for p in 0..d {
            let mut row = 0.0;
            for q in 0..d {
                row += m[p * d + q] * x[q];
            }
            quad += x[p] * row;
        }
        let width = quad.max(0.0).sqrt();
        (mean + beta * width, width)
    }

    /// Best of the `(index, coords)` pairs; earliest on ties.
    pub fn argmax<'x>(&mut self, xs: impl IntoIterator<Item = (usize, &'x [f64])>) -> Option<(usize, f64, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for (i, x) in xs {
            let (v, w) = self.score(x);
            if best.is_none_or(|(_, bv, _)| v > bv) {
                best = Some((i, v, w));
            }
        }
        best
    }
}
