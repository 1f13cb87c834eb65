//! Closed-form evaluators for the recovery and exploration-length bounds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Problem constants shared by the bound formulas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub k: usize,
    pub d: usize,
    pub sigma: f64,
    pub delta: f64,
    pub c1: f64,
    pub c2: f64,
    /// Horizon; real-valued so that `log log T` can be probed at any `T > 1`.
    pub horizon: f64,
}

impl BoundParams {
    pub fn new(k: usize, d: usize, sigma: f64, delta: f64, horizon: f64) -> Self {
        Self {
            k,
            d,
            sigma,
            delta,
            c1: 1.0,
            c2: 1.0,
            horizon,
        }
    }

    /// `k ∨ σ`.
    fn scale(&self) -> f64 {
        (self.k as f64).max(self.sigma)
    }

    /// Full validation, including `δ ∈ (0, 1)`.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::arg("k", "must be positive"));
        }
        if self.d == 0 {
            return Err(Error::arg("d", "must be positive"));
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::arg("sigma", "must be nonnegative"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::arg("delta", format!("{} is not in (0, 1)", self.delta)));
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0) {
            return Err(Error::arg("C1/C2", "must be positive"));
        }
        if !(self.horizon > 1.0) {
            return Err(Error::arg("T", "must exceed 1"));
        }
        Ok(())
    }
}

/// Uniform-deviation radius `ζ` of the empirical loss after `n` samples:
///
/// `ζ = sqrt( 4096 k² (k∨σ)² / n · ( dk·max(1, log(1+√(n/(dk)))) + log(4/δ) ) )`.
///
/// Only `δ > 0` is required here so the formula can be probed outside `(0, 1)`;
/// [`BoundParams::validate`] enforces the probabilistic range.
pub fn zeta_bound(n: usize, p: &BoundParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::arg("n", "must be at least 1"));
    }
    if !(p.delta > 0.0 && p.delta.is_finite()) {
        return Err(Error::arg("delta", format!("{} must be positive", p.delta)));
    }
    let n = n as f64;
    let dk = (p.d * p.k) as f64;
    let k = p.k as f64;
    let bracket = dk * (1.0 + (n / dk).sqrt()).ln().max(1.0) + (4.0 / p.delta).ln();
    Ok((4096.0 * k * k * p.scale().powi(2) / n * bracket).sqrt())
}

/// Per-neuron recovery radius `727·π^{−1/4}·k·d^{1/4}·(2ζ)^{1/4}`.
pub fn alpha_bound(zeta: f64, p: &BoundParams) -> Result<f64> {
    if !(zeta >= 0.0) {
        return Err(Error::arg("zeta", "must be nonnegative"));
    }
    Ok(727.0 * PI.powf(-0.25) * p.k as f64 * (p.d as f64).powf(0.25) * (2.0 * zeta).powf(0.25))
}

/// Surface area `|S^m|` of the unit `m`-sphere in `ℝ^{m+1}`.
///
/// Uses `|S⁰| = 2`, `|S¹| = 2π` and `|S^m| = 2π/(m−1)·|S^{m−2}|`, which equals
/// `2π^{(m+1)/2}/Γ((m+1)/2)`.
pub fn sphere_area(m: usize) -> f64 {
    match m {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (m - 1) as f64 * sphere_area(m - 2),
    }
}

/// Neuron-recovery bound from a loss level `η` on the strips of half-width `ε`:
///
/// `h(η, ε) = (kε³|S^{d−3}|/2) / (ε²(1 − dε²/2)|S^{d−2}|/8 − η − 6kdε³|S^{d−2}|)`.
pub fn h_bound(eta: f64, eps: f64, k: usize, d: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::UnsupportedDimension(d, "|S^{d-3}| is undefined for d < 3"));
    }
    if !(eps > 0.0) {
        return Err(Error::arg("eps", "must be positive"));
    }
    let (k, df) = (k as f64, d as f64);
    let s3 = sphere_area(d - 3);
    let s2 = sphere_area(d - 2);
    let numerator = k * eps.powi(3) * s3 / 2.0;
    let denominator = eps * eps * (1.0 - df * eps * eps / 2.0) * s2 / 8.0 - eta - 6.0 * k * df * eps.powi(3) * s2;
    if !(denominator > 0.0) {
        return Err(Error::BoundVacuous(denominator));
    }
    Ok(numerator / denominator)
}

/// Exploration length `t₀(ν) = max(t₁(ν), t₂)` with
///
/// `t₁(ν) = C₁k¹⁰d²(k∨σ)²/ν⁸ · B`, `t₂ = C₂k¹⁰d⁶(k∨σ)² · B` and
/// `B = dk·max(log(d(k∨σ)), log log T) + log(64T)`.
pub fn t0_schedule(nu: f64, p: &BoundParams) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(Error::arg("nu", format!("must be positive, got {nu}")));
    }
    if !(p.horizon > 1.0) {
        return Err(Error::arg("T", "log log T needs T > 1"));
    }
    let (k, d) = (p.k as f64, p.d as f64);
    let scale2 = p.scale().powi(2);
    let bracket = d * k * (d * p.scale()).ln().max(p.horizon.ln().ln()) + (64.0 * p.horizon).ln();
    let k10 = k.powi(10);
    let t1 = p.c1 * k10 * d * d * scale2 / nu.powi(8) * bracket;
    let t2 = p.c2 * k10 * d.powi(6) * scale2 * bracket;
    Ok(t1.max(t2))
}

/// `∫_a^b |p + q·w| dw`, exact.
pub fn abs_affine_integral(p: f64, q: f64, a: f64, b: f64) -> f64 {
    let prim = |lo: f64, hi: f64| p * (hi - lo) + 0.5 * q * (hi * hi - lo * lo);
    if q != 0.0 {
        let root = -p / q;
        if root > a && root < b {
            return prim(a, root).abs() + prim(root, b).abs();
        }
    }
    prim(a, b).abs()
}

/// `∫_{−ε}^{ε} |β₀ + β₁w − max(w, 0)| dw`: the L¹ error of an affine fit to the
/// ReLU kink.
pub fn affine_relu_l1_gap(beta0: f64, beta1: f64, eps: f64) -> f64 {
    abs_affine_integral(beta0, beta1, -eps, 0.0) + abs_affine_integral(beta0, beta1 - 1.0, 0.0, eps)
}

/// Minimum of [`affine_relu_l1_gap`] over the square grid `[lo, hi]²` with the
/// given spacing. Returns `(min, β₀, β₁)`.
pub fn min_affine_relu_l1_gap(eps: f64, lo: f64, hi: f64, step: f64) -> (f64, f64, f64) {
    let n = ((hi - lo) / step).round() as usize;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..=n {
        let b0 = lo + i as f64 * step;
        for j in 0..=n {
            let b1 = lo + j as f64 * step;
            let v = affine_relu_l1_gap(b0, b1, eps);
            if v < best.0 {
                best = (v, b0, b1);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    // Reference values below were produced with 30-digit arithmetic.

    #[test]
    fn zeta_spot_value() {
        let p = BoundParams::new(1, 1, 1.0, 4.0 / E, 1000.0);
        let z = zeta_bound(4096, &p).unwrap();
        assert!((z - 2.274_727_955_140_051).abs() < 1e-12);
        // σ = 0 gives the same value since k ∨ σ = 1 either way.
        let p0 = BoundParams { sigma: 0.0, ..p };
        assert_eq!(zeta_bound(4096, &p0).unwrap(), z);
    }

    #[test]
    fn zeta_generic_value() {
        let p = BoundParams::new(3, 2, 0.1, 0.05, 1000.0);
        assert!((zeta_bound(1000, &p).unwrap() - 81.819_681_293_654_07).abs() < 1e-9);
    }

    #[test]
    fn zeta_decreases_when_doubling_samples() {
        for k in 1..4 {
            for d in 1..5 {
                let p = BoundParams::new(k, d, 0.5, 0.1, 1000.0);
                let mut n = 16;
                while n < 1 << 20 {
                    assert!(zeta_bound(2 * n, &p).unwrap() < zeta_bound(n, &p).unwrap());
                    n *= 2;
                }
            }
        }
    }

    #[test]
    fn zeta_rejects_bad_inputs() {
        let p = BoundParams::new(1, 1, 1.0, 0.1, 10.0);
        assert!(zeta_bound(0, &p).is_err());
        assert!(zeta_bound(5, &BoundParams { delta: 0.0, ..p }).is_err());
        assert!(BoundParams { delta: 1.5, ..p }.validate().is_err());
    }

    #[test]
    fn alpha_values() {
        let p = BoundParams::new(1, 1, 1.0, 0.1, 10.0);
        assert_eq!(alpha_bound(0.0, &p).unwrap(), 0.0);
        assert!((alpha_bound(0.5, &p).unwrap() - 546.068_270_826_013_2).abs() < 1e-9);
        let p3 = BoundParams::new(3, 2, 1.0, 0.1, 10.0);
        assert!((alpha_bound(0.7, &p3).unwrap() - 2_119.130_514_852_938_7).abs() < 1e-8);
        let p6 = BoundParams::new(6, 2, 1.0, 0.1, 10.0);
        assert!((alpha_bound(0.7, &p6).unwrap() - 2.0 * alpha_bound(0.7, &p3).unwrap()).abs() < 1e-9);
        assert!(alpha_bound(-1.0, &p).is_err());
    }

    #[test]
    fn sphere_areas() {
        let expected = [2.0, 2.0 * PI, 4.0 * PI, 2.0 * PI * PI, 8.0 * PI * PI / 3.0, PI.powi(3)];
        for (m, e) in expected.iter().enumerate() {
            assert!((sphere_area(m) - e).abs() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn h_values() {
        let h = h_bound(0.0, 0.005, 1, 3).unwrap();
        assert!((h - 0.022_739_465_905_883_157).abs() < 1e-12);
        let h = h_bound(1e-6, 0.005, 1, 3).unwrap();
        assert!((h - 0.027_795_994_450_990_48).abs() < 1e-12);
        let h = h_bound(0.0, 0.001, 2, 5).unwrap();
        assert!((h - 0.009_794_197_431_604_288).abs() < 1e-12);
    }

    #[test]
    fn h_increases_with_eta() {
        let mut prev = h_bound(0.0, 0.005, 1, 3).unwrap();
        for i in 1..50 {
            let eta = i as f64 * 1e-7;
            let h = h_bound(eta, 0.005, 1, 3).unwrap();
            assert!(h > prev);
            prev = h;
        }
    }

    #[test]
    fn h_error_cases() {
        assert!(matches!(
            h_bound(0.0, 0.01, 1, 2),
            Err(Error::UnsupportedDimension(2, _))
        ));
        // Denominator at η = 0 is 5.4970508330e-6; subtracting it leaves zero.
        let at_zero = 5.497_050_833_003_953e-6;
        assert!(matches!(h_bound(at_zero, 0.005, 1, 3), Err(Error::BoundVacuous(_))));
        // For ε = 0.01 the 6kdε³ term already dominates.
        assert!(matches!(h_bound(0.0, 0.01, 1, 3), Err(Error::BoundVacuous(_))));
    }

    #[test]
    fn t0_spot_value() {
        let p = BoundParams::new(1, 1, 1.0, 0.5, E);
        assert!((t0_schedule(1.0, &p).unwrap() - 5.158_883_083_359_672).abs() < 1e-12);
        let p = BoundParams::new(2, 2, 0.1, 0.5, 1000.0);
        let v = t0_schedule(0.5, &p).unwrap();
        assert!((v / 78_841_243.701_896_06 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn t0_is_monotone_and_plateaus() {
        let p = BoundParams::new(2, 3, 0.1, 0.1, 1e4);
        assert!(t0_schedule(0.1, &p).unwrap() >= t0_schedule(0.2, &p).unwrap());
        let mut prev = f64::INFINITY;
        for i in 1..200 {
            let v = t0_schedule(i as f64 * 0.01, &p).unwrap();
            assert!(v <= prev);
            prev = v;
        }
        // t₁ < t₂ once ν⁸ > d⁻⁴.
        let a = t0_schedule(0.9, &p).unwrap();
        let b = t0_schedule(1.5, &p).unwrap();
        assert_eq!(a, b);
        assert!(t0_schedule(0.0, &p).is_err());
    }

    #[test]
    fn abs_integral_splits_at_root() {
        // ∫_{-1}^{1} |w| dw = 1.
        assert!((abs_affine_integral(0.0, 1.0, -1.0, 1.0) - 1.0).abs() < 1e-15);
        // ∫_0^2 |1 - w| dw = 1.
        assert!((abs_affine_integral(1.0, -1.0, 0.0, 2.0) - 1.0).abs() < 1e-15);
        assert!((abs_affine_integral(2.0, 0.0, 0.0, 3.0) - 6.0).abs() < 1e-15);
    }

    #[test]
    fn affine_gap_against_quadrature() {
        for &(b0, b1, eps) in &[(0.1, 0.3, 0.5), (-0.2, 0.9, 1.0), (0.0, 0.5, 0.1)] {
            let n = 200_000;
            let h = 2.0 * eps / n as f64;
            let quad: f64 = (0..n)
                .map(|i| {
                    let w = -eps + (i as f64 + 0.5) * h;
                    (b0 + b1 * w - w.max(0.0)).abs() * h
                })
                .sum();
            assert!((affine_relu_l1_gap(b0, b1, eps) - quad).abs() < 1e-7);
        }
    }
}
