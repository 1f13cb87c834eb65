//! Single-hidden-layer ReLU reward model and the feature maps that freeze its
//! activation pattern into a linear model.
//!
//! The reward of an action `x` on the unit sphere is `f(x) = Σᵢ max(θᵢᵀx, 0)`.
//! Given an estimate `Θ̃` of the neurons, the activation indicators
//! `𝟙(θ̃ᵢᵀx ≥ 0)` can be fixed, after which `f` is linear in the `2kd`-dimensional
//! feature vector produced by [`feature_ddagger`]. The matching parameter vector
//! is [`theta_ddagger`]; it depends on the true network and is only used by
//! tests and oracles.

use std::f64::consts::TAU;
use std::hash::{Hash, Hasher};

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Tolerance on unit-norm invariants.
pub const UNIT_NORM_TOL: f64 = 1e-9;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `𝟙(z ≥ 0)`; zero counts as active.
#[inline]
pub fn active(z: f64) -> bool {
    z >= 0.0
}

/// A point on the unit sphere `S^{d-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    coords: DVector<f64>,
}

impl Action {
    /// Wraps a vector that must already have unit norm.
    pub fn new(coords: impl Into<Vec<f64>>) -> Result<Self> {
        let coords = DVector::from_vec(coords.into());
        if coords.is_empty() {
            return Err(Error::arg("coords", "empty action"));
        }
        let n = coords.norm();
        if (n - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::arg("coords", format!("norm {n} is not 1")));
        }
        Ok(Self { coords })
    }

    /// Projects a nonzero vector onto the sphere.
    pub fn normalized(coords: impl Into<Vec<f64>>) -> Result<Self> {
        let coords = DVector::from_vec(coords.into());
        let n = coords.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::arg("coords", "cannot normalize a zero or non-finite vector"));
        }
        Ok(Self { coords: coords / n })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.coords.as_slice()
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }
}

/// The finite set of actions offered in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmSet {
    arms: Vec<Action>,
    round: usize,
}

impl ArmSet {
    pub fn new(arms: Vec<Action>, round: usize) -> Result<Self> {
        let Some(first) = arms.first() else {
            return Err(Error::arg("arms", "arm set is empty"));
        };
        let d = first.dim();
        if let Some(bad) = arms.iter().find(|a| a.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: bad.dim(),
            });
        }
        Ok(Self { arms, round })
    }

    /// Builds a set from raw coordinates, requiring unit norms.
    pub fn from_rows(rows: &[&[f64]], round: usize) -> Result<Self> {
        let arms = rows
            .iter()
            .map(|r| Action::new(r.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(arms, round)
    }

    pub fn arms(&self) -> &[Action] {
        &self.arms
    }

    pub fn get(&self, i: usize) -> Option<&Action> {
        self.arms.get(i)
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn dim(&self) -> usize {
        self.arms[0].dim()
    }

    pub fn with_round(mut self, round: usize) -> Self {
        self.round = round;
        self
    }
}

/// Parameter matrix `Θ` of a one-hidden-layer ReLU network with unit second-layer
/// weights. Each of the `k` rows is a neuron with unit Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ReluNetwork {
    rows: Vec<DVector<f64>>,
    d: usize,
}

impl ReluNetwork {
    /// Builds a network from unit-norm rows.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let net = Self::unchecked(rows)?;
        for (i, r) in net.rows.iter().enumerate() {
            let n = r.norm();
            if (n - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::arg("weights", format!("row {i} has norm {n}")));
            }
        }
        Ok(net)
    }

    /// Builds a network after projecting every row onto the unit sphere.
    pub fn normalized(rows: Vec<Vec<f64>>) -> Result<Self> {
        let mut net = Self::unchecked(rows)?;
        for (i, r) in net.rows.iter_mut().enumerate() {
            let n = r.norm();
            if !(n.is_finite() && n > 0.0) {
                return Err(Error::arg("weights", format!("row {i} cannot be normalized")));
            }
            *r /= n;
        }
        Ok(net)
    }

    fn unchecked(rows: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::arg("weights", "network needs at least one neuron"));
        };
        let d = first.len();
        if d == 0 {
            return Err(Error::arg("weights", "zero-dimensional neurons"));
        }
        let rows = rows
            .into_iter()
            .map(|r| {
                if r.len() != d {
                    Err(Error::DimensionMismatch {
                        expected: d,
                        actual: r.len(),
                    })
                } else {
                    Ok(DVector::from_vec(r))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows, d })
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.rows[i].as_slice()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.rows.iter().map(|r| r.as_slice())
    }

    /// `vec(Θ)`: the rows stacked into a `kd` vector.
    pub fn vectorize(&self) -> DVector<f64> {
        DVector::from_iterator(self.k() * self.d, self.rows.iter().flat_map(|r| r.iter().copied()))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.as_slice().to_vec()).collect()
    }

    /// `min_{j≠j'} min(‖θⱼ−θⱼ'‖, ‖θⱼ+θⱼ'‖)`; infinite when `k = 1`.
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for j in 0..self.k() {
            for l in (j + 1)..self.k() {
                let minus = (&self.rows[j] - &self.rows[l]).norm();
                let plus = (&self.rows[j] + &self.rows[l]).norm();
                best = best.min(minus.min(plus));
            }
        }
        best
    }

    /// Checks the pairwise separation `≥ alpha0`.
    pub fn is_separated(&self, alpha0: f64) -> bool {
        self.min_separation() >= alpha0
    }

    /// Stable fingerprint of the weights, used to tag features built from them.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.d.hash(&mut h);
        for r in &self.rows {
            for v in r.iter() {
                v.to_bits().hash(&mut h);
            }
        }
        h.finish()
    }

    /// `f(x)` on a raw coordinate slice. Caller guarantees matching dimension.
    #[inline]
    pub(crate) fn value_unchecked(&self, x: &[f64]) -> f64 {
        self.rows.iter().map(|r| dot(r.as_slice(), x).max(0.0)).sum()
    }

    /// Activation bits `𝟙(θᵢᵀx ≥ 0)` packed little-endian into words.
    pub(crate) fn pattern(&self, x: &[f64]) -> Vec<u64> {
        let mut bits = vec![0u64; self.k().div_ceil(64)];
        for (i, r) in self.rows.iter().enumerate() {
            if active(dot(r.as_slice(), x)) {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        bits
    }

    fn check_dim(&self, x: &Action) -> Result<()> {
        if x.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                actual: x.dim(),
            });
        }
        Ok(())
    }

    fn check_shape(&self, other: &ReluNetwork) -> Result<()> {
        if other.d != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                actual: other.d,
            });
        }
        if other.k() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                actual: other.k(),
            });
        }
        Ok(())
    }
}

/// An arm lifted into the `2kd` linearized feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedArm {
    pub raw: Action,
    pub features: DVector<f64>,
    pub source_estimate_id: u64,
}

impl TransformedArm {
    pub fn new(raw: &Action, est: &ReluNetwork) -> Result<Self> {
        Ok(Self {
            raw: raw.clone(),
            features: feature_ddagger(raw, est)?,
            source_estimate_id: est.fingerprint(),
        })
    }
}

/// `f_Θ(x) = Σᵢ max(θᵢᵀx, 0)`.
pub fn eval_f(net: &ReluNetwork, x: &Action) -> Result<f64> {
    net.check_dim(x)?;
    Ok(net.value_unchecked(x.as_slice()))
}

/// `x†(x, Θ̃)`: block `i` is `𝟙(θ̃ᵢᵀx ≥ 0)·x`.
pub fn feature_dagger(x: &Action, est: &ReluNetwork) -> Result<DVector<f64>> {
    est.check_dim(x)?;
    let d = est.d();
    let mut out = DVector::zeros(est.k() * d);
    for (i, r) in est.rows().enumerate() {
        if active(dot(r, x.as_slice())) {
            out.rows_mut(i * d, d).copy_from(x.coords());
        }
    }
    Ok(out)
}

/// `x‡(x, Θ̃)`: the `x†` blocks followed by `k` correction blocks
/// `(1/2 − 𝟙(θ̃ᵢᵀx ≥ 0))·x`.
pub fn feature_ddagger(x: &Action, est: &ReluNetwork) -> Result<DVector<f64>> {
    est.check_dim(x)?;
    let mut out = DVector::zeros(2 * est.k() * est.d());
    write_feature_ddagger(est, x.as_slice(), out.as_mut_slice());
    Ok(out)
}

/// Fills `out` (length `2kd`) with `x‡(x, est)`.
pub(crate) fn write_feature_ddagger(est: &ReluNetwork, x: &[f64], out: &mut [f64]) {
    let (k, d) = (est.k(), est.d());
    for (i, r) in est.rows().enumerate() {
        let on = active(dot(r, x));
        let (lin, corr) = if on { (1.0, -0.5) } else { (0.0, 0.5) };
        for j in 0..d {
            out[i * d + j] = lin * x[j];
            out[(k + i) * d + j] = corr * x[j];
        }
    }
}

/// `θ‡(Θ*, Θ̃)`: the true rows, then `2θᵢ*` for every neuron whose estimate is
/// sign-flipped (`‖θ̃ᵢ+θᵢ*‖ ≤ ν/2`), else zero. Depends on the truth, so agents
/// never call it.
pub fn theta_ddagger(truth: &ReluNetwork, est: &ReluNetwork, nu: f64) -> Result<DVector<f64>> {
    if !(nu > 0.0) {
        return Err(Error::arg("nu", format!("must be positive, got {nu}")));
    }
    truth.check_shape(est)?;
    let (k, d) = (truth.k(), truth.d());
    let mut out = DVector::zeros(2 * k * d);
    for i in 0..k {
        let t = &truth.rows[i];
        out.rows_mut(i * d, d).copy_from(t);
        if (&est.rows[i] + t).norm() <= nu / 2.0 {
            out.rows_mut((k + i) * d, d).copy_from(&(t * 2.0));
        }
    }
    Ok(out)
}

/// Arms kept by [`restrict_arms`], with their positions in the offered set.
#[derive(Debug, Clone, PartialEq)]
pub struct Restriction {
    pub arms: ArmSet,
    pub indices: Vec<usize>,
    /// Set when no arm met the margin and the full set was returned instead.
    pub fallback: bool,
}

/// `X(Θ̃, ν)`: the arms with `|θ̃ᵢᵀx| ≥ ν` for every neuron, in offered order.
/// An empty result falls back to the whole set with `fallback = true`.
pub fn restrict_arms(arms: &ArmSet, est: &ReluNetwork, nu: f64) -> Result<Restriction> {
    if !(nu >= 0.0) {
        return Err(Error::arg("nu", format!("must be nonnegative, got {nu}")));
    }
    let indices = restricted_indices(arms, est, nu)?;
    if indices.is_empty() {
        return Ok(Restriction {
            arms: arms.clone(),
            indices: (0..arms.len()).collect(),
            fallback: true,
        });
    }
    let kept = indices.iter().map(|&i| arms.arms[i].clone()).collect();
    Ok(Restriction {
        arms: ArmSet::new(kept, arms.round)?,
        indices,
        fallback: false,
    })
}

/// Index form of [`restrict_arms`] without the fallback.
pub(crate) fn restricted_indices(arms: &ArmSet, est: &ReluNetwork, nu: f64) -> Result<Vec<usize>> {
    if arms.dim() != est.d() {
        return Err(Error::DimensionMismatch {
            expected: est.d(),
            actual: arms.dim(),
        });
    }
    Ok(arms
        .arms
        .iter()
        .enumerate()
        .filter(|(_, x)| est.rows().all(|r| dot(r, x.as_slice()).abs() >= nu))
        .map(|(i, _)| i)
        .collect())
}

/// `minᵢ |θᵢᵀx|`, the gap of `x` to the nearest activation boundary.
pub fn gap_of(net: &ReluNetwork, xstar: &Action) -> Result<f64> {
    net.check_dim(xstar)?;
    Ok(net
        .rows()
        .map(|r| dot(r, xstar.as_slice()).abs())
        .fold(f64::INFINITY, f64::min))
}

/// Exact maximizer of `f` on the unit circle.
///
/// The circle is cut at every angle where some `θᵢᵀx = 0`. On each arc the active
/// set is fixed, so `f(x) = wᵀx` with `w` the sum of active neurons, maximized at
/// `w/‖w‖` if that direction lies inside the arc and at an endpoint otherwise.
/// Among equal values the smallest angle in `[0, 2π)` wins.
pub fn exact_argmax_2d(net: &ReluNetwork) -> Result<(Action, f64)> {
    if net.d() != 2 {
        return Err(Error::UnsupportedDimension(net.d(), "exact maximizer needs d = 2"));
    }
    let wrap = |a: f64| {
        let r = a.rem_euclid(TAU);
        if r >= TAU {
            0.0
        } else {
            r
        }
    };
    let mut cuts: Vec<f64> = net
        .rows()
        .flat_map(|r| {
            let psi = r[1].atan2(r[0]);
            [wrap(psi + TAU / 4.0), wrap(psi - TAU / 4.0)]
        })
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let mut candidates: Vec<f64> = cuts.clone();
    for (j, &start) in cuts.iter().enumerate() {
        let end = if j + 1 < cuts.len() { cuts[j + 1] } else { cuts[0] + TAU };
        let mid = 0.5 * (start + end);
        let probe = [mid.cos(), mid.sin()];
        let mut w = [0.0, 0.0];
        for r in net.rows() {
            if dot(r, &probe) > 0.0 {
                w[0] += r[0];
                w[1] += r[1];
            }
        }
        if norm(&w) == 0.0 {
            continue;
        }
        let mut phi = w[1].atan2(w[0]);
        while phi < start {
            phi += TAU;
        }
        if phi <= end {
            candidates.push(wrap(phi));
        }
    }

    let mut best: Option<(f64, f64)> = None;
    for phi in candidates {
        let v = net.value_unchecked(&[phi.cos(), phi.sin()]);
        best = match best {
            None => Some((phi, v)),
            Some((bp, bv)) => {
                if v > bv + 1e-12 || ((v - bv).abs() <= 1e-12 && phi < bp) {
                    Some((phi, v))
                } else {
                    Some((bp, bv))
                }
            }
        };
    }
    let (phi, v) = best.expect("circle always has at least two cut points");
    Ok((Action::normalized(vec![phi.cos(), phi.sin()])?, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn net(rows: &[&[f64]]) -> ReluNetwork {
        ReluNetwork::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn act(x: &[f64]) -> Action {
        Action::new(x.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn eval_f_examples() {
        assert_eq!(eval_f(&net(&[&[1.0, 0.0]]), &act(&[1.0, 0.0])).unwrap(), 1.0);
        assert_eq!(eval_f(&net(&[&[1.0, 0.0]]), &act(&[-1.0, 0.0])).unwrap(), 0.0);
        let v = eval_f(&net(&[&[1.0, 0.0], &[0.0, 1.0]]), &act(&[H, H])).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn eval_f_rejects_dimension_mismatch() {
        let err = eval_f(&net(&[&[1.0, 0.0]]), &act(&[1.0, 0.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn unit_norm_is_enforced() {
        assert!(ReluNetwork::new(vec![vec![1.0, 1.0]]).is_err());
        assert!(Action::new(vec![0.5, 0.5]).is_err());
        assert!(ReluNetwork::normalized(vec![vec![0.0, 0.0]]).is_err());
    }

    #[test]
    fn feature_dagger_examples() {
        let e = net(&[&[1.0, 0.0]]);
        let f = feature_dagger(&act(&[0.6, 0.8]), &e).unwrap();
        assert!(close(f.as_slice(), &[0.6, 0.8]));
        let f = feature_dagger(&act(&[-0.6, 0.8]), &e).unwrap();
        assert!(close(f.as_slice(), &[0.0, 0.0]));
        let e2 = net(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let f = feature_dagger(&act(&[0.0, 1.0]), &e2).unwrap();
        assert!(close(f.as_slice(), &[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn feature_ddagger_examples() {
        let e = net(&[&[1.0, 0.0]]);
        let f = feature_ddagger(&act(&[0.6, 0.8]), &e).unwrap();
        assert!(close(f.as_slice(), &[0.6, 0.8, -0.3, -0.4]));
        let f = feature_ddagger(&act(&[-0.6, 0.8]), &e).unwrap();
        assert!(close(f.as_slice(), &[0.0, 0.0, -0.3, 0.4]));
        let e3 = ReluNetwork::normalized(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(feature_ddagger(&act(&[H, -H]), &e3).unwrap().len(), 12);
    }

    #[test]
    fn transformed_arm_carries_estimate_id() {
        let e = net(&[&[1.0, 0.0]]);
        let t = TransformedArm::new(&act(&[0.6, 0.8]), &e).unwrap();
        assert_eq!(t.source_estimate_id, e.fingerprint());
        assert_eq!(t.features.len(), 4);
    }

    #[test]
    fn theta_ddagger_examples() {
        let truth = net(&[&[1.0, 0.0]]);
        let same = theta_ddagger(&truth, &truth, 0.5).unwrap();
        assert!(close(same.as_slice(), &[1.0, 0.0, 0.0, 0.0]));
        let flipped = net(&[&[-1.0, 0.0]]);
        let th = theta_ddagger(&truth, &flipped, 0.5).unwrap();
        assert!(close(th.as_slice(), &[1.0, 0.0, 2.0, 0.0]));
        let x = act(&[0.6, 0.8]);
        let lin = feature_ddagger(&x, &flipped).unwrap().dot(&th);
        assert!((lin - 0.6).abs() < 1e-12);
        assert!((lin - eval_f(&truth, &x).unwrap()).abs() < 1e-12);
        assert!(theta_ddagger(&truth, &truth, 0.0).is_err());
    }

    #[test]
    fn restrict_arms_examples() {
        let e = net(&[&[1.0, 0.0]]);
        let arms = ArmSet::from_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[0.6, 0.8]], 0).unwrap();
        let r = restrict_arms(&arms, &e, 0.5).unwrap();
        assert_eq!(r.indices, vec![0, 2]);
        assert!(!r.fallback);

        let r = restrict_arms(&arms, &e, 0.0).unwrap();
        assert_eq!(r.arms, arms);
        assert!(!r.fallback);

        let r = restrict_arms(&arms, &e, 2.0).unwrap();
        assert_eq!(r.arms, arms);
        assert!(r.fallback);
        assert!(restrict_arms(&arms, &e, -1.0).is_err());
    }

    #[test]
    fn gap_examples() {
        assert_eq!(gap_of(&net(&[&[1.0, 0.0]]), &act(&[1.0, 0.0])).unwrap(), 1.0);
        assert_eq!(gap_of(&net(&[&[1.0, 0.0]]), &act(&[0.0, 1.0])).unwrap(), 0.0);
        let two = net(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let (x, _) = exact_argmax_2d(&two).unwrap();
        assert!((gap_of(&two, &x).unwrap() - H).abs() < 1e-12);
    }

    #[test]
    fn exact_argmax_examples() {
        let (x, v) = exact_argmax_2d(&net(&[&[1.0, 0.0]])).unwrap();
        assert!(close(x.as_slice(), &[1.0, 0.0]));
        assert!((v - 1.0).abs() < 1e-12);
        let (x, v) = exact_argmax_2d(&net(&[&[1.0, 0.0], &[0.0, 1.0]])).unwrap();
        assert!(close(x.as_slice(), &[H, H]));
        assert!((v - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn exact_argmax_breaks_ties_by_smallest_angle() {
        // Opposite neurons: f(x) = |θᵀx|, maxima at angle 0 and π.
        let (x, v) = exact_argmax_2d(&net(&[&[1.0, 0.0], &[-1.0, 0.0]])).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!(close(x.as_slice(), &[1.0, 0.0]));
    }

    #[test]
    fn exact_argmax_rejects_other_dimensions() {
        let e = net(&[&[1.0, 0.0, 0.0]]);
        assert!(matches!(exact_argmax_2d(&e), Err(Error::UnsupportedDimension(3, _))));
    }
}
