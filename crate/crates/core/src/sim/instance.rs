use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::relu_model::{Action, ArmSet, ReluNetwork};

/// Maximum number of rejected draws in [`gen_instance`].
pub const MAX_REJECTIONS: usize = 10_000;

/// A ground-truth environment.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub truth: ReluNetwork,
    /// Standard deviation of the Gaussian reward noise.
    pub sigma: f64,
    /// Separation the neurons were drawn to satisfy.
    pub alpha0: f64,
    pub seed: Option<u64>,
}

fn unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Draws `k` neurons uniformly from `S^{d−1}`, redrawing the whole network until
/// every pair satisfies `min(‖θⱼ−θⱼ'‖, ‖θⱼ+θⱼ'‖) ≥ alpha0`.
pub fn gen_instance<R: Rng + ?Sized>(k: usize, d: usize, alpha0: f64, sigma: f64, rng: &mut R) -> Result<Instance> {
    if k == 0 {
        return Err(Error::arg("k", "must be positive"));
    }
    if d < 2 {
        return Err(Error::arg("d", "must be at least 2"));
    }
    if !(alpha0 >= 0.0) {
        return Err(Error::arg("alpha0", "must be nonnegative"));
    }
    if !(sigma >= 0.0) {
        return Err(Error::arg("sigma", "must be nonnegative"));
    }
    for _ in 0..=MAX_REJECTIONS {
        let rows = (0..k).map(|_| unit_vector(d, rng)).collect();
        let truth = ReluNetwork::normalized(rows)?;
        if truth.is_separated(alpha0) {
            return Ok(Instance {
                truth,
                sigma,
                alpha0,
                seed: None,
            });
        }
    }
    Err(Error::RejectionBudget(MAX_REJECTIONS))
}

/// `m` i.i.d. uniform points on `S^{d−1}`.
pub fn sample_arms<R: Rng + ?Sized>(m: usize, d: usize, round: usize, rng: &mut R) -> ArmSet {
    assert!(m >= 1 && d >= 1, "need at least one arm of positive dimension");
    let arms = (0..m)
        .map(|_| Action::normalized(unit_vector(d, rng)).expect("unit vector"))
        .collect();
    ArmSet::new(arms, round).expect("nonempty, equal dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::rng_from;

    #[test]
    fn single_neuron_always_succeeds() {
        let mut rng = rng_from(1, &[]);
        let inst = gen_instance(1, 2, 1.9, 0.1, &mut rng).unwrap();
        assert_eq!(inst.truth.k(), 1);
    }

    #[test]
    fn separated_instance() {
        let mut rng = rng_from(2, &[]);
        let inst = gen_instance(3, 2, 0.2, 0.1, &mut rng).unwrap();
        assert!(inst.truth.min_separation() >= 0.2);
        for r in inst.truth.rows() {
            let n = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn impossible_separation_errors() {
        let mut rng = rng_from(3, &[]);
        let err = gen_instance(2, 2, 2.1, 0.1, &mut rng).unwrap_err();
        assert!(matches!(err, Error::RejectionBudget(_)));
    }

    #[test]
    fn arms_are_unit_and_seeded() {
        let a = sample_arms(1000, 2, 7, &mut rng_from(4, &[]));
        let b = sample_arms(1000, 2, 7, &mut rng_from(4, &[]));
        assert_eq!(a, b);
        assert_eq!(a.len(), 1000);
        assert_eq!(a.round(), 7);
        for x in a.arms() {
            let n = x.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-9);
        }
    }
}
