use rand_distr::{Distribution, Normal};
use relu_bandit::estimation::{fit_erm, match_neurons, FitConfig, Sample};
use relu_bandit::relu_model::eval_f;
use relu_bandit::seeding::rng_from;
use relu_bandit::sim::{gen_instance, sample_arms};
use relu_bandit::ReluNetwork;

fn data(net: &ReluNetwork, n: usize, sigma: f64, seed: u64) -> Vec<Sample> {
    let mut rng = rng_from(seed, &[]);
    let noise = Normal::new(0.0, sigma).unwrap();
    sample_arms(n, net.d(), 0, &mut rng)
        .arms()
        .iter()
        .map(|x| Sample::new(x.clone(), eval_f(net, x).unwrap() + noise.sample(&mut rng)))
        .collect()
}

#[test]
fn noiseless_recovery() {
    for seed in 0..4 {
        let truth = gen_instance(3, 3, 0.1, 0.0, &mut rng_from(seed, &[1])).unwrap().truth;
        let est = fit_erm(&data(&truth, 500, 0.0, seed), 3, &FitConfig::default()).unwrap();
        let m = match_neurons(&est, &truth).unwrap();
        assert!(m.max_error < 0.05, "seed {seed}: {}", m.max_error);
    }
}

#[test]
fn error_shrinks_with_samples() {
    let mut means = Vec::new();
    for n in [20, 100, 500] {
        let mut total = 0.0;
        for seed in 0..5 {
            let truth = gen_instance(2, 3, 0.1, 0.1, &mut rng_from(seed, &[2])).unwrap().truth;
            let est = fit_erm(&data(&truth, n, 0.1, seed), 2, &FitConfig::default()).unwrap();
            total += match_neurons(&est, &truth).unwrap().max_error;
        }
        means.push(total / 5.0);
    }
    assert!(means[0] >= means[1] && means[1] >= means[2], "{means:?}");
}

/// `|f_Θ(x) − f_Θ'(x)| ≤ Σᵢ ‖θᵢ − θ'ᵢ‖` on unit inputs.
#[test]
fn reward_is_lipschitz_in_parameters() {
    let mut rng = rng_from(33, &[]);
    for _ in 0..200 {
        let a = gen_instance(3, 4, 0.0, 0.0, &mut rng).unwrap().truth;
        let b = gen_instance(3, 4, 0.0, 0.0, &mut rng).unwrap().truth;
        let dist: f64 = (0..3)
            .map(|i| {
                a.row(i)
                    .iter()
                    .zip(b.row(i))
                    .map(|(p, q)| (p - q).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .sum();
        for x in sample_arms(10, 4, 0, &mut rng).arms() {
            let gap = (eval_f(&a, x).unwrap() - eval_f(&b, x).unwrap()).abs();
            assert!(gap <= dist + 1e-12);
        }
    }
}
