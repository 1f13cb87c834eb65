//! Fits the neurons from noisy samples and reports sign-aware matching errors
//! for a few sample sizes.

use rand_distr::{Distribution, Normal};
use relu_bandit::estimation::{fit_erm_report, match_neurons, FitConfig, Sample};
use relu_bandit::relu_model::eval_f;
use relu_bandit::seeding::rng_from;
use relu_bandit::sim::{gen_instance, sample_arms};

fn main() -> relu_bandit::Result<()> {
    let (k, d, sigma) = (3, 3, 0.1);
    let mut rng = rng_from(11, &[]);
    let inst = gen_instance(k, d, 0.3, sigma, &mut rng)?;
    let noise = Normal::new(0.0, sigma).unwrap();

    for n in [20, 100, 500, 2000] {
        let arms = sample_arms(n, d, 0, &mut rng);
        let data: Vec<Sample> = arms
            .arms()
            .iter()
            .map(|x| Sample::new(x.clone(), eval_f(&inst.truth, x).unwrap() + noise.sample(&mut rng)))
            .collect();
        let report = fit_erm_report(&data, k, &FitConfig::default())?;
        let m = match_neurons(&report.net, &inst.truth)?;
        println!(
            "n={n:5} loss={:.5} max_err={:.4} signs={:?}",
            report.loss, m.max_error, m.signs
        );
    }
    Ok(())
}
