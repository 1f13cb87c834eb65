//! Checks that the lifted features reproduce the ReLU reward exactly on the
//! arms that clear the margin, even when some estimated neurons are sign-flipped.

use relu_bandit::relu_model::{eval_f, feature_ddagger, restrict_arms, theta_ddagger};
use relu_bandit::seeding::rng_from;
use relu_bandit::sim::{gen_instance, sample_arms};
use relu_bandit::ReluNetwork;

fn main() -> relu_bandit::Result<()> {
    let mut rng = rng_from(7, &[]);
    let truth = gen_instance(3, 4, 0.2, 0.0, &mut rng)?.truth;
    let nu = 0.3;

    // Flip neuron 1 and nudge the others by less than ν/2.
    let rows: Vec<Vec<f64>> = truth
        .to_rows()
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let s = if i == 1 { -1.0 } else { 1.0 };
            r.iter()
                .enumerate()
                .map(|(j, v)| s * v + if j == 0 { 0.05 } else { 0.0 })
                .collect()
        })
        .collect();
    let est = ReluNetwork::normalized(rows)?;

    let offered = sample_arms(2000, 4, 0, &mut rng);
    let kept = restrict_arms(&offered, &est, nu)?;
    let theta = theta_ddagger(&truth, &est, nu)?;
    let mut worst: f64 = 0.0;
    for x in kept.arms.arms() {
        let lin = feature_ddagger(x, &est)?.dot(&theta);
        worst = worst.max((lin - eval_f(&truth, x)?).abs());
    }
    println!("kept {} of {} arms", kept.arms.len(), offered.len());
    println!("max |x‡ᵀθ‡ − f(x)| = {worst:.3e}");
    Ok(())
}
