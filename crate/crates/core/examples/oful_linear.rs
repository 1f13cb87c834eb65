//! OFUL on a purely linear reward: regret grows roughly like √T.

use nalgebra::DVector;
use rand_distr::{Distribution, Normal};
use relu_bandit::agents::{Agent, OfulBaseline};
use relu_bandit::linear_ucb::UcbConfig;
use relu_bandit::seeding::rng_from;
use relu_bandit::sim::sample_arms;

fn main() -> relu_bandit::Result<()> {
    let d = 4;
    let mut rng = rng_from(5, &[]);
    let arms = sample_arms(50, d, 0, &mut rng);
    let theta = DVector::from_vec(vec![0.5, -0.5, 0.5, 0.5]);
    let mean = |i: usize| arms.arms()[i].coords().dot(&theta);
    let best = (0..arms.len()).map(mean).fold(f64::NEG_INFINITY, f64::max);

    let cfg = UcbConfig {
        sigma: 0.1,
        s_bound: 1.0,
        delta: 0.01,
        lambda: 1.0,
    };
    let mut agent = OfulBaseline::new(cfg, d)?;
    let noise = Normal::new(0.0, 0.1).unwrap();
    let mut regret = 0.0;
    for t in 1..=4000 {
        let i = agent.select(&arms, &mut rng)?;
        regret += best - mean(i);
        agent.observe(mean(i) + noise.sample(&mut rng))?;
        if t % 1000 == 0 {
            println!("t={t:5} regret={regret:.3}");
        }
    }
    Ok(())
}
