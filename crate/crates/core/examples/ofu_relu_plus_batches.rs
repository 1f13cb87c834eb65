//! Batch layout of OFU-ReLU+ and one run using a practical exploration override.

use relu_bandit::agents::{build_batch_grid, OfuReluPlus, OfuReluPlusConfig};
use relu_bandit::estimation::{BoundParams, FitConfig};
use relu_bandit::linear_ucb::UcbConfig;
use relu_bandit::seeding::rng_from;
use relu_bandit::sim::{gen_instance, run_trial, ArmSource};

fn main() -> relu_bandit::Result<()> {
    let (k, d, horizon) = (2, 2, 2000);
    let ucb = UcbConfig {
        sigma: 0.1,
        s_bound: (5.0 * k as f64).sqrt(),
        delta: 0.05,
        lambda: 0.01,
    };
    let mut cfg = OfuReluPlusConfig {
        nu0: 1.0,
        t1: 20,
        a: 2.0,
        b: 2f64.powf(1.0 / 32.0),
        schedule: BoundParams::new(k, d, 0.1, 0.05, horizon as f64),
        practical_override: None,
        ucb,
        fit: FitConfig::default(),
    };
    let theory = build_batch_grid(&cfg, horizon)?;
    println!("boundaries {:?}", theory.boundaries);
    println!(
        "theoretical top-ups {:?} (clamped {:?})",
        theory.explore, theory.clamped
    );

    cfg.practical_override = Some(vec![20, 10, 10, 5, 5, 5, 5]);
    let grid = build_batch_grid(&cfg, horizon)?;
    println!("practical top-ups {:?}", grid.explore);

    let inst = gen_instance(k, d, 0.1, 0.1, &mut rng_from(9, &[]))?;
    let mut agent = OfuReluPlus::new(cfg, k, horizon)?;
    let tr = run_trial(&inst, &mut agent, horizon, &ArmSource::Sphere { m: 500 }, 9)?;
    println!(
        "regret {:.2} after {} batches, {} exploration samples",
        tr.final_regret(),
        agent.current_batch(),
        agent.exploration_pool().len()
    );
    Ok(())
}
