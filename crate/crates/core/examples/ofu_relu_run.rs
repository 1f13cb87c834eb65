use relu_bandit::agents::{Agent, OfuRelu, OfuReluConfig, OfulBaseline};
use relu_bandit::estimation::{match_neurons, FitConfig};
use relu_bandit::linear_ucb::UcbConfig;
use relu_bandit::seeding::rng_from;
use relu_bandit::sim::{gen_instance, run_trial, ArmSource};

fn main() -> relu_bandit::Result<()> {
    let (k, d, horizon) = (3, 2, 1000);
    let inst = gen_instance(k, d, 0.1, 0.1, &mut rng_from(1, &[]))?;
    let ucb = UcbConfig {
        sigma: 0.1,
        s_bound: (5.0 * k as f64).sqrt(),
        delta: 1.0 / (horizon as f64).sqrt(),
        lambda: 0.001,
    };
    let source = ArmSource::Sphere { m: 1000 };

    let mut relu = OfuRelu::new(
        OfuReluConfig {
            t0: 20,
            nu: 0.0,
            ucb,
            fit: FitConfig::default(),
        },
        k,
    )?;
    let tr = run_trial(&inst, &mut relu, horizon, &source, 42)?;
    let m = match_neurons(relu.estimate().unwrap(), &inst.truth)?;
    println!(
        "ofu_relu regret {:.2}, estimate error {:.3}",
        tr.final_regret(),
        m.max_error
    );

    let mut oful = OfulBaseline::new(
        UcbConfig {
            s_bound: (k as f64).sqrt(),
            ..ucb
        },
        d,
    )?;
    let tr = run_trial(&inst, &mut oful, horizon, &source, 42)?;
    println!("{} regret {:.2}", oful.name(), tr.final_regret());
    Ok(())
}
