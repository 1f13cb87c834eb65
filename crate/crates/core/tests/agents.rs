use rand_distr::{Distribution, Normal};
use relu_bandit::agents::{
    Agent, OfuRelu, OfuReluConfig, OfuReluPlus, OfuReluPlusConfig, OfulBaseline, Phase, RandomAgent,
};
use relu_bandit::estimation::{BoundParams, FitConfig};
use relu_bandit::linear_ucb::UcbConfig;
use relu_bandit::relu_model::{eval_f, restrict_arms};
use relu_bandit::seeding::rng_from;
use relu_bandit::sim::{gen_instance, run_trial, sample_arms, ArmSource};

fn ucb(k: usize, lambda: f64) -> UcbConfig {
    UcbConfig {
        sigma: 0.1,
        s_bound: (5.0 * k as f64).sqrt(),
        delta: 0.01,
        lambda,
    }
}

#[test]
fn optimism_with_exact_estimate() {
    let (k, d, nu) = (3, 3, 0.05);
    let noise = Normal::new(0.0, 0.1).unwrap();
    for seed in 0..3u64 {
        let truth = gen_instance(k, d, 0.2, 0.1, &mut rng_from(seed, &[1])).unwrap().truth;
        let cfg = OfuReluConfig {
            t0: 1,
            nu,
            ucb: ucb(k, 1.0),
            fit: FitConfig::default(),
        };
        let mut agent = OfuRelu::with_estimate(cfg, truth.clone()).unwrap();
        let mut rng = rng_from(seed, &[2]);
        for t in 1..=300 {
            let arms = sample_arms(200, d, t, &mut rng);
            let i = agent.select(&arms, &mut rng).unwrap();
            assert_eq!(agent.last_phase(), Some(Phase::Exploit));
            let dec = agent.last_decision().unwrap().clone();
            let kept = restrict_arms(&arms, &truth, nu / 2.0).unwrap();
            let best = kept
                .arms
                .arms()
                .iter()
                .map(|x| eval_f(&truth, x).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            let got = eval_f(&truth, &arms.arms()[i]).unwrap();
            assert!(
                best - got <= 2.0 * dec.beta * dec.width + 1e-9,
                "round {t}: {best} - {got}"
            );
            agent.observe(got + noise.sample(&mut rng)).unwrap();
        }
    }
}

#[test]
fn per_round_regret_within_bounds() {
    let (k, d, horizon) = (4, 2, 200);
    let inst = gen_instance(k, d, 0.1, 0.1, &mut rng_from(5, &[])).unwrap();
    let agents: Vec<Box<dyn Agent>> = vec![
        Box::new(RandomAgent::new()),
        Box::new(OfulBaseline::new(ucb(k, 1.0), d).unwrap()),
        Box::new(
            OfuRelu::new(
                OfuReluConfig {
                    t0: 20,
                    nu: 0.0,
                    ucb: ucb(k, 0.01),
                    fit: FitConfig::default(),
                },
                k,
            )
            .unwrap(),
        ),
    ];
    for mut a in agents {
        let tr = run_trial(&inst, a.as_mut(), horizon, &ArmSource::Sphere { m: 100 }, 8).unwrap();
        assert_eq!(tr.len(), horizon);
        let mut prev = 0.0;
        for r in &tr.records {
            assert!(r.inst_regret >= 0.0 && r.inst_regret <= 2.0 * k as f64);
            assert!(r.cum_regret >= prev);
            prev = r.cum_regret;
        }
    }
}

#[test]
fn random_agent_regret_grows_linearly() {
    let inst = gen_instance(3, 2, 0.1, 0.1, &mut rng_from(6, &[])).unwrap();
    let (mut half, mut full) = (0.0, 0.0);
    for seed in 0..10 {
        let tr = run_trial(
            &inst,
            &mut RandomAgent::new(),
            1000,
            &ArmSource::Sphere { m: 100 },
            seed,
        )
        .unwrap();
        half += tr.records[499].cum_regret;
        full += tr.final_regret();
    }
    let ratio = full / half;
    assert!((ratio - 2.0).abs() < 0.15, "{ratio}");
}

#[test]
fn plus_exploration_accounting() {
    let (k, d, horizon) = (2, 2, 300);
    let cfg = OfuReluPlusConfig {
        nu0: 1.0,
        t1: 10,
        a: 2.0,
        b: 1.2,
        schedule: BoundParams::new(k, d, 0.1, 0.05, horizon as f64),
        practical_override: Some(vec![10, 6, 4, 4, 4, 4]),
        ucb: ucb(k, 0.1),
        fit: FitConfig {
            restarts: 3,
            ..FitConfig::default()
        },
    };
    let inst = gen_instance(k, d, 0.1, 0.1, &mut rng_from(7, &[])).unwrap();
    let mut agent = OfuReluPlus::new(cfg, k, horizon).unwrap();
    let grid = agent.grid().clone();
    let mut rng = rng_from(7, &[1]);
    let mut explored = 0;
    for t in 1..=horizon {
        let arms = sample_arms(100, d, t, &mut rng);
        let i = agent.select(&arms, &mut rng).unwrap();
        let b = grid.batch_of(t);
        let expect = if t <= grid.boundaries[b - 1] + grid.explore[b - 1] {
            Phase::Explore
        } else {
            Phase::Exploit
        };
        assert_eq!(agent.last_phase(), Some(expect), "round {t}");
        if expect == Phase::Explore {
            explored += 1;
        }
        agent.observe(eval_f(&inst.truth, &arms.arms()[i]).unwrap()).unwrap();
    }
    assert_eq!(agent.exploration_pool().len(), explored);
    assert_eq!(explored, grid.explore.iter().sum::<usize>());
    assert_eq!(agent.history().len(), horizon);
}
