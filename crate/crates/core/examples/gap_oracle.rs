use relu_bandit::relu_model::{eval_f, exact_argmax_2d, gap_of};
use relu_bandit::seeding::rng_from;
use relu_bandit::sim::gen_instance;
use relu_bandit::Action;

fn main() -> relu_bandit::Result<()> {
    let mut rng = rng_from(3, &[]);
    for k in [2, 3, 5] {
        let net = gen_instance(k, 2, 0.2, 0.0, &mut rng)?.truth;
        let (x, f) = exact_argmax_2d(&net)?;

        let mut grid_best = f64::NEG_INFINITY;
        for i in 0..100_000 {
            let a = std::f64::consts::TAU * i as f64 / 100_000.0;
            grid_best = grid_best.max(eval_f(&net, &Action::new(vec![a.cos(), a.sin()])?)?);
        }
        println!("k={k}: f*={f:.6} grid={grid_best:.6} gap={:.4}", gap_of(&net, &x)?);
    }
    Ok(())
}
