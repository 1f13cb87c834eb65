use relu_bandit::estimation::{alpha_bound, h_bound, t0_schedule, zeta_bound, BoundParams};

fn main() -> relu_bandit::Result<()> {
    let p = BoundParams::new(3, 2, 0.1, 0.05, 1000.0);
    for n in [100, 1_000, 10_000, 100_000] {
        let z = zeta_bound(n, &p)?;
        println!("n={n:6}  zeta={z:.4}  alpha={:.1}", alpha_bound(z, &p)?);
    }
    for nu in [1.0, 0.5, 0.25] {
        println!("nu={nu:<5} t0={:.3e}", t0_schedule(nu, &p)?);
    }
    for eps in [0.001, 0.003, 0.006, 0.01] {
        match h_bound(0.0, eps, 1, 3) {
            Ok(h) => println!("h(0, {eps}) = {h:.6}"),
            Err(e) => println!("h(0, {eps}): {e}"),
        }
    }
    Ok(())
}
