use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use relu_bandit::linear_ucb::{LinearUcbState, UcbConfig};
use relu_bandit::seeding::rng_from;

/// The closed-form UCB equals the maximum of `θᵀx` over `{θ : ‖θ − θ̂‖_V ≤ β}`.
#[test]
fn ucb_matches_ellipsoid_maximum() {
    let mut rng = rng_from(21, &[]);
    let dim = 4;
    let mut st = LinearUcbState::new(dim, 0.5).unwrap();
    for _ in 0..30 {
        let x: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        st.ridge_update(&x, rng.random_range(-1.0..1.0)).unwrap();
    }
    let cfg = UcbConfig {
        sigma: 0.1,
        s_bound: 1.0,
        delta: 0.05,
        lambda: 0.5,
    };
    let beta = st.conf_radius(&cfg).unwrap();
    let chol = st.gram_inv().clone().cholesky().unwrap();
    for _ in 0..20 {
        let x = DVector::from_iterator(dim, (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let ucb = st.ucb_value(x.as_slice(), beta);

        // Maximizer θ̂ + β V⁻¹x / ‖x‖_{V⁻¹} lies on the boundary and attains the value.
        let vx = st.gram_inv() * &x;
        let norm = x.dot(&vx).sqrt();
        let arg = st.theta_hat() + &vx * (beta / norm);
        let diff = &arg - st.theta_hat();
        assert!(((st.gram() * &diff).dot(&diff).sqrt() - beta).abs() < 1e-9);
        assert!((arg.dot(&x) - ucb).abs() < 1e-9);

        // Random boundary points θ̂ + β L u (V⁻¹ = LLᵀ, ‖u‖ = 1) never beat it.
        for _ in 0..2000 {
            let u = DVector::from_iterator(dim, (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)));
            let u = &u / u.norm();
            let theta = st.theta_hat() + chol.l() * u * beta;
            assert!(theta.dot(&x) <= ucb + 1e-9);
        }
    }
}
