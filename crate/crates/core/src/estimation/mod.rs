//! Recovering the neurons from reward samples and evaluating the accompanying
//! sample-complexity bounds.

mod bounds;
mod erm;
mod matching;

pub use bounds::{
    abs_affine_integral, affine_relu_l1_gap, alpha_bound, h_bound, min_affine_relu_l1_gap, sphere_area, t0_schedule,
    zeta_bound, BoundParams,
};
pub use erm::{empirical_sq_loss, fit_erm, fit_erm_report, FitConfig, FitReport, Sample};
pub use matching::{assignment_cost, match_neurons, min_cost_assignment, neuron_pair_cost, MatchResult};
