//! Stochastic bandits whose mean reward is a one-hidden-layer ReLU network
//! `f(x) = Σᵢ max(θᵢᵀx, 0)` over actions on the unit sphere.
//!
//! The crate provides the reward model and its linearized feature maps, a
//! least-squares neuron estimator with bound evaluators, an OFUL ridge state,
//! the OFU-ReLU and OFU-ReLU+ agents with baselines, and a seeded multi-trial
//! simulation harness with CSV/JSON/SVG output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod cli;
pub mod config;
pub mod error;
pub mod estimation;
pub mod linear_ucb;
pub mod relu_model;
pub mod seeding;
pub mod sim;

pub use config::{AlgorithmConfig, ExperimentConfig};
pub use error::{Error, Result};
pub use relu_model::{Action, ArmSet, ReluNetwork};
