//! Solvers for brainstorming under unknown problem difficulty: discrete
//! exponential-bandit thresholds, exact policy evaluation, the continuum
//! breadth/depth limit and share contracts built on it.

pub mod continuum;
pub mod contracts;
pub mod discrete;
pub mod error;
pub mod grid;
pub mod model;
pub mod numeric;
pub mod policy;

pub use continuum::{
    constant_depth, continuum_payoff, convergence_experiment, depth_limits, solve_trajectory, ConvergenceReport,
    DepthLimits, Trajectory,
};
pub use contracts::{
    agent_best_response, extensive_margin_contract, extensive_margin_learning_contract, no_commitment_equilibrium,
    optimal_static_share, solve_dynamic_contract, ContractPath, NoCommitment, SharePath, StaticContract,
};
pub use discrete::{
    gittins_objective, known_threshold, optimal_belief_path, solve_benchmark_threshold, solve_general_thresholds,
    solve_learning_thresholds, Threshold, ThresholdSequence,
};
pub use error::{Error, Result};
pub use grid::{Spacing, TimeGrid};
pub use model::{Difficulty, ModelParams, RateDistribution};
pub use policy::{brute_force_thresholds, policy_payoff, Environment, Tail, ThresholdPolicy};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
