//! Random set systems R(n, p): exact sampling, exact minimum hitting sets,
//! the expected number of hitting sets of each size and the thresholds it
//! implies, and a seeded Monte Carlo harness measuring how tightly the
//! hitting number concentrates.

pub mod analysis;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod sampler;
pub mod set_system;
pub mod solver;

pub use analysis::{
    curve, dense_h, dense_i, finite_window, lg_lambda, second_moment, sparse_h, AsymptoticPrediction,
    ExpectationCurve, MomentDiagnostics, Window,
};
pub use error::{Error, Result};
pub use harness::{run_experiment, summarize, ExperimentConfig, Predictions, Summary, TrialRecord};
pub use numerics::{hit_penalty, lg_binomial, lg_sum, Lg};
pub use sampler::{lg_p_of, sample_system, trial_seed, Regime, Seed};
pub use set_system::{Edge, SetSystem, VertexSet};
pub use solver::{
    exhaustive_min_hitting, greedy_hitting, max_independent_size, packing_lower_bound, solve_min_hitting,
    SolveResult, Status,
};
