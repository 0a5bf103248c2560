//! Monte Carlo experiments, reference curves and self-checks.

mod config;
mod stats;
mod sweep;
pub mod verify;

pub use config::{parse_grid, CodeSource, ExperimentConfig, Policy, Scheme};
pub use stats::{clopper_pearson, normal_interval, overlaps, wer_interval, EXACT_CI_BELOW, Z95};
pub use sweep::{
    code_rate, emit_curves, perfect_code_radius, run_independence_test, run_sweep, trial_rng, IndependenceReport,
    PointResult, Runner, SweepResult, SWEEP_HEADER,
};
