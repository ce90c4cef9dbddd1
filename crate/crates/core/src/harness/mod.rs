//! Sweep orchestration: configuration, built-in recipes, the parallel
//! sweep itself, output files and file-based acceptance checks.

pub mod check;
pub mod config;
pub mod emit;
pub mod recipes;
pub mod sweep;

pub use check::{check_acceptance, CheckOutcome, Evidence, Verdict};
pub use config::ExperimentConfig;
pub use emit::{emit, preflight};
pub use recipes::Recipe;
pub use sweep::{run_sweep, SweepOptions, SweepResult};
