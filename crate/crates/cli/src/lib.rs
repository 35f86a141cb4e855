//! Orchestration layer for the pairwalk engine: experiment configuration,
//! artifact output, sweep execution, embedded figure presets, and a dense
//! diagonalization oracle for validation.

pub mod config;
pub mod oracle;
pub mod output;
pub mod presets;
pub mod runner;
pub mod validate;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "PAIRWALK_OUT_DIR";
