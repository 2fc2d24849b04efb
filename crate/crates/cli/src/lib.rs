//! Batch driver: configuration, the time loop, output writers, the
//! interface-width sweep and the self-test battery.

pub mod check;
pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod sweep;

pub use config::{parse_config, parse_str, RunConfig, Scenario};
pub use error::CliError;
pub use run::{run, run_with_settings, RunSummary};
pub use sweep::{sweep_epsilon, SweepResult, SweepRow};
