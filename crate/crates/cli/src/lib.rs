//! Scenario runner behind the `brainstorm` binary: reads a TOML scenario,
//! runs one experiment and writes data tables plus a manifest.

pub mod config;
pub mod error;
pub mod experiments;
pub mod run;
pub mod table;

pub use config::{Format, ScenarioConfig};
pub use error::CliError;
pub use experiments::{catalog, Experiment};
pub use run::{run_scenario, RunManifest, RunOptions};
