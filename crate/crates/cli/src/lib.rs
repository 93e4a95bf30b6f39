//! Scenario runner for the `pairdyn` engines: JSON configs in, CSV
//! trajectories, comparison reports, sweep tables and SVG plots out.
//!
//! Exit status of the binary: 0 on success, 2 for usage or configuration
//! errors, 3 when a physics invariant or oracle cross-check fails.

pub mod app;
pub mod compare;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod scenario;
pub mod sweep;
pub mod threshold;

pub use app::{run, Cli, Command};
pub use config::{Overrides, ScenarioConfig};
pub use error::{CliError, Result};
