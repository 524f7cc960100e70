//! Scenario documents, figure presets and file output for the `homlab`
//! command-line tool.

pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod scenario;

pub use config::{Mode, ScenarioConfig, SCHEMA_VERSION};
pub use error::CliError;
pub use figures::{run_figure, FigureParams, Preset};
pub use output::{write_all, Artifact};
pub use scenario::{run_scenario, RunOutput};
