//! Run orchestration for the social simulation engine: configuration
//! loading, simulation runs with checkpoint/resume, threshold-sweep network
//! analysis, and cross-run report bundles.

pub mod analyze;
pub mod config_file;
pub mod error;
pub mod manifest;
pub mod report;
pub mod runner;
pub mod sweep;

pub use analyze::{analyze, default_thresholds, parse_thresholds, AnalyzeOptions};
pub use config_file::{load_config, Overrides};
pub use error::{CliError, CliResult};
pub use manifest::RunManifest;
pub use report::{report, ReportOptions};
pub use runner::{resume, simulate, SimulateOptions};
pub use sweep::{sweep, SweepOptions};
