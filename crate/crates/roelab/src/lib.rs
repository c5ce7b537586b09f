//! File formats, experiment configuration and pipelines around
//! `roelab-core`.

pub mod config;
pub mod error;
pub mod formats;
pub mod run;

pub use config::{ExperimentConfig, ExperimentKind, OperatorSpec};
pub use error::{LabError, Result};
pub use run::{run, write_outputs, Outcome, Report};
