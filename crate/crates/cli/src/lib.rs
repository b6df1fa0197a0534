//! File-based orchestration of the skelforge pipeline.

pub mod config;
pub mod error;
pub mod layout;
pub mod pipeline;
pub mod stages;

pub use config::{Overrides, PipelineConfig};
pub use error::{CliError, CliResult, ErrorKind};
pub use pipeline::{run_pipeline, RunOutput, RunReport};
