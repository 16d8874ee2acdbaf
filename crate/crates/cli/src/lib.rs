//! Pipeline, cache and manifest behind the `pminet` command.

pub mod cache;
pub mod config;
pub mod pipeline;
pub mod synth;

pub use config::PipelineConfig;
pub use pipeline::Session;
