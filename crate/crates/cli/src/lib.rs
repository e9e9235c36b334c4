//! Command-line pipeline around `subeval-core`.

mod app;
pub mod config;
pub mod pipeline;
pub mod report;

pub use app::run;

/// Invalid invocation or configuration; maps to exit code 1.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);
