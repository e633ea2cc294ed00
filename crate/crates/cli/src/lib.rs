//! Library behind the `oeq` binary: pipeline configuration, the staged
//! pipeline runner, and the individual stage implementations.

pub mod commands;
pub mod config;
pub mod fixture;
pub mod pipeline;
pub mod records;

use std::fmt;

/// CLI failure classes, mapped onto exit codes: validation errors exit 2,
/// stage errors exit 3.
#[derive(Debug)]
pub enum CliError {
    /// The request was rejected before any work started.
    Validation(String),
    /// A pipeline stage failed while doing work.
    Stage { stage: String, source: anyhow::Error },
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> CliError {
        CliError::Validation(msg.into())
    }

    pub fn stage(stage: &str, source: impl Into<anyhow::Error>) -> CliError {
        CliError::Stage {
            stage: stage.to_string(),
            source: source.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Stage { .. } => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "validation error: {msg}"),
            CliError::Stage { stage, source } => write!(f, "stage `{stage}` failed: {source:#}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Write `bytes` to `path` through a temp file in the same directory, so a
/// failed run never leaves a partial artifact at the final path.
pub(crate) fn write_atomic(path: &std::path::Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}

/// Run `save` against a temp path, then move the result into place.
pub(crate) fn save_atomic(
    path: &std::path::Path,
    save: impl FnOnce(&std::path::Path) -> oeq_core::Result<()>,
) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    save(&tmp)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
