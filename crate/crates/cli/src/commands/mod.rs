//! Stage implementations shared by the subcommands and the pipeline runner.

pub mod aggregate;
pub mod augment;
pub mod cluster;
pub mod eval;
pub mod gen;
pub mod index;
pub mod ingest;
pub mod retrieve;
pub mod score;

use std::path::Path;

use crate::CliError;

pub(crate) fn require_file(name: &str, path: &Path) -> Result<(), CliError> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::validation(format!(
            "{name} does not exist: {}",
            path.display()
        )))
    }
}
