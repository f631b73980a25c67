use std::path::{Path, PathBuf};

use thiserror::Error;

pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_SCHEMA: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_ILL_CONDITIONED: i32 = 5;
pub const EXIT_SOLVER: i32 = 6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Solver(#[from] layerscat::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } => EXIT_SCHEMA,
            CliError::Io { .. } => EXIT_IO,
            CliError::Solver(layerscat::Error::IllConditioned { .. }) => EXIT_ILL_CONDITIONED,
            CliError::Solver(_) => EXIT_SOLVER,
        }
    }
}
