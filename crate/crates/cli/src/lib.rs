//! Library side of the `embedlab` command: file formats, the layered
//! `check`/`certify` pipeline, the qubit scan and explicit constructions.

pub mod construct;
pub mod extreme;
pub mod files;
pub mod pipeline;
pub mod scan;

use std::path::Path;

use embedlab_core::Error as CoreError;
use thiserror::Error;

pub const EXIT_EMBEDDABLE: i32 = 0;
pub const EXIT_NOT_EMBEDDABLE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
/// Malformed input or a target that fails validation.
pub const EXIT_MALFORMED: i32 = 64;
/// A size guard refused the request.
pub const EXIT_RESOURCE: i32 = 69;
pub const EXIT_INTERNAL: i32 = 70;
pub const EXIT_IO: i32 = 74;

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "EMBEDLAB_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    /// Target incompatible with the requested construction.
    #[error("{0}")]
    Structure(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {inner}")]
    InFile { path: String, inner: Box<CliError> },
}

impl CliError {
    pub fn in_file(self, path: &Path) -> Self {
        match self {
            e @ (CliError::Io { .. } | CliError::InFile { .. }) => e,
            other => CliError::InFile {
                path: path.display().to_string(),
                inner: Box::new(other),
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Structure(_) => EXIT_MALFORMED,
            CliError::Io { .. } => EXIT_IO,
            CliError::InFile { inner, .. } => inner.exit_code(),
            CliError::Core(e) => match e {
                CoreError::ColumnSum { .. }
                | CoreError::EntryOutOfRange { .. }
                | CoreError::Validation(_)
                | CoreError::Dimension(_)
                | CoreError::Domain(_)
                | CoreError::UnsupportedDimension { .. } => EXIT_MALFORMED,
                CoreError::Resource(_) => EXIT_RESOURCE,
                CoreError::Contract(_) => EXIT_INTERNAL,
            },
        }
    }
}

/// Worker count from `EMBEDLAB_THREADS`; `None` when unset or empty.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Parse(format!(
                "{THREADS_ENV} must be a positive integer, got \"{v}\""
            ))),
        },
        Err(_) => Ok(None),
    }
}
