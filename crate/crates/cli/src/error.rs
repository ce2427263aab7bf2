use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Exit status for bad or missing inputs.
pub const EXIT_INPUT: i32 = 1;
/// Exit status for internal and numerical failures.
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("format error: {0}")]
    Format(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{}: {source}", path.display())]
    AtPath { path: PathBuf, source: Box<CliError> },
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Read { path: path.to_path_buf(), source }
    }

    pub fn write(path: &Path, source: io::Error) -> Self {
        CliError::Write { path: path.to_path_buf(), source }
    }

    /// Attaches the file the error came from, unless one is already named.
    pub fn with_path(self, path: &Path) -> Self {
        match self {
            CliError::Read { .. } | CliError::Write { .. } | CliError::AtPath { .. } => self,
            other => CliError::AtPath { path: path.to_path_buf(), source: Box::new(other) },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Write { .. } | CliError::Internal(_) => EXIT_INTERNAL,
            CliError::AtPath { source, .. } => source.exit_code(),
            _ => EXIT_INPUT,
        }
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Read { .. } => "read",
            CliError::Write { .. } => "write",
            CliError::Format(_) => "format",
            CliError::Shape(_) => "shape",
            CliError::Data(_) => "data",
            CliError::Invalid(_) => "invalid",
            CliError::AtPath { source, .. } => source.kind(),
            CliError::Internal(_) => "internal",
        }
    }
}

impl From<spectral_vote_core::Error> for CliError {
    fn from(e: spectral_vote_core::Error) -> Self {
        use spectral_vote_core::Error as E;
        match e {
            E::Shape(_) => CliError::Shape(e.to_string()),
            E::NonFinite { .. }
            | E::OutOfRange { .. }
            | E::DegenerateFeature { .. }
            | E::EmptyGroundTruth => CliError::Data(e.to_string()),
            E::Parameter(_) | E::InvalidPermutation => CliError::Invalid(e.to_string()),
        }
    }
}
