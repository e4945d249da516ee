use thiserror::Error;

/// Failure classes of a run, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("computation error: {0}")]
    Computation(#[from] gbs_core::Error),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Computation(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub(crate) fn input(err: impl std::fmt::Display) -> Self {
        CliError::Input(err.to_string())
    }

    pub(crate) fn io(err: impl std::fmt::Display) -> Self {
        CliError::Io(err.to_string())
    }
}
