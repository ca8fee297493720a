use hausdorff::Error;

/// Failures mapped onto the exit-code contract.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error("{0}")]
    Check(String),

    #[error("{0}")]
    Refusal(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Check(_) => 2,
            CliError::Refusal(_) => 3,
        }
    }
}

/// Budget, resolution and truncation failures are refusals; everything else
/// means the input was unusable.
pub fn is_refusal(e: &Error) -> bool {
    matches!(
        e,
        Error::RefinementFailure { .. }
            | Error::TruncationMass { .. }
            | Error::Truncation { .. }
            | Error::DomainTruncation { .. }
            | Error::NotInvertible { .. }
    )
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if is_refusal(&e) {
            CliError::Refusal(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

pub type CliResult<T> = Result<T, CliError>;
