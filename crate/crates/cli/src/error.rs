use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] pronylab::Error),

    #[error("{0}")]
    Violation(String),
}

impl CliError {
    /// 1 usage/config, 2 numerical failure, 3 theorem violation.
    pub fn exit_code(&self) -> u8 {
        use pronylab::Error as E;
        match self {
            CliError::Violation(_) => 3,
            CliError::Core(
                E::NumericalFailure(_)
                | E::IllPosed(_)
                | E::SamplingBudgetExhausted(_)
                | E::UnbalancedProblem { .. }
                | E::NonBijective
                | E::UndefinedSeparation,
            ) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
        assert_eq!(CliError::Core(pronylab::Error::Parse("x".into())).exit_code(), 1);
        assert_eq!(CliError::Core(pronylab::Error::InvalidParameter("x".into())).exit_code(), 1);
        assert_eq!(CliError::Core(pronylab::Error::NumericalFailure("x".into())).exit_code(), 2);
        assert_eq!(CliError::Core(pronylab::Error::SamplingBudgetExhausted(3)).exit_code(), 2);
        assert_eq!(CliError::Violation("x".into()).exit_code(), 3);
    }
}
