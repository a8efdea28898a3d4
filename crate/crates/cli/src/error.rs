use thiserror::Error;

use sweepdyn_core::Error as CoreError;

/// Failure of a CLI command, carrying its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0}")]
    NoEquilibrium(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::NoEquilibrium(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NoInteriorEquilibrium(_) => CliError::NoEquilibrium(e.to_string()),
            CoreError::InvalidParameter { .. }
            | CoreError::InvalidSchedule(_)
            | CoreError::OutOfSchedule { .. }
            | CoreError::InvalidSolverConfig(_)
            | CoreError::InvalidInput(_) => CliError::Config(e.to_string()),
            CoreError::SingularCarryingCapacity { .. }
            | CoreError::NonFiniteState { .. }
            | CoreError::StepBudgetExceeded { .. }
            | CoreError::StepUnderflow { .. }
            | CoreError::InsufficientOscillations { .. }
            | CoreError::WindowOutOfRange { .. } => CliError::Numerical(e.to_string()),
        }
    }
}
