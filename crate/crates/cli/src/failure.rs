use std::fmt;

use topoplan::planner::PlanError;

/// Error carrying the process exit code.
#[derive(Debug)]
pub enum Failure {
    Internal(anyhow::Error),
    Input(anyhow::Error),
    Infeasible(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Input(_) => 2,
            Failure::Infeasible(_) => 3,
        }
    }

    pub fn input(msg: impl fmt::Display) -> Self {
        Failure::Input(anyhow::anyhow!("{msg}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, e) = match self {
            Failure::Internal(e) => ("internal error", e),
            Failure::Input(e) => ("invalid input", e),
            Failure::Infeasible(e) => ("planning infeasible", e),
        };
        write!(f, "{kind}: {e:#}")
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Internal(e)
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;

pub trait Classify<T> {
    /// Marks an error as an input validation failure (exit 2).
    fn input(self) -> CliResult<T>;
    /// Marks an error as internal (exit 1).
    fn internal(self) -> CliResult<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn input(self) -> CliResult<T> {
        self.map_err(|e| Failure::Input(e.into()))
    }

    fn internal(self) -> CliResult<T> {
        self.map_err(|e| Failure::Internal(e.into()))
    }
}

/// Unreachable phases and budget overruns are infeasibility; the rest are
/// bad inputs.
pub fn plan_failure(e: PlanError) -> Failure {
    match e {
        PlanError::Unreachable { .. } | PlanError::UnreachableTarget { .. } | PlanError::BudgetExceeded { .. } => {
            Failure::Infeasible(e.into())
        }
        _ => Failure::Input(e.into()),
    }
}
