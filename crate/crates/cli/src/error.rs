//! Run errors and their process exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown experiment `{0}` (see `brainstorm list`)")]
    UnknownExperiment(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("{0} invariant violation(s); see the manifest")]
    Invariant(usize),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    /// 2 for validation, 3 for solver failures, 4 for invariant violations
    /// under `--strict` and 5 for output errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::UnknownExperiment(_) | CliError::InvalidConfig(_) | CliError::InvalidParams(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Invariant(_) => 4,
            CliError::Output(_) => 5,
        }
    }

    /// Short stable identifier recorded in the manifest.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::UnknownExperiment(_) => "unknown-experiment",
            CliError::InvalidConfig(_) => "invalid-config",
            CliError::InvalidParams(_) => "invalid-params",
            CliError::Solver(_) => "solver",
            CliError::Invariant(_) => "invariant",
            CliError::Output(_) => "output",
        }
    }
}

impl From<brainstorm::Error> for CliError {
    fn from(e: brainstorm::Error) -> Self {
        use brainstorm::Error as E;
        match e {
            E::Domain(_) | E::Feasibility(_) | E::Precondition(_) => CliError::InvalidParams(e.to_string()),
            E::Solver(_) | E::Range(_) | E::Evaluation(_) => CliError::Solver(e.to_string()),
        }
    }
}
