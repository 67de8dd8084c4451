use crate::grid::Trajectory;
use crate::solver::Diagnostics;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Zero pivot met during LU factorization (0-based column index).
    #[error("singular matrix: zero pivot in column {pivot}")]
    SingularMatrix { pivot: usize },

    #[error("newton iteration did not converge: {0}")]
    NonConvergence(Box<NonConvergence>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Last state of a failed Newton solve.
#[derive(Debug, Clone)]
pub struct NonConvergence {
    pub last: Trajectory,
    pub diagnostics: Diagnostics,
}

impl std::fmt::Display for NonConvergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} iterations, final residual {:e}",
            self.diagnostics.iterations,
            self.diagnostics.final_residual()
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
