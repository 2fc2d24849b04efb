use thiserror::Error;

use crate::linsolve::SolveReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} outside its domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{solver} did not converge after {} iterations (relative residual {:.3e})", report.iterations, report.final_residual)]
    NotConverged {
        solver: &'static str,
        report: SolveReport,
    },

    #[error("{solver} breakdown at iteration {iteration}: {reason}")]
    Breakdown {
        solver: &'static str,
        iteration: usize,
        reason: &'static str,
    },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("empty input: {0}")]
    Empty(String),
}
