use thiserror::Error;

use crate::toeplitz::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("singular matrix: pivot {index} has magnitude {magnitude:e}")]
    SingularMatrix { index: usize, magnitude: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(Box<ValidationReport>),

    #[error("mu = {mu} lies outside the domain [0, {beta}]")]
    Domain { mu: f64, beta: f64 },

    #[error("relaxation parameter is degenerate: f'(mu0) = {fprime} is not below 1")]
    DegenerateTau { fprime: f64 },

    #[error("g does not change sign on [0, beta]: g(0) = {g_lo:e}, g(beta) = {g_hi:e}")]
    Bracket { g_lo: f64, g_hi: f64 },

    #[error("derivative vanished at mu = {mu}: g'(mu) = {gprime:e}")]
    DerivativeDegenerate { mu: f64, gprime: f64 },

    #[error("no convergence: {0}")]
    ConvergenceFailure(String),

    #[error("not a Laplacian: row {row} sums to {sum:e}")]
    NotLaplacian { row: usize, sum: f64 },

    #[error("invalid rank-one vector: {0}")]
    InvalidV(String),

    #[error("no column with uniform off-diagonal entries; supply v explicitly")]
    NoUniformColumn,

    #[error("could not draw a valid perturbation in {draws} attempts")]
    RejectionExhausted { draws: usize },

    #[error("invalid solver configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
