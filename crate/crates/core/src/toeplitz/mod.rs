//! Laurent symbols, finite Toeplitz sections and problem construction.

mod problem;
mod sqrt;
mod symbol;

pub use problem::{
    build_dense_problem, build_laplacian_problem, build_toeplitz_problem, validate, Check,
    CheckName, Origin, ProblemInstance, ValidationReport, OFFDIAG_TOL,
};
pub use sqrt::{symbol_sqrt, MAX_DOUBLINGS};
pub use symbol::{toeplitz_section, LaurentSymbol};
