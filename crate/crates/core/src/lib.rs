//! Solvers for the nonlinear vector equation `A x - ||x||_1 x = b`, where `A`
//! is a nonsingular M-matrix and `b >= 0`.
//!
//! The crate is organised bottom-up:
//!
//! * [`numkit`]: dense vectors, matrices and LU factorization.
//! * [`toeplitz`]: Laurent symbols, Toeplitz sections, problem validation.
//! * [`scalar`]: the scalar function `f(mu) = ||(A - mu I)^{-1} b||_1` and
//!   friends, plus a bisection oracle for the fixed point `mu*`.
//! * [`solvers`]: relaxed fixed-point, Newton and doubling iterations.
//! * [`laplacian`]: square roots of graph Laplacians via a rank-one split.
//! * [`perturbation`]: first-order sensitivity bound and an empirical check.
//! * [`experiments`]: instance generators and the experiment runner.

// Validation uses `!(x > 0.0)` style checks on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub(crate) mod json_f64;
pub mod laplacian;
pub mod numkit;
pub mod perturbation;
pub mod scalar;
pub mod solvers;
pub mod toeplitz;

pub use error::{Error, Result};
