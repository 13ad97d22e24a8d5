//! Square roots of graph Laplacians through a rank-one split.
//!
//! A Laplacian written as `L = W - 1 v^T`, with `W` a nonsingular M-matrix
//! and `v >= 0`, has the square root `L^{1/2} = V - 1 y^T` where `V` is the
//! principal square root of `W` and `y = V^{-T} v`. The vector `y` is also
//! the solution of `(nu I + V^T) x - ||x||_1 x = v` with `nu = sqrt(||v||_1)`,
//! whose scalar equation has a double root at `mu = nu`.

mod binomial;
mod db;
mod graph;

use crate::error::{Error, Result};
use crate::numkit::{DenseMatrix, LuFactorization, Vector};
use crate::solvers::{solve_newton, SolveResult, SolverConfig};
use crate::toeplitz::{build_laplacian_problem, ProblemInstance, OFFDIAG_TOL};

pub use binomial::{binomial_sqrt, BinomialResult, BinomialState, DEFAULT_BINOMIAL_MAX_ITER};
pub use db::{db_sqrt, rank_one_sqrt, DbResult, SqrtResult, DEFAULT_DB_MAX_ITER, DEFAULT_DB_TOL};
pub use graph::{laplacian_from_edges, parse_edge_list, EdgeList};

/// Row sums of a Laplacian must vanish to within this (scaled by `max(1, ||L||_inf)`).
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Residual target for the Laplacian equation; the double root at `mu = nu`
/// caps attainable accuracy well above machine precision.
pub const LAPLACIAN_TOL: f64 = 1e-11;

/// `L = W - 1 v^T` with `nu = sqrt(||v||_1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianDecomposition {
    pub l: DenseMatrix,
    pub w: DenseMatrix,
    pub v: Vector,
    pub nu: f64,
}

impl LaplacianDecomposition {
    /// Decomposition built from `W` and `v` directly, `L := W - 1 v^T`.
    ///
    /// Only `W` and `v` are checked; `L` need not have vanishing row sums.
    pub fn from_parts(w: DenseMatrix, v: Vector) -> Result<Self> {
        if !w.is_square() || w.rows() != v.len() {
            return Err(Error::InvalidV(format!(
                "W is {}x{} but v has length {}",
                w.rows(),
                w.cols(),
                v.len()
            )));
        }
        if v.min() < 0.0 {
            return Err(Error::InvalidV("v must be nonnegative".into()));
        }
        check_m_matrix(&w)?;
        let l = w.add_outer(-1.0, &Vector::ones(v.len()), &v);
        let nu = v.norm1().sqrt();
        Ok(Self { l, w, v, nu })
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }
}

fn check_m_matrix(w: &DenseMatrix) -> Result<()> {
    if w.rows() > 1 && w.max_offdiagonal() > OFFDIAG_TOL {
        return Err(Error::InvalidV(
            "W = L + 1 v^T has a positive off-diagonal entry".into(),
        ));
    }
    let lu =
        LuFactorization::new(w).map_err(|_| Error::InvalidV("W = L + 1 v^T is singular".into()))?;
    let inv = lu.inverse();
    if inv.min_entry() < -1e-12 * inv.norm1() {
        return Err(Error::InvalidV(
            "W = L + 1 v^T is not an M-matrix (inverse has negative entries)".into(),
        ));
    }
    Ok(())
}

fn check_laplacian(l: &DenseMatrix) -> Result<()> {
    if !l.is_square() {
        return Err(Error::DimensionMismatch {
            expected: l.rows(),
            found: l.cols(),
        });
    }
    let tol = ROW_SUM_TOL * l.norm_inf().max(1.0);
    for (row, sum) in l.row_sums().iter().enumerate() {
        if sum.abs() > tol {
            return Err(Error::NotLaplacian { row, sum: *sum });
        }
    }
    Ok(())
}

/// `W = L + 1 v^T`, validated as a nonsingular M-matrix.
pub fn decompose(l: &DenseMatrix, v: &Vector) -> Result<LaplacianDecomposition> {
    check_laplacian(l)?;
    if v.len() != l.rows() {
        return Err(Error::InvalidV(format!(
            "v has length {}, expected {}",
            v.len(),
            l.rows()
        )));
    }
    let w = l.add_outer(1.0, &Vector::ones(v.len()), v);
    let mut d = LaplacianDecomposition::from_parts(w, v.clone())?;
    d.l = l.clone();
    Ok(d)
}

/// `c e_j` for the first column `j` whose off-diagonal entries all equal `-c < 0`.
///
/// Adding `1 (c e_j)^T` then clears column `j` below and above the diagonal.
pub fn suggest_v(l: &DenseMatrix) -> Result<Vector> {
    check_laplacian(l)?;
    let n = l.rows();
    for j in 0..n {
        let mut offdiag = (0..n).filter(|&i| i != j).map(|i| l[(i, j)]);
        let Some(first) = offdiag.next() else { break };
        let c = -first;
        if c > 0.0 && offdiag.all(|e| (e + c).abs() <= 1e-14 * c.max(1.0)) {
            return Ok(Vector::unit(n, j, c));
        }
    }
    Err(Error::NoUniformColumn)
}

/// The problem `(nu I + V^T) x - ||x||_1 x = v` for a computed root `V`.
pub fn laplacian_problem(d: &LaplacianDecomposition, root: &SqrtResult) -> Result<ProblemInstance> {
    build_laplacian_problem(d.nu, &root.v, d.v.clone())
}

/// Newton with the double-root step on the Laplacian equation.
///
/// Multiplicity is forced to 2 and the tolerance is raised to at least
/// [`LAPLACIAN_TOL`].
pub fn solve_lap_equation(
    d: &LaplacianDecomposition,
    root: &SqrtResult,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    let p = laplacian_problem(d, root)?;
    let cfg = cfg
        .clone()
        .with_multiplicity(2)
        .with_tol(cfg.tol.max(LAPLACIAN_TOL));
    solve_newton(&p, &cfg)
}
