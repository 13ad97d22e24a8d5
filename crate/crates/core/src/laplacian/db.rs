use crate::error::{Error, Result};
use crate::numkit::{DenseMatrix, LuFactorization, Vector};

use super::LaplacianDecomposition;

pub const DEFAULT_DB_TOL: f64 = 1e-14;
pub const DEFAULT_DB_MAX_ITER: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct DbResult {
    /// `W^{1/2}`.
    pub sqrt: DenseMatrix,
    /// `W^{-1/2}`.
    pub inv_sqrt: DenseMatrix,
    pub iterations: usize,
}

/// Denman-Beavers iteration
/// `X_{k+1} = (X_k + Y_k^{-1}) / 2`, `Y_{k+1} = (Y_k + X_k^{-1}) / 2`,
/// from `X_0 = W`, `Y_0 = I`.
///
/// Stops when `||X_{k+1} - X_k||_1 <= tol ||X_{k+1}||_1`.
pub fn db_sqrt(w: &DenseMatrix, tol: f64, max_iter: usize) -> Result<DbResult> {
    if !w.is_square() {
        return Err(Error::DimensionMismatch {
            expected: w.rows(),
            found: w.cols(),
        });
    }
    let mut x = w.clone();
    let mut y = DenseMatrix::identity(w.rows());
    for k in 1..=max_iter {
        let x_inv = LuFactorization::new(&x)?.inverse();
        let y_inv = LuFactorization::new(&y)?.inverse();
        let x_next = x.add_scaled(1.0, &y_inv).scale(0.5);
        let y_next = y.add_scaled(1.0, &x_inv).scale(0.5);
        let step = x_next.sub(&x).norm1();
        x = x_next;
        y = y_next;
        if step <= tol * x.norm1() {
            return Ok(DbResult {
                sqrt: x,
                inv_sqrt: y,
                iterations: k,
            });
        }
    }
    Err(Error::ConvergenceFailure(format!(
        "db_sqrt: no convergence in {max_iter} iterations"
    )))
}

/// `L^{1/2} = V - 1 y^T` with `V = W^{1/2}` and `y = V^{-T} v`.
#[derive(Clone, Debug, PartialEq)]
pub struct SqrtResult {
    pub v: DenseMatrix,
    pub v_inv: DenseMatrix,
    pub y: Vector,
    pub iterations: usize,
    /// `||(V - 1 y^T)^2 - L||_1`.
    pub defect: f64,
}

impl SqrtResult {
    /// `V - 1 y^T`.
    pub fn root(&self) -> DenseMatrix {
        self.v.add_outer(-1.0, &Vector::ones(self.y.len()), &self.y)
    }
}

pub fn rank_one_sqrt(d: &LaplacianDecomposition, tol: f64) -> Result<SqrtResult> {
    let db = db_sqrt(&d.w, tol, DEFAULT_DB_MAX_ITER)?;
    let y = LuFactorization::new(&db.sqrt)?.solve_transpose(&d.v)?;
    let mut out = SqrtResult {
        v: db.sqrt,
        v_inv: db.inv_sqrt,
        y,
        iterations: db.iterations,
        defect: 0.0,
    };
    let r = out.root();
    out.defect = r.matmul(&r).sub(&d.l).norm1();
    Ok(out)
}
