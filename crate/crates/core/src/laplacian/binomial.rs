use crate::error::{Error, Result};
use crate::numkit::{DenseMatrix, Vector};

use super::LaplacianDecomposition;

pub const DEFAULT_BINOMIAL_MAX_ITER: usize = 10_000;

/// Split iterate `X_k = S_k + 1 x_k^T` of the binomial iteration
/// `X_{k+1} = (W_1 + 1 v~^T + X_k^2) / 2`, `X_0 = 0`.
///
/// `s` is the common row sum of `S_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinomialState {
    pub s_mat: DenseMatrix,
    pub s: f64,
    pub x: Vector,
    pub k: usize,
}

impl BinomialState {
    pub fn zero(n: usize) -> Self {
        Self {
            s_mat: DenseMatrix::zeros(n, n),
            s: 0.0,
            x: Vector::zeros(n),
            k: 0,
        }
    }

    /// ```text
    /// S' = (W_1 + S^2) / 2
    /// s' = (1 - ||v~||_1 + s^2) / 2
    /// x' = ((s + ||x||_1) x + S^T x + v~) / 2
    /// ```
    pub fn step(&self, w1: &DenseMatrix, vt: &Vector) -> Self {
        let s_mat = w1
            .add_scaled(1.0, &self.s_mat.matmul(&self.s_mat))
            .scale(0.5);
        let s = 0.5 * (1.0 - vt.norm1() + self.s * self.s);
        let x = self
            .x
            .scale(self.s + self.x.norm1())
            .add_scaled(1.0, &self.s_mat.tr_matvec(&self.x))
            .add_scaled(1.0, vt)
            .scale(0.5);
        Self {
            s_mat,
            s,
            x,
            k: self.k + 1,
        }
    }

    /// `S_k + 1 x_k^T`.
    pub fn combined(&self) -> DenseMatrix {
        self.s_mat
            .add_outer(1.0, &Vector::ones(self.x.len()), &self.x)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinomialResult {
    pub s_mat: DenseMatrix,
    pub x: Vector,
    /// Normalization `l` with `L = l (I - W_1 - 1 v~^T)`.
    pub ell: f64,
    pub iterations: usize,
}

impl BinomialResult {
    /// `sqrt(l) (I - S - 1 x^T)`, the square root of `L`.
    pub fn root(&self) -> DenseMatrix {
        let n = self.x.len();
        DenseMatrix::identity(n)
            .sub(&self.s_mat)
            .add_outer(-1.0, &Vector::ones(n), &self.x)
            .scale(self.ell.sqrt())
    }
}

/// `W_1 = I - W / l` and `v~ = v / l` with `l = max diag(W) + 1`.
pub fn binomial_split(d: &LaplacianDecomposition) -> (f64, DenseMatrix, Vector) {
    let ell = d.w.max_diagonal() + 1.0;
    let w1 = d.w.scale(-1.0 / ell).shift_diagonal(1.0);
    (ell, w1, d.v.scale(1.0 / ell))
}

/// Runs the split binomial iteration until the combined step
/// `||S_{k+1} - S_k||_1 + ||x_{k+1} - x_k||_1` drops to `tol`.
///
/// Convergence is linear at best and sublinear when `L` is singular, as it
/// is for every Laplacian; expect many iterations for tight tolerances.
pub fn binomial_sqrt(
    d: &LaplacianDecomposition,
    tol: f64,
    max_iter: usize,
) -> Result<BinomialResult> {
    let (ell, w1, vt) = binomial_split(d);
    let mut state = BinomialState::zero(d.n());
    for _ in 0..max_iter {
        let next = state.step(&w1, &vt);
        let step = next.s_mat.sub(&state.s_mat).norm1() + next.x.dist1(&state.x);
        state = next;
        if step <= tol {
            return Ok(BinomialResult {
                s_mat: state.s_mat,
                x: state.x,
                ell,
                iterations: state.k,
            });
        }
    }
    Err(Error::ConvergenceFailure(format!(
        "binomial_sqrt: no convergence in {max_iter} iterations"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::is_nonneg;

    fn directed_five() -> LaplacianDecomposition {
        let w = DenseMatrix::from_rows(&[
            vec![5.0, -1.0, -1.0, -1.0, -1.0],
            vec![0.0, 3.0, -1.0, 0.0, -1.0],
            vec![0.0, 0.0, 2.0, -1.0, 0.0],
            vec![0.0, 0.0, -1.0, 3.0, -1.0],
            vec![0.0, -1.0, 0.0, 0.0, 2.0],
        ])
        .unwrap();
        LaplacianDecomposition::from_parts(w, Vector::unit(5, 0, 1.0)).unwrap()
    }

    #[test]
    fn split_matches_unsplit_iteration() {
        let d = directed_five();
        let (_, w1, vt) = binomial_split(&d);
        let target = w1.add_outer(1.0, &Vector::ones(5), &vt);
        let mut state = BinomialState::zero(5);
        let mut x = DenseMatrix::zeros(5, 5);
        for _ in 0..20 {
            state = state.step(&w1, &vt);
            x = target.add_scaled(1.0, &x.matmul(&x)).scale(0.5);
            assert!(state.combined().sub(&x).norm1() <= 1e-12);
        }
    }

    #[test]
    fn split_invariants_hold() {
        let d = directed_five();
        let (_, w1, vt) = binomial_split(&d);
        assert!(is_nonneg(&w1, 0.0) && is_nonneg(&vt, 0.0));
        let mut state = BinomialState::zero(5);
        for _ in 0..50 {
            state = state.step(&w1, &vt);
            assert!(is_nonneg(&state.s_mat, 0.0));
            assert!(is_nonneg(&state.x, 0.0));
            assert!(state.s >= 0.0);
            for r in state.s_mat.row_sums().iter() {
                assert!((r - state.s).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn scalar_cases() {
        let d =
            LaplacianDecomposition::from_parts(DenseMatrix::identity(1), Vector::zeros(1)).unwrap();
        let r = binomial_sqrt(&d, 1e-15, 1000).unwrap();
        // L = 1: l = 2, W_1 = 1/2, S -> 1 - 1/sqrt(2), x = 0.
        assert!((r.s_mat[(0, 0)] - (1.0 - 0.5f64.sqrt())).abs() < 1e-14);
        assert_eq!(r.x[0], 0.0);
        assert!((r.root()[(0, 0)] - 1.0).abs() < 1e-13);

        // W = 1, v = 1: L = 0, so the iteration hits the singular case.
        let d =
            LaplacianDecomposition::from_parts(DenseMatrix::identity(1), Vector::ones(1)).unwrap();
        assert!(binomial_sqrt(&d, 1e-14, 1000).is_err());
        let r = binomial_sqrt(&d, 1e-8, 1_000_000).unwrap();
        assert!(r.root()[(0, 0)].abs() < 1e-3);
        assert!(r.s_mat[(0, 0)] >= 0.0 && r.x[0] >= 0.0);
    }
}
