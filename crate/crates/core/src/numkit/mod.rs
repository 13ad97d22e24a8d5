//! Dense real linear algebra used by every solver in the crate.
//!
//! Everything is `f64`, row-major and owned. The matrices in scope are
//! desk-sized (up to a few thousand rows), so the kernels are plain loops
//! ordered for cache-friendly row access rather than blocked BLAS-style code.

mod lu;
mod matrix;
mod vector;

pub use lu::{lu_factor, lu_solve, LuFactorization, PIVOT_THRESHOLD};
pub use matrix::DenseMatrix;
pub use vector::Vector;

/// Anything that exposes its entries as a flat slice.
pub trait Entries {
    fn entries(&self) -> &[f64];
}

impl Entries for Vector {
    fn entries(&self) -> &[f64] {
        self.as_slice()
    }
}

impl Entries for DenseMatrix {
    fn entries(&self) -> &[f64] {
        self.as_slice()
    }
}

impl Entries for [f64] {
    fn entries(&self) -> &[f64] {
        self
    }
}

/// True iff every entry is `>= -tol`.
pub fn is_nonneg<T: Entries + ?Sized>(x: &T, tol: f64) -> bool {
    x.entries().iter().all(|&e| e >= -tol)
}

/// `sum |v_i|`.
pub fn norm1_vec(v: &Vector) -> f64 {
    v.norm1()
}

/// Induced 1-norm: maximum absolute column sum.
pub fn norm1_mat(m: &DenseMatrix) -> f64 {
    m.norm1()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm1_vec_examples() {
        assert_eq!(norm1_vec(&Vector::zeros(3)), 0.0);
        assert_eq!(norm1_vec(&Vector::from(vec![0.5, -0.25])), 0.75);
        assert_eq!(norm1_vec(&Vector::ones(5)), 5.0);
    }

    #[test]
    fn norm1_mat_examples() {
        assert_eq!(norm1_mat(&DenseMatrix::identity(3)), 1.0);
        let m = DenseMatrix::from_rows(&[vec![1.0, -2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(norm1_mat(&m), 6.0);
        assert_eq!(norm1_mat(&DenseMatrix::zeros(2, 2)), 0.0);
    }

    #[test]
    fn nonneg_examples() {
        assert!(is_nonneg(&Vector::zeros(3), 0.0));
        assert!(is_nonneg(&Vector::from(vec![1e-16, 1.0]), 1e-14));
        assert!(!is_nonneg(&Vector::from(vec![-1.0, 2.0]), 0.0));
        assert!(is_nonneg(&DenseMatrix::identity(2), 0.0));
    }
}
