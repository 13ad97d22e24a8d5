use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

use super::Vector;

/// Row-major dense real matrix, at least 1x1.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(
                "matrix dimensions must be at least 1x1".into(),
            ));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidInput("matrix has a non-finite entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(
            rows >= 1 && cols >= 1,
            "matrix dimensions must be at least 1x1"
        );
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| 0.0)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(n, 1.0)
    }

    pub fn from_diagonal(n: usize, value: f64) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { value } else { 0.0 })
    }

    /// `u v^T`.
    pub fn outer(u: &Vector, v: &Vector) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn diagonal(&self) -> Vector {
        Vector::from(
            (0..self.rows.min(self.cols))
                .map(|i| self[(i, i)])
                .collect::<Vec<_>>(),
        )
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| e * s).collect(),
        }
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, alpha: f64, other: &DenseMatrix) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "add_scaled: shape mismatch"
        );
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + alpha * b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &DenseMatrix) -> Self {
        self.add_scaled(-1.0, other)
    }

    /// `self + s I`.
    pub fn shift_diagonal(&self, s: f64) -> Self {
        assert!(self.is_square(), "shift_diagonal: matrix must be square");
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] += s;
        }
        out
    }

    /// `self + alpha u v^T`.
    pub fn add_outer(&self, alpha: f64, u: &Vector, v: &Vector) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (u.len(), v.len()),
            "add_outer: shape mismatch"
        );
        let mut out = self.clone();
        for i in 0..self.rows {
            let ui = alpha * u[i];
            for (o, vj) in out.data[i * self.cols..(i + 1) * self.cols]
                .iter_mut()
                .zip(v.iter())
            {
                *o += ui * vj;
            }
        }
        out
    }

    pub fn matvec(&self, x: &Vector) -> Vector {
        assert_eq!(self.cols, x.len(), "matvec: dimension mismatch");
        Vector::from(
            self.data
                .chunks(self.cols)
                .map(|row| row.iter().zip(x.iter()).map(|(a, b)| a * b).sum())
                .collect::<Vec<f64>>(),
        )
    }

    /// `self^T x` without forming the transpose.
    pub fn tr_matvec(&self, x: &Vector) -> Vector {
        assert_eq!(self.rows, x.len(), "tr_matvec: dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (row, xi) in self.data.chunks(self.cols).zip(x.iter()) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * xi;
            }
        }
        Vector::from(out)
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: dimension mismatch");
        let (n, m) = (self.rows, other.cols);
        let mut data = vec![0.0; n * m];
        for i in 0..n {
            let out = &mut data[i * m..(i + 1) * m];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for (o, b) in out.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Self {
            rows: n,
            cols: m,
            data,
        }
    }

    pub fn column_abs_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for row in self.data.chunks(self.cols) {
            for (s, a) in sums.iter_mut().zip(row) {
                *s += a.abs();
            }
        }
        sums
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm1(&self) -> f64 {
        self.column_abs_sums().into_iter().fold(0.0, f64::max)
    }

    /// Induced infinity-norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().map(|a| a.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn row_sums(&self) -> Vector {
        Vector::from(
            self.data
                .chunks(self.cols)
                .map(|r| r.iter().sum())
                .collect::<Vec<f64>>(),
        )
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest off-diagonal entry (signed); `-inf` for 1x1.
    pub fn max_offdiagonal(&self) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    m = m.max(self[(i, j)]);
                }
            }
        }
        m
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}
