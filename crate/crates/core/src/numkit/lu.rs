use crate::error::{Error, Result};

use super::{DenseMatrix, Vector};

/// Pivots smaller than this in magnitude are treated as exact zeros.
pub const PIVOT_THRESHOLD: f64 = 1e-300;

/// `P M = L U` with partial pivoting.
///
/// `L` (unit lower) and `U` are packed into one matrix. The original matrix
/// is kept so that solves can check their residual and refine once.
#[derive(Clone, Debug)]
pub struct LuFactorization {
    packed: DenseMatrix,
    perm: Vec<usize>,
    original: DenseMatrix,
    original_norm1: f64,
}

pub fn lu_factor(m: &DenseMatrix) -> Result<LuFactorization> {
    LuFactorization::new(m)
}

pub fn lu_solve(f: &LuFactorization, rhs: &Vector) -> Result<Vector> {
    f.solve(rhs)
}

impl LuFactorization {
    pub fn new(m: &DenseMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let n = m.rows();
        let mut a = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, magnitude) =
                (k..n)
                    .map(|i| (i, a[(i, k)].abs()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if magnitude < PIVOT_THRESHOLD {
                return Err(Error::SingularMatrix {
                    index: k,
                    magnitude,
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = t;
                }
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let l = a[(i, k)] / pivot;
                a[(i, k)] = l;
                if l == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    a[(i, j)] -= l * a[(k, j)];
                }
            }
        }

        Ok(Self {
            packed: a,
            perm,
            original_norm1: m.norm1(),
            original: m.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Row permutation: row `i` of `P M` is row `perm[i]` of `M`.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn lower(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.packed[(i, j)],
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Less => 0.0,
        })
    }

    pub fn upper(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |i, j| if i <= j { self.packed[(i, j)] } else { 0.0 })
    }

    /// Tolerance on `||M w - rhs||_1` above which one refinement step runs.
    pub fn solve_tolerance(&self, w: &Vector) -> f64 {
        100.0 * self.dim() as f64 * f64::EPSILON * self.original_norm1 * w.norm1()
    }

    pub fn solve(&self, rhs: &Vector) -> Result<Vector> {
        self.check_len(rhs)?;
        let w = self.solve_raw(rhs);
        let r = rhs.sub(&self.original.matvec(&w));
        if r.norm1() > self.solve_tolerance(&w) {
            return Ok(w.add_scaled(1.0, &self.solve_raw(&r)));
        }
        Ok(w)
    }

    /// Solves `M^T w = rhs` with the same factors.
    pub fn solve_transpose(&self, rhs: &Vector) -> Result<Vector> {
        self.check_len(rhs)?;
        let w = self.solve_transpose_raw(rhs);
        let r = rhs.sub(&self.original.tr_matvec(&w));
        if r.norm1() > self.solve_tolerance(&w) {
            return Ok(w.add_scaled(1.0, &self.solve_transpose_raw(&r)));
        }
        Ok(w)
    }

    /// Explicit inverse, one column at a time.
    pub fn inverse(&self) -> DenseMatrix {
        let n = self.dim();
        let mut inv = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let col = self
                .solve(&Vector::unit(n, j, 1.0))
                .expect("dimension checked");
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }

    fn check_len(&self, rhs: &Vector) -> Result<()> {
        if rhs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rhs.len(),
            });
        }
        Ok(())
    }

    fn solve_raw(&self, rhs: &Vector) -> Vector {
        let n = self.dim();
        let a = &self.packed;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let row = a.row(i);
            let s: f64 = row[..i].iter().zip(&y[..i]).map(|(l, v)| l * v).sum();
            y[i] -= s;
        }
        for i in (0..n).rev() {
            let row = a.row(i);
            let s: f64 = row[i + 1..]
                .iter()
                .zip(&y[i + 1..])
                .map(|(u, v)| u * v)
                .sum();
            y[i] = (y[i] - s) / row[i];
        }
        Vector::from(y)
    }

    // P M = L U  =>  M^T = U^T L^T P, so solve U^T z = rhs, L^T t = z, w = P^T t.
    fn solve_transpose_raw(&self, rhs: &Vector) -> Vector {
        let n = self.dim();
        let a = &self.packed;
        let mut z = rhs.as_slice().to_vec();
        for i in 0..n {
            z[i] /= a[(i, i)];
            let zi = z[i];
            for (zj, u) in z[i + 1..].iter_mut().zip(&a.row(i)[i + 1..]) {
                *zj -= u * zi;
            }
        }
        for i in (0..n).rev() {
            let ti = z[i];
            for j in 0..i {
                z[j] -= a[(i, j)] * ti;
            }
        }
        let mut w = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            w[p] = z[i];
        }
        Vector::from(w)
    }
}
