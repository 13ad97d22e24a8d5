use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::DenseMatrix;

/// Finitely supported Laurent polynomial `a(z) = sum_k a_k z^k`, `k = lo..=hi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSymbol")]
pub struct LaurentSymbol {
    lo: i64,
    #[serde(serialize_with = "crate::json_f64::vec::serialize")]
    coeffs: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSymbol {
    lo: i64,
    coeffs: Vec<f64>,
}

impl TryFrom<RawSymbol> for LaurentSymbol {
    type Error = Error;

    fn try_from(raw: RawSymbol) -> Result<Self> {
        LaurentSymbol::new(raw.lo, raw.coeffs)
    }
}

impl LaurentSymbol {
    pub fn new(lo: i64, coeffs: Vec<f64>) -> Result<Self> {
        if lo > 0 {
            return Err(Error::InvalidInput(format!(
                "symbol lowest power must be <= 0, got {lo}"
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(
                "symbol has a non-finite coefficient".into(),
            ));
        }
        Ok(Self::from_parts(lo, coeffs))
    }

    pub fn zero() -> Self {
        Self {
            lo: 0,
            coeffs: vec![0.0],
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            lo: 0,
            coeffs: vec![c],
        }
    }

    pub(crate) fn from_parts(lo: i64, coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            return Self::zero();
        }
        Self { lo, coeffs }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn width(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `z^k`, zero outside the support.
    pub fn coeff(&self, k: i64) -> f64 {
        let idx = k - self.lo;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            0.0
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// `sum |a_k|`, summed from the lowest power up.
    pub fn wiener_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn is_nonneg(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_parts(self.lo, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, alpha: f64, other: &LaurentSymbol) -> Self {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        Self::from_parts(
            lo,
            (lo..=hi)
                .map(|k| self.coeff(k) + alpha * other.coeff(k))
                .collect(),
        )
    }

    /// Product of Laurent polynomials by direct convolution.
    pub fn mul(&self, other: &LaurentSymbol) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (o, b) in out[i..].iter_mut().zip(&other.coeffs) {
                *o += a * b;
            }
        }
        Self::from_parts(self.lo + other.lo, out)
    }

    /// Value at `z = 1`, i.e. the coefficient sum.
    pub fn value_at_one(&self) -> f64 {
        self.coeffs.iter().sum()
    }
}

/// Principal `n x n` section: entry `(i, j)` is `a_{j-i}`.
pub fn toeplitz_section(a: &LaurentSymbol, n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |i, j| a.coeff(j as i64 - i as i64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wiener_norm_examples() {
        assert_eq!(LaurentSymbol::zero().wiener_norm(), 0.0);
        let a = LaurentSymbol::new(-1, vec![0.3, 0.2, 0.1]).unwrap();
        assert!((a.wiener_norm() - 0.6).abs() < 1e-15);
        let a = LaurentSymbol::new(0, vec![0.0, -0.5]).unwrap();
        assert_eq!(a.wiener_norm(), 0.5);
    }

    #[test]
    fn rejects_positive_lo() {
        assert!(LaurentSymbol::new(1, vec![1.0]).is_err());
        assert!(LaurentSymbol::new(0, vec![f64::NAN]).is_err());
    }

    #[test]
    fn section_examples() {
        assert_eq!(
            toeplitz_section(&LaurentSymbol::zero(), 3),
            DenseMatrix::zeros(3, 3)
        );
        let a = LaurentSymbol::new(-1, vec![0.25, 0.0, 0.25]).unwrap();
        let t = toeplitz_section(&a, 3);
        assert_eq!(
            t.to_rows(),
            vec![
                vec![0.0, 0.25, 0.0],
                vec![0.25, 0.0, 0.25],
                vec![0.0, 0.25, 0.0]
            ]
        );
        let t = toeplitz_section(&LaurentSymbol::constant(0.5), 2);
        assert_eq!(t, DenseMatrix::from_diagonal(2, 0.5));
    }

    #[test]
    fn section_orientation() {
        // Upper diagonals carry positive powers.
        let a = LaurentSymbol::new(0, vec![0.0, 1.0]).unwrap();
        let t = toeplitz_section(&a, 3);
        assert_eq!(t[(0, 1)], 1.0);
        assert_eq!(t[(1, 0)], 0.0);
    }

    #[test]
    fn product_and_sum() {
        let g = LaurentSymbol::new(-1, vec![1.0, 2.0]).unwrap(); // z^-1 + 2
        let sq = g.mul(&g); // z^-2 + 4 z^-1 + 4
        assert_eq!(sq.lo(), -2);
        assert_eq!(sq.coeffs(), &[1.0, 4.0, 4.0]);
        let d = sq.add_scaled(-1.0, &LaurentSymbol::constant(4.0));
        assert_eq!(d.coeffs(), &[1.0, 4.0, 0.0]);
    }

    mod props {
        use proptest::prelude::*;

        use super::*;

        proptest! {
            #[test]
            fn section_norm_bounded_by_wiener_norm(
                lo in -4i64..=0,
                coeffs in proptest::collection::vec(-1.0f64..1.0, 1..8),
                n in 1usize..10,
            ) {
                let a = LaurentSymbol::new(lo, coeffs).unwrap();
                let t = toeplitz_section(&a, n);
                prop_assert!(t.norm1() <= a.wiener_norm() + 1e-15);
                prop_assert!(t.norm_inf() <= a.wiener_norm() + 1e-15);
            }
        }
    }
}
