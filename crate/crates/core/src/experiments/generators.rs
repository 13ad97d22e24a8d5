//! Random problem families.
//!
//! All uniform draws come from `Xoshiro256PlusPlus::seed_from_u64(seed)` and
//! are consumed in a fixed order, so a seed pins the instance. The
//! `*_from_draws` variants take the raw uniforms directly.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{DenseMatrix, Vector};
use crate::toeplitz::{
    build_dense_problem, build_toeplitz_problem, symbol_sqrt, LaurentSymbol, ProblemInstance,
};

/// Toeplitz family built from the square root of a random banded symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Example1Params {
    /// Number of coefficients of nonpositive powers, `a_0, a_{-1}, ...`.
    pub p: usize,
    /// Number of coefficients of nonnegative powers, `a_0, a_1, ...`.
    pub q: usize,
    /// Number of nonzero leading entries of `b`.
    pub n: usize,
    /// Matrix dimension.
    pub m: usize,
    /// `||b||_1 = b_ratio * beta^2`.
    pub b_ratio: f64,
    pub sqrt_tol: f64,
}

impl Default for Example1Params {
    fn default() -> Self {
        Self {
            p: 3,
            q: 10,
            n: 400,
            m: 2000,
            b_ratio: 0.9,
            sqrt_tol: 1e-13,
        }
    }
}

impl Example1Params {
    fn check(&self) -> Result<()> {
        if self.p == 0 || self.q == 0 {
            return Err(Error::InvalidInput("p and q must be at least 1".into()));
        }
        if self.n == 0 || self.m < self.n {
            return Err(Error::InvalidInput(format!(
                "need 1 <= n <= m, got n={} m={}",
                self.n, self.m
            )));
        }
        if !(self.b_ratio > 0.0 && self.b_ratio < 1.0) {
            return Err(Error::InvalidInput(format!(
                "b_ratio must lie in (0, 1), got {}",
                self.b_ratio
            )));
        }
        Ok(())
    }
}

/// Dense family `A = (2 - ||M||_1) I - M` with random `M >= 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Example2Params {
    pub n: usize,
    /// `||M||_1 = 1 / (1 + delta)`.
    pub delta: f64,
    /// `||b||_1 = (1 - ||M||_1 - sigma)^2`.
    pub sigma: f64,
}

impl Default for Example2Params {
    fn default() -> Self {
        Self {
            n: 1000,
            delta: 0.9,
            sigma: 0.001,
        }
    }
}

fn uniforms(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    (0..k).map(|_| rng.random::<f64>()).collect()
}

/// Symbol with `a_{-i} = a1[i] / s`, `a_j = a2[j] / s`, where `a1[0]` is
/// overwritten by `a2[0]` and `s = sum(a1) + sum(a2)`.
///
/// The shared `a_0` is counted twice in `s`, so `||a||_W = 1 - a_0 / s < 1`.
/// An all-zero draw yields the zero symbol.
pub fn example1_symbol_from_draws(a1: &[f64], a2: &[f64]) -> Result<LaurentSymbol> {
    if a1.is_empty() || a2.is_empty() {
        return Err(Error::InvalidInput(
            "coefficient blocks must be non-empty".into(),
        ));
    }
    let mut a1 = a1.to_vec();
    a1[0] = a2[0];
    let s: f64 = a1.iter().sum::<f64>() + a2.iter().sum::<f64>();
    if s == 0.0 {
        return Ok(LaurentSymbol::zero());
    }
    let mut coeffs: Vec<f64> = a1[1..].iter().rev().map(|c| c / s).collect();
    coeffs.extend(a2.iter().map(|c| c / s));
    LaurentSymbol::new(-(a1.len() as i64 - 1), coeffs)
}

pub fn example1_symbol(p: usize, q: usize, seed: u64) -> Result<LaurentSymbol> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let a1 = uniforms(&mut rng, p);
    let a2 = uniforms(&mut rng, q);
    example1_symbol_from_draws(&a1, &a2)
}

pub fn gen_example1(params: &Example1Params, seed: u64) -> Result<ProblemInstance> {
    params.check()?;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let a1 = uniforms(&mut rng, params.p);
    let a2 = uniforms(&mut rng, params.q);
    let b = uniforms(&mut rng, params.n);
    example1_from_draws(params, &a1, &a2, &b)
}

/// Builds the symbol, takes `g` with `2g - g^2 = a`, and returns the strict
/// instance `A = (2 - ||g||_W) I - T_m(g)` with `b` supported on the first
/// `n` entries.
pub fn example1_from_draws(
    params: &Example1Params,
    a1: &[f64],
    a2: &[f64],
    b: &[f64],
) -> Result<ProblemInstance> {
    params.check()?;
    if a1.len() != params.p || a2.len() != params.q || b.len() != params.n {
        return Err(Error::InvalidInput(
            "draw lengths do not match p, q, n".into(),
        ));
    }
    let a = example1_symbol_from_draws(a1, a2)?;
    let g = symbol_sqrt(&a, params.sqrt_tol)?;
    // g = 1 - sqrt(1 - a) has nonnegative coefficients; drop interpolation noise.
    let g = LaurentSymbol::new(g.lo(), g.coeffs().iter().map(|&c| c.max(0.0)).collect())?;
    let beta = 1.0 - g.wiener_norm();
    let mut rhs = vec![0.0; params.m];
    let b_sum: f64 = b.iter().sum();
    if b_sum > 0.0 {
        let scale = params.b_ratio * beta * beta / b_sum;
        for (r, bi) in rhs.iter_mut().zip(b) {
            *r = bi * scale;
        }
    }
    build_toeplitz_problem(&g, Vector::from(rhs), true)
}

pub fn gen_example2(params: &Example2Params, seed: u64) -> Result<ProblemInstance> {
    if params.n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let m = DenseMatrix::new(params.n, params.n, uniforms(&mut rng, params.n * params.n))?;
    let b = uniforms(&mut rng, params.n);
    example2_from_draws(params, &m, &b)
}

/// `M <- M / (||M||_1 (1 + delta))`, `b <- (1 - ||M||_1 - sigma)^2 b / ||b||_1`.
pub fn example2_from_draws(
    params: &Example2Params,
    m: &DenseMatrix,
    b: &[f64],
) -> Result<ProblemInstance> {
    if !(params.delta > 0.0) {
        return Err(Error::InvalidInput(format!(
            "delta must be positive, got {}",
            params.delta
        )));
    }
    if m.rows() != params.n || m.cols() != params.n || b.len() != params.n {
        return Err(Error::InvalidInput("draw shapes do not match n".into()));
    }
    let raw_norm = m.norm1();
    let m = if raw_norm > 0.0 {
        m.scale(1.0 / (raw_norm + params.delta * raw_norm))
    } else {
        m.clone()
    };
    let m_norm = m.norm1();
    if !(params.sigma > 0.0 && params.sigma < 1.0 - m_norm) {
        return Err(Error::InvalidInput(format!(
            "sigma must lie in (0, {}), got {}",
            1.0 - m_norm,
            params.sigma
        )));
    }
    let b_norm: f64 = b.iter().map(|x| x.abs()).sum();
    let target = (1.0 - m_norm - params.sigma).powi(2);
    let rhs: Vec<f64> = if b_norm > 0.0 {
        b.iter().map(|x| target * x / b_norm).collect()
    } else {
        b.to_vec()
    };
    build_dense_problem(&m, Vector::from(rhs), true)
}
