//! First-order sensitivity of the solution to perturbations of `A` and `b`.
//!
//! Differentiating `Ax - ||x||_1 x = b` and bounding term by term gives, to
//! first order,
//!
//! ```text
//! ||dx||_1 <~ ||(A - mu I)^{-1}||_1 (||db||_1 + mu ||dA||_1) / (1 - mu ||(A - mu I)^{-1}||_1)
//! ```
//!
//! with `mu = ||x||_1`. [`verify_bound`] checks this empirically by re-solving
//! randomly perturbed instances.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::{DenseMatrix, LuFactorization, Vector};
use crate::solvers::{solve_newton, SolverConfig};
use crate::toeplitz::{
    build_dense_problem, build_toeplitz_problem, LaurentSymbol, Origin, ProblemInstance,
};

pub const MAX_DRAWS: usize = 1000;
/// Flag threshold is `1 + SLACK_FACTOR * eps`.
pub const SLACK_FACTOR: f64 = 100.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationBound {
    pub kappa: f64,
    pub mu_x: f64,
    /// `||(A - mu_x I)^{-1}||_1`.
    pub inv_norm: f64,
    pub da_norm: f64,
    pub db_norm: f64,
}

pub fn bound(
    p: &ProblemInstance,
    x: &Vector,
    da_norm: f64,
    db_norm: f64,
) -> Result<PerturbationBound> {
    if !(da_norm >= 0.0 && db_norm >= 0.0) {
        return Err(Error::InvalidInput(
            "perturbation norms must be nonnegative".into(),
        ));
    }
    if x.len() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: x.len(),
        });
    }
    let mu_x = x.norm1();
    let inv_norm = LuFactorization::new(&p.a().shift_diagonal(-mu_x))?
        .inverse()
        .norm1();
    let denom = 1.0 - mu_x * inv_norm;
    if denom <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "mu_x * ||(A - mu_x I)^{{-1}}||_1 = {:.6} is not below 1",
            mu_x * inv_norm
        )));
    }
    let kappa = inv_norm * (db_norm + mu_x * da_norm) / denom;
    Ok(PerturbationBound {
        kappa,
        mu_x,
        inv_norm,
        da_norm,
        db_norm,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trial {
    pub dx_norm: f64,
    pub kappa: f64,
    /// `dx_norm / kappa`, or 0 when both vanish.
    pub ratio: f64,
    /// Draws spent before an admissible perturbation was found.
    pub draws: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub eps: f64,
    pub threshold: f64,
    pub trials: Vec<Trial>,
    /// Indices of trials whose ratio exceeds `threshold`.
    pub flagged: Vec<usize>,
}

impl PerturbationReport {
    pub fn passed(&self) -> bool {
        self.flagged.is_empty()
    }

    pub fn max_ratio(&self) -> f64 {
        self.trials.iter().map(|t| t.ratio).fold(0.0, f64::max)
    }
}

/// Solve `p`, then for each trial perturb the problem data entrywise by
/// relative amounts in `[-eps, eps]`, re-solve, and compare `||dx||_1` with
/// the bound evaluated at the realized `||dA||_1`, `||db||_1`.
///
/// Perturbed instances must stay strictly valid; invalid draws are rejected,
/// at most [`MAX_DRAWS`] per trial. Each trial uses its own generator stream
/// split off the seed.
pub fn verify_bound(
    p: &ProblemInstance,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<PerturbationReport> {
    if !(0.0..=1e-4).contains(&eps) {
        return Err(Error::InvalidInput(format!(
            "eps must lie in [0, 1e-4], got {eps}"
        )));
    }
    let cfg = SolverConfig::default();
    let base = solve_newton(p, &cfg)?;
    if !base.converged() {
        return Err(Error::ConvergenceFailure(format!(
            "unperturbed solve ended with {}",
            base.status
        )));
    }
    let threshold = 1.0 + SLACK_FACTOR * eps;
    let mut stream = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    let mut flagged = Vec::new();
    for t in 0..trials {
        let mut rng = stream.clone();
        stream.jump();
        let (perturbed, draws) = draw_admissible(p, eps, &mut rng)?;
        let da_norm = perturbed.a().sub(p.a()).norm1();
        let db_norm = perturbed.b().dist1(p.b());
        let kappa = bound(p, &base.x, da_norm, db_norm)?.kappa;
        let sol = solve_newton(&perturbed, &cfg)?;
        if !sol.converged() {
            return Err(Error::ConvergenceFailure(format!(
                "trial {t}: perturbed solve ended with {}",
                sol.status
            )));
        }
        let dx_norm = sol.x.dist1(&base.x);
        let ratio = if dx_norm == 0.0 { 0.0 } else { dx_norm / kappa };
        if ratio > threshold {
            flagged.push(t);
        }
        out.push(Trial {
            dx_norm,
            kappa,
            ratio,
            draws,
        });
    }
    Ok(PerturbationReport {
        eps,
        threshold,
        trials: out,
        flagged,
    })
}

fn jitter(x: f64, eps: f64, rng: &mut impl Rng) -> f64 {
    x * (1.0 + eps * (2.0 * rng.random::<f64>() - 1.0))
}

fn draw_admissible(
    p: &ProblemInstance,
    eps: f64,
    rng: &mut impl Rng,
) -> Result<(ProblemInstance, usize)> {
    for draw in 1..=MAX_DRAWS {
        let b = Vector::from(
            p.b()
                .iter()
                .map(|&bi| jitter(bi, eps, rng))
                .collect::<Vec<_>>(),
        );
        let candidate = match p.origin() {
            Origin::Toeplitz(sym) => {
                let coeffs = sym.coeffs().iter().map(|&c| jitter(c, eps, rng)).collect();
                LaurentSymbol::new(sym.lo(), coeffs)
                    .and_then(|s| build_toeplitz_problem(&s, b, true))
            }
            Origin::Dense(m) => {
                let rows: Vec<Vec<f64>> = m
                    .to_rows()
                    .iter()
                    .map(|r| r.iter().map(|&e| jitter(e, eps, rng)).collect())
                    .collect();
                DenseMatrix::from_rows(&rows).and_then(|m| build_dense_problem(&m, b, true))
            }
            Origin::Laplacian { .. } => {
                return Err(Error::InvalidInput(
                    "perturbation check needs a Toeplitz or dense problem".into(),
                ))
            }
        };
        match candidate {
            Ok(q) => return Ok((q, draw)),
            Err(Error::InvalidProblem(_) | Error::InvalidInput(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::RejectionExhausted { draws: MAX_DRAWS })
}
