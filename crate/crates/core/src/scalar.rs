//! The scalar reduction of `Ax - ||x||_1 x = b`.
//!
//! For `mu` in `[0, beta]`, `x(mu) = (A - mu I)^{-1} b` is nonnegative and
//! `f(mu) = ||x(mu)||_1 = e^T x(mu)`. Solutions correspond to fixed points
//! `f(mu) = mu`; on a strictly valid instance there is exactly one in
//! `[0, beta]`.

use crate::error::{Error, Result};
use crate::numkit::{LuFactorization, Vector};
use crate::toeplitz::ProblemInstance;

pub const BISECTION_TOL: f64 = 1e-14;
pub const BISECTION_MAX_HALVINGS: usize = 200;

/// `tau_opt` refuses to divide by `1 - f'(mu)` below this.
const FPRIME_LIMIT: f64 = 1.0 - 1e-12;

/// Below this, a solve's entries are accepted as nonnegative rounding noise.
const NONNEG_SLACK: f64 = -1e-13;

/// `e^T w`, or `||w||_1` if `w` has entries clearly below zero.
fn mass(w: &Vector) -> f64 {
    if w.min() >= NONNEG_SLACK {
        w.sum()
    } else {
        w.norm1()
    }
}

/// Evaluator for `f`, `f'`, `g = f - mu` and derived functions of one problem.
#[derive(Clone, Debug)]
pub struct MuFunctions<'a> {
    problem: &'a ProblemInstance,
    beta: f64,
    f_zero: f64,
    f_beta: f64,
}

impl<'a> MuFunctions<'a> {
    pub fn new(problem: &'a ProblemInstance) -> Result<Self> {
        let beta = problem.beta();
        let mut mf = Self {
            problem,
            beta,
            f_zero: 0.0,
            f_beta: 0.0,
        };
        mf.f_zero = mf.f(0.0)?;
        mf.f_beta = mf.f(beta)?;
        Ok(mf)
    }

    pub fn problem(&self) -> &'a ProblemInstance {
        self.problem
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `||A^{-1} b||_1`.
    pub fn f_zero(&self) -> f64 {
        self.f_zero
    }

    /// `||(A - beta I)^{-1} b||_1`.
    pub fn f_beta(&self) -> f64 {
        self.f_beta
    }

    fn check_domain(&self, mu: f64) -> Result<()> {
        if (0.0..=self.beta).contains(&mu) {
            Ok(())
        } else {
            Err(Error::Domain {
                mu,
                beta: self.beta,
            })
        }
    }

    /// LU factors of `A - mu I`.
    pub fn factor(&self, mu: f64) -> Result<LuFactorization> {
        self.check_domain(mu)?;
        LuFactorization::new(&self.problem.a().shift_diagonal(-mu))
    }

    /// `x(mu) = (A - mu I)^{-1} b`.
    pub fn solution_at(&self, mu: f64) -> Result<Vector> {
        self.factor(mu)?.solve(self.problem.b())
    }

    pub fn f(&self, mu: f64) -> Result<f64> {
        Ok(mass(&self.solution_at(mu)?))
    }

    /// `f'(mu) = e^T (A - mu I)^{-2} b`.
    pub fn fprime(&self, mu: f64) -> Result<f64> {
        Ok(self.f_and_fprime(mu)?.1)
    }

    /// `(f, f', x)` at `mu` from a single factorization.
    pub fn f_and_fprime(&self, mu: f64) -> Result<(f64, f64, Vector)> {
        let lu = self.factor(mu)?;
        let x = lu.solve(self.problem.b())?;
        let x2 = lu.solve(&x)?;
        Ok((mass(&x), mass(&x2), x))
    }

    pub fn g(&self, mu: f64) -> Result<f64> {
        Ok(self.f(mu)? - mu)
    }

    pub fn gprime(&self, mu: f64) -> Result<f64> {
        Ok(self.fprime(mu)? - 1.0)
    }

    /// `(beta - mu) / g(mu)`, meaningful on `[0, mu*)`.
    pub fn g1(&self, mu: f64) -> Result<f64> {
        Ok((self.beta - mu) / self.g(mu)?)
    }

    /// `-mu / g(mu)`, meaningful on `(mu*, beta]`.
    pub fn g2(&self, mu: f64) -> Result<f64> {
        Ok(-mu / self.g(mu)?)
    }

    /// Relaxed map `h(mu) = tau f(mu) + (1 - tau) mu`.
    pub fn h(&self, mu: f64, tau: f64) -> Result<f64> {
        Ok(tau * self.f(mu)? + (1.0 - tau) * mu)
    }

    pub fn hprime(&self, mu: f64, tau: f64) -> Result<f64> {
        Ok(tau * (self.fprime(mu)? - 1.0) + 1.0)
    }

    /// Largest relaxation `tau` for which `h` maps `[0, beta]` into itself:
    /// `min{2, beta / f(0), beta / (beta - f(beta))}`.
    ///
    /// A vanishing denominator contributes `+inf`.
    pub fn tau_admissible_max(&self) -> f64 {
        let c1 = if self.f_zero > 0.0 {
            self.beta / self.f_zero
        } else {
            f64::INFINITY
        };
        let gap = self.beta - self.f_beta;
        let c2 = if gap > 0.0 {
            self.beta / gap
        } else {
            f64::INFINITY
        };
        2.0f64.min(c1).min(c2)
    }

    /// First-order optimal relaxation `1 / (1 - f'(mu0))`.
    pub fn tau_opt(&self, mu0: f64) -> Result<f64> {
        let fp = self.fprime(mu0)?;
        if fp >= FPRIME_LIMIT {
            return Err(Error::DegenerateTau { fprime: fp });
        }
        Ok(1.0 / (1.0 - fp))
    }

    /// Bisection for the root of `g` on `[0, beta]`.
    ///
    /// Stops once the bracket is narrower than `tol` or can no longer be
    /// split in floating point, after at most 200 halvings.
    pub fn bisect_mu_star(&self, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "bisection tol must be positive, got {tol}"
            )));
        }
        let g_lo = self.f_zero;
        let g_hi = self.f_beta - self.beta;
        if g_lo < 0.0 || g_hi > 0.0 {
            return Err(Error::Bracket { g_lo, g_hi });
        }
        if g_lo == 0.0 {
            return Ok(0.0);
        }
        if g_hi == 0.0 {
            return Ok(self.beta);
        }
        let (mut lo, mut hi) = (0.0, self.beta);
        for _ in 0..BISECTION_MAX_HALVINGS {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= tol || mid <= lo || mid >= hi {
                break;
            }
            let g = self.g(mid)?;
            if g == 0.0 {
                return Ok(mid);
            }
            if g > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toeplitz::{build_toeplitz_problem, LaurentSymbol};

    fn diag2(b: &[f64]) -> ProblemInstance {
        build_toeplitz_problem(&LaurentSymbol::zero(), Vector::from(b.to_vec()), true).unwrap()
    }

    #[test]
    fn closed_forms_on_twice_identity() {
        let p = diag2(&[0.5, 0.25]);
        let mf = MuFunctions::new(&p).unwrap();
        assert!((mf.f(0.0).unwrap() - 0.375).abs() < 1e-16);
        assert!((mf.f(0.5).unwrap() - 0.5).abs() < 1e-16);
        assert!((mf.fprime(0.0).unwrap() - 0.1875).abs() < 1e-16);
        assert!((mf.fprime(0.5).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        assert!(mf.g(0.5).unwrap().abs() < 1e-16);
        assert!(mf.g(1.0).unwrap() < 0.0);
        assert_eq!(mf.tau_admissible_max(), 2.0);
        assert!((mf.tau_opt(0.0).unwrap() - 1.0 / 0.8125).abs() < 1e-15);
    }

    #[test]
    fn domain_is_enforced() {
        let p = diag2(&[0.5, 0.25]);
        let mf = MuFunctions::new(&p).unwrap();
        assert!(matches!(mf.f(-1e-300), Err(Error::Domain { .. })));
        assert!(matches!(mf.fprime(1.0 + 1e-15), Err(Error::Domain { .. })));
    }

    #[test]
    fn zero_rhs() {
        let p = diag2(&[0.0, 0.0]);
        let mf = MuFunctions::new(&p).unwrap();
        assert_eq!(mf.tau_admissible_max(), 1.0);
        assert_eq!(mf.tau_opt(0.0).unwrap(), 1.0);
        assert_eq!(mf.bisect_mu_star(BISECTION_TOL).unwrap(), 0.0);
    }

    #[test]
    fn bisection_quadratics() {
        let mf_p = diag2(&[0.5, 0.25]);
        let mu = MuFunctions::new(&mf_p)
            .unwrap()
            .bisect_mu_star(BISECTION_TOL)
            .unwrap();
        assert!((mu - 0.5).abs() < 1e-14);
        let p = diag2(&[0.5]);
        let mu = MuFunctions::new(&p)
            .unwrap()
            .bisect_mu_star(BISECTION_TOL)
            .unwrap();
        assert!((mu - (1.0 - 0.5f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn bracket_error_on_non_strict_instance() {
        // beta = 0.5, ||b||_1 = 0.3 > beta^2: no root in [0, beta].
        let a = LaurentSymbol::constant(0.5);
        let p = build_toeplitz_problem(&a, Vector::from(vec![0.3]), false).unwrap();
        let mf = MuFunctions::new(&p).unwrap();
        assert!(matches!(
            mf.bisect_mu_star(BISECTION_TOL),
            Err(Error::Bracket { .. })
        ));
    }
}
