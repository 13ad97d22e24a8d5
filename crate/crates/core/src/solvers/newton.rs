use crate::error::{Error, Result};
use crate::numkit::Vector;
use crate::scalar::MuFunctions;
use crate::toeplitz::ProblemInstance;

use super::{
    blown_up, clamp_mu, History, SolveResult, SolverConfig, Status, DEFAULT_MAX_ITER_NEWTON,
};

const GPRIME_FLOOR: f64 = 1e-14;

/// Newton's method on `g(mu) = ||(A - mu I)^{-1} b||_1 - mu`, with step
/// `mu - m g / g'` for multiplicity `m` in `{1, 2}`.
pub fn solve_newton(p: &ProblemInstance, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.check(p.beta())?;
    let mf = MuFunctions::new(p)?;
    let m = f64::from(cfg.newton_multiplicity);
    let max_iter = cfg.max_iter.unwrap_or(DEFAULT_MAX_ITER_NEWTON);
    let mut hist = History::new(0, cfg.tol);

    let mut mu = cfg.mu0;
    let mut x = Vector::zeros(p.n());
    for _ in 0..max_iter {
        let (f, fp, xk) = match mf.f_and_fprime(mu) {
            Ok(v) => v,
            Err(Error::SingularMatrix { .. }) => {
                return Ok(hist.finish(x, Status::SingularPivot, None))
            }
            Err(e) => return Err(e),
        };
        x = xk;
        if hist.record(p, mu, &x) {
            return Ok(hist.finish(x, Status::Converged, None));
        }
        if blown_up(hist.last_residual()) {
            return Ok(hist.finish(x, Status::Diverged, None));
        }
        let (g, gp) = (f - mu, fp - 1.0);
        if gp.abs() < GPRIME_FLOOR {
            if cfg.newton_multiplicity == 1 {
                return Err(Error::DerivativeDegenerate { mu, gprime: gp });
            }
            // At a double root g and g' vanish together; nothing left to do.
            let k = hist.next_k() - 1;
            hist.notes()
                .push(format!("k={k}: g'={gp:e} vanished, stopping"));
            return Ok(hist.finish(x, Status::MaxIterations, None));
        }
        let k = hist.next_k();
        mu = clamp_mu(mu - m * g / gp, p.beta(), k, hist.notes());
    }
    Ok(hist.finish(x, Status::MaxIterations, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toeplitz::{build_toeplitz_problem, LaurentSymbol};

    fn diag(b: &[f64]) -> ProblemInstance {
        build_toeplitz_problem(&LaurentSymbol::zero(), Vector::from(b.to_vec()), true).unwrap()
    }

    #[test]
    fn quadratic_convergence_on_scalar_case() {
        let p = diag(&[0.5, 0.25]);
        let r = solve_newton(&p, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, Status::Converged);
        assert!((r.mu - 0.5).abs() < 1e-15);
        let errs: Vec<f64> = r.mu_history.iter().map(|m| 0.5 - m).collect();
        assert!(errs.windows(2).all(|w| w[1] >= 0.0 && w[1] <= w[0]));
        // Error roughly squares: e_{k+1} <= C e_k^2.
        for w in errs.windows(2).filter(|w| w[0] > 1e-6) {
            assert!(w[1] <= 2.0 * w[0] * w[0], "{errs:?}");
        }
    }

    #[test]
    fn zero_rhs_immediate() {
        let p = diag(&[0.0]);
        let r = solve_newton(&p, &SolverConfig::default()).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.mu, 0.0);
        assert_eq!(r.k_offset, 0);
    }
}
