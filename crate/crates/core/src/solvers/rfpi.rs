use crate::error::{Error, Result};
use crate::numkit::Vector;
use crate::scalar::MuFunctions;
use crate::toeplitz::ProblemInstance;

use super::{
    blown_up, clamp_mu, History, SolveResult, SolverConfig, Status, TauMode,
    DEFAULT_MAX_ITER_FIXED_POINT,
};

/// Admissibility check slack for user-supplied `tau`.
const TAU_SLACK: f64 = 1e-12;

/// Relaxed fixed-point iteration
/// `x_{k+1} = (A - mu_k I)^{-1} b`, `mu_{k+1} = tau ||x_{k+1}||_1 + (1 - tau) mu_k`.
pub fn solve_rfpi(p: &ProblemInstance, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.check(p.beta())?;
    let mf = MuFunctions::new(p)?;
    let mut hist = History::new(1, cfg.tol);
    let tau = resolve_tau(&mf, cfg, hist.notes())?;
    let max_iter = cfg.max_iter.unwrap_or(DEFAULT_MAX_ITER_FIXED_POINT);

    let mut mu = cfg.mu0;
    let mut x = Vector::zeros(p.n());
    for _ in 0..max_iter {
        x = match mf.solution_at(mu) {
            Ok(x) => x,
            Err(Error::SingularMatrix { .. }) => {
                return Ok(hist.finish(x, Status::SingularPivot, Some(tau)))
            }
            Err(e) => return Err(e),
        };
        if hist.record(p, mu, &x) {
            return Ok(hist.finish(x, Status::Converged, Some(tau)));
        }
        if blown_up(hist.last_residual()) {
            return Ok(hist.finish(x, Status::Diverged, Some(tau)));
        }
        let k = hist.next_k();
        mu = clamp_mu(
            tau * x.norm1() + (1.0 - tau) * mu,
            p.beta(),
            k,
            hist.notes(),
        );
    }
    Ok(hist.finish(x, Status::MaxIterations, Some(tau)))
}

fn resolve_tau(mf: &MuFunctions<'_>, cfg: &SolverConfig, notes: &mut Vec<String>) -> Result<f64> {
    match cfg.tau_mode {
        TauMode::PlainFixedPoint => Ok(1.0),
        TauMode::OptAtZero => mf.tau_opt(0.0),
        TauMode::OptAtStart => {
            let tau = mf.tau_opt(cfg.mu0)?;
            let cap = mf.tau_admissible_max();
            if tau > cap {
                notes.push(format!(
                    "tau({:e}) = {tau:.6} capped at admissible maximum {cap:.6}",
                    cfg.mu0
                ));
                Ok(cap)
            } else {
                Ok(tau)
            }
        }
        TauMode::Fixed(tau) => {
            let cap = mf.tau_admissible_max();
            if !(tau > 0.0) || tau > cap + TAU_SLACK {
                return Err(Error::Config(format!(
                    "tau = {tau} outside admissible range (0, {cap}]"
                )));
            }
            Ok(tau)
        }
    }
}
