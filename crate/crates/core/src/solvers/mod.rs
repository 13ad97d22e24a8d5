//! Iterative solvers for `Ax - ||x||_1 x = b`.
//!
//! Every solver records the true residual `||Ax - ||x||_1 x - b||_1` of each
//! iterate and stops on it. Histories are indexed from `k_offset`: the
//! relaxed fixed-point iteration produces its first iterate at `k = 1`,
//! Newton and the doubling algorithm at `k = 0`.

mod newton;
mod rfpi;
mod sda;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::Vector;
use crate::toeplitz::ProblemInstance;

pub use newton::solve_newton;
pub use rfpi::solve_rfpi;
pub use sda::{sda_init, sda_step, solve_sda, solve_sda_observed, SdaState};

pub const DEFAULT_TOL: f64 = 1e-15;
/// Tolerance adopted after [`STAGNATION_LIMIT`] stagnating iterations.
pub const RELAXED_TOL: f64 = 1e-13;
pub const STAGNATION_LIMIT: usize = 3;
/// An iteration stagnates when it removes less than this share of the residual.
pub const STAGNATION_DECREASE: f64 = 0.1;

pub const DEFAULT_MAX_ITER_FIXED_POINT: usize = 1000;
pub const DEFAULT_MAX_ITER_NEWTON: usize = 100;
pub const DEFAULT_MAX_ITER_SDA: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauMode {
    Fixed(f64),
    /// `tau = 1 / (1 - f'(0))`.
    OptAtZero,
    /// `tau = 1 / (1 - f'(mu0))`, clamped to the admissible maximum.
    OptAtStart,
    /// `tau = 1`: the unrelaxed iteration `mu_{k+1} = ||x_{k+1}||_1`.
    PlainFixedPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol: f64,
    /// `None` selects the per-solver default.
    pub max_iter: Option<usize>,
    pub tau_mode: TauMode,
    pub newton_multiplicity: u32,
    pub mu0: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: None,
            tau_mode: TauMode::OptAtZero,
            newton_multiplicity: 1,
            mu0: 0.0,
        }
    }
}

impl SolverConfig {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = Some(max_iter);
        self
    }

    pub fn with_tau(mut self, tau_mode: TauMode) -> Self {
        self.tau_mode = tau_mode;
        self
    }

    pub fn with_multiplicity(mut self, m: u32) -> Self {
        self.newton_multiplicity = m;
        self
    }

    pub fn with_mu0(mut self, mu0: f64) -> Self {
        self.mu0 = mu0;
        self
    }

    fn check(&self, beta: f64) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if !(0.0..=beta).contains(&self.mu0) {
            return Err(Error::Config(format!(
                "mu0 = {} outside [0, {beta}]",
                self.mu0
            )));
        }
        if !matches!(self.newton_multiplicity, 1 | 2) {
            return Err(Error::Config(format!(
                "newton multiplicity must be 1 or 2, got {}",
                self.newton_multiplicity
            )));
        }
        if self.max_iter == Some(0) {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIterations,
    Diverged,
    SingularPivot,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIterations => "max_iterations",
            Status::Diverged => "diverged",
            Status::SingularPivot => "singular_pivot",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub x: Vector,
    /// `||x||_1`.
    pub mu: f64,
    /// Number of recorded iterates; equals the history lengths.
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    /// The scalar iterate that produced each recorded `x`.
    pub mu_history: Vec<f64>,
    /// Iteration index of the first history entry.
    pub k_offset: usize,
    pub status: Status,
    /// Tolerance in force at termination (after any relaxation).
    pub tol: f64,
    pub tau: Option<f64>,
    pub notes: Vec<String>,
}

impl SolveResult {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }
}

/// Solver families selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Relaxed fixed point with `tau = 1`.
    Fp,
    Rfpi,
    Newton,
    /// Newton with the double-root step `mu - 2 g / g'`.
    Newton2,
    Sda,
}

impl SolverKind {
    pub const ALL: [SolverKind; 5] = [
        SolverKind::Fp,
        SolverKind::Rfpi,
        SolverKind::Newton,
        SolverKind::Newton2,
        SolverKind::Sda,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Fp => "fp",
            SolverKind::Rfpi => "rfpi",
            SolverKind::Newton => "newton",
            SolverKind::Newton2 => "newton2",
            SolverKind::Sda => "sda",
        }
    }

    pub fn default_max_iter(self) -> usize {
        match self {
            SolverKind::Fp | SolverKind::Rfpi => DEFAULT_MAX_ITER_FIXED_POINT,
            SolverKind::Newton | SolverKind::Newton2 => DEFAULT_MAX_ITER_NEWTON,
            SolverKind::Sda => DEFAULT_MAX_ITER_SDA,
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "unknown solver '{s}' (expected fp|rfpi|newton|newton2|sda)"
                ))
            })
    }
}

/// Run the named solver; `Fp` and `Newton2` override the relevant config field.
pub fn solve(p: &ProblemInstance, kind: SolverKind, cfg: &SolverConfig) -> Result<SolveResult> {
    match kind {
        SolverKind::Fp => solve_rfpi(p, &cfg.clone().with_tau(TauMode::PlainFixedPoint)),
        SolverKind::Rfpi => solve_rfpi(p, cfg),
        SolverKind::Newton => solve_newton(p, &cfg.clone().with_multiplicity(1)),
        SolverKind::Newton2 => solve_newton(p, &cfg.clone().with_multiplicity(2)),
        SolverKind::Sda => solve_sda(p, cfg),
    }
}

/// `||A x - ||x||_1 x - b||_1`.
pub fn residual(p: &ProblemInstance, x: &Vector) -> f64 {
    let ax = p.a().matvec(x);
    ax.add_scaled(-x.norm1(), x).dist1(p.b())
}

/// Residual-based stopping rule with automatic relaxation on stagnation.
#[derive(Clone, Debug)]
pub(crate) struct Termination {
    tol: f64,
    relaxed: bool,
    stagnant: usize,
    previous: f64,
}

impl Termination {
    pub(crate) fn new(tol: f64) -> Self {
        Self {
            tol,
            relaxed: false,
            stagnant: 0,
            previous: f64::INFINITY,
        }
    }

    pub(crate) fn tol(&self) -> f64 {
        self.tol
    }

    /// Feed the next residual; returns true when it meets the tolerance.
    pub(crate) fn observe(&mut self, r: f64, notes: &mut Vec<String>) -> bool {
        if r <= self.tol {
            return true;
        }
        if !self.relaxed && self.tol < RELAXED_TOL {
            if r > (1.0 - STAGNATION_DECREASE) * self.previous {
                self.stagnant += 1;
            } else {
                self.stagnant = 0;
            }
            if self.stagnant >= STAGNATION_LIMIT {
                self.relaxed = true;
                self.tol = RELAXED_TOL;
                notes.push(format!(
                    "tolerance relaxed to {RELAXED_TOL:e} after {STAGNATION_LIMIT} stagnating iterations (residual {r:.3e})"
                ));
            }
        }
        self.previous = r;
        r <= self.tol
    }
}

/// Clamp notes kept per solve; a solver bouncing between the ends of
/// `[0, beta]` would otherwise log every step.
pub const MAX_CLAMP_NOTES: usize = 8;

const CLAMP_TAG: &str = " clamped to ";

/// Clamp `mu` into `[0, beta]`, logging when it moves.
pub(crate) fn clamp_mu(mu: f64, beta: f64, k: usize, notes: &mut Vec<String>) -> f64 {
    let clamped = if mu < 0.0 {
        0.0
    } else if mu > beta {
        beta
    } else {
        return mu;
    };
    let logged = notes.iter().filter(|n| n.contains(CLAMP_TAG)).count();
    if logged < MAX_CLAMP_NOTES {
        notes.push(format!("k={k}: mu={mu:.17e}{CLAMP_TAG}{clamped:.17e}"));
    } else if logged == MAX_CLAMP_NOTES {
        notes.push(format!(
            "k={k}: further{CLAMP_TAG}[0, beta] events not logged"
        ));
    }
    clamped
}

/// Accumulates the history shared by all solvers.
pub(crate) struct History {
    k_offset: usize,
    residuals: Vec<f64>,
    mus: Vec<f64>,
    notes: Vec<String>,
    stop: Termination,
}

impl History {
    pub(crate) fn new(k_offset: usize, tol: f64) -> Self {
        Self {
            k_offset,
            residuals: Vec::new(),
            mus: Vec::new(),
            notes: Vec::new(),
            stop: Termination::new(tol),
        }
    }

    /// Index of the next recorded iterate.
    pub(crate) fn next_k(&self) -> usize {
        self.k_offset + self.residuals.len()
    }

    pub(crate) fn notes(&mut self) -> &mut Vec<String> {
        &mut self.notes
    }

    /// Record iterate `x` produced by scalar `mu`; returns true on convergence.
    pub(crate) fn record(&mut self, p: &ProblemInstance, mu: f64, x: &Vector) -> bool {
        let r = residual(p, x);
        self.residuals.push(r);
        self.mus.push(mu);
        self.stop.observe(r, &mut self.notes)
    }

    pub(crate) fn last_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(f64::INFINITY)
    }

    pub(crate) fn finish(self, x: Vector, status: Status, tau: Option<f64>) -> SolveResult {
        let mu = x.norm1();
        SolveResult {
            x,
            mu,
            iterations: self.residuals.len(),
            residual_history: self.residuals,
            mu_history: self.mus,
            k_offset: self.k_offset,
            status,
            tol: self.stop.tol(),
            tau,
            notes: self.notes,
        }
    }
}

/// Status for a residual that is no longer finite.
pub(crate) fn blown_up(r: f64) -> bool {
    !r.is_finite()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relaxes_after_three_stagnant_steps() {
        let mut notes = Vec::new();
        let mut t = Termination::new(1e-15);
        assert!(!t.observe(1e-10, &mut notes));
        assert!(!t.observe(5e-14, &mut notes));
        assert!(!t.observe(4.9e-14, &mut notes));
        assert!(!t.observe(4.8e-14, &mut notes));
        // Third stagnating step relaxes and immediately satisfies 1e-13.
        assert!(t.observe(4.7e-14, &mut notes));
        assert_eq!(t.tol(), RELAXED_TOL);
        assert_eq!(notes.len(), 1);
    }

    #[test]
    fn no_relaxation_when_progressing() {
        let mut notes = Vec::new();
        let mut t = Termination::new(1e-15);
        let mut r = 1e-3;
        for _ in 0..20 {
            assert!(!t.observe(r, &mut notes));
            r *= 0.5;
        }
        assert_eq!(t.tol(), 1e-15);
        assert!(notes.is_empty());
    }

    #[test]
    fn loose_tolerance_never_relaxes() {
        let mut notes = Vec::new();
        let mut t = Termination::new(1e-11);
        for _ in 0..10 {
            t.observe(1e-10, &mut notes);
        }
        assert_eq!(t.tol(), 1e-11);
    }

    #[test]
    fn solver_names_round_trip() {
        for k in SolverKind::ALL {
            assert_eq!(k.name().parse::<SolverKind>().unwrap(), k);
        }
        assert!("gmres".parse::<SolverKind>().is_err());
    }

    #[test]
    fn clamp_logs() {
        let mut notes = Vec::new();
        assert_eq!(clamp_mu(0.3, 0.5, 1, &mut notes), 0.3);
        assert!(notes.is_empty());
        assert_eq!(clamp_mu(0.6, 0.5, 2, &mut notes), 0.5);
        assert_eq!(clamp_mu(-1e-18, 0.5, 3, &mut notes), 0.0);
        assert_eq!(notes.len(), 2);
        for k in 0..20 {
            clamp_mu(1.0, 0.5, k, &mut notes);
        }
        assert_eq!(notes.len(), MAX_CLAMP_NOTES + 1);
    }
}
