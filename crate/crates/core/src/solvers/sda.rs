use crate::error::{Error, Result};
use crate::numkit::{DenseMatrix, LuFactorization, Vector};
use crate::toeplitz::ProblemInstance;

use super::{blown_up, History, SolveResult, SolverConfig, Status, DEFAULT_MAX_ITER_SDA};

/// `1 - v^T u` at or below this is treated as a breakdown.
const DENOM_FLOOR: f64 = 1e-14;

/// Doubling iterate `(c_k, u_k, v_k, F_k)`; `u_k` increases to the solution.
#[derive(Clone, Debug, PartialEq)]
pub struct SdaState {
    pub c: f64,
    pub u: Vector,
    pub v: Vector,
    pub f: DenseMatrix,
    /// `||u v^T||_1 = ||u||_1 ||v||_inf`.
    pub alpha: f64,
    /// `||c F||_1`.
    pub beta_k: f64,
    pub k: usize,
}

impl SdaState {
    fn new(c: f64, u: Vector, v: Vector, f: DenseMatrix, k: usize) -> Self {
        let alpha = u.norm1() * v.norm_inf();
        let beta_k = c.abs() * f.norm1();
        Self {
            c,
            u,
            v,
            f,
            alpha,
            beta_k,
            k,
        }
    }

    /// Most negative entry over all four components (0 if none negative).
    pub fn min_entry(&self) -> f64 {
        self.c
            .min(self.u.min())
            .min(self.v.min())
            .min(self.f.min_entry())
            .min(0.0)
    }

    /// `1 - v^T u`.
    pub fn denominator(&self) -> f64 {
        1.0 - self.v.dot(&self.u)
    }
}

/// `c_0 = 1^T A^{-1} b`, `u_0 = A^{-1} b`, `v_0 = A^{-T} 1`, `F_0 = A^{-1}`.
pub fn sda_init(p: &ProblemInstance) -> Result<SdaState> {
    let lu = LuFactorization::new(p.a())?;
    let u = lu.solve(p.b())?;
    let v = lu.solve_transpose(&Vector::ones(p.n()))?;
    let f = lu.inverse();
    Ok(SdaState::new(u.sum(), u, v, f, 0))
}

/// One doubling step. With `d = 1 - v^T u` and
/// `(I - u v^T)^{-1} = I + u v^T / d`:
///
/// ```text
/// c' = c^2 / d
/// u' = u + (c / d) F u
/// v' = v + (c / d) F^T v
/// F' = F F + (F u)(v^T F) / d
/// ```
pub fn sda_step(s: &SdaState) -> Result<SdaState> {
    let d = s.denominator();
    if d <= DENOM_FLOOR {
        return Err(Error::SingularMatrix {
            index: 0,
            magnitude: d,
        });
    }
    let fu = s.f.matvec(&s.u);
    let ftv = s.f.tr_matvec(&s.v);
    let scale = s.c / d;
    let c = s.c * s.c / d;
    let u = s.u.add_scaled(scale, &fu);
    let v = s.v.add_scaled(scale, &ftv);
    let f = s.f.matmul(&s.f).add_outer(1.0 / d, &fu, &ftv);
    Ok(SdaState::new(c, u, v, f, s.k + 1))
}

pub fn solve_sda(p: &ProblemInstance, cfg: &SolverConfig) -> Result<SolveResult> {
    solve_sda_observed(p, cfg, |_| {})
}

/// As [`solve_sda`], calling `observe` on every state from `k = 0` onwards.
pub fn solve_sda_observed(
    p: &ProblemInstance,
    cfg: &SolverConfig,
    mut observe: impl FnMut(&SdaState),
) -> Result<SolveResult> {
    cfg.check(p.beta())?;
    let max_iter = cfg.max_iter.unwrap_or(DEFAULT_MAX_ITER_SDA);
    let mut hist = History::new(0, cfg.tol);
    let mut state = match sda_init(p) {
        Ok(s) => s,
        Err(Error::SingularMatrix { .. }) => {
            return Ok(hist.finish(Vector::zeros(p.n()), Status::SingularPivot, None))
        }
        Err(e) => return Err(e),
    };
    loop {
        observe(&state);
        let mu = state.u.norm1();
        if hist.record(p, mu, &state.u) {
            return Ok(hist.finish(state.u, Status::Converged, None));
        }
        if blown_up(hist.last_residual()) {
            return Ok(hist.finish(state.u, Status::Diverged, None));
        }
        if hist.next_k() >= max_iter {
            return Ok(hist.finish(state.u, Status::MaxIterations, None));
        }
        state = match sda_step(&state) {
            Ok(s) => s,
            Err(Error::SingularMatrix { magnitude, .. }) => {
                hist.notes()
                    .push(format!("k={}: 1 - v^T u = {magnitude:e}", state.k));
                return Ok(hist.finish(state.u, Status::SingularPivot, None));
            }
            Err(e) => return Err(e),
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toeplitz::{build_toeplitz_problem, LaurentSymbol};

    fn diag(b: &[f64]) -> ProblemInstance {
        build_toeplitz_problem(&LaurentSymbol::zero(), Vector::from(b.to_vec()), true).unwrap()
    }

    #[test]
    fn init_on_twice_identity() {
        let s = sda_init(&diag(&[0.5, 0.25])).unwrap();
        assert_eq!(s.c, 0.375);
        assert_eq!(s.u.as_slice(), &[0.25, 0.125]);
        assert_eq!(s.v.as_slice(), &[0.5, 0.5]);
        assert_eq!(s.f, DenseMatrix::from_diagonal(2, 0.5));
        assert!(s.alpha < 0.25 && s.beta_k < 0.25);
    }

    #[test]
    fn one_step_by_hand() {
        let s = sda_init(&diag(&[0.5, 0.25])).unwrap();
        let t = sda_step(&s).unwrap();
        // d = 1 - (0.5 * 0.25 + 0.5 * 0.125) = 0.8125
        let d = 0.8125;
        assert!((t.c - 0.140625 / d).abs() < 1e-16);
        let sc = 0.375 / d;
        assert!((t.u[0] - (0.25 + sc * 0.125)).abs() < 1e-16);
        assert!((t.u[1] - (0.125 + sc * 0.0625)).abs() < 1e-16);
        assert!((t.v[0] - (0.5 + sc * 0.25)).abs() < 1e-16);
        // F' = 0.25 I + (F u)(F^T v)^T / d
        let expect01 = 0.125 * 0.25 / d;
        assert!((t.f[(0, 1)] - expect01).abs() < 1e-16);
        assert!((t.f[(0, 0)] - (0.25 + 0.125 * 0.25 / d)).abs() < 1e-16);
        assert_eq!(t.k, 1);
    }

    #[test]
    fn zero_c_is_a_fixed_point() {
        let s = sda_init(&diag(&[0.0, 0.0])).unwrap();
        assert_eq!(s.c, 0.0);
        let t = sda_step(&s).unwrap();
        assert_eq!(t.c, 0.0);
        assert_eq!(t.u, s.u);
        assert_eq!(t.v, s.v);
        // F' = F^2 when c = 0 and u = 0.
        assert_eq!(t.f, s.f.matmul(&s.f));
    }

    #[test]
    fn converges_on_scalar_case() {
        let p = diag(&[0.5, 0.25]);
        let r = solve_sda(&p, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, Status::Converged);
        assert!((r.mu - 0.5).abs() < 1e-15);
        let r0 = solve_sda(&diag(&[0.0, 0.0]), &SolverConfig::default()).unwrap();
        assert_eq!(r0.iterations, 1);
        assert_eq!(r0.mu, 0.0);
    }
}
