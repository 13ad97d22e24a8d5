use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{is_nonneg, DenseMatrix, LuFactorization, Vector};

use super::{toeplitz_section, LaurentSymbol};

/// Positive off-diagonal entries up to this size still count as "nonpositive".
pub const OFFDIAG_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    NonnegB,
    NonnegOffdiag,
    NormConditionSum,
    NormConditionSquare,
    MMatrix,
}

impl CheckName {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::NonnegB => "nonneg_b",
            CheckName::NonnegOffdiag => "nonneg_offdiag",
            CheckName::NormConditionSum => "norm_condition_sum",
            CheckName::NormConditionSquare => "norm_condition_square",
            CheckName::MMatrix => "m_matrix",
        }
    }

    /// Structural checks are enforced even when validation is not strict.
    pub fn is_structural(self) -> bool {
        !matches!(
            self,
            CheckName::NormConditionSum | CheckName::NormConditionSquare
        )
    }
}

/// One validation check: measured `value` compared against `bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: CheckName,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub strict: bool,
    pub checks: Vec<Check>,
    pub beta: f64,
}

impl ValidationReport {
    pub fn check(&self, name: CheckName) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn structurally_valid(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| c.name.is_structural())
            .all(|c| c.passed)
    }

    /// Whether the instance is acceptable under the report's own strictness.
    pub fn accepted(&self) -> bool {
        if self.strict {
            self.all_passed()
        } else {
            self.structurally_valid()
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "strict={} beta={:.6e}", self.strict, self.beta)?;
        for c in &self.checks {
            let verdict = if c.passed { "ok" } else { "FAIL" };
            write!(
                f,
                "; {} {} ({:.6e} vs {:.6e})",
                c.name.as_str(),
                verdict,
                c.value,
                c.bound
            )?;
        }
        Ok(())
    }
}

/// Run every check on `(A, b)` with admissibility bound `beta`.
pub fn validate(a: &DenseMatrix, b: &Vector, beta: f64, strict: bool) -> ValidationReport {
    let b_norm = b.norm1();
    let mut checks = Vec::with_capacity(5);

    checks.push(Check {
        name: CheckName::NonnegB,
        passed: is_nonneg(b, 0.0),
        value: b.min(),
        bound: 0.0,
    });

    let max_off = if a.rows() > 1 {
        a.max_offdiagonal()
    } else {
        0.0
    };
    checks.push(Check {
        name: CheckName::NonnegOffdiag,
        passed: max_off <= OFFDIAG_TOL,
        value: max_off,
        bound: OFFDIAG_TOL,
    });

    let sum = (1.0 - beta) + b_norm;
    checks.push(Check {
        name: CheckName::NormConditionSum,
        passed: sum < 1.0,
        value: sum,
        bound: 1.0,
    });

    let square = beta * beta;
    checks.push(Check {
        name: CheckName::NormConditionSquare,
        passed: beta > 0.0 && b_norm < square,
        value: b_norm,
        bound: square,
    });

    let (passed, ratio) = m_matrix_check(a);
    checks.push(Check {
        name: CheckName::MMatrix,
        passed,
        value: ratio,
        bound: 1.0,
    });

    ValidationReport {
        strict,
        checks,
        beta,
    }
}

/// Returns the pass flag and `||sI - A||_1 / s` for `s = max diag(A)`.
///
/// When the norm test is inconclusive, falls back to checking `A^{-1} >= 0`
/// through an explicit inverse.
fn m_matrix_check(a: &DenseMatrix) -> (bool, f64) {
    if !a.is_square() {
        return (false, f64::INFINITY);
    }
    let offdiag_ok = a.rows() == 1 || a.max_offdiagonal() <= OFFDIAG_TOL;
    let s = a.max_diagonal();
    if !offdiag_ok || s <= 0.0 {
        return (false, f64::INFINITY);
    }
    let ratio = a.scale(-1.0).shift_diagonal(s).norm1() / s;
    if ratio < 1.0 {
        return (true, ratio);
    }
    let inverse_nonneg = LuFactorization::new(a)
        .map(|lu| {
            let inv = lu.inverse();
            inv.min_entry() >= -1e-12 * inv.norm1()
        })
        .unwrap_or(false);
    (inverse_nonneg, ratio)
}

/// Where the matrix `A` of a problem came from.
#[derive(Clone, Debug, PartialEq)]
pub enum Origin {
    /// `A = (2 - ||a||_W) I - T_n(a)`.
    Toeplitz(LaurentSymbol),
    /// `A = (2 - ||M||_1) I - M`.
    Dense(DenseMatrix),
    /// `A = nu I + V^T`, with `V` the principal square root of `W`.
    Laplacian { nu: f64, root: DenseMatrix },
}

impl Origin {
    pub fn kind(&self) -> &'static str {
        match self {
            Origin::Toeplitz(_) => "toeplitz",
            Origin::Dense(_) => "dense",
            Origin::Laplacian { .. } => "laplacian",
        }
    }
}

/// The pair `(A, b)` of `Ax - ||x||_1 x = b` together with its bound `beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    a: DenseMatrix,
    b: Vector,
    beta: f64,
    origin: Origin,
    validation: ValidationReport,
}

impl ProblemInstance {
    fn assemble(
        a: DenseMatrix,
        b: Vector,
        beta: f64,
        origin: Origin,
        strict: bool,
    ) -> Result<Self> {
        if a.rows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: b.len(),
            });
        }
        let validation = validate(&a, &b, beta, strict);
        if !validation.accepted() {
            return Err(Error::InvalidProblem(Box::new(validation)));
        }
        Ok(Self {
            a,
            b,
            beta,
            origin,
            validation,
        })
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    pub fn validation(&self) -> &ValidationReport {
        &self.validation
    }

    pub fn is_strict(&self) -> bool {
        self.validation.strict
    }

    /// `||a||_W` or `||M||_1`; `None` for Laplacian problems.
    pub fn perturbation_norm(&self) -> Option<f64> {
        match &self.origin {
            Origin::Toeplitz(sym) => Some(sym.wiener_norm()),
            Origin::Dense(m) => Some(m.norm1()),
            Origin::Laplacian { .. } => None,
        }
    }

    /// Heuristic truncation constant `(3 - ||a||) / (2 - 2||a|| - 2||x||_1)`.
    ///
    /// The exact constant involves the 1-norm of an intermediate vector that
    /// is not available from a finite solve; `||x||_1` stands in for it.
    /// Returns `None` for Laplacian problems or when the denominator is not
    /// positive.
    pub fn truncation_error_constant(&self, x: &Vector) -> Option<f64> {
        let w = self.perturbation_norm()?;
        let denom = 2.0 - 2.0 * w - 2.0 * x.norm1();
        (denom > 0.0).then(|| (3.0 - w) / denom)
    }
}

/// `A = (2 - ||a||_W) I - T_n(a)` with `n = len(b)`.
pub fn build_toeplitz_problem(
    a: &LaurentSymbol,
    b: Vector,
    strict: bool,
) -> Result<ProblemInstance> {
    if !a.is_nonneg() {
        return Err(Error::InvalidInput(
            "symbol coefficients must be nonnegative".into(),
        ));
    }
    let w = a.wiener_norm();
    if w >= 1.0 {
        return Err(Error::InvalidInput(format!(
            "symbol Wiener norm must be < 1, got {w}"
        )));
    }
    let mat = toeplitz_section(a, b.len())
        .scale(-1.0)
        .shift_diagonal(2.0 - w);
    ProblemInstance::assemble(mat, b, 1.0 - w, Origin::Toeplitz(a.clone()), strict)
}

/// `A = (2 - ||M||_1) I - M` for a nonnegative square `M`.
pub fn build_dense_problem(m: &DenseMatrix, b: Vector, strict: bool) -> Result<ProblemInstance> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    if !is_nonneg(m, 0.0) {
        return Err(Error::InvalidInput(
            "dense M must be entrywise nonnegative".into(),
        ));
    }
    let w = m.norm1();
    if w >= 1.0 {
        return Err(Error::InvalidInput(format!("||M||_1 must be < 1, got {w}")));
    }
    let mat = m.scale(-1.0).shift_diagonal(2.0 - w);
    ProblemInstance::assemble(mat, b, 1.0 - w, Origin::Dense(m.clone()), strict)
}

/// `A = nu I + V^T`, `b = v`, `beta = nu`. Never strict: the norm conditions
/// do not apply to this family (the root is double, at `mu = nu`).
pub fn build_laplacian_problem(nu: f64, root: &DenseMatrix, v: Vector) -> Result<ProblemInstance> {
    if !root.is_square() {
        return Err(Error::DimensionMismatch {
            expected: root.rows(),
            found: root.cols(),
        });
    }
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "nu must be finite and nonnegative, got {nu}"
        )));
    }
    let mat = root.transpose().shift_diagonal(nu);
    let origin = Origin::Laplacian {
        nu,
        root: root.clone(),
    };
    ProblemInstance::assemble(mat, v, nu, origin, false)
}
