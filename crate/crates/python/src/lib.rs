//! Python bindings: problem construction, the solvers, the bisection oracle,
//! Laplacian square roots, the perturbation bound and symbol square roots.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use normeq::experiments::{
    gen_example1, gen_example2, Example1Params, Example2Params, ProblemFile,
};
use normeq::laplacian::{decompose, rank_one_sqrt, solve_lap_equation, suggest_v, DEFAULT_DB_TOL};
use normeq::numkit::{DenseMatrix, Vector};
use normeq::perturbation;
use normeq::scalar::MuFunctions;
use normeq::solvers::{self, SolverConfig, SolverKind, TauMode};
use normeq::toeplitz::{
    build_dense_problem, build_toeplitz_problem, symbol_sqrt as core_symbol_sqrt, LaurentSymbol,
    ProblemInstance,
};

create_exception!(normeq_py, NormeqError, PyException);

fn err(e: normeq::Error) -> PyErr {
    NormeqError::new_err(e.to_string())
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<DenseMatrix> {
    DenseMatrix::from_rows(&rows).map_err(err)
}

fn parse_tau(tau: &Bound<'_, PyAny>) -> PyResult<TauMode> {
    if let Ok(t) = tau.extract::<f64>() {
        return Ok(TauMode::Fixed(t));
    }
    match tau.extract::<String>()?.as_str() {
        "opt" => Ok(TauMode::OptAtZero),
        "opt-start" => Ok(TauMode::OptAtStart),
        "plain" => Ok(TauMode::PlainFixedPoint),
        s => Err(NormeqError::new_err(format!(
            "tau must be a number, 'opt', 'opt-start' or 'plain', got '{s}'"
        ))),
    }
}

fn config(
    tol: Option<f64>,
    max_iter: Option<usize>,
    tau: Option<&Bound<'_, PyAny>>,
) -> PyResult<SolverConfig> {
    let mut cfg = SolverConfig::default();
    if let Some(tol) = tol {
        cfg = cfg.with_tol(tol);
    }
    if let Some(k) = max_iter {
        cfg = cfg.with_max_iter(k);
    }
    if let Some(tau) = tau {
        cfg = cfg.with_tau(parse_tau(tau)?);
    }
    Ok(cfg)
}

/// Result of one solver run.
#[pyclass(name = "SolveResult", frozen, get_all)]
struct PySolveResult {
    x: Vec<f64>,
    mu: f64,
    iterations: usize,
    residual_history: Vec<f64>,
    mu_history: Vec<f64>,
    k_offset: usize,
    status: String,
    tol: f64,
    tau: Option<f64>,
    notes: Vec<String>,
}

#[pymethods]
impl PySolveResult {
    #[getter]
    fn converged(&self) -> bool {
        self.status == "converged"
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }

    fn __repr__(&self) -> String {
        format!(
            "SolveResult(status={}, iterations={}, mu={:.16e}, residual={:.3e})",
            self.status,
            self.iterations,
            self.mu,
            self.residual()
        )
    }
}

impl From<solvers::SolveResult> for PySolveResult {
    fn from(r: solvers::SolveResult) -> Self {
        Self {
            x: r.x.to_vec(),
            mu: r.mu,
            iterations: r.iterations,
            residual_history: r.residual_history,
            mu_history: r.mu_history,
            k_offset: r.k_offset,
            status: r.status.as_str().to_owned(),
            tol: r.tol,
            tau: r.tau,
            notes: r.notes,
        }
    }
}

/// A validated instance of `A x - ||x||_1 x = b`.
#[pyclass(name = "Problem", frozen)]
struct PyProblem {
    inner: ProblemInstance,
}

#[pymethods]
impl PyProblem {
    /// `A = (2 - ||a||_W) I - T_n(a)` for the symbol `sum_k coeffs[k - lo] z^k`.
    #[staticmethod]
    #[pyo3(signature = (lo, coeffs, b, strict = true))]
    fn toeplitz(lo: i64, coeffs: Vec<f64>, b: Vec<f64>, strict: bool) -> PyResult<Self> {
        let sym = LaurentSymbol::new(lo, coeffs).map_err(err)?;
        let inner = build_toeplitz_problem(&sym, Vector::from(b), strict).map_err(err)?;
        Ok(Self { inner })
    }

    /// `A = (2 - ||M||_1) I - M`.
    #[staticmethod]
    #[pyo3(signature = (m, b, strict = true))]
    fn dense(m: Vec<Vec<f64>>, b: Vec<f64>, strict: bool) -> PyResult<Self> {
        let inner = build_dense_problem(&matrix(m)?, Vector::from(b), strict).map_err(err)?;
        Ok(Self { inner })
    }

    /// Parse a JSON problem file.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = ProblemFile::from_json(text)
            .and_then(|f| f.to_instance())
            .map_err(err)?;
        Ok(Self { inner })
    }

    /// Random banded Toeplitz instance; `m` defaults to `n`.
    #[staticmethod]
    #[pyo3(signature = (n, m = None, p = 3, q = 10, seed = 1))]
    fn example1(n: usize, m: Option<usize>, p: usize, q: usize, seed: u64) -> PyResult<Self> {
        let params = Example1Params {
            p,
            q,
            n,
            m: m.unwrap_or(n),
            ..Default::default()
        };
        let inner = gen_example1(&params, seed).map_err(err)?;
        Ok(Self { inner })
    }

    /// Random dense instance with `||M||_1 = 1 / (1 + delta)`.
    #[staticmethod]
    #[pyo3(signature = (n, delta = 0.9, sigma = 0.001, seed = 1))]
    fn example2(n: usize, delta: f64, sigma: f64, seed: u64) -> PyResult<Self> {
        let inner = gen_example2(&Example2Params { n, delta, sigma }, seed).map_err(err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        ProblemFile::from_instance(&self.inner)
            .to_json()
            .map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.origin().kind()
    }

    #[getter]
    fn a(&self) -> Vec<Vec<f64>> {
        self.inner.a().to_rows()
    }

    #[getter]
    fn b(&self) -> Vec<f64> {
        self.inner.b().to_vec()
    }

    /// Run `solver` (fp, rfpi, newton, newton2 or sda).
    #[pyo3(signature = (solver = "newton", tol = None, max_iter = None, tau = None))]
    fn solve(
        &self,
        solver: &str,
        tol: Option<f64>,
        max_iter: Option<usize>,
        tau: Option<&Bound<'_, PyAny>>,
    ) -> PyResult<PySolveResult> {
        let kind: SolverKind = solver.parse().map_err(err)?;
        let cfg = config(tol, max_iter, tau)?;
        Ok(solvers::solve(&self.inner, kind, &cfg).map_err(err)?.into())
    }

    /// `||A x - ||x||_1 x - b||_1`.
    fn residual(&self, x: Vec<f64>) -> PyResult<f64> {
        if x.len() != self.inner.n() {
            return Err(err(normeq::Error::DimensionMismatch {
                expected: self.inner.n(),
                found: x.len(),
            }));
        }
        Ok(solvers::residual(&self.inner, &Vector::from(x)))
    }

    /// `f(mu) = ||(A - mu I)^{-1} b||_1`.
    fn f(&self, mu: f64) -> PyResult<f64> {
        MuFunctions::new(&self.inner)
            .and_then(|m| m.f(mu))
            .map_err(err)
    }

    /// Bisection oracle for the fixed point `mu* = f(mu*)`.
    #[pyo3(signature = (tol = 1e-15))]
    fn mu_star(&self, tol: f64) -> PyResult<f64> {
        MuFunctions::new(&self.inner)
            .and_then(|m| m.bisect_mu_star(tol))
            .map_err(err)
    }

    /// First-order bound on `||dx||_1` for data perturbations of the given norms.
    fn perturbation_bound<'py>(
        &self,
        py: Python<'py>,
        x: Vec<f64>,
        da_norm: f64,
        db_norm: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let b =
            perturbation::bound(&self.inner, &Vector::from(x), da_norm, db_norm).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("kappa", b.kappa)?;
        d.set_item("mu_x", b.mu_x)?;
        d.set_item("inv_norm", b.inv_norm)?;
        d.set_item("da_norm", b.da_norm)?;
        d.set_item("db_norm", b.db_norm)?;
        Ok(d)
    }

    /// Empirical check of the perturbation bound over random relative jitters.
    #[pyo3(signature = (eps = 1e-8, trials = 20, seed = 1))]
    fn verify_bound<'py>(
        &self,
        py: Python<'py>,
        eps: f64,
        trials: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let r = perturbation::verify_bound(&self.inner, eps, trials, seed).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("passed", r.passed())?;
        d.set_item("max_ratio", r.max_ratio())?;
        d.set_item("threshold", r.threshold)?;
        d.set_item(
            "ratios",
            r.trials.iter().map(|t| t.ratio).collect::<Vec<_>>(),
        )?;
        d.set_item("flagged", r.flagged)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(kind={}, n={}, beta={:.6})",
            self.kind(),
            self.n(),
            self.beta()
        )
    }
}

/// Square root of the Laplacian `L` via the split `L = W - 1 v^T`.
///
/// Returns a dict with `root = V - 1 y^T`, `V`, `y`, `nu`, `v`, `defect`
/// and the double-root Newton result `x` (which should match `y`).
#[pyfunction]
#[pyo3(signature = (l, v = None, tol = None))]
fn laplacian_sqrt<'py>(
    py: Python<'py>,
    l: Vec<Vec<f64>>,
    v: Option<Vec<f64>>,
    tol: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let l = matrix(l)?;
    let v = match v {
        Some(v) => Vector::from(v),
        None => suggest_v(&l).map_err(err)?,
    };
    let d = decompose(&l, &v).map_err(err)?;
    let root = rank_one_sqrt(&d, DEFAULT_DB_TOL).map_err(err)?;
    let solved: PySolveResult = solve_lap_equation(&d, &root, &config(tol, None, None)?)
        .map_err(err)?
        .into();
    let out = PyDict::new(py);
    out.set_item("root", root.root().to_rows())?;
    out.set_item("V", root.v.to_rows())?;
    out.set_item("y", root.y.to_vec())?;
    out.set_item("nu", d.nu)?;
    out.set_item("v", d.v.to_vec())?;
    out.set_item("defect", root.defect)?;
    out.set_item("x", Py::new(py, solved)?)?;
    Ok(out)
}

/// The symbol `g` with `2g - g^2 = a`, as `(lo, coeffs)`.
#[pyfunction]
#[pyo3(signature = (lo, coeffs, tol = 1e-13))]
fn symbol_sqrt(lo: i64, coeffs: Vec<f64>, tol: f64) -> PyResult<(i64, Vec<f64>)> {
    let a = LaurentSymbol::new(lo, coeffs).map_err(err)?;
    let g = core_symbol_sqrt(&a, tol).map_err(err)?;
    Ok((g.lo(), g.coeffs().to_vec()))
}

#[pymodule]
fn normeq_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NormeqError", m.py().get_type::<NormeqError>())?;
    m.add_class::<PyProblem>()?;
    m.add_class::<PySolveResult>()?;
    m.add_function(wrap_pyfunction!(laplacian_sqrt, m)?)?;
    m.add_function(wrap_pyfunction!(symbol_sqrt, m)?)?;
    Ok(())
}
