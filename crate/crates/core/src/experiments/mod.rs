//! Instance generators and the experiment runner behind the CLI.

mod generators;
mod problem_file;
mod records;

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laplacian::{
    decompose, laplacian_from_edges, parse_edge_list, rank_one_sqrt, solve_lap_equation, suggest_v,
    DEFAULT_DB_TOL,
};
use crate::numkit::Vector;
use crate::perturbation::verify_bound;
use crate::scalar::MuFunctions;
use crate::solvers::{solve, SolverConfig, SolverKind, TauMode};
use crate::toeplitz::ProblemInstance;

pub use generators::{
    example1_from_draws, example1_symbol, example1_symbol_from_draws, example2_from_draws,
    gen_example1, gen_example2, Example1Params, Example2Params,
};
pub use problem_file::{ProblemFile, ProblemKind};
pub use records::{
    to_csv, to_json, write_records, IterationRow, OutputFormat, RunRecord, CSV_HEADER, ERROR_STATUS,
};

/// Directed 5-vertex graph used by the Laplacian demo when no edge list is given.
///
/// Vertex 0 points to every other vertex and is pointed to by all of them,
/// so column 0 of `L` has uniform off-diagonal entries and `v = e_0` works.
pub const DEMO_GRAPH: &str = "\
# directed n=5
0 1
0 2
0 3
0 4
1 0
1 2
1 4
2 0
2 3
3 0
3 2
3 4
4 0
4 1
";

/// Fixed relaxation parameters of the tau sweep; `tau(0)` is added to these.
pub const SWEEP_TAUS: [f64; 6] = [0.1, 0.5, 0.9, 1.0, 1.5, 1.9];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// RFPI for each tau in [`SWEEP_TAUS`] and for `tau(0)`.
    RfpiTauSweep,
    /// Every solver in [`ExperimentConfig::solvers`] on one generated instance.
    SolverCompare,
    /// Rank-one square root of a graph Laplacian and the double-root Newton solve.
    LaplacianDemo,
    /// Empirical check of the first-order perturbation bound.
    PerturbationCheck,
    /// Like `SolverCompare`, on an instance read from a problem file.
    Custom(PathBuf),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::RfpiTauSweep => "rfpi_tau_sweep",
            Experiment::SolverCompare => "solver_compare",
            Experiment::LaplacianDemo => "laplacian_demo",
            Experiment::PerturbationCheck => "perturbation_check",
            Experiment::Custom(_) => "custom",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Toeplitz instances from [`gen_example1`].
    #[default]
    Toeplitz,
    /// Dense instances from [`gen_example2`].
    Dense,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub family: Family,
    /// Toeplitz: support of `b`. Dense: matrix dimension.
    pub n: usize,
    /// Toeplitz matrix dimension; `None` means `m = n`.
    pub m: Option<usize>,
    pub delta: f64,
    pub sigma: f64,
    pub seed: u64,
    /// Overrides the `strict` flag of a custom problem file.
    pub strict: Option<bool>,
    pub solver: SolverConfig,
    pub solvers: Vec<SolverKind>,
    /// Edge-list file for the Laplacian demo; `None` uses [`DEMO_GRAPH`].
    pub graph: Option<PathBuf>,
    /// Split vector for the Laplacian demo; `None` uses [`suggest_v`].
    pub laplacian_v: Option<Vec<f64>>,
    pub eps: f64,
    pub trials: usize,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let e2 = Example2Params::default();
        Self {
            experiment: Experiment::SolverCompare,
            family: Family::Toeplitz,
            n: 400,
            m: None,
            delta: e2.delta,
            sigma: e2.sigma,
            seed: 1,
            strict: None,
            solver: SolverConfig::default(),
            solvers: vec![
                SolverKind::Fp,
                SolverKind::Rfpi,
                SolverKind::Newton,
                SolverKind::Sda,
            ],
            graph: None,
            laplacian_v: None,
            eps: 1e-8,
            trials: 20,
            output: None,
            format: OutputFormat::Csv,
        }
    }
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            ..Self::default()
        }
    }

    /// The seeded instance of the configured family.
    pub fn instance(&self) -> Result<ProblemInstance> {
        match self.family {
            Family::Toeplitz => {
                let params = Example1Params {
                    n: self.n,
                    m: self.m.unwrap_or(self.n),
                    ..Default::default()
                };
                gen_example1(&params, self.seed)
            }
            Family::Dense => {
                let params = Example2Params {
                    n: self.n,
                    delta: self.delta,
                    sigma: self.sigma,
                };
                gen_example2(&params, self.seed)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<RunRecord>,
    /// Human-readable summary lines.
    pub summary: Vec<String>,
    /// Checks that failed beyond solver non-convergence.
    pub failures: Vec<String>,
}

impl ExperimentOutput {
    /// True iff every run converged and no check failed.
    pub fn success(&self) -> bool {
        self.failures.is_empty() && self.records.iter().all(RunRecord::converged)
    }

    /// Writes the records to `cfg.output`, or to stdout when unset.
    pub fn write(&self, cfg: &ExperimentConfig) -> Result<()> {
        match &cfg.output {
            Some(path) => write_records(&self.records, cfg.format, std::fs::File::create(path)?),
            None => write_records(&self.records, cfg.format, std::io::stdout().lock()),
        }
    }
}

/// Runs `kind` and converts the outcome into a record, timing the solve.
pub fn run_solver(
    experiment: &str,
    p: &ProblemInstance,
    kind: SolverKind,
    cfg: &SolverConfig,
) -> RunRecord {
    let start = Instant::now();
    let out = solve(p, kind, cfg);
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    match out {
        Ok(r) => RunRecord::from_result(experiment, kind.name(), p.n(), wall_ms, &r),
        Err(e) => RunRecord::from_error(experiment, kind.name(), p.n(), wall_ms, &e),
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    match &cfg.experiment {
        Experiment::RfpiTauSweep => tau_sweep(cfg),
        Experiment::SolverCompare => compare(cfg, &cfg.instance()?),
        Experiment::Custom(path) => {
            let mut file = ProblemFile::load(path)?;
            file.strict = cfg.strict.unwrap_or(file.strict);
            compare(cfg, &file.to_instance()?)
        }
        Experiment::LaplacianDemo => laplacian_demo(cfg),
        Experiment::PerturbationCheck => perturbation_check(cfg),
    }
}

fn compare(cfg: &ExperimentConfig, p: &ProblemInstance) -> Result<ExperimentOutput> {
    let name = cfg.experiment.name();
    let records: Vec<RunRecord> = cfg
        .solvers
        .iter()
        .map(|&k| run_solver(name, p, k, &cfg.solver))
        .collect();
    let summary = records
        .iter()
        .map(|r| {
            format!(
                "{}: {} in {} iterations, mu = {:.16e}",
                r.solver, r.status, r.iterations, r.mu
            )
        })
        .collect();
    Ok(ExperimentOutput {
        records,
        summary,
        failures: Vec::new(),
    })
}

fn tau_sweep(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let p = cfg.instance()?;
    let cap = MuFunctions::new(&p)?.tau_admissible_max();
    let name = cfg.experiment.name();
    let mut out = ExperimentOutput::default();
    out.summary.push(format!("admissible tau < {cap:.6}"));
    let modes = SWEEP_TAUS
        .iter()
        .map(|&t| TauMode::Fixed(t))
        .chain([TauMode::OptAtZero]);
    for mode in modes {
        if let TauMode::Fixed(t) = mode {
            if t > cap {
                out.summary.push(format!(
                    "tau = {t} skipped: exceeds admissible maximum {cap:.6}"
                ));
                continue;
            }
        }
        let rec = run_solver(
            name,
            &p,
            SolverKind::Rfpi,
            &cfg.solver.clone().with_tau(mode),
        );
        out.summary.push(format!(
            "tau = {}: {} in {} iterations",
            rec.tau.map_or("?".into(), |t| format!("{t:.6}")),
            rec.status,
            rec.iterations
        ));
        out.records.push(rec);
    }
    Ok(out)
}

fn laplacian_demo(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let text = match &cfg.graph {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEMO_GRAPH.to_owned(),
    };
    let l = laplacian_from_edges(&parse_edge_list(&text)?);
    let v = match &cfg.laplacian_v {
        Some(v) if v.len() == l.rows() => Vector::from(v.clone()),
        Some(v) => {
            return Err(Error::InvalidV(format!(
                "v has length {}, graph has {} vertices",
                v.len(),
                l.rows()
            )))
        }
        None => suggest_v(&l)?,
    };
    let d = decompose(&l, &v)?;
    let root = rank_one_sqrt(&d, DEFAULT_DB_TOL)?;
    let start = Instant::now();
    let sol = solve_lap_equation(&d, &root, &cfg.solver);
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;

    let mut out = ExperimentOutput::default();
    let fmt4 = |xs: &[f64]| {
        xs.iter()
            .map(|x| format!("{x:.4}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    out.summary.push(format!("v = [{}]", fmt4(&v)));
    out.summary.push(format!("y = [{}]", fmt4(&root.y)));
    out.summary
        .push(format!("||(V - 1 y^T)^2 - L||_1 = {:.4e}", root.defect));
    let name = cfg.experiment.name();
    let rec = match sol {
        Ok(r) => {
            out.summary
                .push(format!("||x - y||_1 = {:.4e}", r.x.dist1(&root.y)));
            RunRecord::from_result(name, SolverKind::Newton2.name(), d.n(), wall_ms, &r)
        }
        Err(e) => RunRecord::from_error(name, SolverKind::Newton2.name(), d.n(), wall_ms, &e),
    };
    out.records.push(rec);
    Ok(out)
}

fn perturbation_check(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let p = cfg.instance()?;
    let name = cfg.experiment.name();
    let mut out = ExperimentOutput::default();
    out.records
        .push(run_solver(name, &p, SolverKind::Newton, &cfg.solver));
    let report = verify_bound(&p, cfg.eps, cfg.trials, cfg.seed)?;
    out.summary.push(format!(
        "eps = {:e}: {} trials, max ||dx||/kappa = {:.6}, {} above {:.6}",
        report.eps,
        report.trials.len(),
        report.max_ratio(),
        report.flagged.len(),
        report.threshold
    ));
    if !report.passed() {
        out.failures.push(format!(
            "perturbation bound exceeded in trials {:?}",
            report.flagged
        ));
    }
    Ok(out)
}

/// Rejects configs that cannot run, before any work is done.
pub fn check_config(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    if matches!(
        cfg.experiment,
        Experiment::SolverCompare | Experiment::Custom(_)
    ) && cfg.solvers.is_empty()
    {
        return Err(Error::Config("no solvers selected".into()));
    }
    Ok(())
}
