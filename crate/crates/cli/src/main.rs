//! `normeq`: solve, generate and benchmark instances of `Ax - ||x||_1 x = b`.
//!
//! Exit status is 0 when every run converged, 1 when some run did not, and 2
//! on errors (bad input, invalid problem, I/O).

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use normeq::experiments::{
    gen_example1, gen_example2, run_experiment, run_solver, write_records, Example1Params,
    Example2Params, Experiment, ExperimentConfig, ExperimentOutput, Family, OutputFormat,
    ProblemFile,
};
use normeq::solvers::{SolverConfig, SolverKind, TauMode};

#[derive(Parser)]
#[command(
    name = "normeq",
    version,
    about = "Solvers for Ax - ||x||_1 x = b with M-matrix A"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem in a JSON problem file.
    Solve {
        problem: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        strict: StrictArgs,
    },
    /// Generate a random instance and write it as a JSON problem file.
    Gen {
        #[arg(value_enum)]
        family: FamilyArg,
        #[command(flatten)]
        instance: InstanceArgs,
        /// Number of coefficients of nonpositive powers (toeplitz).
        #[arg(long, default_value_t = 3)]
        p: usize,
        /// Number of coefficients of nonnegative powers (toeplitz).
        #[arg(long, default_value_t = 10)]
        q: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a predefined experiment and emit convergence records.
    Experiment {
        #[arg(value_enum)]
        kind: ExperimentArg,
        /// Problem file for the custom experiment.
        #[arg(long, required_if_eq("kind", "custom"))]
        problem: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "toeplitz")]
        family: FamilyArg,
        #[command(flatten)]
        instance: InstanceArgs,
        /// Relative perturbation size for the perturbation check.
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Edge-list file for the Laplacian demo.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        strict: StrictArgs,
    },
    /// Square root of a graph Laplacian and the associated double-root solve.
    Laplacian {
        /// Edge-list file; the built-in 5-vertex directed graph when omitted.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Split vector `v` as comma-separated values; chosen automatically when omitted.
        #[arg(long, value_delimiter = ',')]
        v: Option<Vec<f64>>,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Toeplitz,
    Dense,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Toeplitz => Family::Toeplitz,
            FamilyArg::Dense => Family::Dense,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum ExperimentArg {
    RfpiTauSweep,
    SolverCompare,
    LaplacianDemo,
    PerturbationCheck,
    Custom,
}

#[derive(Args)]
struct InstanceArgs {
    /// Toeplitz: nonzero entries of b. Dense: dimension.
    #[arg(long, default_value_t = 400)]
    n: usize,
    /// Toeplitz dimension (defaults to n).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0.9)]
    delta: f64,
    #[arg(long, default_value_t = 0.001)]
    sigma: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct SolverArgs {
    /// Residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// RFPI relaxation: a number, `opt` (tau(0)), `opt-start` or `plain`.
    #[arg(long, value_parser = parse_tau)]
    tau: Option<TauMode>,
    /// Solvers to run; repeat or comma-separate for several.
    #[arg(long, value_delimiter = ',', value_parser = parse_solver)]
    solver: Vec<SolverKind>,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::default();
        if let Some(tol) = self.tol {
            cfg = cfg.with_tol(tol);
        }
        if let Some(k) = self.max_iter {
            cfg = cfg.with_max_iter(k);
        }
        if let Some(mode) = self.tau {
            cfg = cfg.with_tau(mode);
        }
        cfg
    }

    fn solvers_or(&self, default: &[SolverKind]) -> Vec<SolverKind> {
        if self.solver.is_empty() {
            default.to_vec()
        } else {
            self.solver.clone()
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args)]
struct StrictArgs {
    /// Require the strict norm conditions on the problem.
    #[arg(long, overrides_with = "no_strict")]
    strict: bool,
    /// Check only the structural conditions.
    #[arg(long, overrides_with = "strict")]
    no_strict: bool,
}

impl StrictArgs {
    fn value(&self) -> Option<bool> {
        match (self.strict, self.no_strict) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        }
    }
}

fn parse_tau(s: &str) -> Result<TauMode, String> {
    match s {
        "opt" => Ok(TauMode::OptAtZero),
        "opt-start" => Ok(TauMode::OptAtStart),
        "plain" => Ok(TauMode::PlainFixedPoint),
        _ => s
            .parse::<f64>()
            .map(TauMode::Fixed)
            .map_err(|_| format!("expected a number, 'opt', 'opt-start' or 'plain', got '{s}'")),
    }
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    s.parse().map_err(|e: normeq::Error| e.to_string())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn report(out: &ExperimentOutput, cfg: &ExperimentConfig) -> Result<bool> {
    for line in &out.summary {
        eprintln!("{line}");
    }
    for line in &out.failures {
        eprintln!("FAILED: {line}");
    }
    out.write(cfg).context("writing records")?;
    Ok(out.success())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve {
            problem,
            solver,
            output,
            strict,
        } => {
            let mut file = ProblemFile::load(&problem)
                .with_context(|| format!("reading {}", problem.display()))?;
            file.strict = strict.value().unwrap_or(file.strict);
            let p = file.to_instance()?;
            let cfg = solver.config();
            let records: Vec<_> = solver
                .solvers_or(&[SolverKind::Newton])
                .into_iter()
                .map(|k| run_solver("solve", &p, k, &cfg))
                .collect();
            for r in &records {
                eprintln!(
                    "{}: {} in {} iterations, residual {:.3e}, mu = {:.16e}",
                    r.solver, r.status, r.iterations, r.residual, r.mu
                );
                for note in &r.notes {
                    eprintln!("  note: {note}");
                }
            }
            let format = output.format.into();
            match &output.out {
                Some(path) => write_records(&records, format, std::fs::File::create(path)?)?,
                None => write_records(&records, format, std::io::stdout().lock())?,
            }
            Ok(records.iter().all(|r| r.converged()))
        }
        Command::Gen {
            family,
            instance,
            p,
            q,
            out,
        } => {
            let inst = match family {
                FamilyArg::Toeplitz => {
                    let params = Example1Params {
                        p,
                        q,
                        n: instance.n,
                        m: instance.m.unwrap_or(instance.n),
                        ..Default::default()
                    };
                    gen_example1(&params, instance.seed)?
                }
                FamilyArg::Dense => {
                    let params = Example2Params {
                        n: instance.n,
                        delta: instance.delta,
                        sigma: instance.sigma,
                    };
                    gen_example2(&params, instance.seed)?
                }
            };
            let file = ProblemFile::from_instance(&inst);
            match out {
                Some(path) => file.save(&path)?,
                None => println!("{}", file.to_json()?),
            }
            eprintln!("{}", inst.validation());
            Ok(true)
        }
        Command::Experiment {
            kind,
            problem,
            family,
            instance,
            eps,
            trials,
            graph,
            solver,
            output,
            strict,
        } => {
            let experiment = match kind {
                ExperimentArg::RfpiTauSweep => Experiment::RfpiTauSweep,
                ExperimentArg::SolverCompare => Experiment::SolverCompare,
                ExperimentArg::LaplacianDemo => Experiment::LaplacianDemo,
                ExperimentArg::PerturbationCheck => Experiment::PerturbationCheck,
                ExperimentArg::Custom => match problem {
                    Some(path) => Experiment::Custom(path),
                    None => bail!("the custom experiment needs --problem"),
                },
            };
            let defaults = ExperimentConfig::default();
            let cfg = ExperimentConfig {
                experiment,
                family: family.into(),
                n: instance.n,
                m: instance.m,
                delta: instance.delta,
                sigma: instance.sigma,
                seed: instance.seed,
                strict: strict.value(),
                solver: solver.config(),
                solvers: solver.solvers_or(&defaults.solvers),
                graph,
                laplacian_v: None,
                eps,
                trials,
                output: output.out,
                format: output.format.into(),
            };
            normeq::experiments::check_config(&cfg)?;
            let out = run_experiment(&cfg)?;
            report(&out, &cfg)
        }
        Command::Laplacian {
            graph,
            v,
            solver,
            output,
        } => {
            let cfg = ExperimentConfig {
                graph,
                laplacian_v: v,
                solver: solver.config(),
                output: output.out,
                format: output.format.into(),
                ..ExperimentConfig::new(Experiment::LaplacianDemo)
            };
            let out = run_experiment(&cfg)?;
            report(&out, &cfg)
        }
    }
}
