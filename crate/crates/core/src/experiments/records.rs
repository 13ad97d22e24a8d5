//! Per-run convergence records and their CSV / JSON encodings.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json_f64;
use crate::solvers::SolveResult;

pub const CSV_HEADER: &str = "experiment,solver,tau,n,k,residual,mu,wall_ms,status";

/// Status string for a run whose solver returned an error.
pub const ERROR_STATUS: &str = "error";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub k: usize,
    #[serde(with = "json_f64::scalar")]
    pub residual: f64,
    /// Scalar iterate `mu_k` that produced this row's `x`.
    #[serde(with = "json_f64::scalar")]
    pub mu: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub experiment: String,
    pub solver: String,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "json_f64::option_scalar"
    )]
    pub tau: Option<f64>,
    pub n: usize,
    pub iterations: usize,
    #[serde(with = "json_f64::scalar")]
    pub wall_ms: f64,
    #[serde(with = "json_f64::scalar")]
    pub residual: f64,
    /// `||x||_1` of the returned solution.
    #[serde(with = "json_f64::scalar")]
    pub mu: f64,
    pub status: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub rows: Vec<IterationRow>,
}

impl RunRecord {
    pub fn from_result(
        experiment: &str,
        solver: &str,
        n: usize,
        wall_ms: f64,
        r: &SolveResult,
    ) -> Self {
        let rows = r
            .residual_history
            .iter()
            .zip(&r.mu_history)
            .enumerate()
            .map(|(i, (&residual, &mu))| IterationRow {
                k: r.k_offset + i,
                residual,
                mu,
            })
            .collect();
        Self {
            experiment: experiment.to_owned(),
            solver: solver.to_owned(),
            tau: r.tau,
            n,
            iterations: r.iterations,
            wall_ms,
            residual: r.final_residual(),
            mu: r.mu,
            status: r.status.as_str().to_owned(),
            notes: r.notes.clone(),
            rows,
        }
    }

    /// Record for a solver that failed with `err` before producing a result.
    pub fn from_error(experiment: &str, solver: &str, n: usize, wall_ms: f64, err: &Error) -> Self {
        Self {
            experiment: experiment.to_owned(),
            solver: solver.to_owned(),
            tau: None,
            n,
            iterations: 0,
            wall_ms,
            residual: f64::NAN,
            mu: f64::NAN,
            status: ERROR_STATUS.to_owned(),
            notes: vec![err.to_string()],
            rows: Vec::new(),
        }
    }

    pub fn converged(&self) -> bool {
        self.status == "converged"
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Parse(format!(
                "unknown format '{s}' (expected csv|json)"
            ))),
        }
    }
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// One line per iteration row, preceded by [`CSV_HEADER`]. Records without
/// rows (solver errors) are written as a single line with an empty `k`.
pub fn to_csv(records: &[RunRecord]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let tau = r.tau.map(real).unwrap_or_default();
        let prefix = format!("{},{},{},{}", r.experiment, r.solver, tau, r.n);
        let suffix = format!("{},{}", real(r.wall_ms), r.status);
        if r.rows.is_empty() {
            let _ = writeln!(
                out,
                "{prefix},,{},{},{suffix}",
                real(r.residual),
                real(r.mu)
            );
        }
        for row in &r.rows {
            let _ = writeln!(
                out,
                "{prefix},{},{},{},{suffix}",
                row.k,
                real(row.residual),
                real(row.mu)
            );
        }
    }
    out
}

pub fn to_json(records: &[RunRecord]) -> Result<String> {
    Ok(serde_json::to_string_pretty(records)?)
}

pub fn write_records(records: &[RunRecord], format: OutputFormat, mut w: impl Write) -> Result<()> {
    match format {
        OutputFormat::Csv => w.write_all(to_csv(records).as_bytes())?,
        OutputFormat::Json => {
            w.write_all(to_json(records)?.as_bytes())?;
            w.write_all(b"\n")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::Vector;
    use crate::solvers::Status;

    fn result() -> SolveResult {
        SolveResult {
            x: Vector::from(vec![0.1]),
            mu: 0.1,
            iterations: 2,
            residual_history: vec![0.5, 1e-16],
            mu_history: vec![0.0, 0.1],
            k_offset: 1,
            status: Status::Converged,
            tol: 1e-15,
            tau: Some(1.0),
            notes: vec![],
        }
    }

    #[test]
    fn rows_mirror_history() {
        let r = RunRecord::from_result("x", "rfpi", 1, 0.0, &result());
        assert_eq!(
            r.rows.iter().map(|row| row.k).collect::<Vec<_>>(),
            vec![1, 2]
        );
        assert_eq!(
            r.rows.iter().map(|row| row.residual).collect::<Vec<_>>(),
            result().residual_history
        );
        assert!(r.converged());
    }

    #[test]
    fn csv_has_one_line_per_row() {
        let r = RunRecord::from_result("x", "rfpi", 1, 0.25, &result());
        let csv = to_csv(&[r]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(
            lines[1],
            "x,rfpi,1.0000000000000000e0,1,1,5.0000000000000000e-1,0.0000000000000000e0,2.5000000000000000e-1,converged"
        );
    }

    #[test]
    fn error_record_gets_a_line() {
        let r = RunRecord::from_error("x", "newton", 3, 0.0, &Error::NoUniformColumn);
        assert!(!r.converged());
        assert_eq!(to_csv(&[r]).lines().count(), 2);
    }

    #[test]
    fn json_round_trip() {
        let r = RunRecord::from_result("x", "rfpi", 1, 0.125, &result());
        let text = to_json(std::slice::from_ref(&r)).unwrap();
        assert!(text.contains("\"status\": \"converged\""));
        let back: Vec<RunRecord> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, vec![r]);
    }
}
