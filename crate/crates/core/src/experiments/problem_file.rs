//! JSON problem files.
//!
//! ```json
//! {"kind": "toeplitz", "symbol": {"lo": -1, "coeffs": [0.1, 0.2]}, "b": [0.1, 0.0], "strict": true}
//! {"kind": "dense", "matrix": [[0.1, 0.0], [0.2, 0.1]], "b": [0.1, 0.0], "strict": true}
//! {"kind": "laplacian", "matrix": [[1.0, -1.0], [-1.0, 1.0]], "b": [1.0, 0.0]}
//! ```
//!
//! For `dense` the matrix is `M` in `A = (2 - ||M||_1) I - M`. For
//! `laplacian` the matrix is `L` and `b` is the split vector `v`; when `b` is
//! omitted it is chosen by [`suggest_v`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json_f64;
use crate::laplacian::{decompose, laplacian_problem, rank_one_sqrt, suggest_v, DEFAULT_DB_TOL};
use crate::numkit::{DenseMatrix, Vector};
use crate::toeplitz::{
    build_dense_problem, build_toeplitz_problem, LaurentSymbol, Origin, ProblemInstance,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Toeplitz,
    Dense,
    Laplacian,
}

fn default_strict() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: ProblemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<LaurentSymbol>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "json_f64::option_matrix"
    )]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "json_f64::option_vec"
    )]
    pub b: Option<Vec<f64>>,
    #[serde(default = "default_strict")]
    pub strict: bool,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    fn matrix(&self) -> Result<DenseMatrix> {
        let rows = self
            .matrix
            .as_ref()
            .ok_or_else(|| missing(self.kind, "matrix"))?;
        DenseMatrix::from_rows(rows)
    }

    fn b(&self) -> Result<Vector> {
        let b = self.b.as_ref().ok_or_else(|| missing(self.kind, "b"))?;
        if b.is_empty() {
            return Err(Error::InvalidInput("b must be non-empty".into()));
        }
        Ok(Vector::from(b.clone()))
    }

    /// Builds and validates the instance. Laplacian files go through the
    /// rank-one square root, so `A = nu I + V^T` is computed here.
    pub fn to_instance(&self) -> Result<ProblemInstance> {
        match self.kind {
            ProblemKind::Toeplitz => {
                let sym = self
                    .symbol
                    .as_ref()
                    .ok_or_else(|| missing(self.kind, "symbol"))?;
                build_toeplitz_problem(sym, self.b()?, self.strict)
            }
            ProblemKind::Dense => build_dense_problem(&self.matrix()?, self.b()?, self.strict),
            ProblemKind::Laplacian => {
                let l = self.matrix()?;
                let v = match &self.b {
                    Some(_) => self.b()?,
                    None => suggest_v(&l)?,
                };
                let d = decompose(&l, &v)?;
                laplacian_problem(&d, &rank_one_sqrt(&d, DEFAULT_DB_TOL)?)
            }
        }
    }

    /// File describing `p`. For Laplacian problems `L = V^2 - 1 v^T` is
    /// recomputed from the stored root, so it matches the source only to
    /// rounding.
    pub fn from_instance(p: &ProblemInstance) -> Self {
        let b = Some(p.b().to_vec());
        let strict = p.is_strict();
        match p.origin() {
            Origin::Toeplitz(sym) => Self {
                kind: ProblemKind::Toeplitz,
                symbol: Some(sym.clone()),
                matrix: None,
                b,
                strict,
            },
            Origin::Dense(m) => Self {
                kind: ProblemKind::Dense,
                symbol: None,
                matrix: Some(m.to_rows()),
                b,
                strict,
            },
            Origin::Laplacian { root, .. } => {
                let l = root
                    .matmul(root)
                    .add_outer(-1.0, &Vector::ones(p.n()), p.b());
                Self {
                    kind: ProblemKind::Laplacian,
                    symbol: None,
                    matrix: Some(l.to_rows()),
                    b,
                    strict,
                }
            }
        }
    }
}

fn missing(kind: ProblemKind, field: &str) -> Error {
    Error::InvalidInput(format!("{kind:?} problem file needs a '{field}' field"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{gen_example1, gen_example2, Example1Params, Example2Params};

    #[test]
    fn toeplitz_round_trip_is_lossless() {
        let params = Example1Params {
            n: 30,
            m: 40,
            ..Default::default()
        };
        let p = gen_example1(&params, 5).unwrap();
        let text = ProblemFile::from_instance(&p).to_json().unwrap();
        let back = ProblemFile::from_json(&text)
            .unwrap()
            .to_instance()
            .unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn dense_round_trip_is_lossless() {
        let p = gen_example2(
            &Example2Params {
                n: 12,
                ..Default::default()
            },
            5,
        )
        .unwrap();
        let text = ProblemFile::from_instance(&p).to_json().unwrap();
        assert!(text.contains("\"kind\": \"dense\""));
        let back = ProblemFile::from_json(&text)
            .unwrap()
            .to_instance()
            .unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn laplacian_file_with_suggested_v() {
        let text =
            r#"{"kind": "laplacian", "matrix": [[3,-1,-1,-1],[-1,1,0,0],[-1,0,2,-1],[-1,0,-1,2]]}"#;
        let p = ProblemFile::from_json(text).unwrap().to_instance().unwrap();
        assert_eq!(p.origin().kind(), "laplacian");
        assert_eq!(p.b().as_slice(), &[1.0, 0.0, 0.0, 0.0]);
        assert!(!p.is_strict());
        let l = ProblemFile::from_instance(&p).matrix().unwrap();
        assert!(
            l.sub(
                &DenseMatrix::from_rows(&[
                    vec![3.0, -1.0, -1.0, -1.0],
                    vec![-1.0, 1.0, 0.0, 0.0],
                    vec![-1.0, 0.0, 2.0, -1.0],
                    vec![-1.0, 0.0, -1.0, 2.0],
                ])
                .unwrap()
            )
            .norm1()
                < 1e-12
        );
    }

    #[test]
    fn missing_and_unknown_fields() {
        let err = ProblemFile::from_json(r#"{"kind": "dense", "b": [0.1]}"#)
            .unwrap()
            .to_instance()
            .unwrap_err();
        assert!(err.to_string().contains("matrix"));
        assert!(ProblemFile::from_json(r#"{"kind": "dense", "bee": [0.1]}"#).is_err());
        assert!(ProblemFile::from_json(r#"{"kind": "sparse"}"#).is_err());
    }

    #[test]
    fn strict_defaults_true_and_invalid_rhs_rejected() {
        let f = ProblemFile::from_json(
            r#"{"kind": "toeplitz", "symbol": {"lo": 0, "coeffs": [0.5]}, "b": [0.3]}"#,
        )
        .unwrap();
        assert!(f.strict);
        // beta = 0.5 so ||b||_1 = 0.3 breaks ||b||_1 < beta^2.
        assert!(matches!(f.to_instance(), Err(Error::InvalidProblem(_))));
        let f = ProblemFile { strict: false, ..f };
        assert!(f.to_instance().is_ok());
    }
}
