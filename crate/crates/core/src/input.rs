//! The algebra-specification file format (JSON).
//!
//! ```json
//! {
//!   "dim": 4,
//!   "brackets": [{"i": 0, "j": 1, "k": 1, "value": 1.0}],
//!   "metric": "identity",
//!   "tolerance": {"rel": 1e-9, "abs": 1e-12}
//! }
//! ```
//!
//! `metric` is either the string `"identity"`, an array of `dim` diagonal
//! entries, or a full row-major `dim x dim` array. Bracket indices are
//! 0-based with `i < j`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{LieAlgebra, MetricLieAlgebra, StructureDiagnostic};
use crate::tolerance::Tolerance;
use crate::Error;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub dim: usize,
    #[serde(default)]
    pub brackets: Vec<BracketTerm>,
    pub metric: MetricSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<ToleranceSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BracketTerm {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Named(String),
    Diagonal(Vec<f64>),
    Full(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ToleranceSpec {
    pub rel: f64,
    pub abs: f64,
}

/// How loading an algebra specification can fail. `Malformed` covers
/// structural problems with the document itself; `InvalidAlgebra` and
/// `InvalidMetric` are mathematically meaningful findings about a
/// well-formed input.
#[derive(Debug)]
pub enum InputError {
    Malformed(String),
    InvalidAlgebra(Vec<StructureDiagnostic>),
    InvalidMetric(Error),
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InputError::Malformed(msg) => write!(f, "malformed algebra specification: {msg}"),
            InputError::InvalidAlgebra(diags) => {
                write!(f, "structure constants violate ")?;
                let mut first = true;
                for d in diags {
                    if !first {
                        write!(f, "; ")?;
                    }
                    first = false;
                    match d {
                        StructureDiagnostic::Antisymmetry { i, j, k, residual } => write!(
                            f,
                            "antisymmetry at ({i},{j},{k}) with residual {residual:.3e}"
                        )?,
                        StructureDiagnostic::Jacobi { i, j, k, residual } => write!(
                            f,
                            "the Jacobi identity at ({i},{j},{k}) with residual {residual:.3e}"
                        )?,
                    }
                }
                Ok(())
            }
            InputError::InvalidMetric(e) => write!(f, "invalid metric: {e}"),
        }
    }
}

impl std::error::Error for InputError {}

impl AlgebraSpec {
    pub fn from_json(text: &str) -> Result<Self, InputError> {
        serde_json::from_str(text).map_err(|e| InputError::Malformed(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("specification serializes")
    }

    /// Validate and build the metric Lie algebra plus the effective
    /// tolerance.
    pub fn load(&self) -> Result<(MetricLieAlgebra, Tolerance), InputError> {
        if self.dim == 0 {
            return Err(InputError::Malformed("dim must be at least 1".into()));
        }
        let tol = match self.tolerance {
            Some(ToleranceSpec { rel, abs }) => Tolerance::new(rel, abs).map_err(|_| {
                InputError::Malformed("tolerance must satisfy 0 < abs <= rel < 1".into())
            })?,
            None => Tolerance::default(),
        };
        let mut brackets = Vec::with_capacity(self.brackets.len());
        for b in &self.brackets {
            if b.i >= b.j {
                return Err(InputError::Malformed(format!(
                    "bracket indices must satisfy i < j, got ({}, {})",
                    b.i, b.j
                )));
            }
            if b.j >= self.dim || b.k >= self.dim {
                return Err(InputError::Malformed(format!(
                    "bracket index out of range for dim {}: ({}, {}, {})",
                    self.dim, b.i, b.j, b.k
                )));
            }
            brackets.push((b.i, b.j, b.k, b.value));
        }
        let algebra = LieAlgebra::from_brackets(self.dim, &brackets, &tol)
            .map_err(InputError::InvalidAlgebra)?;
        let gram = self.gram()?;
        let mla = MetricLieAlgebra::new(algebra, gram, &tol).map_err(|e| match e {
            Error::MetricNotSymmetric { .. } | Error::DimensionMismatch { .. } => {
                InputError::Malformed(e.to_string())
            }
            other => InputError::InvalidMetric(other),
        })?;
        Ok((mla, tol))
    }

    fn gram(&self) -> Result<DMatrix<f64>, InputError> {
        let n = self.dim;
        match &self.metric {
            MetricSpec::Named(s) if s == "identity" => Ok(DMatrix::identity(n, n)),
            MetricSpec::Named(s) => Err(InputError::Malformed(format!(
                "unknown metric keyword `{s}` (expected \"identity\")"
            ))),
            MetricSpec::Diagonal(d) => {
                if d.len() != n {
                    return Err(InputError::Malformed(format!(
                        "diagonal metric has {} entries, expected {n}",
                        d.len()
                    )));
                }
                Ok(DMatrix::from_fn(
                    n,
                    n,
                    |i, j| if i == j { d[i] } else { 0.0 },
                ))
            }
            MetricSpec::Full(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(InputError::Malformed(format!(
                        "full metric must be a {n} x {n} array"
                    )));
                }
                Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
            }
        }
    }
}
