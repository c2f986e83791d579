//! Error type shared by all modules.

use thiserror::Error;

use crate::algebra::StructureDiagnostic;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("tolerance must satisfy 0 < abs <= rel < 1")]
    InvalidTolerance,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("metric is not symmetric (max |G - G^T| = {residual:.3e})")]
    MetricNotSymmetric { residual: f64 },

    #[error("metric is not positive definite (pivot {pivot:.3e} at basis index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("frame matrix is singular (|det| = {det:.3e})")]
    SingularFrame { det: f64 },

    #[error("structure constants are not a Lie algebra: {0:?}")]
    InvalidStructure(Vec<StructureDiagnostic>),

    #[error("matrix is not skew-symmetric (max |M + M^T| = {residual:.3e})")]
    NotSkew { residual: f64 },

    #[error("{subject} does not have the two-rotation-block form (residual {residual:.3e})")]
    NotBlockForm { subject: String, residual: f64 },

    #[error("connection forms are both zero")]
    ZeroConnectionForms,

    #[error("Jacobi relations violated at indices {indices:?} (values {values:?})")]
    JacobiRelationsViolated {
        indices: Vec<usize>,
        values: Vec<f64>,
    },

    #[error("brackets are not the structure constants of the connection frame (torsion residual {residual:.3e})")]
    FrameMismatch { residual: f64 },

    #[error("plane spanned by the given vectors is degenerate (Gram determinant {gram:.3e})")]
    DegeneratePlane { gram: f64 },

    #[error("endomorphism is not parallel (commutation residual {residual:.3e})")]
    NotParallel { residual: f64 },

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("unknown parameter `{param}` for catalog entry `{entry}`")]
    UnknownParam { entry: String, param: String },

    #[error("parameter `{param}` = {value} is out of range ({constraint})")]
    ParamOutOfRange {
        param: String,
        value: f64,
        constraint: String,
    },
}
