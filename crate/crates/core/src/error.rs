//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero in the scalar field")]
    DivisionByZero,

    #[error("operands belong to different scalar fields ({0} vs {1})")]
    FieldMismatch(u64, u64),

    #[error("theta mismatch: {0} vs {1}")]
    ThetaMismatch(String, String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("parse error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, msg: String },

    #[error("validation failed: {}", failed.join(", "))]
    Validation { failed: Vec<String> },

    #[error("degree {0} exceeds the computed table (kmax = {1})")]
    DegreeOverflow(usize, usize),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("target degree {0} exceeds the manifold dimension {1}")]
    ZeroTarget(usize, usize),

    #[error("unknown catalog entry `{0}`; available: {1}")]
    UnknownCatalogEntry(String, String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("invalid field order {0}: must be a positive multiple of 4")]
    InvalidFieldOrder(u64),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
