use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("duplicate operation element label `{0}`")]
    DuplicateLabel(String),
    #[error("superoperator needs at least one element")]
    NoElements,
    #[error("cannot parse rational `{0}`")]
    Parse(String),
}

impl LinalgError {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        LinalgError::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
