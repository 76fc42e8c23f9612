use thiserror::Error;

/// Errors raised by library operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("signature is identically zero")]
    ZeroSignature,

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("argument index {index} out of range for arity {arity}")]
    InvalidSlot { index: usize, arity: usize },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("signature is decomposable")]
    Decomposable,

    #[error("wrong shape: {0}")]
    WrongShape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A search that a theorem guarantees to succeed came up empty.
    #[error("search exhausted without success: {0}")]
    SearchExhausted(String),

    #[error("value not representable in the exact field: {0}")]
    OutsideField(String),

    #[error("intermediate tensor arity {arity} exceeds cap {cap}")]
    ArityCap { arity: usize, cap: usize },

    #[error("invalid grid: {}", .0.join("; "))]
    InvalidGrid(Vec<String>),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
