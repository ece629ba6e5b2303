//! Error types shared by the whole engine.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, EngineError>;

/// Engine-wide error type.
///
/// Errors split into two broad classes that the CLI maps to distinct exit
/// codes: validation errors (bad input, out-of-range indices, malformed
/// expressions, oversized problems) and internal-consistency errors
/// (conditions that a correct engine must never produce, such as residual
/// units of measurement after a cancellation that is guaranteed by
/// construction).
#[derive(Debug, Error)]
pub enum EngineError {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("incomplete assignment: no value for q[{i},{j}]")]
    IncompleteAssignment { i: u32, j: u32 },

    #[error("division domain error: q[{i},{j}] assigned zero but occurs with a negative exponent")]
    ZeroAssignment { i: u32, j: u32 },

    #[error("negative exponent on non-invertible generator {0}")]
    NegativeExponent(String),

    #[error(
        "substitution weight mismatch for {gen}: image weight {got} != generator weight {want}"
    )]
    SubstitutionWeight {
        gen: String,
        got: String,
        want: String,
    },

    #[error("degenerate Hessian: {0}")]
    DegenerateHessian(String),

    #[error("truncation overflow: {0}")]
    Truncation(String),

    #[error("element exceeds {limit} terms (set BRAIDLEG_MAX_TERMS to raise the cap)")]
    TooManyTerms { limit: usize },

    #[error("validation error: {0}")]
    Validation(String),

    /// Signals a braiding bug: an invariant guaranteed by the construction
    /// failed (residual coordinate letters, residual units of measurement,
    /// inhomogeneous weight where homogeneity is forced).
    #[error("internal consistency error: {0}")]
    InternalConsistency(String),
}

impl EngineError {
    /// Exit code class used by the CLI: 1 for user/validation errors,
    /// 2 for internal-consistency failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            EngineError::InternalConsistency(_) => 2,
            _ => 1,
        }
    }
}
