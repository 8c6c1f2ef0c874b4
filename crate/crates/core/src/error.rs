use alloc::string::String;
use alloc::vec::Vec;

use crate::jet::MAX_DIM;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension {0} is not supported (1..={MAX_DIM})")]
    UnsupportedDimension(usize),

    #[error("domain error in `{op}`: operand value {value}")]
    Domain { op: &'static str, value: f64 },

    #[error("domain error in `{op}` (operand value {value}) while evaluating `{expr}`")]
    EvalDomain {
        op: &'static str,
        value: f64,
        expr: String,
    },

    #[error("missing second operand for `{0}`")]
    MissingOperand(&'static str),

    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },

    #[error("function `{name}` expects {expected} argument(s), got {found} (position {pos})")]
    Arity {
        name: &'static str,
        expected: usize,
        found: usize,
        pos: usize,
    },

    #[error("metric is not positive definite at {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },

    #[error("metric is not symmetric: g[{i}][{j}] and g[{j}][{i}] differ at {point:?}")]
    AsymmetricMetric { i: usize, j: usize, point: Vec<f64> },

    #[error("rank deficiency: {what} vector {index} has residual norm {residual:e}")]
    RankDeficient {
        what: &'static str,
        index: usize,
        residual: f64,
    },

    #[error("vector is not tangent to the distribution (normal residual {0:e})")]
    NotTangent(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("unknown scene `{0}`")]
    UnknownScene(String),

    #[error("point {point:?} lies outside the scene domain")]
    OutOfDomain { point: Vec<f64> },

    #[error("no admissible sample points: found {found} of {count} within {attempts} attempts")]
    NoAdmissiblePoints {
        count: usize,
        found: usize,
        attempts: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("radial trajectory touches the singular branch near r = {r}")]
    SingularBranch { r: f64 },

    #[error("check `{check}` is not applicable to scene `{scene}`: {reason}")]
    NotApplicable {
        check: &'static str,
        scene: String,
        reason: String,
    },

    #[error("unknown check `{0}`")]
    UnknownCheck(String),
}

impl Error {
    /// Failures that come from evaluating geometry at a point rather than
    /// from malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::EvalDomain { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::AsymmetricMetric { .. }
                | Error::RankDeficient { .. }
                | Error::NotTangent(_)
                | Error::OutOfDomain { .. }
                | Error::SingularBranch { .. }
        )
    }
}
