use std::fmt;

use thiserror::Error;

use crate::support::SubsetPair;

/// What went wrong with an input document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputErrorKind {
    Schema(String),
    ZeroCoefficient,
    DuplicateExponent,
    DimensionMismatch { expected: usize, found: usize },
}

impl fmt::Display for InputErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputErrorKind::Schema(msg) => write!(f, "schema violation: {msg}"),
            InputErrorKind::ZeroCoefficient => f.write_str("zero coefficient"),
            InputErrorKind::DuplicateExponent => f.write_str("duplicate exponent vector"),
            InputErrorKind::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected length {expected}, found {found}")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {kind}")]
    Input { path: String, kind: InputErrorKind },

    #[error("no positive integral point lies in any dilation of the Newton polytope")]
    UnreachableWeight,

    #[error("mu mismatch: combinatorial route gives {combinatorial}, polytope route gives {polytope}")]
    MuMismatch { combinatorial: i64, polytope: String },

    #[error("integral weight of {0} is infinite")]
    InfiniteWeight(SubsetPair),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("unsupported extension degree {0} (supported: 1..={1})")]
    UnsupportedDegree(u32, u32),

    #[error("coefficient {coefficient} is not a unit modulo {p}")]
    NonUnitCoefficient { coefficient: String, p: u64 },

    #[error("exhaustive scan of {size} points exceeds the guard of {limit}")]
    GuardExceeded { size: u128, limit: u128 },

    #[error("precision error: {0}")]
    Precision(String),

    #[error("variable A[{0}] has no assigned value")]
    UnassignedVariable(String),

    #[error("iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("{a} is divisible by {p}")]
    DivisibleByPrime { a: i64, p: u64 },

    #[error("empty vertex set")]
    EmptyVertexSet,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(path: impl Into<String>, kind: InputErrorKind) -> Self {
        Error::Input { path: path.into(), kind }
    }

    pub(crate) fn schema(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::input(path, InputErrorKind::Schema(msg.into()))
    }

    /// True for errors caused by malformed user input.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Input { .. } | Error::Io(_) | Error::InvalidArgument(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
