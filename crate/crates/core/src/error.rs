//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid set description: {0}")]
    InvalidSet(String),

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    #[error("period {period} exceeds the cap {cap}")]
    PeriodOverflow { period: u128, cap: u64 },

    #[error("no element of index {index}: the set has only {cardinality} elements")]
    NotEnoughElements { index: u64, cardinality: u64 },

    #[error("generator count {requested} exceeds the cap {cap}")]
    GeneratorCap { requested: usize, cap: usize },

    #[error("set{} is not in the filter's algebra", match index { Some(i) => format!(" at index {i}"), None => String::new() })]
    NotInAlgebra { index: Option<usize> },

    #[error("not a partition: {witness} lies in {} part(s) {containing:?}", containing.len())]
    NotAPartition { witness: u64, containing: Vec<usize> },

    #[error("no zero-set certificate attached to the function")]
    CertificateMissing,

    #[error("certificate mismatch at input {input}: certificate says member={claimed_member}, function value is {value}")]
    CertificateMismatch {
        input: u64,
        claimed_member: bool,
        value: u64,
    },

    #[error("precision {requested} exceeds the cap {cap}")]
    PrecisionCap { requested: u32, cap: u32 },

    #[error("parse error at {line}:{col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },

    #[error("type error: expected {expected}, found {found}")]
    TypeMismatch { expected: String, found: String },

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("evaluation fuel exhausted (budget {budget})")]
    FuelExhausted { budget: u64 },

    #[error("no oracle available for {0}")]
    OracleUnavailable(&'static str),

    #[error("argument is not an ultimately periodic set expression: {0}")]
    NonUpArgument(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Stable machine-readable tag for each error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSet(_) => "InvalidSet",
            Error::InvalidSequence(_) => "InvalidSequence",
            Error::InvalidFilter(_) => "InvalidFilter",
            Error::PeriodOverflow { .. } => "PeriodOverflow",
            Error::NotEnoughElements { .. } => "NotEnoughElements",
            Error::GeneratorCap { .. } => "GeneratorCap",
            Error::NotInAlgebra { .. } => "NotInAlgebra",
            Error::NotAPartition { .. } => "NotAPartition",
            Error::CertificateMissing => "CertificateMissing",
            Error::CertificateMismatch { .. } => "CertificateMismatch",
            Error::PrecisionCap { .. } => "PrecisionCap",
            Error::Parse { .. } => "ParseError",
            Error::TypeMismatch { .. } => "TypeError",
            Error::UnboundVariable(_) => "UnboundVariable",
            Error::FuelExhausted { .. } => "FuelExhausted",
            Error::OracleUnavailable(_) => "OracleUnavailable",
            Error::NonUpArgument(_) => "NonUPArgument",
            Error::Overflow(_) => "Overflow",
            Error::Internal(_) => "Internal",
        }
    }
}
