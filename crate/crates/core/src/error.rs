//! Error type shared by every module of the workbench.

use thiserror::Error;

/// Errors raised while loading inputs or running a procedure.
///
/// Axiom violations found by a checker are *not* errors; they are reported
/// through [`crate::report::ValidationReport`]. Errors are reserved for
/// inputs that cannot be processed at all.
#[derive(Debug, Error)]
pub enum Error {
    /// Tables with inconsistent dimensions or out-of-range entries.
    #[error("malformed algebra: {0}")]
    MalformedAlgebra(String),

    /// A structurally sound algebra that fails one or more axioms.
    #[error("algebra `{name}` is not a commutative integral residuated lattice: {summary}")]
    InvalidAlgebra { name: String, summary: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// An enumeration would exceed the configured element cap.
    #[error("budget exceeded: {what} has {cardinality} elements (cap {cap})")]
    Budget {
        what: String,
        cardinality: String,
        cap: u64,
    },

    #[error("formula of rank {rank} is not in stratum {stratum}")]
    Stratum { rank: usize, stratum: usize },

    #[error("functor mismatch: lifting `{lifting}` is bound to {expected}, session functor is {found}")]
    FunctorMismatch {
        lifting: String,
        expected: String,
        found: String,
    },

    #[error("unknown modality `{0}`")]
    UnknownModality(String),

    #[error("modality `{name}` expects {expected} argument(s), got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },

    /// A cross-check between two independent routes disagreed.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-parsable tag used by the CLI on exit code 2.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedAlgebra(_) => "malformed-algebra",
            Error::InvalidAlgebra { .. } => "invalid-algebra",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::InvalidInput(_) => "invalid-input",
            Error::Parse { .. } => "parse",
            Error::Budget { .. } => "budget",
            Error::Stratum { .. } => "stratum",
            Error::FunctorMismatch { .. } => "functor-mismatch",
            Error::UnknownModality(_) => "unknown-modality",
            Error::Arity { .. } => "arity",
            Error::Invariant(_) => "invariant",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
