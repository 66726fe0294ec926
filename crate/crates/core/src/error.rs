use std::path::PathBuf;

use thiserror::Error;

/// Where a conference design's zero pattern first goes wrong.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroFault {
    /// A column does not hold exactly one zero.
    Column { column: usize, zeros: usize },
    /// A row holds more than one zero; `columns` are the first two offenders.
    Row { row: usize, columns: (usize, usize) },
}

impl std::fmt::Display for ZeroFault {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            ZeroFault::Column { column, zeros } => {
                write!(f, "column {} has {} zeros (expected 1)", column + 1, zeros)
            }
            ZeroFault::Row { row, columns } => {
                write!(f, "row {} has zeros in columns {} and {}", row + 1, columns.0 + 1, columns.1 + 1)
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("entry {value} at row {row}, column {column} is not in {{-1, 0, 1}}", row = .row + 1, column = .column + 1)]
    EntryOutOfDomain { row: usize, column: usize, value: i64 },

    #[error("columns {a} and {b} are not orthogonal (inner product {inner})", a = .columns.0 + 1, b = .columns.1 + 1)]
    NonOrthogonalColumns { columns: (usize, usize), inner: i64 },

    #[error("bad zero pattern: {0}")]
    BadZeroPattern(ZeroFault),

    #[error("run count {0} is odd")]
    OddRunCount(usize),

    #[error("{0} factors is too few (at least 5 are required)")]
    TooFewFactors(usize),

    #[error("{factors} factors exceed {runs} runs")]
    FactorsExceedRuns { factors: usize, runs: usize },

    #[error("{0} is not an odd prime")]
    NotPrime(u64),

    #[error("no {runs}x{factors} conference design found")]
    NoneFound { runs: usize, factors: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("model column {0} has zero variance")]
    ZeroVariance(String),

    #[error("correlation {0:.12} is not one of the theoretical values")]
    UnexpectedCorrelationValue(f64),

    #[error("information matrix is singular")]
    SingularInformation,

    #[error("designs have different factor counts ({0} vs {1})")]
    FactorMismatch(usize, usize),

    #[error("{0}")]
    InvalidState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
