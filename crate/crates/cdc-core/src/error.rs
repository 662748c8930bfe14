use core::fmt;

/// Error type shared by every fallible operation in this crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CdcError {
    /// An operation received an empty sample.
    EmptyInput,
    /// Two paired inputs disagree on sample count.
    LengthMismatch { left: usize, right: usize },
    /// A query or row has the wrong number of coordinates.
    DimensionMismatch { expected: usize, got: usize },
    /// The input carries no usable variation (constant sample, all ties, n too small).
    DegenerateInput(&'static str),
    /// A configuration value is outside its admissible range.
    InvalidConfig(&'static str),
    /// A non-finite value (NaN or infinity) at the given position.
    NonFinite { row: usize, col: usize },
    /// A numerical routine failed to produce a usable result.
    Numeric(&'static str),
}

impl fmt::Display for CdcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CdcError::EmptyInput => write!(f, "empty input"),
            CdcError::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right} samples")
            }
            CdcError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected} coordinates, got {got}")
            }
            CdcError::DegenerateInput(what) => write!(f, "degenerate input: {what}"),
            CdcError::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
            CdcError::NonFinite { row, col } => {
                write!(f, "non-finite value at row {row}, column {col}")
            }
            CdcError::Numeric(what) => write!(f, "numerical failure: {what}"),
        }
    }
}

impl core::error::Error for CdcError {}

pub type Result<T> = core::result::Result<T, CdcError>;
