use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Dimensions or lengths do not agree.
    Shape(String),
    /// A value that must be finite is NaN or infinite.
    NonFinite { index: usize },
    /// A value lies outside its admissible range.
    OutOfRange { index: usize, what: &'static str },
    /// A feature vector with zero norm; cosine similarity is undefined.
    DegenerateFeature { cell: usize },
    /// An argument outside the accepted parameter domain.
    Parameter(String),
    /// Fβ needs a non-empty ground truth for recall to be defined.
    EmptyGroundTruth,
    /// The ordering is not a permutation of `0..n`.
    InvalidPermutation,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape(msg) => write!(f, "shape error: {msg}"),
            Error::NonFinite { index } => write!(f, "data error: non-finite value at index {index}"),
            Error::OutOfRange { index, what } => {
                write!(f, "data error: {what} out of range at index {index}")
            }
            Error::DegenerateFeature { cell } => {
                write!(f, "degenerate feature: zero-norm vector at cell {cell}")
            }
            Error::Parameter(msg) => write!(f, "parameter error: {msg}"),
            Error::EmptyGroundTruth => write!(f, "recall undefined: ground truth has no foreground"),
            Error::InvalidPermutation => write!(f, "ordering is not a valid permutation"),
        }
    }
}

impl core::error::Error for Error {}
