use std::fmt;

/// Crate-wide error type.
///
/// Variants are grouped by where they surface: input parsing, model/genome
/// validation, search-space guards, and numerical failures during training.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed JSON or CSV input. Carries the underlying parser message,
    /// which for JSON includes line and column.
    Parse(String),
    /// A layer failed shape validation. `index` is the zero-based position
    /// in the model's layer list.
    InvalidLayer {
        index: usize,
        field: &'static str,
        message: String,
    },
    /// A model-level problem that is not tied to a single layer.
    InvalidModel(String),
    /// Requested a built-in model that does not exist.
    UnknownBuiltin(String),
    /// A genome's gene count does not match what the deployment scenario
    /// requires for this model.
    GenomeLength { expected: usize, actual: usize },
    /// A gene refers to a level index outside the action tables, or to an
    /// unknown dataflow style.
    InvalidGene {
        layer: usize,
        field: &'static str,
        value: usize,
        limit: usize,
    },
    /// Exhaustive enumeration was asked to visit more design points than the
    /// configured guard allows.
    SpaceTooLarge { size: u128, limit: u128 },
    /// Fine-tuning was seeded with a genome that violates the constraint, so
    /// there is nothing valid to improve on.
    InfeasibleSeed,
    /// Bad option values: level tables, constraint strings, manifest field
    /// combinations, config files.
    InvalidConfig(String),
    /// A policy update produced a non-finite parameter or gradient.
    NonFiniteUpdate(String),
    /// Filesystem failure, with the path that caused it.
    Io { path: String, message: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse(msg) => write!(f, "parse error: {}", msg),
            Error::InvalidLayer {
                index,
                field,
                message,
            } => write!(f, "layer {}: field {}: {}", index, field, message),
            Error::InvalidModel(msg) => write!(f, "invalid model: {}", msg),
            Error::UnknownBuiltin(name) => write!(
                f,
                "unknown built-in model '{}' (expected one of: toy2, toy3, mobilenet_v2_like)",
                name
            ),
            Error::GenomeLength { expected, actual } => write!(
                f,
                "genome has {} genes but this model/scenario requires {}",
                actual, expected
            ),
            Error::InvalidGene {
                layer,
                field,
                value,
                limit,
            } => write!(
                f,
                "gene {}: {} index {} out of range (limit {})",
                layer, field, value, limit
            ),
            Error::SpaceTooLarge { size, limit } => write!(
                f,
                "design space has {} points, exceeding the exhaustive-search guard of {}",
                size, limit
            ),
            Error::InfeasibleSeed => {
                write!(f, "fine-tuning seed genome violates the constraint")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {}", msg),
            Error::NonFiniteUpdate(msg) => {
                write!(f, "non-finite value during policy update: {}", msg)
            }
            Error::Io { path, message } => write!(f, "{}: {}", path, message),
        }
    }
}

impl std::error::Error for Error {}

impl Error {
    /// Wraps an I/O error with the path it concerned.
    pub fn io(path: &std::path::Path, err: std::io::Error) -> Error {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
