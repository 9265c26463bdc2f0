//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input vector has (near-)zero norm and cannot be projected to the sphere.
    #[error("zero vector: norm below 1e-12, cannot normalize")]
    ZeroVector,

    /// Two vectors (or a vector and a codebook) disagree in dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A weight update collapsed to the origin before renormalization.
    #[error("degenerate update on neuron {neuron}: pre-normalization norm below 1e-12")]
    DegenerateUpdate { neuron: usize },

    /// A supervised event carries a class the codebook has no prototype for.
    #[error("unknown label: {label}")]
    UnknownLabel { label: String },

    /// An operation received an empty input sequence.
    #[error("empty input")]
    EmptyInput,

    /// A parameter is outside its valid range.
    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// A cell in a CSV file failed to parse.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: String,
        message: String,
    },

    /// The requested class count cannot be separated on the sphere in this dimension.
    #[error("cannot place {classes} class centers with the required spacing in dimension {dim}")]
    SpacingInfeasible { classes: usize, dim: usize },

    /// A model file violates the expected format.
    #[error("model format error at line {line}: {message}")]
    ModelFormat { line: usize, message: String },

    /// Online training aborted; carries the index of the offending event.
    #[error("training step failed at epoch {epoch}, event {event}: {source}")]
    StepFailed {
        epoch: u32,
        event: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
