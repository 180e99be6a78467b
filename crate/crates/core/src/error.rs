use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown phantom '{0}' (expected crescent, bulls-eye or shepp-logan)")]
    UnknownPhantom(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("spacing mismatch: {0} vs {1}")]
    SpacingMismatch(f64, f64),

    #[error("signal is not unimodal")]
    NotUnimodal,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} out of range for {len} pixels")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("quadrature did not converge: value {value}, error estimate {error} after {panels} panels")]
    Quadrature { value: f64, error: f64, panels: usize },

    #[error("matrix is singular to working precision (rcond {rcond:e})")]
    Singular { rcond: f64 },

    #[error("kernel {kernel} cannot be paired with window {window}")]
    IncompatibleWindow { kernel: &'static str, window: &'static str },

    #[error("filtered back-projection needs a parallel-beam sinogram")]
    ScatteredLayout,

    #[error("scaled problem needs the analytic phantom behind the sinogram")]
    MissingPhantom,
}
