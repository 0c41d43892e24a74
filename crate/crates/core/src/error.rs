use std::io;

/// Errors raised by grid, kernel, dynamics and analysis operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("weight is not integrable: {0}")]
    NonIntegrable(String),

    #[error("grid too coarse: {0}")]
    Resolution(String),

    #[error("interior region is empty for margin {margin}")]
    EmptyInterior { margin: f64 },

    #[error("firing rate is not invertible: {0}")]
    NotInvertible(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("out of model: {0}")]
    OutOfModel(String),

    #[error("state became non-finite at step {step} (t = {t})")]
    Diverged { step: usize, t: f64 },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("snapshot has bad magic bytes {found:?}")]
    BadMagic { found: [u8; 4] },

    #[error("unsupported snapshot version {0}")]
    UnsupportedVersion(u16),

    #[error("truncated snapshot: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },

    #[error("malformed snapshot: {0}")]
    Malformed(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
