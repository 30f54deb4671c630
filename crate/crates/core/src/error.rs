//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid needs an even point count of at least 16, got {0}")]
    BadGridSize(usize),
    #[error("grid half-width must be positive and finite, got {0}")]
    BadHalfWidth(f64),
    #[error("field has {got} values but the grid has {expected} points")]
    LengthMismatch { expected: usize, got: usize },
    #[error("operands live on different grids")]
    GridMismatch,
    #[error("non-finite value at grid index {0}")]
    NonFinite(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("solution left the valid range; last valid time t = {t_last}")]
    BlowUp { t_last: f64 },
    #[error("window [{lo}, {hi}] holds {got} samples; need at least {need}")]
    InsufficientSamples {
        lo: f64,
        hi: f64,
        need: usize,
        got: usize,
    },
    #[error("config error: {0}")]
    Config(String),
    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("TOML error in {path}: {source}")]
    TomlParse {
        path: PathBuf,
        #[source]
        source: Box<toml::de::Error>,
    },
    #[error("serialization error: {0}")]
    Serialize(String),
}

pub type Result<T> = std::result::Result<T, Error>;
