//! Error type of the std companion crate.

use thiserror::Error;

/// Errors raised by the engine, file formats and the verification suite.
#[derive(Debug, Error)]
pub enum Error {
    /// An error from the core library.
    #[error(transparent)]
    Core(#[from] nilproj_core::Error),
    /// The function lives in the other domain.
    #[error("function is in {got:?} space, expected {expected:?}")]
    WrongSpace {
        /// Required domain.
        expected: crate::grid::Space,
        /// Actual domain.
        got: crate::grid::Space,
    },
    /// Two operands are sampled on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    /// Invalid grid parameters.
    #[error("invalid grid: {0}")]
    Grid(String),
    /// Malformed configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// Malformed input file.
    #[error("format error: {0}")]
    Format(String),
    /// Underlying IO failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Result alias.
pub type Result<T> = std::result::Result<T, Error>;
