use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of the Gamma function at {0}")]
    Pole(String),

    #[error("series failed to converge: {0}")]
    Convergence(String),

    #[error("argument outside the supported domain: {0}")]
    Domain(String),

    #[error("unsupported dimension d = {0} (implemented: 3, 4)")]
    UnsupportedDimension(usize),

    #[error("base of the complex power lies on the branch cut: {0}")]
    BranchCut(String),

    #[error("grid dimension {grid} does not match function dimension {expected}")]
    GridMismatch { grid: usize, expected: usize },

    #[error("extrapolation did not stabilize: {0}")]
    Extrapolation(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
