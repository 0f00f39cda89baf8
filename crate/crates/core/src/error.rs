use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("grid mismatch: {0} vs {1}")]
    GridMismatch(usize, usize),
    #[error("field has nonzero mean {0:e}")]
    NonZeroMean(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("pressure solve did not converge after {iterations} iterations (residual {residual:e})")]
    PressureNotConverged { iterations: usize, residual: f64 },
    #[error("density out of bounds: min {min}, max {max} (allowed [{lo}, {hi}])")]
    DensityBounds { min: f64, max: f64, lo: f64, hi: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("snapshot error at byte {offset}: {msg}")]
    Snapshot { offset: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(line: usize, msg: impl Into<String>) -> Self {
        Error::Config { line, msg: msg.into() }
    }

    /// Process exit code reported by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidArgument(_) | Error::InvalidGrid(_) => 2,
            Error::DensityBounds { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
