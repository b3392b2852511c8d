use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("mask would need {cells} cells, above the limit of {limit}")]
    ResourceLimit { cells: u128, limit: u64 },

    #[error("grids are not aligned (cell sizes {left} and {right}); resample one grid to the other's cell size")]
    Alignment { left: f64, right: f64 },

    #[error("degenerate region {0}")]
    DegenerateRegion(String),

    #[error("insufficient sample: need at least {required} values, got {actual}")]
    InsufficientSample { required: usize, actual: usize },

    #[error("unsupported sample size {n}; supported range is {min}..={max}")]
    UnsupportedSize { n: usize, min: usize, max: usize },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("inconsistent correlations: determinant {0} is not positive")]
    InconsistentCorrelations(f64),

    #[error("regions without boundary geometry: {}", .0.join(", "))]
    MissingGeometry(Vec<String>),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }

    /// Process exit code for the CLI: 3 for I/O failures, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 3,
            _ => 2,
        }
    }
}
