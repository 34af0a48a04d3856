use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    /// A Gibbs update or integration step produced a NaN or infinity.
    #[error("non-finite value while updating row {row}")]
    Numeric { row: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("enumeration needs {estimate:.3e} assignments, budget is {budget}")]
    Budget { estimate: f64, budget: u64 },

    #[error("out of bounds: {0}")]
    Bounds(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
