use thiserror::Error;

/// Errors raised anywhere in the link model, design and simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degenerate channel: combined channel estimate has zero norm")]
    DegenerateChannel,

    #[error("eigen-iteration did not converge after {iterations} iterations (last eigen-residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("search space too large: {levels}^{elements} exceeds the limit of {limit} tuples")]
    SearchTooLarge {
        levels: usize,
        elements: usize,
        limit: u64,
    },

    #[error("config error in `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
