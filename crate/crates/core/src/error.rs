use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: row {row}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path}: row {row}, column `{column}`: cannot parse `{value}` as a price")]
    BadPrice {
        path: PathBuf,
        row: usize,
        column: String,
        value: String,
    },

    #[error("{path}: duplicate date {date} at row {row}")]
    DuplicateDate {
        path: PathBuf,
        row: usize,
        date: chrono::NaiveDate,
    },

    #[error("series `{asset}` is unusable: {reason}")]
    UnusableSeries { asset: String, reason: String },

    #[error("no common dates across assets: {ranges}")]
    Alignment { ranges: String },

    #[error("asset `{asset}` has zero variance")]
    DegenerateAsset { asset: String },

    #[error("need at least {required} observations, got {actual}")]
    SampleSize { required: usize, actual: usize },

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown asset `{0}`")]
    UnknownAsset(String),

    #[error("HTTP request failed with status {status}: {message}")]
    Http {
        status: u16,
        message: String,
        retryable: bool,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by the input data rather than the environment.
    pub fn is_data_error(&self) -> bool {
        match self {
            Error::Io(_) | Error::Http { .. } => false,
            Error::Csv(e) => !matches!(e.kind(), csv::ErrorKind::Io(_)),
            Error::Json(e) => !e.is_io(),
            _ => true,
        }
    }
}
