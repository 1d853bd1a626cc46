use thiserror::Error;

use crate::eval::OperatingPoint;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch in {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: String,
        actual: String,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("doppler window {bins:?} does not fit inside 0..{num_bins}")]
    DopplerWindowOutOfRange { bins: Vec<isize>, num_bins: usize },

    #[error("scatterer range {range_m:.3} m outside (0, {max_range_m:.3}) m")]
    OutOfRange { range_m: f64, max_range_m: f64 },

    #[error("no k satisfies FPR <= {fpr_cap}")]
    NoFeasibleK {
        fpr_cap: f64,
        curve: Vec<OperatingPoint>,
    },

    #[error("stream of {len} frames is shorter than the {window}-frame alarm window")]
    StreamTooShort { len: usize, window: usize },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("recording payload is {actual} bytes, expected {expected}")]
    PayloadLength { expected: u64, actual: u64 },

    #[error("malformed recording: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Schema {
        path: String,
        source: serde_json::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable tag used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidConfig(_) => "invalid_config",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NonFinite(_) => "non_finite",
            Error::DopplerWindowOutOfRange { .. } => "doppler_window_out_of_range",
            Error::OutOfRange { .. } => "out_of_range",
            Error::NoFeasibleK { .. } => "no_feasible_k",
            Error::StreamTooShort { .. } => "stream_too_short",
            Error::Empty(_) => "empty_input",
            Error::PayloadLength { .. } => "payload_length",
            Error::Format(_) => "format",
            Error::Schema { .. } => "schema",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

pub(crate) fn mismatch(what: &'static str, expected: impl ToString, actual: impl ToString) -> Error {
    Error::DimensionMismatch {
        what,
        expected: expected.to_string(),
        actual: actual.to_string(),
    }
}
