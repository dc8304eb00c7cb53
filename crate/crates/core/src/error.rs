use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input document. `offset` is the byte offset of the failure.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// Structurally valid input that breaks a domain rule.
    #[error("validation error: {0}")]
    Validation(String),

    /// One or more GeoJSON features failed validation.
    #[error("invalid features {indices:?}: {reason}")]
    InvalidFeatures { indices: Vec<usize>, reason: String },

    #[error("non-numeric value for ({country}, {year})")]
    NonNumeric { country: String, year: String },

    #[error("empty year: no country has a value for {0}")]
    EmptyYear(i32),

    #[error("degenerate polygon")]
    DegeneratePolygon,

    #[error("reference {0} has no data")]
    ReferenceHasNoData(String),

    #[error("{country} has no value for endpoint year(s) {years:?}")]
    MissingEndpoint { country: String, years: Vec<i32> },

    #[error("unknown {kind} '{id}'")]
    NotFound { kind: &'static str, id: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("png encoding failed: {0}")]
    Png(#[from] png::EncodingError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// True for errors caused by a missing dataset, country or year lookup.
    pub fn is_not_found(&self) -> bool {
        matches!(self, Error::NotFound { .. })
    }
}
