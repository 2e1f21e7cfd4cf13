use alloc::string::String;

/// Errors raised by the core pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A corpus record does not match the record schema.
    #[error("schema error in field `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("duplicate page title `{0}`")]
    DuplicateTitle(String),

    /// An anchor, reference or wikilink was used with a page that does not own it.
    #[error("ownership error: {0}")]
    Ownership(String),

    /// Inputs built from different corpora were combined.
    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("shape error: expected {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("resampling error: {0}")]
    Resampling(String),

    #[error("training error: {0}")]
    Training(String),
}

impl Error {
    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
