use thiserror::Error;

use crate::pipeline::ChainError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("image codec error: {0}")]
    Codec(#[from] image::ImageError),

    /// A document (style, layout, detections) could not be parsed.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// A style pipeline failed channel validation.
    #[error("invalid pipeline: {}", format_chain_errors(.0))]
    InvalidPipeline(Vec<ChainError>),

    #[error("layout `{id}`: {message}")]
    Layout { id: String, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

fn format_chain_errors(errors: &[ChainError]) -> String {
    errors
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
