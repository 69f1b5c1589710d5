use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid argument: {message}")]
pub struct InvalidArgument {
    pub message: String,
}

impl InvalidArgument {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }
}
