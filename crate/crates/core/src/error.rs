use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A configuration value is missing or malformed. `key` names the offending entry.
    #[error("configuration error at `{key}`: {message}")]
    Config { key: String, message: String },

    /// A parameter lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Sequence lengths do not agree.
    #[error("shape error: {what} (expected {expected}, found {found})")]
    Shape {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("singular system: zero pivot at row {pivot}")]
    Singular { pivot: usize },

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),

    /// Expression evaluation failed at the given point.
    #[error("evaluation error at (x = {x}, t = {t}): {message}")]
    Eval { message: String, x: f64, t: f64 },

    /// An iterative procedure did not reach the requested accuracy.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
