use thiserror::Error;

/// Every failure the library reports.
///
/// `Undefined` is not a bug: it is the result of a partial function applied
/// outside its domain (a non-monotone unfold, a non-linear normalisation, a
/// relabelling that assigns no update). The CLI maps it to exit code 1.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("type error: {0}")]
    Type(String),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("malformed value: {0}")]
    Structural(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid: {0}")]
    Validation(String),
    #[error("undefined: {0}")]
    Undefined(String),
}

impl Error {
    pub fn is_undefined(&self) -> bool {
        matches!(self, Error::Undefined(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(format!($($arg)*)))
    };
}
pub(crate) use bail;
