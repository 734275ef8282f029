use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("unsupported pullback: {0}")]
    UnsupportedPullback(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("catalog error: {0}")]
    Catalog(String),
    #[error("not a local complete intersection: {0}")]
    NotLci(String),
    #[error("non-smooth source: {0}")]
    NonSmoothSource(String),
    #[error("base mismatch: {0}")]
    BaseMismatch(String),
    #[error("not composable: {0}")]
    NotComposable(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("schema error at line {line}, column {column}: {msg}")]
    Schema { line: usize, column: usize, msg: String },
}

impl Error {
    pub fn from_json(err: &serde_json::Error) -> Self {
        let (line, column) = (err.line(), err.column());
        let full = err.to_string();
        let msg = full
            .strip_suffix(&format!(" at line {line} column {column}"))
            .unwrap_or(&full)
            .to_string();
        Error::Schema { line, column, msg }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
