use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("undefined constant `{0}`")]
    UndefinedConstant(String),
    #[error("unguarded recursion through constant `{0}`")]
    Unguarded(String),
    #[error("not well-formed: {0}")]
    IllFormed(String),
    #[error("cannot translate net: {0}")]
    Translate(String),
    #[error("transition system is incomplete: {0}")]
    Incomplete(String),
}

pub type Result<T> = std::result::Result<T, Error>;
