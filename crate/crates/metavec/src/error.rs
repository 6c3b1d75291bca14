use std::io;

/// Errors raised while reading or writing files.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: invalid UTF-8")]
    Utf8 { line: usize },
    #[error("empty input")]
    Empty,
    #[error("line {line}: malformed header `{text}`")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: expected {expected} values, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
    #[error("line {line}: invalid number `{value}`")]
    BadNumber { line: usize, value: String },
    #[error("line {line}: non-finite value `{value}`")]
    NonFinite { line: usize, value: String },
    #[error("line {line}: duplicate token `{token}`")]
    DuplicateToken { line: usize, token: String },
    #[error("header announces {expected} words but the input holds {found}")]
    HeaderCount { expected: usize, found: usize },
    #[error("byte {offset}: input ends in the middle of {what}")]
    Truncated { offset: u64, what: &'static str },
    #[error("byte {offset}: unexpected data after the last announced word")]
    TrailingData { offset: u64 },
    #[error("byte {offset}: non-finite value for `{token}`")]
    NonFiniteBinary { offset: u64, token: String },
    #[error("word {index}: duplicate token `{token}`")]
    DuplicateBinaryToken { index: usize, token: String },
    #[error("token `{0}` contains whitespace and cannot be written")]
    UnrepresentableToken(String),
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error(transparent)]
    Space(#[from] metavec_core::Error),
}
