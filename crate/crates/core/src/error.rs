use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("matrix has {rows} rows but there are {tokens} tokens")]
    RowCountMismatch { rows: usize, tokens: usize },
    #[error("matrix data length {len} is not a multiple of dimension {dim}")]
    RaggedMatrix { len: usize, dim: usize },
    #[error("embedding dimension must be at least 1")]
    ZeroDimension,
    #[error("duplicate token `{0}`")]
    DuplicateToken(String),
    #[error("non-finite value in row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("shape mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    ShapeMismatch { left_rows: usize, left_cols: usize, right_rows: usize, right_cols: usize },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("empty vocabulary intersection: the spaces have no token in common")]
    EmptyIntersection,
    #[error("mapping dictionary has no usable pairs ({filtered} filtered as absent from the spaces)")]
    EmptyDictionary { filtered: usize },
    #[error("token `{0}` not in vocabulary")]
    UnknownToken(String),
    #[error("token `{0}` is already present in the receiving space")]
    AlreadyPresent(String),
    #[error("no candidate neighbours for `{0}`")]
    NoCandidates(String),
    #[error("vector for `{0}` is zero; cosine is undefined")]
    ZeroVector(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("index {index} out of range for {len} sources")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("prefix `{0}` contains whitespace")]
    InvalidPrefix(String),
    #[error("need at least {needed} items, got {got}")]
    TooFew { needed: usize, got: usize },
}
