use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not a permutation of 1..={len}{}", row.map(|r| format!(" (row {r})")).unwrap_or_default())]
    InvalidPermutation { len: usize, row: Option<usize> },

    #[error("invalid item set: {0}")]
    InvalidItemSet(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("no posterior draws available")]
    EmptySamples,

    #[error("item {item} appears in the probability set but in no draw; choose a smaller k")]
    ZeroInclusion { item: usize },

    #[error("malformed data file: {0}")]
    DataFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
