use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("missing column `{0}` in header")]
    MissingColumn(String),

    #[error("missing {field} at line {line}")]
    MissingField { field: &'static str, line: u64 },

    #[error("invalid {field} `{value}` at line {line}")]
    InvalidField {
        field: &'static str,
        value: String,
        line: u64,
    },

    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },

    #[error("header mismatch: expected `{expected}`, found `{found}`")]
    HeaderMismatch { expected: String, found: String },

    #[error("boundary {boundary} leaves the {side} side empty")]
    EmptySplit { boundary: String, side: &'static str },

    #[error("not enough benign records to undersample: {benign} benign < {malicious} malicious")]
    InsufficientBenign { benign: usize, malicious: usize },

    #[error("index {index} out of range for {len} records")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("node `{0}` is not in the graph")]
    UnknownNode(String),

    #[error("invalid block size {sigma} for {n} records")]
    InvalidBlockSize { sigma: usize, n: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("training data contains a single class")]
    SingleClass,

    #[error("non-finite feature value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("class with {count} samples is smaller than fold count {k}")]
    ClassTooSmall { count: usize, k: usize },

    #[error("missing features: {0}")]
    MissingFeatures(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
