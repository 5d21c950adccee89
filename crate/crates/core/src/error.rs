use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid type list: {0}")]
    InvalidTypeList(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("vanishing: {0}")]
    Vanishing(String),
    #[error("edge counts differ: |n_b| = {black}, |n_w| = {white}")]
    SizeMismatch { black: u32, white: u32 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid dessin: {}", .0.join("; "))]
    InvalidDessin(Vec<String>),
    #[error("insufficient data: need {needed} admissible coefficients, have {have}")]
    InsufficientData { needed: usize, have: usize },
    #[error("inconsistent fit: {0}")]
    InconsistentFit(String),
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),
    #[error("zero series")]
    ZeroSeries,
}

pub type Result<T> = std::result::Result<T, Error>;
