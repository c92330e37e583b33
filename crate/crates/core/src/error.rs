use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("masses sum to {sum}, expected 1")]
    SumNotOne { sum: f64 },

    #[error("the empty set cannot carry positive mass")]
    EmptyFocal,

    #[error("subset refers to class index {index} but the frame has {frame_size} classes")]
    BadSubset { index: usize, frame_size: usize },

    #[error("mass {value} is not a finite non-negative number")]
    NegativeMass { value: f64 },

    #[error("mass functions are defined on different frames")]
    FrameMismatch,

    #[error("cannot combine an empty list of mass functions")]
    EmptyList,

    #[error("total conflict between sources (conflict = {conflict})")]
    TotalConflict { conflict: f64 },

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("need at least {needed} training instances, got {got}")]
    TooFewInstances { needed: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("the unlabeled pool is empty")]
    EmptyPool,

    #[error("instance {0} is already labeled")]
    AlreadyLabeled(usize),

    #[error("dataset `{0}` has no rich labels")]
    NoRichLabel(String),

    #[error("accuracy curve is empty")]
    EmptyCurve,

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("line {line}: unknown class `{class}`")]
    UnknownClass { line: usize, class: String },

    #[error("rich label `{text}`: {message}")]
    RichLabelSyntax { text: String, message: String },

    #[error("samples have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("differences are constant and non-zero, the t statistic is undefined")]
    ZeroVariance,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("strategy `{strategy}` does not support {classes} classes")]
    UnsupportedStrategy { strategy: String, classes: usize },

    #[error("{context}: {message}")]
    Io { context: String, message: String },

    #[error("checksum mismatch for {path}: expected {expected}, got {actual}")]
    Checksum {
        path: PathBuf,
        expected: String,
        actual: String,
    },

    #[error("dataset `{0}` not found")]
    DatasetNotFound(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(context: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Error::Io {
            context: context.into(),
            message: err.to_string(),
        }
    }
}
