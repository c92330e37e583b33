use thiserror::Error;

/// Exit status of a successful command.
pub const EXIT_OK: i32 = 0;
/// Exit status of a failure while running (I/O, network, numerical errors).
pub const EXIT_RUNTIME: i32 = 1;
/// Exit status of a usage or validation error.
pub const EXIT_INVALID: i32 = 2;

/// A malformed or out-of-range field of an experiment spec.
#[derive(Debug, Error)]
#[error("schema error at {path}: {message}")]
pub struct SchemaError {
    /// JSON path of the offending field, e.g. `.strategies[0].klir_lambda`.
    pub path: String,
    pub message: String,
}

impl SchemaError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaError {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// Input that is well-formed but cannot be used (e.g. a strategy the dataset
/// does not support).
#[derive(Debug, Error)]
#[error("{0}")]
pub struct ValidationError(pub String);

/// Maps an error to the process exit status.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.is::<SchemaError>() || err.is::<ValidationError>() {
        EXIT_INVALID
    } else {
        EXIT_RUNTIME
    }
}
