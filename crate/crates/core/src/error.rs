use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unbalanced degree totals: sum of in-degrees {heads} vs out-degrees {tails} (deficit {deficit})")]
    Balance { heads: u64, tails: u64, deficit: i64 },

    #[error("invalid {field}: {msg}")]
    Validation { field: String, msg: String },

    #[error("cannot realize degree sequence: {0}")]
    Realization(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("numerical failure: {msg} (residual {residual:e})")]
    Numerical { msg: String, residual: f64 },

    #[error("stationary distribution is not unique: {0}")]
    NonUnique(String),

    #[error("all {reps} walks were censored at {step_cap} steps")]
    Censored { reps: usize, step_cap: u64 },

    #[error("vertex {y} is not hit almost surely from {x}; the hitting time is infinite")]
    Unreachable { x: usize, y: usize },

    #[error("tree truncated at generation {generation}; gamma undefined at t={requested}")]
    Truncation { generation: usize, requested: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            msg: msg.into(),
        }
    }

    /// Process exit code: 2 validation, 3 numerical, 4 capacity, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Balance { .. }
            | Error::Validation { .. }
            | Error::Realization(_)
            | Error::Degenerate(_)
            | Error::Argument(_)
            | Error::Config(_)
            | Error::Parse { .. } => 2,
            Error::Numerical { .. }
            | Error::NonUnique(_)
            | Error::Censored { .. }
            | Error::Unreachable { .. }
            | Error::Truncation { .. } => 3,
            Error::Capacity(_) => 4,
            Error::Io(_) | Error::Csv(_) => 1,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        }
    }
}
