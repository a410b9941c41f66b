use std::path::PathBuf;

/// Every failure the library can report.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("scenario `{scenario}` requires parameter `{name}`")]
    MissingParameter { scenario: String, name: String },

    #[error("unknown {kind} `{id}`; valid ids: {valid}")]
    UnknownId {
        kind: &'static str,
        id: String,
        valid: String,
    },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("noise schedule exhausted at t={t}: no coordinate left in dimension {dim}")]
    ScheduleExhausted { t: usize, dim: usize },

    #[error("adversary returned noise of norm {norm} at t={t}, above delta={delta}")]
    ContractViolation { t: usize, norm: f64, delta: f64 },

    #[error("component index {index} out of range 1..={m}")]
    IndexOutOfRange { index: usize, m: usize },

    #[error("incompatible configuration: {0}")]
    Incompatible(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("empty trajectory")]
    EmptyTrajectory,

    #[error("config error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn unknown(kind: &'static str, id: &str, valid: &[&str]) -> Self {
        Error::UnknownId {
            kind,
            id: id.to_string(),
            valid: valid.join(", "),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
