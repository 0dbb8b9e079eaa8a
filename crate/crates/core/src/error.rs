use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParam { key: String, reason: String },

    #[error("vertex {v} out of range (must be < {bound})")]
    VertexOutOfRange { v: u64, bound: u64 },

    #[error("edge index {j} out of range for m = {m}")]
    EdgeIndexOutOfRange { j: u32, m: u32 },

    #[error("graph is at state {actual}, query needs {expected}")]
    StateMismatch { expected: String, actual: String },

    #[error("probability {0} outside (0, 1]")]
    ProbabilityDomain(f64),

    #[error("theory domain: {0}")]
    TheoryDomain(String),

    #[error("ledger: {0}")]
    Ledger(String),

    #[error("layer plan: {0}")]
    LayerPlan(String),

    #[error("distribution spec `{spec}`: {reason}")]
    DistSpec { spec: String, reason: String },

    #[error("snapshot: {0}")]
    Snapshot(String),

    #[error("snapshot checksum mismatch (expected {expected}, found {found})")]
    Checksum { expected: String, found: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn param(key: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParam { key: key.to_string(), reason: reason.into() }
    }
}
