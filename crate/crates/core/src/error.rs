use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown category `{0}`")]
    UnknownCategory(String),

    #[error("gamma must lie in [{min}, 1), got {value}")]
    InvalidGamma { value: f64, min: f64 },

    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("the Guthrie scheme needs exactly two categories, got {0}")]
    NotPairwise(usize),

    #[error("cluster {0} is empty")]
    EmptyCluster(usize),

    #[error("token sequence is empty")]
    EmptyTokens,

    #[error("word `{0}` has zero probability under every cluster")]
    UncoveredWord(String),

    #[error("no usable training tokens for the {0} side")]
    EmptySide(String),

    #[error("epsilon grid must be non-empty, start at 0 and be strictly increasing")]
    InvalidGrid,

    #[error("decision refers to unknown {kind} `{name}`")]
    UnknownDecision { kind: &'static str, name: String },

    #[error("unsupported model schema version {0}")]
    SchemaVersion(u32),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
