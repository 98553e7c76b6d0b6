use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("node id {id} out of range for {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },

    #[error("mobility spec does not match node states: {0}")]
    SpecMismatch(String),

    #[error("cut is empty")]
    EmptyCut,

    #[error("cut of size {size} exceeds floor({n}/2)")]
    CutTooLarge { size: usize, n: usize },

    #[error("exhaustive cut enumeration is limited to n <= {max}, got {n}")]
    TooManyNodes { n: usize, max: usize },

    #[error("trace has no available edges; edge use ratio is undefined")]
    NoEdgesAvailable,

    #[error("empty trace")]
    EmptyTrace,

    #[error("no crossing in [{lo}, {hi}]: t_spr({lo}) = {lo_time:?}, t_spr({hi}) = {hi_time:?}, target {target}")]
    NoCrossing {
        lo: f64,
        hi: f64,
        lo_time: Option<u64>,
        hi_time: Option<u64>,
        target: u64,
    },

    #[error("spreading time is not monotone in intensity: {0}")]
    NonMonotone(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}
