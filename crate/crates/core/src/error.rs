use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid membership function: {0}")]
    InvalidMembership(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("empty dataset")]
    EmptyDataset,
    #[error("input column {column} has zero range")]
    ConstantColumn { column: usize },
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("series too short: need at least {needed} values, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
    #[error("intensity {intensity} for concept `{concept}` is outside [0, 1]")]
    IntensityOutOfRange { concept: String, intensity: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("all forecasting branches failed (dl: {dl}; fcm: {fcm})")]
    AllBranchesFailed { dl: String, fcm: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
