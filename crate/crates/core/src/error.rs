use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{message} at line {line}")]
    Row { line: u64, message: String },

    #[error("missing required column `{0}`")]
    MissingColumn(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("free parameter vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("scoring-rate exponent {0} exceeds the overflow guard; the fit has likely diverged")]
    RateOverflow(f64),

    #[error("score grid capped at {cap} goals leaves {deficit:e} probability mass; use a larger cap")]
    Truncation { cap: u32, deficit: f64 },

    #[error("disconnected team `{0}`: no weighted matches in the training window")]
    DisconnectedTeam(String),

    #[error("unknown model class `{0}`")]
    UnknownModel(String),

    #[error("unknown team `{0}`")]
    UnknownTeam(String),

    #[error("{0}")]
    WrongModelKind(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("no matches to evaluate")]
    EmptyEvaluation,

    #[error("no matches in training set")]
    EmptyTrainingSet,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
