use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("could not sample a subspace of full dimension after {0} attempts")]
    RetriesExhausted(usize),

    #[error("{0} is not an odd prime below 2^31")]
    InvalidPrime(u32),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("invalid multinet: {0}")]
    InvalidMultinet(String),

    #[error("flat has {0} hyperplanes; local components need at least 3")]
    FlatTooSmall(usize),

    #[error("q = {q} is below the stable range (needs q >= {min})")]
    QTooSmall { q: usize, min: usize },

    #[error("computation routes disagree: {0}")]
    RouteDisagreement(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
