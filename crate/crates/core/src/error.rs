use thiserror::Error;

/// Errors surfaced by the library. Diagnostic results (model violations,
/// degenerate least-squares rows) are returned as values, not errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("model is invalid: {0}")]
    InvalidModel(String),

    #[error(
        "{what} did not converge within {iterations} iterations (last increment {increment:e})"
    )]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        increment: f64,
    },

    #[error("simulation exceeded the event cap of {cap} events at time {time}")]
    EventCapExceeded { cap: usize, time: f64 },

    #[error("time {t} is outside the log window [{t_start}, {t_end}]")]
    OutsideWindow { t: f64, t_start: f64, t_end: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
