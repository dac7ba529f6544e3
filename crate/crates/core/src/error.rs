use thiserror::Error;

/// Errors raised across the laboratory modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("missing problem metadata: {0}")]
    Metadata(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("{what} = {value} outside valid range [{lo}, {hi}]")]
    Range {
        what: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("integration failed at t = {last_t}: {reason}")]
    Integration { last_t: f64, reason: String },

    #[error("oracle returned a non-finite value at t = {0}")]
    OracleFailure(f64),

    #[error("quadrature self-error {estimate} exceeds tolerance {tolerance}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("terminal analysis failed: {0}")]
    TerminalAnalysis(String),

    #[error("degenerate run: {0}")]
    DegenerateRun(String),

    #[error("index error: {0}")]
    Index(String),
}

pub type Result<T> = std::result::Result<T, Error>;
