use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mode: {0}")]
    InvalidMode(String),

    #[error("invalid antenna configuration: {0}")]
    InvalidAntenna(String),

    #[error("degenerate port {port} at {phi_deg} deg (zero gain)")]
    DegeneratePort { port: u32, phi_deg: f64 },

    #[error("degenerate port {port} at LU direction {phi_deg} deg (zero gain)")]
    DegeneratePortAtLu { port: u32, phi_deg: f64 },

    #[error("weight count {weights} does not match port count {ports}")]
    WeightCountMismatch { weights: usize, ports: usize },

    #[error("invalid step {0} deg: must be positive and divide 360")]
    InvalidStep(f64),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("pattern csv line {line}, column {column}: {message}")]
    PatternCsv {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid shadowing mask: {0}")]
    InvalidShadowing(String),

    #[error("odd bit count {0}: QPSK needs bit pairs")]
    OddBitCount(usize),

    #[error("port {0} not present in pattern")]
    UnknownPort(u32),

    #[error("invalid session: {0}")]
    InvalidSession(String),

    #[error("invalid sweep data: {0}")]
    InvalidSweep(String),
}
