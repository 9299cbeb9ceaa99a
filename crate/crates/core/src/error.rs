use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Instance text did not contain the announced number of entries.
    #[error("malformed instance: expected {expected} cost entries, found {found}")]
    MalformedInstance { expected: usize, found: usize },

    /// A cost entry was negative.
    #[error("negative weight {value} at entry {position}")]
    NegativeWeight { value: i64, position: usize },

    /// A token could not be read as an integer.
    #[error("token {position} ({token:?}) is not an integer")]
    ParseToken { position: usize, token: String },

    /// Caller passed arguments outside an operation's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Brute-force enumeration refused an instance above its size cap.
    #[error("instance size {n} exceeds brute-force limit {limit}")]
    SizeLimit { n: usize, limit: usize },

    /// A claimed matching is not a permutation of the servers.
    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    /// Requested per-cell perturbation cannot keep values inside
    /// `[min(A), max(A)]`.
    #[error("infeasible perturbation magnitude: {0}")]
    InfeasibleMagnitude(String),

    /// An online algorithm read a column before its arrival.
    #[error("protocol violation: {algorithm} read column {column} at step {step} before it arrived")]
    ProtocolViolation {
        algorithm: String,
        step: usize,
        column: usize,
    },

    /// A zero-cost perfect matching makes the competitive ratio undefined.
    #[error("degenerate optimum: OPT cost is 0, competitive ratio undefined")]
    DegenerateOptimum,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
