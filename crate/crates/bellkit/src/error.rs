//! Error type shared across the crate.

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A stated precondition of a bound does not hold; names the violated
    /// condition.
    #[error("validity error in {check}: condition `{condition}` violated")]
    Validity {
        check: &'static str,
        condition: String,
    },

    /// A configurable resource cap would be exceeded. Never truncates
    /// silently.
    #[error("resource limit exceeded: requested index {requested}, cap {cap}")]
    ResourceLimit { requested: u64, cap: u64 },

    /// The working precision is insufficient to certify the result; the
    /// caller should escalate precision.
    #[error("indeterminate: {0} (increase precision)")]
    Indeterminate(String),

    /// Interval intersection came out empty. This signals an implementation
    /// bug or a precision shortfall and is surfaced, never clamped.
    #[error("empty enclosure intersection at n = {n}")]
    EmptyIntersection { n: u64 },

    /// An iteration failed to converge. Must not happen for arguments in
    /// the supported domain; treated as a bug signal.
    #[error("iteration failed to converge: {0}")]
    NonConvergence(String),

    /// Malformed run configuration.
    #[error("configuration error: {0}")]
    Config(String),
}
