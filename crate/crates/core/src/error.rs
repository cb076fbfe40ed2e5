use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// Working precision was exhausted before a certified answer was reached.
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    /// A finite continued fraction ran out of partial quotients.
    #[error("finite expansion exhausted after {available} partial quotients")]
    FiniteExpansion { available: usize },

    /// `r^n` coincides with the requested circle point.
    #[error("eigen-collision: r^{n} equals lambda")]
    EigenCollision { n: u64 },

    /// A quantity left the range that can be represented, even in log form.
    #[error("beyond representable range: {0}")]
    BeyondRange(String),

    /// A textual descriptor could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn precision(msg: impl Into<String>) -> Self {
        Error::InsufficientPrecision(msg.into())
    }

    pub fn is_precision_failure(&self) -> bool {
        matches!(self, Error::InsufficientPrecision(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
