use thiserror::Error;

/// Errors raised by the constructions in this crate.
///
/// Verification mismatches are not errors: they are reported through
/// [`crate::verify::VerificationReport`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("0/0 is not a number")]
    ZeroOverZero,
    #[error("negative component in {0}/{1}")]
    Negative(i64, i64),
    #[error("cannot parse rational {0:?}, expected p/q")]
    Parse(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("mediant needs a < b, got {0} and {1}")]
    NotIncreasing(String, String),
    #[error("slope {0} outside (0, inf)")]
    SlopeDomain(String),
    #[error("slope {xi} is a breakpoint of size ({m},{n}); the ranking table is not injective")]
    Breakpoint { xi: String, m: u32, n: u32 },
    #[error("invalid interval {0}")]
    InvalidInterval(String),
    #[error("the root has no parent")]
    Root,
    #[error("invalid terminal pair {0}")]
    InvalidPair(String),
    #[error("{0} is not a terminal pair of difference equation type")]
    NotTerminal(String),
    #[error("{0} is not a Young terminal pair")]
    NotYoung(String),
    #[error("malformed L-shape: {0}")]
    MalformedLShape(String),
    #[error("size ({m},{n}) exceeds the enumeration guard m+n <= {guard}")]
    Guard { m: u32, n: u32, guard: u32 },
    #[error("vertex budget of {0} exceeded")]
    Budget(usize),
    #[error("tree structure violated: {0}")]
    Structure(String),
    #[error("malformed tree document: {0}")]
    Document(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
