use thiserror::Error;

/// Errors raised by the library. Every public operation validates its
/// inputs up front and reports the first violated precondition.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid code parameters (n={n}, m={m}): both must be at least 1")]
    InvalidCode { n: u32, m: u32 },

    #[error("{name} must lie in [0, 1], got {value}")]
    ProbabilityOutOfRange { name: &'static str, value: String },

    #[error("bit vector length must be at least 1")]
    EmptyLength,

    #[error("{what} exceeds capacity: {value} > {limit}")]
    CapacityExceeded {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("outcome grid has {actual} entries, code needs {expected}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("loss count {mu} out of range 0..={max}")]
    LossCountOutOfRange { mu: u32, max: u32 },

    #[error("number of trials must be at least 1")]
    NoTrials,

    #[error("invalid chain configuration: {0}")]
    InvalidChain(String),

    #[error("chain success probability is zero, cost is undefined")]
    DegenerateCost,

    #[error("search space is empty: {0}")]
    EmptySearchSpace(String),

    #[error("no configuration in the search space has nonzero success probability")]
    NoViableConfiguration,

    #[error("target rate {target} unreachable: perfect sources give only {best}")]
    TargetUnreachable { target: f64, best: f64 },

    #[error("optics oracle inconsistent: {0}")]
    OpticsInconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange {
            name,
            value: value.to_string(),
        })
    }
}
