use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain an operation is defined on.
    #[error("{name} = {value} is outside the valid domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("degenerate argument: {0}")]
    Degenerate(&'static str),

    #[error("cluster powers sum to {sum}, expected 1")]
    Normalization { sum: f64 },

    #[error("quadrature did not reach tolerance: estimated error {achieved:e} exceeds {requested:e}")]
    ToleranceNotMet { achieved: f64, requested: f64 },

    #[error("|ACF| stays above {threshold} up to the search horizon of {horizon:e} s")]
    NotFound { threshold: f64, horizon: f64 },

    #[error("curve has no mirrored sample for path distance {0}")]
    Mismatch(f64),

    #[error("invalid array geometry: {0}")]
    Geometry(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain { name, value, expected }
    }
}
