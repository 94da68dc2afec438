//! Error type shared by all library modules.

use thiserror::Error;

/// Library-wide error enum.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input data violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A profile was queried at a negative coordinate.
    #[error("coordinate {z} is outside the profile domain [0, inf)")]
    OutOfDomain { z: f64 },

    /// The exact solution was evaluated at or past its pole.
    #[error("coordinate {z} is at or past the pole at {z_star}")]
    PoleDomain { z: f64, z_star: f64 },

    /// Closed-form solution parameters outside their validity region.
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// Initial data with a vanishing field or derivative.
    #[error("degenerate initial data: c0 and c1 must both be nonzero")]
    DegenerateInitialData,

    /// Bound machinery invoked on data that does not satisfy its hypotheses.
    #[error("bound not applicable: {0}")]
    InapplicableBound(String),

    /// Argument outside the domain of a monotone transform.
    #[error("domain error: {0}")]
    DomainError(String),

    /// Integrator configuration fails validation.
    #[error("invalid integrator config: {0}")]
    InvalidConfig(String),

    /// Non-finite state encountered outside of blow-up handling.
    #[error("non-finite field value at z = {z}")]
    NonFinite { z: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
