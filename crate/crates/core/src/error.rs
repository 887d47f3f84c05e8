use thiserror::Error;

use crate::rational::Rational;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("element is not invertible (zero series)")]
    NotInvertible,

    #[error("exponential argument is not in Λ₀ (negative valuation {0})")]
    NotInLambda0(Rational),

    #[error("invalid monoid: {0}")]
    InvalidMonoid(String),

    #[error("orbifold normalization has non-positive valuation {0}")]
    OrbifoldNormalization(Rational),

    #[error("linearized system is singular{0}")]
    SingularSystem(String),

    #[error("residual did not improve at level {level}")]
    ResidualRegression { level: Rational },

    #[error("Newton iteration failed: {0}")]
    NewtonDivergence(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("packing obstructed by area: {copies} copies of area {area} exceed the total area 1")]
    PackingObstructed { copies: u64, area: Rational },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of a numerical procedure rather than of input validation.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularSystem(_)
                | Error::ResidualRegression { .. }
                | Error::NewtonDivergence(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
