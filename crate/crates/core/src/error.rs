use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: String },

    #[error("{function}: argument outside supported domain ({detail})")]
    Domain { function: &'static str, detail: String },

    #[error("invalid level {0}: must be a positive multiple of 4")]
    Level(i64),

    #[error("modulus {modulus} is not allowed here: {reason}")]
    Modulus { modulus: u64, reason: &'static str },

    #[error("matrix {0} is not in the required group")]
    NotInGroup(String),

    #[error("cusp {0} is not singular for this multiplier system")]
    NonSingularCusp(String),

    #[error("cusp {0} not found in the cusp list")]
    UnknownCusp(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("ill-conditioned system: {0}")]
    IllConditioned(String),

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}
