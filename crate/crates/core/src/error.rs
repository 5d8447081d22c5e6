use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("morphism is not well defined on the presented groups")]
    IllDefinedMorphism,
    #[error("component would raise the column filtration: {0}")]
    FiltrationViolation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("quasi-isomorphism hypothesis violated at degree {degree}")]
    QuasiIsoViolated { degree: i64 },
    #[error("internal invariant breach: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
