use thiserror::Error;

/// Errors produced by measure construction, fitness evaluation, and the
/// limit solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("atom has non-finite coordinate: location {location}, mass {mass}")]
    NonFiniteAtom { location: f64, mass: f64 },

    #[error("atom mass {mass} at location {location} is negative")]
    NegativeMass { location: f64, mass: f64 },

    #[error("atom location {location} lies outside [0, {bound}]")]
    LocationOutOfBounds { location: f64, bound: f64 },

    #[error("operation requires a nonempty measure")]
    EmptyMeasure,

    #[error("measure with total mass {total_mass} is not a probability measure")]
    NotProbability { total_mass: f64 },

    #[error("exp moment overflow: t * upper_support = {product} exceeds 700")]
    ExpOverflow { product: f64 },

    #[error("degenerate population: no mass at positive locations")]
    DegeneratePopulation,

    #[error("beta must lie in (0,1), got {0}")]
    InvalidBeta(f64),

    #[error("gamma must exceed 1, got {0}")]
    InvalidGamma(f64),

    #[error("invalid family spec: {0}")]
    InvalidFamily(String),

    #[error("stopping rule invalid: {0}")]
    InvalidStoppingRule(String),

    #[error("truncation point must be positive, got {0}")]
    InvalidTruncation(f64),

    #[error("criterion value {criterion} is not above 1; limit has no interior root (case 2)")]
    CriterionNotAboveOne { criterion: f64 },

    #[error("root bracketing failed: {0}")]
    BracketFailure(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
