use thiserror::Error;

use crate::quantum::PovmViolation;

/// Errors raised by the information and bound computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("invalid weight function: {0}")]
    InvalidWeight(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("outcome {0} is not in the outcome space")]
    UnknownOutcome(String),

    #[error("marginal p(x) = {marginal:e} is degenerate")]
    DegenerateMarginal { marginal: f64 },

    #[error("likelihood p(x|theta) vanishes at theta = {theta}")]
    ZeroLikelihood { theta: f64 },

    #[error("prior density vanishes or is undefined at theta = {theta}")]
    OutsideSupport { theta: f64 },

    #[error("theta = {theta} lies outside the finite support [{a}, {b}]")]
    ThetaOutsideSupport { theta: f64, a: f64, b: f64 },

    #[error("bound requires a finite-support prior")]
    RequiresFiniteSupport,

    #[error("weight function vanishes at theta = {theta}")]
    ZeroWeightAtTheta { theta: f64 },

    #[error("outcome grid mass {mass} is outside [0.999, 1.001] at theta = {theta}")]
    UnnormalizedOutcomeSpace { mass: f64, theta: f64 },

    #[error("lambda functional is negative ({value:e}); sensitivity is below the squared score")]
    NegativeLambda { value: f64 },

    #[error("bound kind needs a quantum sensitivity, but the model provides none")]
    NotQuantum,

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid demon record: {0}")]
    InvalidRecord(String),

    #[error("diffusion coefficient must be positive, got {0}")]
    NonPositiveDiffusion(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix dimension {0} exceeds the supported maximum of 16")]
    DimensionTooLarge(usize),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("support of rho is ambiguous: eigenvalue {0:e} is close to the rank threshold")]
    IllConditioned(f64),

    #[error("outcome {outcome} has probability {probability:e}, too small for a conditional QFI")]
    ZeroOutcomeProbability { outcome: usize, probability: f64 },

    #[error("invalid POVM: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidPovm(Vec<PovmViolation>),
}

pub type Result<T> = std::result::Result<T, Error>;
