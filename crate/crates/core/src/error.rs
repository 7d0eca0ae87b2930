use thiserror::Error;

/// Errors raised by the numerical layers (scale, terms, relations, solver, Markov).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A term coordinate or its unit image lies outside the scale.
    #[error("coordinate {coordinate} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        coordinate: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// Componentwise term addition left the scale.
    #[error("term addition overflows the scale: {0}")]
    Overflow(String),

    /// A scalar parameter was outside its admissible range.
    #[error("parameter {name} = {value} is outside [{min}, {max}]")]
    Parameter {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// A malformed interval, term set or literal.
    #[error("invalid term: {0}")]
    InvalidTerm(String),

    #[error("density is not finite at unit value {at}")]
    NonFiniteDensity { at: f64 },

    #[error("cannot fuse distinct point terms at unit values {a} and {b}")]
    DegenerateFusion { a: f64, b: f64 },

    #[error("probabilities sum to zero")]
    EmptyEvidence,

    #[error("trust degrees sum to zero")]
    EmptyTrust,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index error: {0}")]
    Index(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("matrix is not row-stochastic: {0}")]
    NotStochastic(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("grid oracle supports at most 4 unknowns with step >= 1e-3 (got {dim} unknowns, step {step})")]
    OracleScope { dim: usize, step: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
