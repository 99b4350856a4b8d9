use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// Two patterns that must differ beyond a global sign are equal up to sign.
    /// Indices refer to positions in the offending memory list.
    #[error("memories {first} and {second} coincide up to sign")]
    AntipodalMemories { first: usize, second: usize },

    #[error("second-harmonic strength must be a nonnegative number, got {0}")]
    NegativeEpsilon(f64),

    #[error("operation requires exactly {expected} memories, network has {found}")]
    WrongMemoryCount { expected: usize, found: usize },

    /// The probe pattern is one of the memories; use the memory spectrum instead.
    #[error("pattern coincides with memory {0} up to sign")]
    IsMemory(usize),

    #[error("matrix is not symmetric: max |a_ij - a_ji| = {0:e}")]
    NotSymmetric(f64),

    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),

    /// A three-memory statement was invoked outside its hypothesis.
    #[error("three-memory hypothesis violated: {0}")]
    HypothesisViolated(String),

    /// Every memory attains maximal overlap with the probe, so the legacy
    /// lower bound has no well-defined denominator.
    #[error("probe coincides with every memory up to sign; bound undefined")]
    DegenerateOverlap,

    #[error("gray value {value} at index {index} lies outside [-1, 1]")]
    OutOfRange { index: usize, value: f64 },

    #[error("state became non-finite at t = {0}")]
    NonFiniteState(f64),

    #[error("no memory reached the overlap threshold: m1 = {m1:.6}, m2 = {m2:.6}")]
    NoRetrieval { m1: f64, m2: f64 },

    #[error("round {round}: no memory reached the overlap threshold: m1 = {m1:.6}, m2 = {m2:.6}")]
    NoRetrievalInRound { round: usize, m1: f64, m2: f64 },

    /// Cannot happen at a terminal equilibrium of a two-memory network with
    /// distinct memories, but guarded against anyway.
    #[error("both memories exceeded the overlap threshold: m1 = {m1:.6}, m2 = {m2:.6}")]
    AmbiguousRetrieval { m1: f64, m2: f64 },

    #[error("invalid parameter: {0}")]
    ParameterOutOfRange(String),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;
