//! Associative memory with Kuramoto-type phase oscillators.
//!
//! A set of binary patterns is stored in a network of N coupled oscillators
//! through the Hebbian rule; each pattern corresponds to a bipolar
//! equilibrium of the gradient flow, and a tunable second-harmonic term
//! decides which of those equilibria are stable. The crate provides:
//!
//! - [`pattern`]: binary/grayscale patterns and the agreement index sets
//!   behind the closed-form spectra;
//! - [`network`]: Hebbian coupling construction, the flow's vector field and
//!   potential, bipolar states, and the overlap diagnostic;
//! - [`spectral`]: analytic Jacobian eigenspectra for two- and three-memory
//!   networks, a Jacobi eigensolver oracle, critical second-harmonic
//!   strengths, and stability classification;
//! - [`dynamics`]: fixed-step integration with convergence detection and the
//!   exponential basin certificate;
//! - [`retrieval`]: the subgrouping tournament that retrieves a standard
//!   pattern from a defective query without spurious outputs.

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod network;
pub mod pattern;
pub mod retrieval;
pub mod spectral;

pub use dynamics::{
    basin_certificate, diameter, init_from_gray, integrate, shifted_state, BasinCertificate,
    IntegratorConfig, Trajectory, TrajectorySample,
};
pub use error::{ModelError, Result};
pub use network::{bipolar_state, overlap, HebbianNetwork, PhaseState};
pub use pattern::{
    hamming, index_sets_three, index_sets_two, sign_equivalent, BinaryPattern, GrayPattern,
    ThreeMemoryIndexSets, TwoMemoryIndexSets,
};
pub use retrieval::{
    retrieve_pair, subgroup, tournament, Pairing, RetrievalOutcome, RoundRecord, Subgroup,
    TournamentConfig,
};
pub use spectral::{
    analytic_spectrum_memory_m2, analytic_spectrum_memory_m3, analytic_spectrum_pattern_m2,
    bisect_critical_epsilon, classify, critical_epsilon_m2, critical_epsilon_m3, jacobian,
    legacy_epsilon_lower_bound, numeric_spectrum, spectrum, CriticalEpsilon, EpsilonRegime,
    SpectrumReport, SpectrumSource, Stability, StabilityVerdict,
};
