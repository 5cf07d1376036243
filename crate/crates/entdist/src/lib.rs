//! # entdist
//!
//! Exact single-shot entanglement distillation and dilution for pure
//! bipartite states, driven entirely by their Schmidt coefficients.
//!
//! A pure bipartite state is characterised (up to local unitaries) by a
//! non-increasing probability vector `p` of Schmidt coefficients. This
//! crate computes, for `n` i.i.d. copies of such a state:
//!
//! - Ky-Fan norms `‖p^⊗n‖_(k)` (sum of the `k` largest entries) without
//!   ever materialising the `d^n`-entry product distribution, by grouping
//!   its polynomially many distinct values with exact big-integer
//!   multiplicities ([`tensorpower`]);
//! - the ε-single-shot distillable entanglement and entanglement cost,
//!   i.e. the largest/smallest maximally entangled dimension reachable
//!   within conversion error ε ([`singleshot`]);
//! - smoothed max-entropies of reduced states and of classical-quantum
//!   ensembles, including the pruning identity that evaluates them by
//!   truncation ([`singleshot`]);
//! - the fidelity of distillation and the alternative distillable
//!   entanglement built on the distillation norm ([`distillnorm`]);
//! - second-order Gaussian estimates `n·H ± Φ⁻¹(ε)·√(n·V)` for both
//!   quantities ([`asymptotics`]);
//! - slow, independent brute-force references for all of the above at
//!   desk scale, used by tests and the `verify` CLI command ([`oracle`]).
//!
//! All entanglement quantities are reported in bits (ebits), i.e. `log₂`
//! of the maximally entangled dimension.
//!
//! Integer answers (dimensions, thresholds, multiplicities) are exact
//! arbitrary-precision integers; masses and norms are `f64` with
//! compensated summation. Comparisons against analytically exact
//! boundaries carry an absolute tolerance of `1e-12` so that float
//! representations of exact ties do not flip integer results.

#![forbid(unsafe_code)]

use thiserror::Error;

pub mod asymptotics;
pub mod distillnorm;
mod math;
pub mod oracle;
pub mod probvec;
pub mod singleshot;
pub mod tensorpower;

pub use probvec::ProbVec;
pub use singleshot::{CqEnsemble, EntResult};
pub use tensorpower::{SearchStrategy, TensorPowerSpectrum};

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Input data fails validation (normalisation, negativity, ranges).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An index or parameter is outside its documented domain.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// A computation would exceed the configured resource guard.
    #[error("resource limit: {0}")]
    ResourceLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
