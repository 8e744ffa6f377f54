//! Desk-scale toolkit for studying how the internal entanglement of a small
//! qubit register relates to its von Neumann entropy after pure dephasing
//! against a thermal bosonic mode.
//!
//! The crate is organized around five pieces:
//!
//! - [`statevec`]: dense and sparse-support complex state vectors, reduced
//!   density matrices, and spectral entropy.
//! - [`interaction`]: per-qubit coupling operators, the pointer basis of the
//!   collective coupling, the exact infinite-time dephasing map, and the
//!   finite-time evolution with its decoherence factors.
//! - [`measures`]: entanglement and occupation functionals of pure states
//!   (entanglement entropy, global entanglement, purity, mean excitation).
//! - [`sampling`]: seeded random-state ensembles: Haar, separable,
//!   cluster products, energy-constrained rejection sampling, and
//!   generalized Dicke states.
//! - [`stats`]: scatter statistics for (entanglement, entropy) ensembles:
//!   means, variances, Pearson correlation, straight-line fits, and binned
//!   average curves.
//!
//! All operations are pure functions on immutable inputs and are safe to call
//! concurrently. Samplers are reproducible: a `(seed, stream)` pair pins the
//! full draw sequence.

pub mod error;
pub mod interaction;
pub mod measures;
pub mod sampling;
pub mod statevec;
pub mod stats;

pub use error::{Error, Result};
