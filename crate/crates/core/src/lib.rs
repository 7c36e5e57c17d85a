//! l1-norm of coherence for multiqubit states and numerical auditing of the
//! superadditivity bounds built on it.
//!
//! The crate is organised bottom-up:
//!
//! - [`qmatrix`]: dense complex matrices, pure and mixed states, Kronecker
//!   products, qubit permutations, partial traces and a Jacobi eigensolver.
//! - [`coherence`]: the l1-norm of coherence and per-ordering coherence
//!   profiles (single-party marginals plus tail marginals).
//! - [`bounds`]: the power-weighted superadditivity bounds, their
//!   hypotheses, a parameter optimiser and a step-by-step chain auditor.
//! - [`ensembles`]: seeded, bit-reproducible random states.
//! - [`harness`]: verification campaigns, the alpha sweep and tightness
//!   comparisons.
//! - [`statefile`]: the JSON state-file format.
//!
//! Qubit indices in the library API are zero-based and qubit 0 is the most
//! significant bit of a basis index.

pub mod bounds;
pub mod coherence;
pub mod ensembles;
mod error;
pub mod harness;
pub mod qmatrix;
pub mod rng;
pub mod statefile;

pub use error::{Error, Result};
