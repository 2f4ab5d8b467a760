//! Energy-constrained distillability of few-body spin states.
//!
//! Dimensionless Hamiltonians, state samplers, the distillability and WCEC
//! predicates, target-energy ranges and the Monte Carlo estimators built on
//! them.

pub mod distill;
pub mod error;
pub mod hamiltonian;
pub mod montecarlo;
pub mod range;
pub mod states;
pub mod tensor;

pub use error::{Error, Result};

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
