//! Uniform asymptotic approximation for the one-dimensional and radial
//! Schrödinger equation.

// `!(a < b)` is used on purpose so that NaN fails the guard
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod jet;
pub mod numerics;
pub mod oracle;
pub mod potentials;
pub mod semiclassical;
pub mod specfun;
pub mod wavefunction;

pub use error::{Error, Result};

/// Library version recorded in every artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
