//! Phase-space propagation of Schrödinger-type equations `D_t u + a^w(t, x, D) u = 0`
//! with rough symbols.
//!
//! Gabor atoms are transported along the Hamiltonian flow of the principal symbol,
//! the defect of that approximation is removed by a Volterra correction, and every
//! intermediate object (short-time Fourier transforms, modulation norms, Gabor
//! matrices, envelopes) is available as a diagnostic.
//!
//! Conventions are collected in [`corekit::conventions`]; all modules use them.

pub mod corekit;
pub mod error;
pub mod hamflow;
pub mod nonlinear;
pub mod parametrix;
pub mod reference;
pub mod tfa;
pub mod weyl;

pub use error::{Error, Result};

pub use num_complex::Complex64 as C64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
