//! Short-time Fourier transforms, Gabor frames, modulation norms and symbol envelopes.

pub mod envelope;
pub mod frame;
pub mod lattice;
pub mod norm;
pub mod stft;

pub use envelope::{dilated_window_mass, sjostrand_envelope, EnvelopeFn};
pub use frame::{dual_window, frame_bounds, FrameOperator};
pub use lattice::{gabor_analysis, gabor_coefficients, gabor_synthesis, GaborCoeffs, PhaseLattice};
pub use norm::{mixed_norm, modulation_norm};
pub use stft::{change_window_check, stft, StftGrid};
