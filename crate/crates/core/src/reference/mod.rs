//! Independent oracles: split-step Fourier solver, fractional symbol splitting and closed forms.

pub mod chirp;
pub mod closed;
pub mod fractional;
pub mod split_step;

pub use chirp::{
    chirp_check, chirp_grid_error, chirp_stft_modulus, chirp_stft_modulus_with, chirp_stft_quadrature, minfty_illposedness_demo,
    printed_chirp_modulus, ChirpCheck, MinftyReport, CHIRP_CONSTANT_MAP,
};
pub use closed::{free_gaussian, weierstrass_exponent, weierstrass_potential, weierstrass_value};
pub use fractional::{fractional_symbol_split, FractionalSplit};
pub use split_step::{split_step, split_step_trajectory, split_step_with, PotentialSamples, SplitStepConfig};

#[cfg(test)]
mod tests;
