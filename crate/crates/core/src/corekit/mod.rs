//! Grids, fields, the Fourier convention, windows, time-frequency shifts and weights.

pub mod conventions;
pub mod corpus;
pub mod field;
pub mod fourier;
pub mod grid;
pub mod io;
pub mod shift;
pub mod weight;
pub mod window;

pub use field::Field;
pub use fourier::{fourier, inverse_fourier, Spectrum};
pub use grid::SpatialGrid;
pub use shift::{time_freq_shift, PhasePoint};
pub use weight::Weight;
pub use window::Window;
