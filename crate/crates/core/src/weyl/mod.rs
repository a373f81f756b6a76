//! Weyl quantization, symbol models, commutator identities and Gabor matrices.

pub mod apply;
pub mod gabor;
pub mod profile;
pub mod symbol;

pub use apply::{apply_sampled, commutator_check, weyl_apply, CommutatorReport};
pub use gabor::{gabor_matrix, position_momentum_bound, GaborMatrix};
pub use profile::{cutoff, FractionalPiece, Profile, TrigTerm};
pub use symbol::{Order, QuadPoly, SampledSymbol, SymbolModel, SymbolPart, TimeSample};
