//! The single source of normalization constants.
//!
//! | quantity | value |
//! |---|---|
//! | Fourier transform | `f̂(ξ) = ∫ e^{-ixξ} f(x) dx` |
//! | inverse | `f(x) = (2π)^{-d} ∫ e^{ixξ} f̂(ξ) dξ` |
//! | time-frequency shift | `π(x, ω) f(y) = e^{iω(y-x)} f(y-x)` (`T_x M_ω`) |
//! | STFT | `V_g f(x, ω) = ⟨f, π(x, ω) g⟩`, conjugate linear in the second slot |
//! | Moyal | `∬ |V_g f|² dx dω = (2π)^d ‖f‖² ‖g‖²` |
//! | inversion | `f = (2π)^{-d} ∬ V_γ f(z) π(z) g dz / ⟨g, γ⟩` |
//! | Weyl | `a^w f(x) = (2π)^{-d} ∬ e^{i(x-y)ξ} a((x+y)/2, ξ) f(y) dy dξ` |
//! | modulation norm | `(2π)^{-d/2} ‖ ‖m V_g f‖_{L^p_x} ‖_{L^q_ω}` so that `M² = L²` |
//! | lattice cell weight | `αβ (2π)^{-d}` |
//! | Gaussian frame condition | `αβ < 2π` |

use std::f64::consts::PI;

/// Embedded in every report so results can be matched to the constants above.
pub const LEDGER_VERSION: &str = "angular-unnormalized/v1";

/// Spatial dimension exercised by the library.
pub const DIM: usize = 1;

/// `(2π)^{-d}`.
pub fn inversion_constant() -> f64 {
    (2.0 * PI).powi(-(DIM as i32))
}

/// `(2π)^{-d/2}`, the factor making the discrete `M^2` norm equal the `L^2` norm.
pub fn modulation_norm_constant() -> f64 {
    (2.0 * PI).powf(-(DIM as f64) / 2.0)
}

/// Riemann weight of one lattice cell, `αβ (2π)^{-d}`.
pub fn cell_weight(alpha: f64, beta: f64) -> f64 {
    alpha * beta * inversion_constant()
}

/// Critical density for Gaussian Gabor frames under this convention.
pub const CRITICAL_DENSITY: f64 = 2.0 * PI;
