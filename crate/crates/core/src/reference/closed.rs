use std::f64::consts::PI;

use crate::corekit::{Field, SpatialGrid};
use crate::weyl::{Profile, TrigTerm};
use crate::{Error, Result, C64};

/// Free evolution (`a = ξ²`) of `u₀(x) = e^{-(x-x₀)²/(2s²)} e^{iξ₀x}`:
/// `u(t,x) = (s²/(s²+2it))^{1/2} exp(-(x - x₀ - 2ξ₀t)²/(2(s²+2it))) e^{iξ₀x - iξ₀²t}`.
pub fn free_gaussian(grid: SpatialGrid, t: f64, x0: f64, xi0: f64, s: f64) -> Field {
    let s2 = C64::new(s * s, 0.0);
    let q = s2 + C64::new(0.0, 2.0 * t);
    let pre = (s2 / q).sqrt();
    Field::from_fn(grid, |x| {
        let y = x - x0 - 2.0 * xi0 * t;
        pre * (-(y * y) / (2.0 * q)).exp() * C64::from_polar(1.0, xi0 * x - xi0 * xi0 * t)
    })
}

/// `Σ_{j=0}^{terms-1} 2^{-j} cos(3^j x)` as a trigonometric profile whose frequencies are folded
/// into the grid band. On the grid it agrees with the unfolded sum exactly; this requires every
/// `3^j` to be a multiple of `2π/L`.
pub fn weierstrass_potential(grid: &SpatialGrid, terms: usize) -> Result<Profile> {
    let period = 2.0 * PI / grid.length();
    let band = 2.0 * grid.nyquist();
    let mut out = Vec::with_capacity(terms);
    for j in 0..terms {
        let freq = 3f64.powi(j as i32);
        let ratio = freq / period;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidGrid(format!("3^{j} is not a multiple of 2π/L")));
        }
        let mut folded = freq.rem_euclid(band);
        if folded > 0.5 * band {
            folded -= band;
        }
        // The x-origin of the grid is -L/2: cos(ω x_m) is unchanged by folding only if ω L/2 ≡ ω' L/2 mod 2π.
        let shift = (freq - folded) * 0.5 * grid.length();
        let phase = (shift / (2.0 * PI)).round() * 2.0 * PI - shift;
        if phase.abs() > 1e-6 {
            return Err(Error::InvalidGrid(format!("folding 3^{j} changes the sampled phase")));
        }
        out.push(TrigTerm { amp: 0.5f64.powi(j as i32), freq: folded.abs(), phase: 0.0 });
    }
    Ok(Profile::Trig { terms: out })
}

/// The unfolded sum `Σ_{j<terms} 2^{-j} cos(3^j x)`.
pub fn weierstrass_value(x: f64, terms: usize) -> f64 {
    (0..terms).map(|j| 0.5f64.powi(j as i32) * (3f64.powi(j as i32) * x).cos()).sum()
}

/// Hölder exponent `log 2 / log 3` of the Weierstrass sum.
pub fn weierstrass_exponent() -> f64 {
    2f64.ln() / 3f64.ln()
}
