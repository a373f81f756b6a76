use std::f64::consts::PI;

use quadrature::double_exponential;
use serde::Serialize;

use crate::corekit::{Field, SpatialGrid, Window};
use crate::tfa::stft::stft_rows;
use crate::{Error, Result, C64};

/// Amplitude of the `L²`-normalized window `2^{1/4} e^{-πu²}`.
pub const NORMALIZED_AMPLITUDE: f64 = 1.189_207_115_002_721;

/// `|V_g(e^{it|·|²})(x, ξ)|` for `g = amplitude · e^{-πu²}`:
/// `amplitude · √π (π² + t²)^{-1/4} exp(-π(ξ - 2tx)² / (4(π² + t²)))`.
pub fn chirp_stft_modulus_with(amplitude: f64, t: f64, x: f64, xi: f64) -> f64 {
    let d = PI * PI + t * t;
    amplitude * PI.sqrt() * d.powf(-0.25) * (-PI * (xi - 2.0 * t * x).powi(2) / (4.0 * d)).exp()
}

/// [`chirp_stft_modulus_with`] for the normalized Gaussian window.
pub fn chirp_stft_modulus(t: f64, x: f64, xi: f64) -> f64 {
    chirp_stft_modulus_with(NORMALIZED_AMPLITUDE, t, x, xi)
}

/// The printed form `(1+s²)^{-1/4} exp(-(ξ - s x)² / (4π(1+s²)))`.
///
/// It equals [`chirp_stft_modulus_with`] at amplitude 1 under `t = π s`, `x ↦ 2π x`:
/// `chirp_stft_modulus_with(1, πs, x, ξ) = printed_chirp_modulus(s, 2πx, ξ)`.
pub fn printed_chirp_modulus(s: f64, x: f64, xi: f64) -> f64 {
    let d = 1.0 + s * s;
    d.powf(-0.25) * (-(xi - s * x).powi(2) / (4.0 * PI * d)).exp()
}

/// Human-readable statement of the constant map, embedded in reports.
pub const CHIRP_CONSTANT_MAP: &str =
    "|V_g e^{it x^2}|(x, xi) with g = e^{-pi u^2} equals the printed (1+s^2)^{-1/4} exp(-|xi - s X|^2/(4 pi (1+s^2))) at s = t/pi, X = 2 pi x";

/// `V_g(e^{it|·|²})(x, ξ) = ∫ e^{it(x+u)²} e^{-iξu} g(u) du` by double-exponential quadrature on `|u| ≤ 8`.
pub fn chirp_stft_quadrature(amplitude: f64, t: f64, x: f64, xi: f64, tol: f64) -> C64 {
    let integrand = |u: f64| C64::from_polar(amplitude * (-PI * u * u).exp(), t * (x + u).powi(2) - xi * u);
    let re = double_exponential::integrate(|u| integrand(u).re, -8.0, 8.0, tol).integral;
    let im = double_exponential::integrate(|u| integrand(u).im, -8.0, 8.0, tol).integral;
    C64::new(re, im)
}

/// Sampled check of the closed form against quadrature.
#[derive(Clone, Debug, Serialize)]
pub struct ChirpCheck {
    pub t: f64,
    pub points: usize,
    pub max_rel_err: f64,
    pub constant_map: &'static str,
    pub max_printed_mismatch: f64,
}

/// Compares the closed form to quadrature on `xs × xis` (relative to the ridge maximum).
pub fn chirp_check(t: f64, xs: &[f64], xis: &[f64]) -> ChirpCheck {
    let peak = chirp_stft_modulus_with(1.0, t, 0.0, 0.0);
    let mut max_rel_err: f64 = 0.0;
    let mut max_printed_mismatch: f64 = 0.0;
    for &x in xs {
        for &xi in xis {
            let closed = chirp_stft_modulus_with(1.0, t, x, xi);
            let quad = chirp_stft_quadrature(1.0, t, x, xi, 1e-14).norm();
            max_rel_err = max_rel_err.max((closed - quad).abs() / peak);
            let printed = printed_chirp_modulus(t / PI, 2.0 * PI * x, xi);
            max_printed_mismatch = max_printed_mismatch.max((closed - printed).abs());
        }
    }
    ChirpCheck {
        t,
        points: xs.len() * xis.len(),
        max_rel_err,
        constant_map: CHIRP_CONSTANT_MAP,
        max_printed_mismatch,
    }
}

/// Largest deviation of the grid STFT of `e^{itx²}` (normalized window) from the closed form over
/// interior rows `|x| ≤ L/2 - 4`, relative to the ridge maximum.
pub fn chirp_grid_error(grid: SpatialGrid, t: f64) -> Result<f64> {
    let reach = 0.5 * grid.length() - 4.0;
    if reach <= 0.0 || 2.0 * t.abs() * reach + 8.0 >= grid.nyquist() {
        return Err(Error::InvalidGrid(format!("grid cannot resolve the chirp at t = {t}")));
    }
    let g = crate::corekit::window::gaussian_window(grid)?;
    let f = Field::from_fn(grid, |x| C64::from_polar(1.0, t * x * x));
    let interior: Vec<usize> = (0..grid.n()).filter(|&j| grid.x(j).abs() <= reach).collect();
    let v = stft_rows(&f, &g, &interior)?;
    let peak = chirp_stft_modulus(t, 0.0, 0.0);
    let mut worst: f64 = 0.0;
    for (r, &j) in interior.iter().enumerate() {
        let x = grid.x(j);
        for k in 0..grid.n() {
            let want = chirp_stft_modulus(t, x, grid.fft_freq(k));
            worst = worst.max((v.at(r, k).norm() - want).abs() / peak);
        }
    }
    Ok(worst)
}

/// `sup_x |V_g(e^{it|·|²} - 1)(x, ξ)|` against the lower bound `e^{-ξ²/(4π)}`.
#[derive(Clone, Debug, Serialize)]
pub struct MinftyReport {
    pub t: f64,
    pub xis: Vec<f64>,
    pub sup: Vec<f64>,
    pub bound: Vec<f64>,
    /// `min_ξ (sup - bound)`.
    pub min_margin: f64,
}

impl MinftyReport {
    pub fn holds(&self, slack: f64) -> bool {
        self.min_margin >= -slack
    }
}

/// Evaluates the sup on the grid with the window `e^{-πu²}`, over interior positions
/// `|x| ≤ L/2 - 4` (the chirp is not periodic, so the wrap-around seam is excluded).
pub fn minfty_illposedness_demo(grid: SpatialGrid, t: f64, xis: &[f64]) -> Result<MinftyReport> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("t = {t} must be ≥ 0")));
    }
    let reach = 0.5 * grid.length() - 4.0;
    if reach <= 0.0 || 2.0 * t * reach >= grid.nyquist() {
        return Err(Error::InvalidGrid(format!("grid cannot resolve the chirp at t = {t}")));
    }
    let g = Window::raw_gaussian(grid)?;
    let f = Field::from_fn(grid, |x| C64::from_polar(1.0, t * x * x) - 1.0);
    let interior: Vec<usize> = (0..grid.n()).filter(|&j| grid.x(j).abs() <= reach).collect();
    let stft = stft_rows(&f, &g, &interior)?;
    let n = grid.n() as isize;
    let mut sup = Vec::with_capacity(xis.len());
    let mut bound = Vec::with_capacity(xis.len());
    let mut actual = Vec::with_capacity(xis.len());
    for &xi in xis {
        let m = (xi / grid.dxi()).round() as isize;
        let k = m.rem_euclid(n) as usize;
        sup.push((0..interior.len()).map(|r| stft.at(r, k).norm()).fold(0.0, f64::max));
        let xi = grid.fft_freq(k);
        actual.push(xi);
        bound.push((-xi * xi / (4.0 * PI)).exp());
    }
    let min_margin = sup.iter().zip(&bound).map(|(s, b)| s - b).fold(f64::INFINITY, f64::min);
    Ok(MinftyReport { t, xis: actual, sup, bound, min_margin })
}
