//! FFT wrappers under the angular, un-normalized Fourier convention.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::field::Field;
use super::grid::SpatialGrid;
use crate::C64;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn plan_forward(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

pub(crate) fn plan_inverse(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// Unnormalized forward DFT in place.
pub(crate) fn fft_in_place(buf: &mut [C64]) {
    plan_forward(buf.len()).process(buf);
}

/// Unnormalized inverse DFT in place (no `1/n`).
pub(crate) fn ifft_in_place(buf: &mut [C64]) {
    plan_inverse(buf.len()).process(buf);
}

/// Samples of `f̂` on the grid frequencies, in FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub grid: SpatialGrid,
    pub values: Vec<C64>,
}

impl Spectrum {
    pub fn freq(&self, k: usize) -> f64 {
        self.grid.fft_freq(k)
    }

    /// `(ξ_k, f̂(ξ_k))` pairs in ascending frequency.
    pub fn sorted(&self) -> Vec<(f64, C64)> {
        let n = self.grid.n();
        (0..n)
            .map(|i| {
                let k = (i + n / 2) % n;
                (self.grid.fft_freq(k), self.values[k])
            })
            .collect()
    }
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `f̂(ξ_k) ≈ ∫ e^{-ixξ_k} f(x) dx`: the FFT times `h` with the `(-1)^k` phase of the
/// `-L/2` offset.
pub fn fourier(f: &Field) -> Spectrum {
    let grid = *f.grid();
    let mut buf = f.values().to_vec();
    fft_in_place(&mut buf);
    let h = grid.h();
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= h * sign(k);
    }
    Spectrum { grid, values: buf }
}

/// Inverse of [`fourier`], including the `(2π)^{-1}` factor.
pub fn inverse_fourier(s: &Spectrum) -> Field {
    let grid = s.grid;
    let mut buf: Vec<C64> =
        s.values.iter().enumerate().map(|(k, v)| v * sign(k)).collect();
    ifft_in_place(&mut buf);
    let c = 1.0 / grid.length();
    buf.iter_mut().for_each(|v| *v *= c);
    Field::from_vec(grid, buf)
}

/// Applies the Fourier multiplier `σ(D)`.
pub fn apply_multiplier(f: &Field, sigma: impl Fn(f64) -> C64) -> Field {
    let grid = *f.grid();
    let n = grid.n();
    let mut buf = f.values().to_vec();
    fft_in_place(&mut buf);
    let inv_n = 1.0 / n as f64;
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= sigma(grid.fft_freq(k)) * inv_n;
    }
    ifft_in_place(&mut buf);
    Field::from_vec(grid, buf)
}

/// Spectral derivative `D f = -i f'`.
pub fn spectral_d(f: &Field) -> Field {
    let n = f.grid().n();
    let nyq = f.grid().fft_freq(n / 2);
    apply_multiplier(f, |xi| if xi == nyq { C64::new(0.0, 0.0) } else { C64::new(xi, 0.0) })
}

/// Band-limited translation `f(· - a)` for any real `a`.
pub fn spectral_translate(f: &Field, a: f64) -> Field {
    apply_multiplier(f, |xi| C64::from_polar(1.0, -a * xi))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn gaussian_transform() {
        let grid = SpatialGrid::new(16.0, 256).unwrap();
        let f = Field::from_real_fn(grid, |x| (-PI * x * x).exp());
        let s = fourier(&f);
        let err = (0..grid.n())
            .map(|k| {
                let xi = s.freq(k);
                (s.values[k] - C64::new((-xi * xi / (4.0 * PI)).exp(), 0.0)).norm()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "err {err}");
    }

    #[test]
    fn shift_theorem() {
        let grid = SpatialGrid::new(16.0, 256).unwrap();
        let a = 0.37;
        let f = Field::from_real_fn(grid, |x| (-PI * x * x).exp());
        let tf = Field::from_real_fn(grid, |x| (-PI * (x - a) * (x - a)).exp());
        let (s, ts) = (fourier(&f), fourier(&tf));
        for k in 0..grid.n() {
            let expect = C64::from_polar(1.0, -a * s.freq(k)) * s.values[k];
            assert!((ts.values[k] - expect).norm() < 1e-10);
        }
    }

    #[test]
    fn parseval() {
        let grid = SpatialGrid::new(16.0, 128).unwrap();
        let f = Field::from_fn(grid, |x| C64::new((-x * x).exp(), x * (-x * x).exp()));
        let s = fourier(&f);
        let lhs = f.norm().powi(2);
        let rhs: f64 = s.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.dxi() / (2.0 * PI);
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn translation_matches_samples() {
        let grid = SpatialGrid::new(16.0, 256).unwrap();
        let f = Field::from_real_fn(grid, |x| (-PI * x * x).exp());
        let t = spectral_translate(&f, 1.2345);
        let expect = Field::from_real_fn(grid, |x| (-PI * (x - 1.2345f64).powi(2)).exp());
        assert!((&t - &expect).max_abs() < 1e-12);
    }
}
