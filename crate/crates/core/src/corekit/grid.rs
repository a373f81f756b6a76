use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform periodic grid on `[-L/2, L/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    length: f64,
    n: usize,
}

impl SpatialGrid {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("non-positive length L = {length}")));
        }
        if !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if n < 8 {
            return Err(Error::InvalidGrid(format!("n = {n} is below the minimum of 8")));
        }
        Ok(Self { length, n })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1
    }

    /// Spacing `h = L / n`.
    pub fn h(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Dual spacing `Δξ = 2π / L`.
    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// `π / h`; the band is `[-π/h, π/h)`.
    pub fn nyquist(&self) -> f64 {
        PI / self.h()
    }

    pub fn x(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.h()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Frequency of FFT bin `k` (FFT ordering: non-negative first).
    pub fn fft_freq(&self, k: usize) -> f64 {
        let k = k as isize;
        let n = self.n as isize;
        let signed = if k < n / 2 { k } else { k - n };
        signed as f64 * self.dxi()
    }

    pub fn fft_freqs(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.fft_freq(k)).collect()
    }

    /// Ascending frequencies `(k - n/2) Δξ`, `k = 0..n`.
    pub fn sorted_freq(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.dxi()
    }

    /// Maps an offset to `[-L/2, L/2)`.
    pub fn wrap(&self, x: f64) -> f64 {
        let l = self.length;
        (x + 0.5 * l).rem_euclid(l) - 0.5 * l
    }

    /// Nearest grid index of a (wrapped) position.
    pub fn nearest_index(&self, x: f64) -> usize {
        let j = ((self.wrap(x) + 0.5 * self.length) / self.h()).round() as isize;
        j.rem_euclid(self.n as isize) as usize
    }

    pub fn same_as(&self, other: &SpatialGrid) -> bool {
        self.n == other.n && (self.length - other.length).abs() <= 1e-12 * self.length
    }

    pub fn ensure_same(&self, other: &SpatialGrid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "(L={}, n={}) vs (L={}, n={})",
                self.length, self.n, other.length, other.n
            )))
        }
    }
}

/// `make_grid`.
pub fn make_grid(length: f64, n: usize) -> Result<SpatialGrid> {
    SpatialGrid::new(length, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_dual_spacing() {
        let g = make_grid(16.0, 256).unwrap();
        assert_eq!(g.h(), 0.0625);
        assert!((g.dxi() - std::f64::consts::PI / 8.0).abs() < 1e-15);
        assert_eq!(g.x(0), -8.0);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(make_grid(16.0, 255), Err(Error::NotPowerOfTwo(255))));
        assert!(make_grid(16.0, 255).unwrap_err().to_string().contains("n not a power of two"));
        assert!(make_grid(0.0, 256).is_err());
        assert!(make_grid(-1.0, 256).is_err());
        assert!(make_grid(1.0, 4).is_err());
    }

    #[test]
    fn band_edge() {
        let g = make_grid(2.0 * PI * 8.0, 512).unwrap();
        assert!((g.nyquist() - 32.0).abs() < 1e-12);
        assert!((g.sorted_freq(0) + 32.0).abs() < 1e-12);
    }

    #[test]
    fn wrap_and_nearest() {
        let g = make_grid(16.0, 256).unwrap();
        assert!((g.wrap(9.0) + 7.0).abs() < 1e-12);
        assert_eq!(g.nearest_index(-8.0), 0);
        assert_eq!(g.nearest_index(0.0), 128);
        assert_eq!(g.fft_freq(255), -g.dxi());
    }
}
