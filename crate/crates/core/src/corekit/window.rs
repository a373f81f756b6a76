use std::f64::consts::PI;

use super::field::Field;
use super::grid::SpatialGrid;
use crate::{Error, Result, C64};

/// Analytic description of a window, when one exists.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WindowShape {
    /// `amplitude · exp(-π (x / width)²)`.
    Gaussian { amplitude: f64, width: f64 },
    Sampled,
}

/// A window function together with its samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    field: Field,
    normalized: bool,
    shape: WindowShape,
}

/// Relative amplitude below which window samples are treated as zero.
const SUPPORT_CUTOFF: f64 = 1e-17;

impl Window {
    pub fn from_field(field: Field) -> Self {
        let normalized = (field.norm() - 1.0).abs() <= 1e-12;
        Self { field, normalized, shape: WindowShape::Sampled }
    }

    /// Gaussian profile `amplitude · e^{-π(x/width)²}`.
    pub fn gaussian_profile(grid: SpatialGrid, amplitude: f64, width: f64) -> Result<Self> {
        let edge = (-PI * (0.5 * grid.length() / width).powi(2)).exp();
        if edge > 1e-14 {
            return Err(Error::InvalidGrid(format!(
                "grid too narrow for the Gaussian window: boundary value {edge:e}"
            )));
        }
        let field = Field::from_real_fn(grid, |x| amplitude * (-PI * (x / width).powi(2)).exp());
        let normalized = (field.norm() - 1.0).abs() <= 1e-12;
        Ok(Self { field, normalized, shape: WindowShape::Gaussian { amplitude, width } })
    }

    /// The un-normalized window `e^{-πx²}`.
    pub fn raw_gaussian(grid: SpatialGrid) -> Result<Self> {
        Self::gaussian_profile(grid, 1.0, 1.0)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn grid(&self) -> &SpatialGrid {
        self.field.grid()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn shape(&self) -> WindowShape {
        self.shape
    }

    /// `g_τ(x) = g(x/τ)` (not re-normalized).
    pub fn dilated(&self, tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!("dilation τ = {tau} must be positive")));
        }
        match self.shape {
            WindowShape::Gaussian { amplitude, width } => {
                Self::gaussian_profile(*self.grid(), amplitude, width * tau)
            }
            WindowShape::Sampled => Err(Error::InvalidParameter(
                "dilation needs an analytic window".into(),
            )),
        }
    }

    /// Radius outside which the window is below `1e-17` of its peak.
    pub fn support_radius(&self) -> f64 {
        match self.shape {
            WindowShape::Gaussian { width, .. } => width * (17.0 * 10f64.ln() / PI).sqrt(),
            WindowShape::Sampled => {
                let grid = self.grid();
                let peak = self.field.max_abs();
                (0..grid.n())
                    .filter(|&j| self.field[j].norm() > SUPPORT_CUTOFF * peak)
                    .map(|j| grid.x(j).abs())
                    .fold(0.0, f64::max)
                    + grid.h()
            }
        }
    }

    /// `‖g‖₂` (discrete).
    pub fn norm(&self) -> f64 {
        self.field.norm()
    }

    /// Value at an arbitrary offset; sampled windows use the nearest sample.
    pub fn value_at(&self, u: f64) -> C64 {
        match self.shape {
            WindowShape::Gaussian { amplitude, width } => {
                C64::new(amplitude * (-PI * (u / width).powi(2)).exp(), 0.0)
            }
            WindowShape::Sampled => self.field[self.grid().nearest_index(u)],
        }
    }
}

/// L²-normalized samples of `e^{-πx²}`.
pub fn gaussian_window(grid: SpatialGrid) -> Result<Window> {
    let raw = Window::raw_gaussian(grid)?;
    let amp = 1.0 / raw.norm();
    Window::gaussian_profile(grid, amp, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_norm_is_two_to_minus_quarter() {
        let grid = SpatialGrid::new(16.0, 256).unwrap();
        let raw = Window::raw_gaussian(grid).unwrap();
        assert!((raw.norm() - 2f64.powf(-0.25)).abs() < 1e-10);
    }

    #[test]
    fn normalized_window() {
        let grid = SpatialGrid::new(16.0, 256).unwrap();
        let g = gaussian_window(grid).unwrap();
        assert!(g.is_normalized());
        assert!((g.norm() - 1.0).abs() < 1e-12);
        assert!((g.field()[128].re - 2f64.powf(0.25)).abs() < 1e-9);
    }

    #[test]
    fn narrow_grid_rejected() {
        let grid = SpatialGrid::new(4.0, 64).unwrap();
        assert!(gaussian_window(grid).is_err());
    }
}
