use std::ops::{Add, Index, IndexMut, Sub};

use serde::{Deserialize, Serialize};

use super::grid::SpatialGrid;
use crate::{Error, Result, C64};

/// Complex samples of a function on a [`SpatialGrid`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Field {
    grid: SpatialGrid,
    values: Vec<C64>,
}

impl Field {
    pub fn new(grid: SpatialGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.n()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("field"));
        }
        Ok(Self { grid, values })
    }

    /// Construction from trusted, already validated samples.
    pub(crate) fn from_vec(grid: SpatialGrid, values: Vec<C64>) -> Self {
        debug_assert_eq!(values.len(), grid.n());
        Self { grid, values }
    }

    pub fn zeros(grid: SpatialGrid) -> Self {
        Self { grid, values: vec![C64::new(0.0, 0.0); grid.n()] }
    }

    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> C64) -> Self {
        let values = (0..grid.n()).map(|j| f(grid.x(j))).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: SpatialGrid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| C64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `h Σ f_j conj(g_j)`.
    pub fn inner(&self, other: &Field) -> C64 {
        let s: C64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        s * self.grid.h()
    }

    /// Discrete `L²` norm `sqrt(h Σ |f_j|²)`.
    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.h()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&mut self, c: C64) {
        self.values.iter_mut().for_each(|v| *v *= c);
    }

    pub fn scaled(&self, c: C64) -> Field {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: C64, other: &Field) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn map(&self, f: impl Fn(f64, C64) -> C64) -> Field {
        let values =
            self.values.iter().enumerate().map(|(j, v)| f(self.grid.x(j), *v)).collect();
        Field::from_vec(self.grid, values)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Field) -> Field {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Field::from_vec(self.grid, values)
    }

    /// `‖self - other‖ / ‖other‖`.
    pub fn rel_err(&self, reference: &Field) -> f64 {
        let d = (self - reference).norm();
        let r = reference.norm();
        if r == 0.0 {
            d
        } else {
            d / r
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Largest modulus within `margin` of the periodic boundary.
    pub fn boundary_magnitude(&self, margin: f64) -> f64 {
        let half = 0.5 * self.grid.length();
        self.values
            .iter()
            .enumerate()
            .filter(|(j, _)| self.grid.x(*j).abs() >= half - margin)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// Checks that the field is negligible at `|x| = L/2` relative to its peak.
    pub fn ensure_localized(&self, tol: f64) -> Result<()> {
        let peak = self.max_abs();
        if peak == 0.0 {
            return Ok(());
        }
        let edge = self.boundary_magnitude(self.grid.h() * 1.5) / peak;
        if edge > tol {
            Err(Error::BoundaryLeak(edge))
        } else {
            Ok(())
        }
    }
}

impl Index<usize> for Field {
    type Output = C64;
    fn index(&self, j: usize) -> &C64 {
        &self.values[j]
    }
}

impl IndexMut<usize> for Field {
    fn index_mut(&mut self, j: usize) -> &mut C64 {
        &mut self.values[j]
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        let values = self.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect();
        Field::from_vec(self.grid, values)
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        let values = self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect();
        Field::from_vec(self.grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_length_and_nan() {
        let g = SpatialGrid::new(8.0, 16).unwrap();
        assert!(Field::new(g, vec![C64::new(0.0, 0.0); 15]).is_err());
        let mut v = vec![C64::new(0.0, 0.0); 16];
        v[3] = C64::new(f64::NAN, 0.0);
        assert!(matches!(Field::new(g, v), Err(Error::NonFinite(_))));
    }

    #[test]
    fn boundary_check() {
        let g = SpatialGrid::new(16.0, 256).unwrap();
        let ok = Field::from_real_fn(g, |x| (-std::f64::consts::PI * x * x).exp());
        assert!(ok.ensure_localized(1e-12).is_ok());
        let bad = Field::from_real_fn(g, |x| (-0.05 * x * x).exp());
        assert!(bad.ensure_localized(1e-12).is_err());
    }
}
