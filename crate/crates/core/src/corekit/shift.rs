//! Time-frequency shifts `π(x, ω) = T_x M_ω` and fast local atom kernels.

use serde::{Deserialize, Serialize};

use super::field::Field;
use super::fourier::spectral_translate;
use super::grid::SpatialGrid;
use super::window::{Window, WindowShape};
use crate::C64;

/// A point `z = (x, ξ)` of phase space.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub xi: f64,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { x: 0.0, xi: 0.0 };

    pub fn new(x: f64, xi: f64) -> Self {
        Self { x, xi }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.xi)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.xi.is_finite()
    }
}

impl std::ops::Add for PhasePoint {
    type Output = PhasePoint;
    fn add(self, o: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.x + o.x, self.xi + o.xi)
    }
}

impl std::ops::Sub for PhasePoint {
    type Output = PhasePoint;
    fn sub(self, o: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.x - o.x, self.xi - o.xi)
    }
}

fn is_grid_multiple(grid: &SpatialGrid, x: f64) -> Option<isize> {
    let m = x / grid.h();
    let r = m.round();
    ((m - r).abs() < 1e-9).then_some(r as isize)
}

/// Circular shift by an integer number of samples: `out[j] = f[j - m]`.
pub(crate) fn rotate(values: &[C64], m: isize) -> Vec<C64> {
    let n = values.len() as isize;
    (0..n).map(|j| values[(j - m).rem_euclid(n) as usize]).collect()
}

/// `π(z) f (y) = e^{iξ(y-x)} f(y-x)`; off-grid translations are band-limited.
///
/// The modulation uses the wrapped offset `y - x ∈ [-L/2, L/2)`, which is exact
/// wherever the translated field is not negligible.
pub fn time_freq_shift(z: PhasePoint, f: &Field) -> Field {
    let grid = *f.grid();
    if z.x == 0.0 && z.xi == 0.0 {
        return f.clone();
    }
    let translated = match is_grid_multiple(&grid, z.x) {
        Some(m) => Field::from_vec(grid, rotate(f.values(), m)),
        None => spectral_translate(f, z.x),
    };
    if z.xi == 0.0 {
        return translated;
    }
    translated.map(|y, v| v * C64::from_polar(1.0, z.xi * grid.wrap(y - z.x)))
}

/// Accumulates `coeff · π(z)[p · g]` into `out`, where `g` is a Gaussian window and `p`
/// the polynomial `c0 + c1 u`. Only samples within the window support are touched.
#[allow(clippy::too_many_arguments)]
pub(crate) fn add_gaussian_atom(
    out: &mut [C64],
    grid: &SpatialGrid,
    amplitude: f64,
    width: f64,
    radius: f64,
    z: PhasePoint,
    coeff: C64,
    poly: (C64, C64),
) {
    let n = grid.n() as isize;
    let h = grid.h();
    let xw = grid.wrap(z.x);
    let j0 = ((xw + 0.5 * grid.length()) / h).round() as isize;
    let base = -0.5 * grid.length() + j0 as f64 * h - xw;
    let m = (radius / h).ceil() as isize;
    let a = std::f64::consts::PI / (width * width);
    let u0 = base - m as f64 * h;
    let mut gauss = amplitude * (-a * u0 * u0).exp();
    let mut ratio = (-a * (2.0 * u0 * h + h * h)).exp();
    let ratio_step = (-2.0 * a * h * h).exp();
    let mut phase = coeff * C64::from_polar(1.0, z.xi * u0);
    let phase_step = C64::from_polar(1.0, z.xi * h);
    let count = (2 * m + 1).min(n);
    for k in 0..count {
        let u = u0 + k as f64 * h;
        let idx = (j0 - m + k).rem_euclid(n) as usize;
        out[idx] += phase * gauss * (poly.0 + poly.1 * u);
        gauss *= ratio;
        ratio *= ratio_step;
        phase *= phase_step;
    }
}

/// `s_out += coeff · π(z)g` and `d_out += coeff · π(z)[(c0 + c1 u) g]` in one pass.
#[allow(clippy::too_many_arguments)]
pub(crate) fn add_gaussian_atom_pair(
    s_out: &mut [C64],
    d_out: &mut [C64],
    grid: &SpatialGrid,
    amplitude: f64,
    width: f64,
    radius: f64,
    z: PhasePoint,
    coeff: C64,
    poly: (C64, C64),
) {
    let n = grid.n() as isize;
    let h = grid.h();
    let xw = grid.wrap(z.x);
    let j0 = ((xw + 0.5 * grid.length()) / h).round() as isize;
    let base = -0.5 * grid.length() + j0 as f64 * h - xw;
    let m = (radius / h).ceil() as isize;
    let a = std::f64::consts::PI / (width * width);
    let u0 = base - m as f64 * h;
    let mut gauss = amplitude * (-a * u0 * u0).exp();
    let mut ratio = (-a * (2.0 * u0 * h + h * h)).exp();
    let ratio_step = (-2.0 * a * h * h).exp();
    let mut phase = coeff * C64::from_polar(1.0, z.xi * u0);
    let phase_step = C64::from_polar(1.0, z.xi * h);
    let count = (2 * m + 1).min(n);
    let mut idx = (j0 - m).rem_euclid(n) as usize;
    for k in 0..count {
        let u = u0 + k as f64 * h;
        let v = phase * gauss;
        s_out[idx] += v;
        d_out[idx] += v * (poly.0 + poly.1 * u);
        gauss *= ratio;
        ratio *= ratio_step;
        phase *= phase_step;
        idx += 1;
        if idx == n as usize {
            idx = 0;
        }
    }
}

/// `⟨f, π(z)[p · g]⟩` for a Gaussian `g` and `p(u) = c0 + c1 u`, summed over the window support.
pub(crate) fn gaussian_atom_inner(
    f: &[C64],
    grid: &SpatialGrid,
    amplitude: f64,
    width: f64,
    radius: f64,
    z: PhasePoint,
    poly: (C64, C64),
) -> C64 {
    let n = grid.n() as isize;
    let h = grid.h();
    let xw = grid.wrap(z.x);
    let j0 = ((xw + 0.5 * grid.length()) / h).round() as isize;
    let base = -0.5 * grid.length() + j0 as f64 * h - xw;
    let m = (radius / h).ceil() as isize;
    let a = std::f64::consts::PI / (width * width);
    let u0 = base - m as f64 * h;
    let mut gauss = amplitude * (-a * u0 * u0).exp();
    let mut ratio = (-a * (2.0 * u0 * h + h * h)).exp();
    let ratio_step = (-2.0 * a * h * h).exp();
    let mut phase = C64::from_polar(1.0, -z.xi * u0);
    let phase_step = C64::from_polar(1.0, -z.xi * h);
    let mut acc = C64::new(0.0, 0.0);
    let count = (2 * m + 1).min(n);
    let (c0, c1) = (poly.0.conj(), poly.1.conj());
    for k in 0..count {
        let idx = (j0 - m + k).rem_euclid(n) as usize;
        let u = u0 + k as f64 * h;
        acc += f[idx] * phase * gauss * (c0 + c1 * u);
        gauss *= ratio;
        ratio *= ratio_step;
        phase *= phase_step;
    }
    acc * h
}

const ONE_POLY: (C64, C64) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));

/// Precomputed access to `π(z) g` for a fixed window.
///
/// Gaussian windows are evaluated in closed form at any `z`; sampled windows are
/// exact for grid-aligned `x` and use band-limited translation otherwise.
#[derive(Clone, Debug)]
pub struct AtomKernel {
    window: Window,
    radius: f64,
    /// Indices (offsets from the origin sample) where a sampled window is non-negligible.
    sampled_support: Vec<(isize, C64)>,
}

impl AtomKernel {
    pub fn new(window: &Window) -> Self {
        let radius = window.support_radius();
        let grid = window.grid();
        let center = (grid.n() / 2) as isize;
        let sampled_support = match window.shape() {
            WindowShape::Gaussian { .. } => Vec::new(),
            WindowShape::Sampled => {
                let m = (radius / grid.h()).ceil() as isize;
                (-m..=m)
                    .map(|d| {
                        let idx = (center + d).rem_euclid(grid.n() as isize) as usize;
                        (d, window.field()[idx])
                    })
                    .collect()
            }
        };
        Self { window: window.clone(), radius, sampled_support }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `⟨f, π(z) g⟩`.
    pub fn inner(&self, f: &Field, z: PhasePoint) -> C64 {
        let grid = f.grid();
        match self.window.shape() {
            WindowShape::Gaussian { amplitude, width } => {
                gaussian_atom_inner(f.values(), grid, amplitude, width, self.radius, z, ONE_POLY)
            }
            WindowShape::Sampled => match is_grid_multiple(grid, z.x) {
                Some(m) => {
                    let n = grid.n() as isize;
                    let h = grid.h();
                    let j0 = (grid.n() / 2) as isize + m;
                    let mut acc = C64::new(0.0, 0.0);
                    for &(d, gv) in &self.sampled_support {
                        let idx = (j0 + d).rem_euclid(n) as usize;
                        let u = d as f64 * h;
                        acc += f[idx] * (C64::from_polar(1.0, z.xi * u) * gv).conj();
                    }
                    acc * h
                }
                None => f.inner(&time_freq_shift(z, self.window.field())),
            },
        }
    }

    /// Gaussian parameters `(amplitude, width)` when the window is analytic.
    pub fn gaussian(&self) -> Option<(f64, f64)> {
        match self.window.shape() {
            WindowShape::Gaussian { amplitude, width } => Some((amplitude, width)),
            WindowShape::Sampled => None,
        }
    }

    /// `out += coeff · π(z)[(c0 + c1 u) g]`; Gaussian windows only.
    pub fn accumulate_poly(&self, out: &mut [C64], grid: &SpatialGrid, z: PhasePoint, coeff: C64, poly: (C64, C64)) {
        let (amplitude, width) = self.gaussian().expect("polynomial atoms need a Gaussian window");
        add_gaussian_atom(out, grid, amplitude, width, self.radius, z, coeff, poly);
    }

    /// [`Self::accumulate`] into `s_out` and [`Self::accumulate_poly`] into `d_out` together.
    pub fn accumulate_pair(
        &self,
        s_out: &mut [C64],
        d_out: &mut [C64],
        grid: &SpatialGrid,
        z: PhasePoint,
        coeff: C64,
        poly: (C64, C64),
    ) {
        let (amplitude, width) = self.gaussian().expect("polynomial atoms need a Gaussian window");
        add_gaussian_atom_pair(s_out, d_out, grid, amplitude, width, self.radius, z, coeff, poly);
    }

    /// `⟨f, π(z)[(c0 + c1 u) g]⟩`; Gaussian windows only.
    pub fn inner_poly(&self, f: &Field, z: PhasePoint, poly: (C64, C64)) -> C64 {
        let (amplitude, width) = self.gaussian().expect("polynomial atoms need a Gaussian window");
        gaussian_atom_inner(f.values(), f.grid(), amplitude, width, self.radius, z, poly)
    }

    /// `out += coeff · π(z) g`.
    pub fn accumulate(&self, out: &mut [C64], grid: &SpatialGrid, z: PhasePoint, coeff: C64) {
        match self.window.shape() {
            WindowShape::Gaussian { amplitude, width } => add_gaussian_atom(
                out,
                grid,
                amplitude,
                width,
                self.radius,
                z,
                coeff,
                ONE_POLY,
            ),
            WindowShape::Sampled => match is_grid_multiple(grid, z.x) {
                Some(m) => {
                    let n = grid.n() as isize;
                    let h = grid.h();
                    let j0 = (grid.n() / 2) as isize + m;
                    for &(d, gv) in &self.sampled_support {
                        let idx = (j0 + d).rem_euclid(n) as usize;
                        out[idx] += coeff * C64::from_polar(1.0, z.xi * d as f64 * h) * gv;
                    }
                }
                None => {
                    let atom = time_freq_shift(z, self.window.field());
                    for (o, a) in out.iter_mut().zip(atom.values()) {
                        *o += coeff * a;
                    }
                }
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::corekit::window::gaussian_window;

    fn grid() -> SpatialGrid {
        SpatialGrid::new(16.0, 256).unwrap()
    }

    #[test]
    fn identity_shift() {
        let f = Field::from_fn(grid(), |x| C64::new((-x * x).exp(), x.sin() * (-x * x).exp()));
        assert_eq!(time_freq_shift(PhasePoint::ORIGIN, &f), f);
    }

    #[test]
    fn modulus_is_translation() {
        let f = Field::from_real_fn(grid(), |x| (-PI * x * x).exp() * (1.0 + 0.3 * x));
        let z = PhasePoint::new(1.3, 2.7);
        let a = time_freq_shift(z, &f);
        let b = time_freq_shift(PhasePoint::new(1.3, 0.0), &f);
        for j in 0..a.len() {
            assert!((a[j].norm() - b[j].norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_kernel_matches_generic_shift() {
        let g = gaussian_window(grid()).unwrap();
        let kernel = AtomKernel::new(&g);
        let z = PhasePoint::new(-2.21, 3.3);
        let mut out = vec![C64::new(0.0, 0.0); 256];
        kernel.accumulate(&mut out, &grid(), z, C64::new(1.0, 0.0));
        let generic = time_freq_shift(z, g.field());
        let err = out.iter().zip(generic.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        let f = Field::from_real_fn(grid(), |x| (-0.7 * x * x).exp());
        assert!((kernel.inner(&f, z) - f.inner(&generic)).norm() < 1e-12);
    }

    #[test]
    fn sampled_kernel_matches_generic_shift() {
        let g = Window::from_field(gaussian_window(grid()).unwrap().field().clone());
        let kernel = AtomKernel::new(&g);
        let z = PhasePoint::new(1.5, -0.8);
        let mut out = vec![C64::new(0.0, 0.0); 256];
        kernel.accumulate(&mut out, &grid(), z, C64::new(1.0, 0.0));
        let generic = time_freq_shift(z, g.field());
        let err = out.iter().zip(generic.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
    }
}
