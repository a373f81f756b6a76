use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::corekit::conventions::cell_weight;
use crate::corekit::fourier::{plan_forward, plan_inverse};
use crate::corekit::{Field, PhasePoint, SpatialGrid, Window};
use crate::{Error, Result, C64};

/// Separable lattice `αZ × βZ` truncated to `|x| ≤ X_max`, `|ξ| ≤ Ξ_max`.
///
/// `α` must be a multiple of `h` dividing `L`, and `β` a multiple of `Δξ` dividing the band
/// `2π/h`, so the untruncated lattice is a finite group on the periodic grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseLattice {
    grid: SpatialGrid,
    alpha: f64,
    beta: f64,
    x_max: f64,
    xi_max: f64,
    x_step: usize,
    k_period: usize,
    j_max: isize,
    k_max: isize,
}

fn integer_ratio(a: f64, b: f64) -> Option<usize> {
    let r = a / b;
    let ri = r.round();
    (ri >= 1.0 && (r - ri).abs() < 1e-9 * r.max(1.0)).then_some(ri as usize)
}

impl PhaseLattice {
    pub fn new(grid: SpatialGrid, alpha: f64, beta: f64, x_max: f64, xi_max: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(Error::InvalidLattice(format!("spacings must be positive (α={alpha}, β={beta})")));
        }
        if alpha * beta >= 2.0 * PI {
            return Err(Error::InvalidLattice(format!("αβ = {} is not below 2π", alpha * beta)));
        }
        let n = grid.n();
        let x_step = integer_ratio(alpha, grid.h())
            .filter(|s| n.is_multiple_of(*s))
            .ok_or_else(|| Error::InvalidLattice(format!("α = {alpha} must be h·s with s dividing n")))?;
        let xi_step = integer_ratio(beta, grid.dxi())
            .filter(|m| n.is_multiple_of(*m))
            .ok_or_else(|| Error::InvalidLattice(format!("β = {beta} must be Δξ·m with m dividing n")))?;
        if !(x_max >= 0.0 && x_max < 0.5 * grid.length()) {
            return Err(Error::InvalidLattice(format!("X_max = {x_max} outside [0, L/2)")));
        }
        if !(xi_max >= 0.0 && xi_max < grid.nyquist()) {
            return Err(Error::InvalidLattice(format!("Ξ_max = {xi_max} outside [0, π/h)")));
        }
        let j_max = (x_max / alpha + 1e-9).floor() as isize;
        let k_max = (xi_max / beta + 1e-9).floor() as isize;
        Ok(Self { grid, alpha, beta, x_max, xi_max, x_step, k_period: n / xi_step, j_max, k_max })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn xi_max(&self) -> f64 {
        self.xi_max
    }
    /// `αβ/(2π)`.
    pub fn cell(&self) -> f64 {
        cell_weight(self.alpha, self.beta)
    }
    pub fn density(&self) -> f64 {
        self.alpha * self.beta
    }

    pub fn nx(&self) -> usize {
        (2 * self.j_max + 1) as usize
    }
    pub fn nxi(&self) -> usize {
        (2 * self.k_max + 1) as usize
    }
    pub fn len(&self) -> usize {
        self.nx() * self.nxi()
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node index of `(jα, kβ)`.
    pub fn index(&self, j: isize, k: isize) -> usize {
        ((j + self.j_max) as usize) * self.nxi() + (k + self.k_max) as usize
    }

    /// Lattice integers `(j, k)` of node `i`.
    pub fn jk(&self, i: usize) -> (isize, isize) {
        let nxi = self.nxi();
        ((i / nxi) as isize - self.j_max, (i % nxi) as isize - self.k_max)
    }

    pub fn node(&self, i: usize) -> PhasePoint {
        let (j, k) = self.jk(i);
        PhasePoint::new(j as f64 * self.alpha, k as f64 * self.beta)
    }

    pub fn nodes(&self) -> Vec<PhasePoint> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Position columns of the untruncated periodic lattice.
    pub(crate) fn full_nx(&self) -> usize {
        self.grid.n() / self.x_step
    }

    /// Frequency rows of the untruncated periodic lattice.
    pub(crate) fn full_nxi(&self) -> usize {
        self.k_period
    }

    /// Grid index of the lattice column `j` (periodic).
    pub(crate) fn column_index(&self, j: isize) -> usize {
        let n = self.grid.n() as isize;
        (n / 2 + j * self.x_step as isize).rem_euclid(n) as usize
    }
}

/// Gabor coefficients on a truncated lattice.
#[derive(Clone, Debug)]
pub struct GaborCoeffs {
    pub lattice: PhaseLattice,
    pub values: Vec<C64>,
    /// Fraction of the untruncated coefficient energy that falls outside the lattice box.
    pub truncation_loss: f64,
}

impl GaborCoeffs {
    pub fn zeros(lattice: &PhaseLattice) -> Self {
        Self { lattice: lattice.clone(), values: vec![C64::new(0.0, 0.0); lattice.len()], truncation_loss: 0.0 }
    }

    /// `⟨c, d⟩_Λ = cell · Σ c conj(d)`.
    pub fn inner(&self, other: &GaborCoeffs) -> C64 {
        self.lattice.cell() * self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum::<C64>()
    }

    /// Weighted energy `cell · Σ|c|²`.
    pub fn energy(&self) -> f64 {
        self.lattice.cell() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }
}

/// Coefficients at every node of the periodic lattice, column-major in `x`:
/// entry `[i · K + r]` is `⟨f, π(a_i, r β)g⟩` with `a_i` the `i`-th column.
pub(crate) fn full_analysis(f: &[C64], w: &Window, lat: &PhaseLattice) -> Vec<C64> {
    let grid = lat.grid;
    let n = grid.n();
    let kp = lat.k_period;
    let h = grid.h();
    let fft = plan_forward(kp);
    let g = w.field().values();
    let nx = lat.full_nx() as isize;
    let half_cols = nx / 2;
    // Column i covers lattice integer j = i - nx/2.
    let twist: Vec<C64> = (0..kp)
        .map(|r| {
            let k = signed_bin(r, kp);
            C64::from_polar(h, k as f64 * lat.beta * 0.5 * grid.length())
        })
        .collect();
    (0..nx)
        .into_par_iter()
        .flat_map_iter(|i| {
            let idx = lat.column_index(i - half_cols);
            let mut fold = vec![C64::new(0.0, 0.0); kp];
            for d in 0..n {
                let gd = g[d];
                if gd.re == 0.0 && gd.im == 0.0 {
                    continue;
                }
                fold[d % kp] += f[(idx + d + n - n / 2) % n] * gd.conj();
            }
            fft.process(&mut fold);
            fold.iter().zip(&twist).map(|(v, t)| v * t).collect::<Vec<_>>()
        })
        .collect()
}

fn signed_bin(r: usize, k: usize) -> isize {
    if r < k.div_ceil(2) {
        r as isize
    } else {
        r as isize - k as isize
    }
}

/// Coefficients `⟨f, π(λ)g⟩` on the truncated lattice, with the measured truncation loss.
pub fn gabor_analysis(f: &Field, g: &Window, lat: &PhaseLattice) -> Result<GaborCoeffs> {
    f.grid().ensure_same(lat.grid())?;
    g.grid().ensure_same(lat.grid())?;
    let full = full_analysis(f.values(), g, lat);
    let kp = lat.k_period as isize;
    let half_cols = lat.full_nx() as isize / 2;
    let total: f64 = full.iter().map(|v| v.norm_sqr()).sum();
    let values: Vec<C64> = (0..lat.len())
        .map(|i| {
            let (j, k) = lat.jk(i);
            let col = (j + half_cols) as usize;
            full[col * kp as usize + k.rem_euclid(kp) as usize]
        })
        .collect();
    let kept: f64 = values.iter().map(|v| v.norm_sqr()).sum();
    let truncation_loss = if total > 0.0 { (1.0 - kept / total).max(0.0) } else { 0.0 };
    Ok(GaborCoeffs { lattice: lat.clone(), values, truncation_loss })
}

/// As [`gabor_analysis`], rejecting fields whose coefficient energy leaks past the box.
pub fn gabor_coefficients(f: &Field, g: &Window, lat: &PhaseLattice) -> Result<GaborCoeffs> {
    let c = gabor_analysis(f, g, lat)?;
    if c.truncation_loss > 1e-6 {
        return Err(Error::TruncationLoss { loss: c.truncation_loss });
    }
    Ok(c)
}

/// `cell · Σ_λ c_λ π(λ)γ`.
pub fn gabor_synthesis(c: &GaborCoeffs, gamma: &Window) -> Result<Field> {
    let lat = &c.lattice;
    gamma.grid().ensure_same(lat.grid())?;
    let grid = lat.grid;
    let n = grid.n();
    let kp = lat.k_period;
    let ifft = plan_inverse(kp);
    let g = gamma.field().values();
    let cell = lat.cell();
    let columns: Vec<(usize, Vec<C64>)> = (-lat.j_max..=lat.j_max)
        .into_par_iter()
        .map(|j| {
            let mut spec = vec![C64::new(0.0, 0.0); kp];
            for k in -lat.k_max..=lat.k_max {
                let ph = C64::from_polar(cell, -(k as f64) * lat.beta * 0.5 * grid.length());
                spec[k.rem_euclid(kp as isize) as usize] += c.values[lat.index(j, k)] * ph;
            }
            ifft.process(&mut spec);
            (lat.column_index(j), spec)
        })
        .collect();
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (idx, spec) in columns {
        for d in 0..n {
            let gd = g[d];
            if gd.re == 0.0 && gd.im == 0.0 {
                continue;
            }
            out[(idx + d + n - n / 2) % n] += spec[d % kp] * gd;
        }
    }
    Field::new(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corekit::time_freq_shift;
    use crate::corekit::window::gaussian_window;

    fn setup() -> (SpatialGrid, Window, PhaseLattice) {
        let grid = SpatialGrid::new(32.0, 512).unwrap();
        let g = gaussian_window(grid).unwrap();
        let lat = PhaseLattice::new(grid, 0.5, PI, 12.0, 6.0 * PI).unwrap();
        (grid, g, lat)
    }

    #[test]
    fn rejects_bad_lattices() {
        let grid = SpatialGrid::new(32.0, 512).unwrap();
        assert!(PhaseLattice::new(grid, 2.0, PI, 8.0, 8.0).is_err());
        assert!(PhaseLattice::new(grid, 0.3, 1.0, 8.0, 8.0).is_err());
        assert!(PhaseLattice::new(grid, 0.5, PI, 16.0, 8.0).is_err());
    }

    #[test]
    fn coefficients_of_an_atom() {
        let (_, g, lat) = setup();
        let i0 = lat.index(3, -1);
        let f = time_freq_shift(lat.node(i0), g.field());
        let c = gabor_coefficients(&f, &g, &lat).unwrap();
        assert!((c.values[i0].norm() - 1.0).abs() < 1e-9);
        let i1 = lat.index(4, 0);
        let d = lat.node(i1) - lat.node(i0);
        let want = (-PI * d.x * d.x / 2.0 - d.xi * d.xi / (8.0 * PI)).exp();
        assert!((c.values[i1].norm() - want).abs() < 1e-9);
    }

    #[test]
    fn synthesis_adjoint() {
        let (grid, g, lat) = setup();
        let f = Field::from_fn(grid, |x| C64::new((-0.3 * x * x).exp(), (-(x - 1.0).powi(2)).exp()));
        let mut c = GaborCoeffs::zeros(&lat);
        for (i, v) in c.values.iter_mut().enumerate() {
            *v = C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos());
        }
        let lhs = gabor_synthesis(&c, &g).unwrap().inner(&f);
        let rhs = c.inner(&gabor_analysis(&f, &g, &lat).unwrap());
        assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0));
    }

    #[test]
    fn single_coefficient_synthesis() {
        let (_, g, lat) = setup();
        let mut c = GaborCoeffs::zeros(&lat);
        let i0 = lat.index(-5, 7);
        c.values[i0] = C64::new(1.0, 0.0);
        let s = gabor_synthesis(&c, &g).unwrap();
        let want = time_freq_shift(lat.node(i0), g.field()).scaled(C64::new(lat.cell(), 0.0));
        assert!((&s - &want).max_abs() < 1e-13);
    }
}
