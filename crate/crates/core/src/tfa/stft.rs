use rayon::prelude::*;

use crate::corekit::fourier::fft_in_place;
use crate::corekit::{Field, PhasePoint, SpatialGrid, Window};
use crate::{Error, Result, C64};

/// `V_g f(x_j, ξ_k)` on the full grid: rows are positions, columns FFT-ordered frequencies.
#[derive(Clone, Debug)]
pub struct StftGrid {
    grid: SpatialGrid,
    rows: Vec<usize>,
    values: Vec<C64>,
}

impl StftGrid {
    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    /// Spatial indices of the stored rows.
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn row(&self, r: usize) -> &[C64] {
        let n = self.grid.n();
        &self.values[r * n..(r + 1) * n]
    }

    /// Value at stored row `r`, FFT bin `k`.
    pub fn at(&self, r: usize, k: usize) -> C64 {
        self.values[r * self.grid.n() + k]
    }

    pub fn point(&self, r: usize, k: usize) -> PhasePoint {
        PhasePoint::new(self.grid.x(self.rows[r]), self.grid.fft_freq(k))
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `x,xi,re,im` rows, frequencies in ascending order.
    pub fn to_csv(&self) -> String {
        let n = self.grid.n();
        let mut out = String::from("x,xi,re,im\n");
        for (r, &j) in self.rows.iter().enumerate() {
            for s in 0..n {
                let k = (s + n / 2) % n;
                let v = self.at(r, k);
                out.push_str(&format!("{},{},{:e},{:e}\n", self.grid.x(j), self.grid.fft_freq(k), v.re, v.im));
            }
        }
        out
    }
}

/// One STFT row: `ξ ↦ V_g f(x_j, ξ)` on the FFT frequencies.
///
/// Uses the wrapped offset `u = y - x_j`, so `V_g f(x,ξ) = ∫ f(x+u) e^{-iξu} conj g(u) du`.
pub(crate) fn stft_row(f: &[C64], g: &[C64], j: usize, h: f64) -> Vec<C64> {
    let n = f.len();
    let half = n / 2;
    let mut q: Vec<C64> = (0..n)
        .map(|d| f[(j + d + n - half) % n] * g[d].conj())
        .collect();
    fft_in_place(&mut q);
    for (k, v) in q.iter_mut().enumerate() {
        // u_d = -L/2 + d h contributes e^{-iξ_k(-L/2)} = (-1)^k.
        let s = if k % 2 == 0 { h } else { -h };
        *v *= s;
    }
    q
}

/// Full STFT, one FFT per spatial shift.
pub fn stft(f: &Field, g: &Window) -> Result<StftGrid> {
    stft_rows(f, g, &(0..f.grid().n()).collect::<Vec<_>>())
}

/// STFT restricted to the given spatial indices.
pub fn stft_rows(f: &Field, g: &Window, rows: &[usize]) -> Result<StftGrid> {
    f.grid().ensure_same(g.grid())?;
    let grid = *f.grid();
    let n = grid.n();
    if let Some(&bad) = rows.iter().find(|&&j| j >= n) {
        return Err(Error::InvalidParameter(format!("row index {bad} out of range")));
    }
    let h = grid.h();
    let values: Vec<C64> = rows
        .par_iter()
        .flat_map_iter(|&j| stft_row(f.values(), g.field().values(), j, h))
        .collect();
    Ok(StftGrid { grid, rows: rows.to_vec(), values })
}

/// Outcome of a change-of-window comparison.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ChangeWindowReport {
    pub pairing: f64,
    pub max_lhs: f64,
    pub max_violation: f64,
}

/// `|V_{g0} f| ≤ |⟨γ,g1⟩|⁻¹ (|V_{g1} f| ∗ |V_γ g0|)` pointwise on the grid.
///
/// The phase-space convolution carries the cell weight `h Δξ / (2π)`.
pub fn change_window_check(f: &Field, g0: &Window, g1: &Window, gamma: &Window) -> Result<ChangeWindowReport> {
    let grid = *f.grid();
    let pairing = gamma.field().inner(g1.field()).norm();
    if pairing < 1e-12 {
        return Err(Error::DegeneratePairing(pairing));
    }
    let n = grid.n();
    let lhs = stft(f, g0)?;
    let a = stft(f, g1)?;
    // |⟨π(w)γ, π(z)g0⟩| = |V_{g0}γ(z - w)|, which equals |V_γ g0(z - w)| for even windows.
    let b = stft(gamma.field(), g0)?;
    let scale = grid.h() * grid.dxi() / (2.0 * std::f64::consts::PI) / pairing;
    let a_abs: Vec<f64> = a.values.iter().map(|v| v.norm()).collect();
    let b_abs: Vec<f64> = b.values.iter().map(|v| v.norm()).collect();
    // 2-D circular convolution |A| * |B| via FFT along both axes.
    let conv = circular_conv2(&a_abs, &b_abs, n);
    let mut max_violation = 0.0f64;
    let mut max_lhs = 0.0f64;
    // (|A| * |B|)(x, ξ) = Σ A(x - x', ξ - ξ') B(x', ξ'), B centred at (x', ξ') = (0,0) index (n/2, 0).
    for j in 0..n {
        for k in 0..n {
            let l = lhs.at(j, k).norm();
            let jj = (j + n / 2) % n;
            let r = scale * conv[jj * n + k];
            max_lhs = max_lhs.max(l);
            max_violation = max_violation.max(l - r);
        }
    }
    Ok(ChangeWindowReport { pairing, max_lhs, max_violation: max_violation.max(0.0) })
}

fn circular_conv2(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    use crate::corekit::fourier::ifft_in_place;
    let forward2 = |src: &[f64]| -> Vec<C64> {
        let mut m: Vec<C64> = src.iter().map(|&v| C64::new(v, 0.0)).collect();
        m.par_chunks_mut(n).for_each(fft_in_place);
        let mut t = transpose(&m, n);
        t.par_chunks_mut(n).for_each(fft_in_place);
        t
    };
    let fa = forward2(a);
    let fb = forward2(b);
    let mut prod: Vec<C64> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
    prod.par_chunks_mut(n).for_each(ifft_in_place);
    let mut back = transpose(&prod, n);
    back.par_chunks_mut(n).for_each(ifft_in_place);
    let norm = 1.0 / (n * n) as f64;
    back.iter().map(|v| v.re * norm).collect()
}

fn transpose(m: &[C64], n: usize) -> Vec<C64> {
    let mut t = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = m[i * n + j];
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::corekit::window::gaussian_window;
    use crate::corekit::time_freq_shift;

    fn grid() -> SpatialGrid {
        SpatialGrid::new(16.0, 256).unwrap()
    }

    #[test]
    fn self_stft_at_origin() {
        let g = gaussian_window(grid()).unwrap();
        let v = stft(g.field(), &g).unwrap();
        assert!((v.at(128, 0) - C64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn stft_of_constant() {
        let g = gaussian_window(SpatialGrid::new(16.0, 512).unwrap()).unwrap();
        let one = Field::from_real_fn(*g.grid(), |_| 1.0);
        let v = stft(&one, &g).unwrap();
        let c = 2f64.powf(0.25);
        for k in 0..512 {
            let xi = g.grid().fft_freq(k);
            if xi.abs() > 20.0 {
                continue;
            }
            let want = c * (-xi * xi / (4.0 * PI)).exp();
            assert!((v.at(77, k).norm() - want).abs() < 1e-8);
        }
    }

    #[test]
    fn covariance() {
        let g = gaussian_window(grid()).unwrap();
        let f = Field::from_fn(grid(), |x| C64::new((-0.8 * x * x).exp(), 0.3 * x * (-x * x).exp()));
        let z = PhasePoint::new(1.0, 3.0 * grid().dxi());
        let w = PhasePoint::new(-0.5, -2.0 * grid().dxi());
        let lhs = time_freq_shift(z, &f).inner(&time_freq_shift(w, g.field())).norm();
        let v = stft(&f, &g).unwrap();
        let d = w - z;
        let j = grid().nearest_index(d.x);
        let k = ((d.xi / grid().dxi()).round() as isize).rem_euclid(256) as usize;
        assert!((lhs - v.at(j, k).norm()).abs() < 1e-10);
    }

    #[test]
    fn change_window_same_gaussian() {
        let g = gaussian_window(SpatialGrid::new(16.0, 128).unwrap()).unwrap();
        let f = Field::from_real_fn(*g.grid(), |x| (-0.5 * (x - 1.0).powi(2)).exp());
        let r = change_window_check(&f, &g, &g, &g).unwrap();
        assert!(r.max_violation <= 1e-8 * r.max_lhs.max(1.0));
    }
}
