use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::stft::stft;
use crate::corekit::fourier::{fft_in_place, plan_forward};
use crate::corekit::weight::weight_eval;
use crate::corekit::{PhasePoint, Weight, Window};
use crate::{Error, Result, C64};

/// Local sampling patch for phase-space STFTs of symbols.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnvelopePatch {
    /// Patch extent in `x` and `ξ`.
    pub len_x: f64,
    pub len_xi: f64,
    /// Sample counts (powers of two).
    pub n_x: usize,
    pub n_xi: usize,
}

impl Default for EnvelopePatch {
    /// `8 × 8π` with `512 × 64` samples: frequency spacings `π/4` and `1/4`.
    fn default() -> Self {
        Self { len_x: 8.0, len_xi: 8.0 * PI, n_x: 512, n_xi: 64 }
    }
}

impl EnvelopePatch {
    fn validate(&self) -> Result<()> {
        if !(self.n_x.is_power_of_two() && self.n_xi.is_power_of_two() && self.len_x > 0.0 && self.len_xi > 0.0) {
            return Err(Error::InvalidParameter(format!("bad envelope patch {self:?}")));
        }
        Ok(())
    }
    pub fn dzeta1(&self) -> f64 {
        2.0 * PI / self.len_x
    }
    pub fn dzeta2(&self) -> f64 {
        2.0 * PI / self.len_xi
    }
}

/// Frequency envelope `H(ζ) = sup_c (2π)⁻¹ |V_Φ a(c, ζ)|` with `Φ(X,ξ) = 2 e^{-2πX² - ξ²/(2π)}`.
///
/// `Φ/(2π)` is the Wigner function of the normalized Gaussian window, so the Gabor matrix of
/// `a^w` satisfies `|⟨a^w π(z)g, π(w)g⟩| = (2π)⁻¹ |V_Φ a((z+w)/2, j(w-z))|` exactly.
#[derive(Clone, Debug, Serialize)]
pub struct EnvelopeFn {
    pub patch: EnvelopePatch,
    /// `values[k1 * n_xi + k2]`, both indices FFT-ordered.
    pub values: Vec<f64>,
    pub weight: Weight,
    pub mass: f64,
}

fn signed(k: usize, n: usize) -> isize {
    if k < n / 2 {
        k as isize
    } else {
        k as isize - n as isize
    }
}

impl EnvelopeFn {
    pub fn zeta(&self, k1: usize, k2: usize) -> (f64, f64) {
        (
            signed(k1, self.patch.n_x) as f64 * self.patch.dzeta1(),
            signed(k2, self.patch.n_xi) as f64 * self.patch.dzeta2(),
        )
    }

    /// `H` at the nearest stored frequency, `None` outside the band.
    pub fn at(&self, zeta1: f64, zeta2: f64) -> Option<f64> {
        let p = &self.patch;
        let k1 = (zeta1 / p.dzeta1()).round() as isize;
        let k2 = (zeta2 / p.dzeta2()).round() as isize;
        let (h1, h2) = ((p.n_x / 2) as isize, (p.n_xi / 2) as isize);
        if k1 < -h1 || k1 >= h1 || k2 < -h2 || k2 >= h2 {
            return None;
        }
        let i1 = k1.rem_euclid(p.n_x as isize) as usize;
        let i2 = k2.rem_euclid(p.n_xi as isize) as usize;
        Some(self.values[i1 * p.n_xi + i2])
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Largest `H` on each radial shell `[r, r + dr)` of `|ζ|`.
    pub fn radial_profile(&self, dr: f64) -> Vec<(f64, f64)> {
        let mut shells: Vec<f64> = Vec::new();
        for k1 in 0..self.patch.n_x {
            for k2 in 0..self.patch.n_xi {
                let (a, b) = self.zeta(k1, k2);
                let s = (a.hypot(b) / dr).floor() as usize;
                if shells.len() <= s {
                    shells.resize(s + 1, 0.0);
                }
                shells[s] = shells[s].max(self.values[k1 * self.patch.n_xi + k2]);
            }
        }
        shells.into_iter().enumerate().map(|(s, v)| (s as f64 * dr, v)).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("w1,w2,H\n");
        let (n1, n2) = (self.patch.n_x, self.patch.n_xi);
        for s1 in 0..n1 {
            for s2 in 0..n2 {
                let (k1, k2) = ((s1 + n1 / 2) % n1, (s2 + n2 / 2) % n2);
                let (a, b) = self.zeta(k1, k2);
                out.push_str(&format!("{a},{b},{:e}\n", self.values[k1 * n2 + k2]));
            }
        }
        out
    }
}

/// `(2π)⁻¹ |V_Φ a(c, ·)|` on the patch frequency grid.
pub fn local_symbol_stft<F>(a: &F, c: PhasePoint, patch: &EnvelopePatch) -> Vec<f64>
where
    F: Fn(f64, f64) -> C64 + Sync + ?Sized,
{
    let (nx, nxi) = (patch.n_x, patch.n_xi);
    let hx = patch.len_x / nx as f64;
    let hxi = patch.len_xi / nxi as f64;
    let mut buf = vec![C64::new(0.0, 0.0); nx * nxi];
    for i in 0..nx {
        let u = -0.5 * patch.len_x + i as f64 * hx;
        let wx = (-2.0 * PI * u * u).exp();
        for k in 0..nxi {
            let v = -0.5 * patch.len_xi + k as f64 * hxi;
            let w = 2.0 * wx * (-v * v / (2.0 * PI)).exp();
            buf[i * nxi + k] = a(c.x + u, c.xi + v) * w;
        }
    }
    for row in buf.chunks_mut(nxi) {
        fft_in_place(row);
    }
    let fft = plan_forward(nx);
    let mut col = vec![C64::new(0.0, 0.0); nx];
    for k in 0..nxi {
        for i in 0..nx {
            col[i] = buf[i * nxi + k];
        }
        fft.process(&mut col);
        for i in 0..nx {
            buf[i * nxi + k] = col[i];
        }
    }
    // Offsets start at -len/2; with even sample counts the resulting phase (-1)^k is unimodular.
    let scale = hx * hxi / (2.0 * PI);
    buf.iter().map(|v| v.norm() * scale).collect()
}

/// Envelope of a symbol over the given set of centres.
///
/// The supremum is a maximum over the sampled centres, hence a lower bound of the true one.
pub fn sjostrand_envelope<F>(a: &F, centers: &[PhasePoint], patch: EnvelopePatch, v: Weight) -> Result<EnvelopeFn>
where
    F: Fn(f64, f64) -> C64 + Sync + ?Sized,
{
    patch.validate()?;
    if centers.is_empty() {
        return Err(Error::InvalidParameter("no envelope centres".into()));
    }
    let size = patch.n_x * patch.n_xi;
    let values = centers
        .par_iter()
        .map(|&c| local_symbol_stft(a, c, &patch))
        .reduce(|| vec![0.0; size], |x, y| x.iter().zip(&y).map(|(p, q)| p.max(*q)).collect());
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("symbol envelope"));
    }
    let mut env = EnvelopeFn { patch, values, weight: v, mass: 0.0 };
    let cell = patch.dzeta1() * patch.dzeta2();
    let mut mass = 0.0;
    for k1 in 0..patch.n_x {
        for k2 in 0..patch.n_xi {
            let (z1, z2) = env.zeta(k1, k2);
            mass += env.values[k1 * patch.n_xi + k2] * weight_eval(&v, PhasePoint::new(z1, z2));
        }
    }
    env.mass = mass * cell;
    Ok(env)
}

/// Centres `(α/2)Z × (β/2)Z` inside a box: all midpoints of lattice pairs.
pub fn half_lattice_centers(alpha: f64, beta: f64, x_max: f64, xi_max: f64) -> Vec<PhasePoint> {
    let jx = (2.0 * x_max / alpha + 1e-9).floor() as isize;
    let jk = (2.0 * xi_max / beta + 1e-9).floor() as isize;
    let mut out = Vec::with_capacity(((2 * jx + 1) * (2 * jk + 1)) as usize);
    for j in -jx..=jx {
        for k in -jk..=jk {
            out.push(PhasePoint::new(0.5 * j as f64 * alpha, 0.5 * k as f64 * beta));
        }
    }
    out
}

/// One-dimensional envelope `H(ζ) = sup_c |∫ σ(ξ) e^{-π(ξ-c)²} e^{-iζ(ξ-c)} dξ|` for `ζ ≥ 0`.
///
/// Returns `(ζ, H)` on the non-negative FFT frequencies of a patch of length `len` with `n` samples.
pub fn envelope_1d<F>(sigma: &F, centers: &[f64], len: f64, n: usize) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> f64 + Sync + ?Sized,
{
    if !n.is_power_of_two() || len <= 0.0 {
        return Err(Error::InvalidParameter("bad 1-D envelope patch".into()));
    }
    let h = len / n as f64;
    let half = n / 2;
    let best = centers
        .par_iter()
        .map(|&c| {
            let mut buf: Vec<C64> = (0..n)
                .map(|i| {
                    let u = -0.5 * len + i as f64 * h;
                    C64::new(sigma(c + u) * (-PI * u * u).exp(), 0.0)
                })
                .collect();
            fft_in_place(&mut buf);
            buf[..half].iter().map(|v| v.norm() * h).collect::<Vec<f64>>()
        })
        .reduce(|| vec![0.0; half], |x, y| x.iter().zip(&y).map(|(p, q)| p.max(*q)).collect());
    let dz = 2.0 * PI / len;
    Ok(best.into_iter().enumerate().map(|(k, v)| (k as f64 * dz, v)).collect())
}

/// Least-squares slope of `log H` against `log ζ` over `[lo, hi]`, using the upper hull:
/// the maximum of `H` over each of `bins` logarithmic bins.
pub fn loglog_slope(profile: &[(f64, f64)], lo: f64, hi: f64, bins: usize) -> Option<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut peaks = vec![(0.0f64, 0.0f64); bins];
    for &(z, v) in profile {
        if z < lo || z > hi || v <= 0.0 {
            continue;
        }
        let b = (((z.ln() - llo) / (lhi - llo)) * bins as f64).floor().min(bins as f64 - 1.0) as usize;
        if v > peaks[b].1 {
            peaks[b] = (z, v);
        }
    }
    let pts: Vec<(f64, f64)> = peaks.into_iter().filter(|p| p.1 > 0.0).map(|(z, v)| (z.ln(), v.ln())).collect();
    if pts.len() < 3 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + (p.0 - mx) * (p.1 - my), a.1 + (p.0 - mx).powi(2)));
    Some(sxy / sxx)
}

/// Mass report of `V_g g_τ`.
#[derive(Clone, Debug, Serialize)]
pub struct DilatedMass {
    pub tau: f64,
    /// `‖V_g g_τ‖_{L¹}` (plain Riemann sum, no convention constant).
    pub mass: f64,
    pub sup: f64,
}

/// `‖V_g g_τ‖_{L¹}` with `g_τ(x) = g(x/τ)`.
pub fn dilated_window_mass(g: &Window, tau: f64) -> Result<DilatedMass> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidParameter(format!("τ = {tau} outside (0, 1]")));
    }
    let gt = g.dilated(tau)?;
    let v = stft(gt.field(), g)?;
    let grid = g.grid();
    let mass = v.values().iter().map(|c| c.norm()).sum::<f64>() * grid.h() * grid.dxi();
    Ok(DilatedMass { tau, mass, sup: v.max_abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corekit::window::gaussian_window;
    use crate::corekit::SpatialGrid;

    #[test]
    fn constant_symbol_envelope() {
        let one = |_: f64, _: f64| C64::new(1.0, 0.0);
        let env = sjostrand_envelope(&one, &[PhasePoint::ORIGIN], EnvelopePatch::default(), Weight::UNIT).unwrap();
        for (z1, z2) in [(0.0, 0.0), (PI, 0.5), (-3.0 * PI, -1.0), (0.25 * PI, 2.0)] {
            let want = (-z1 * z1 / (8.0 * PI) - PI * z2 * z2 / 2.0).exp();
            assert!((env.at(z1, z2).unwrap() - want).abs() < 1e-9, "{z1} {z2}");
        }
        // ∫∫ H = (2π)^{...}: Gaussian integral of the closed form.
        let want_mass = (8.0 * PI * PI).sqrt() * (2.0f64).sqrt();
        assert!((env.mass - want_mass).abs() < 1e-6 * want_mass);
    }

    #[test]
    fn modulated_symbol_shifts_envelope() {
        let (p, q) = (2.0 * PI, 1.5);
        let a = move |x: f64, xi: f64| C64::from_polar(1.0, p * x + q * xi);
        let env = sjostrand_envelope(&a, &[PhasePoint::new(0.3, -1.0)], EnvelopePatch::default(), Weight::UNIT).unwrap();
        let z = (PI, 0.75);
        let want = (-(z.0 - p).powi(2) / (8.0 * PI) - PI * (z.1 - q).powi(2) / 2.0).exp();
        assert!((env.at(z.0, z.1).unwrap() - want).abs() < 1e-8);
    }

    #[test]
    fn dilated_mass_closed_form() {
        let g = gaussian_window(SpatialGrid::new(16.0, 512).unwrap()).unwrap();
        let m = dilated_window_mass(&g, 1.0).unwrap();
        assert!((m.mass - 4.0 * PI).abs() < 1e-6, "{}", m.mass);
        let m = dilated_window_mass(&g, 0.5).unwrap();
        let want = 2.0 * 2f64.sqrt() * PI * (1.25f64).sqrt();
        assert!((m.mass - want).abs() < 1e-6);
        assert!((m.sup - 2f64.sqrt() * 0.5 / 1.25f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn slope_of_power_law() {
        let prof: Vec<(f64, f64)> = (1..400).map(|k| (k as f64 * 0.1, (k as f64 * 0.1).powf(-2.0))).collect();
        let s = loglog_slope(&prof, 4.0, 40.0, 10).unwrap();
        assert!((s + 2.0).abs() < 1e-9);
    }
}
