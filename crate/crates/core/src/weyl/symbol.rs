use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::profile::{catmull_rom, Profile};
use crate::corekit::fourier::{fft_in_place, ifft_in_place};
use crate::corekit::SpatialGrid;
use crate::{Error, Result, C64};

/// Homogeneity tag: which of `a₂`, `a₁`, `a₀` a part belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    A2,
    A1,
    A0,
}

/// `c0 + cx x + cxi ξ + cxx x² + cxxi x ξ + cxixi ξ²`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QuadPoly {
    #[serde(default)]
    pub c0: f64,
    #[serde(default)]
    pub cx: f64,
    #[serde(default)]
    pub cxi: f64,
    #[serde(default)]
    pub cxx: f64,
    #[serde(default)]
    pub cxxi: f64,
    #[serde(default)]
    pub cxixi: f64,
}

impl QuadPoly {
    pub fn constant(c: f64) -> Self {
        Self { c0: c, ..Self::default() }
    }
    /// `ξ²`.
    pub fn free() -> Self {
        Self { cxixi: 1.0, ..Self::default() }
    }
    /// `x² + ξ²`.
    pub fn harmonic() -> Self {
        Self { cxx: 1.0, cxixi: 1.0, ..Self::default() }
    }

    pub fn jet(&self, x: f64, xi: f64) -> (f64, f64, f64) {
        let v = self.c0 + self.cx * x + self.cxi * xi + self.cxx * x * x + self.cxxi * x * xi + self.cxixi * xi * xi;
        let dx = self.cx + 2.0 * self.cxx * x + self.cxxi * xi;
        let dxi = self.cxi + self.cxxi * x + 2.0 * self.cxixi * xi;
        (v, dx, dxi)
    }

    pub fn is_affine(&self) -> bool {
        self.cxx == 0.0 && self.cxxi == 0.0 && self.cxixi == 0.0
    }

    fn is_finite(&self) -> bool {
        [self.c0, self.cx, self.cxi, self.cxx, self.cxxi, self.cxixi].iter().all(|c| c.is_finite())
    }
}

/// A generic symbol on the phase grid, stored at half-grid positions for Weyl kernels.
///
/// Row `s` holds `a(-L/2 + s h/2, ξ_ℓ)` for the FFT-ordered frequencies `ξ_ℓ`.
#[derive(Clone, Debug)]
pub struct SampledSymbol {
    grid: SpatialGrid,
    half: Arc<Vec<C64>>,
    kernel: OnceLock<Arc<Vec<C64>>>,
}

impl SampledSymbol {
    /// Evaluates `a` exactly at every half-grid position.
    pub fn from_fn(grid: SpatialGrid, a: impl Fn(f64, f64) -> C64) -> Result<Self> {
        let n = grid.n();
        let mut half = Vec::with_capacity(2 * n * n);
        for s in 0..2 * n {
            let x = -0.5 * grid.length() + 0.5 * s as f64 * grid.h();
            for l in 0..n {
                half.push(a(x, grid.fft_freq(l)));
            }
        }
        Self::from_half(grid, half)
    }

    /// From samples `values[j * n + ℓ] = a(x_j, ξ_ℓ)`; half-grid rows by trigonometric interpolation in `x`.
    pub fn from_samples(grid: SpatialGrid, values: &[C64]) -> Result<Self> {
        let n = grid.n();
        if values.len() != n * n {
            return Err(Error::GridMismatch(format!("expected {} symbol samples, got {}", n * n, values.len())));
        }
        let mut half = vec![C64::new(0.0, 0.0); 2 * n * n];
        let mut col = vec![C64::new(0.0, 0.0); n];
        let mut wide = vec![C64::new(0.0, 0.0); 2 * n];
        for l in 0..n {
            for j in 0..n {
                col[j] = values[j * n + l];
            }
            fft_in_place(&mut col);
            wide.iter_mut().for_each(|w| *w = C64::new(0.0, 0.0));
            wide[..n / 2].copy_from_slice(&col[..n / 2]);
            wide[n / 2 + 1 + n..].copy_from_slice(&col[n / 2 + 1..]);
            // Split the Nyquist bin evenly so real data stays real.
            wide[n / 2] = 0.5 * col[n / 2];
            wide[n + n / 2] = 0.5 * col[n / 2];
            ifft_in_place(&mut wide);
            for s in 0..2 * n {
                half[s * n + l] = wide[s] / n as f64;
            }
        }
        Self::from_half(grid, half)
    }

    fn from_half(grid: SpatialGrid, half: Vec<C64>) -> Result<Self> {
        if half.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("sampled symbol"));
        }
        Ok(Self { grid, half: Arc::new(half), kernel: OnceLock::new() })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub(crate) fn half_rows(&self) -> &[C64] {
        &self.half
    }

    pub(crate) fn kernel_cell(&self) -> &OnceLock<Arc<Vec<C64>>> {
        &self.kernel
    }

    pub fn max_imag(&self) -> f64 {
        self.half.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Bicubic (Catmull-Rom) value and gradient; periodic in `x`, clamped in `ξ`.
    pub fn jet(&self, x: f64, xi: f64) -> (C64, C64, C64) {
        let g = &self.grid;
        let n = g.n();
        let px = (x + 0.5 * g.length()) / g.h();
        let pq = xi / g.dxi() + (n / 2) as f64;
        let ix = px.floor() as isize;
        let iq = pq.floor() as isize;
        let mut out = [C64::new(0.0, 0.0); 3];
        for part in 0..2 {
            let mut rows = [[0.0; 4]; 4];
            for (a, row) in rows.iter_mut().enumerate() {
                let j = (ix - 1 + a as isize).rem_euclid(n as isize) as usize;
                for (b, cell) in row.iter_mut().enumerate() {
                    let q = (iq - 1 + b as isize).clamp(0, n as isize - 1) as usize;
                    let l = (q + n / 2) % n;
                    let v = self.half[2 * j * n + l];
                    *cell = if part == 0 { v.re } else { v.im };
                }
            }
            let tx = px - ix as f64;
            let tq = pq - iq as f64;
            let mut along = [0.0; 4];
            let mut dalong = [0.0; 4];
            for b in 0..4 {
                let col = [rows[0][b], rows[1][b], rows[2][b], rows[3][b]];
                let (v, d) = catmull_rom(&col, 1.0 + tx, false);
                along[b] = v;
                dalong[b] = d;
            }
            let (v, dq) = catmull_rom(&along, 1.0 + tq, false);
            let (dx, _) = catmull_rom(&dalong, 1.0 + tq, false);
            let unit = if part == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 1.0) };
            out[0] += unit * v;
            out[1] += unit * dx / g.h();
            out[2] += unit * dq / g.dxi();
        }
        (out[0], out[1], out[2])
    }
}

#[derive(Clone, Debug)]
pub enum SymbolPart {
    Quadratic(QuadPoly),
    /// `σ(ξ)`.
    Multiplier(Profile),
    /// `V(x)`.
    Potential(Profile),
    Sampled(SampledSymbol),
}

impl SymbolPart {
    /// Value and gradient `(a, ∂_x a, ∂_ξ a)`.
    pub fn jet(&self, x: f64, xi: f64) -> (C64, C64, C64) {
        let re = |(v, dx, dxi): (f64, f64, f64)| (C64::new(v, 0.0), C64::new(dx, 0.0), C64::new(dxi, 0.0));
        match self {
            SymbolPart::Quadratic(q) => re(q.jet(x, xi)),
            SymbolPart::Multiplier(p) => {
                let (v, d) = p.eval(xi);
                re((v, 0.0, d))
            }
            SymbolPart::Potential(p) => {
                let (v, d) = p.eval(x);
                re((v, d, 0.0))
            }
            SymbolPart::Sampled(s) => s.jet(x, xi),
        }
    }

    fn check(&self, order: Order) -> Result<()> {
        let ok = match self {
            SymbolPart::Quadratic(q) => q.is_finite(),
            SymbolPart::Multiplier(p) | SymbolPart::Potential(p) => p.is_finite(),
            SymbolPart::Sampled(s) => order == Order::A0 || s.max_imag() < 1e-12,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSymbol(format!("{order:?} part is not finite and real: {self:?}")))
        }
    }

    /// Whether the part is `L`-periodic in `x` (or independent of `x`).
    fn x_periodic(&self, length: f64) -> bool {
        match self {
            SymbolPart::Quadratic(q) => q.cx == 0.0 && q.cxx == 0.0 && q.cxxi == 0.0,
            SymbolPart::Multiplier(_) => true,
            SymbolPart::Potential(p) => p.is_periodic(length),
            SymbolPart::Sampled(s) => (s.grid().length() - length).abs() < 1e-12 * length,
        }
    }
}

/// Symbol parts valid at one time sample.
#[derive(Clone, Debug)]
pub struct TimeSample {
    pub t: f64,
    pub parts: Vec<(Order, SymbolPart)>,
}

/// `a(t, x, ξ) = a₂ + a₁ + a₀`, piecewise linear in `t` between samples.
#[derive(Clone, Debug)]
pub struct SymbolModel {
    samples: Vec<TimeSample>,
}

impl SymbolModel {
    pub fn autonomous(parts: Vec<(Order, SymbolPart)>) -> Result<Self> {
        Self::time_dependent(vec![TimeSample { t: 0.0, parts }])
    }

    pub fn time_dependent(samples: Vec<TimeSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidSymbol("no time samples".into()));
        }
        if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::InvalidSymbol("time samples must be strictly increasing".into()));
        }
        for s in &samples {
            if !s.t.is_finite() {
                return Err(Error::InvalidSymbol("non-finite time sample".into()));
            }
            for (order, part) in &s.parts {
                part.check(*order)?;
            }
        }
        Ok(Self { samples })
    }

    /// `ξ²` as `a₂`.
    pub fn free() -> Self {
        Self::quadratic(QuadPoly::free())
    }

    /// `x² + ξ²` as `a₂`.
    pub fn harmonic() -> Self {
        Self::quadratic(QuadPoly::harmonic())
    }

    /// A single quadratic (or affine) polynomial, tagged `a₂`.
    pub fn quadratic(q: QuadPoly) -> Self {
        Self { samples: vec![TimeSample { t: 0.0, parts: vec![(Order::A2, SymbolPart::Quadratic(q))] }] }
    }

    /// Adds a part to every time sample.
    pub fn with_part(mut self, order: Order, part: SymbolPart) -> Result<Self> {
        part.check(order)?;
        for s in &mut self.samples {
            s.parts.push((order, part.clone()));
        }
        Ok(self)
    }

    pub fn samples(&self) -> &[TimeSample] {
        &self.samples
    }

    pub fn is_autonomous(&self) -> bool {
        self.samples.len() == 1
    }

    /// Interpolation weights `(sample index, weight)` at time `t` (clamped to the sampled range).
    pub fn weights(&self, t: f64) -> Vec<(usize, f64)> {
        let s = &self.samples;
        if s.len() == 1 || t <= s[0].t {
            return vec![(0, 1.0)];
        }
        let last = s.len() - 1;
        if t >= s[last].t {
            return vec![(last, 1.0)];
        }
        let i = s.partition_point(|x| x.t <= t) - 1;
        let th = (t - s[i].t) / (s[i + 1].t - s[i].t);
        vec![(i, 1.0 - th), (i + 1, th)]
    }

    fn fold<T: Default + std::ops::AddAssign>(
        &self,
        t: f64,
        keep: impl Fn(Order) -> bool,
        f: impl Fn(&SymbolPart, f64) -> T,
    ) -> T {
        let mut acc = T::default();
        for (i, w) in self.weights(t) {
            for (order, part) in &self.samples[i].parts {
                if keep(*order) {
                    acc += f(part, w);
                }
            }
        }
        acc
    }

    /// Full symbol value.
    pub fn eval(&self, t: f64, x: f64, xi: f64) -> C64 {
        self.fold(t, |_| true, |p, w| p.jet(x, xi).0 * w)
    }

    /// Value of the parts tagged `order`.
    pub fn eval_order(&self, order: Order, t: f64, x: f64, xi: f64) -> C64 {
        self.fold(t, |o| o == order, |p, w| p.jet(x, xi).0 * w)
    }

    /// `(a₂, ∂_x a₂, ∂_ξ a₂)` (real parts; `a₂` is real by construction).
    pub fn a2_jet(&self, t: f64, x: f64, xi: f64) -> (f64, f64, f64) {
        let (v, dx, dxi) = self.fold(
            t,
            |o| o == Order::A2,
            |p, w| {
                let (v, dx, dxi) = p.jet(x, xi);
                Jet(v.re * w, dx.re * w, dxi.re * w)
            },
        )
        .into();
        (v, dx, dxi)
    }

    pub fn a1(&self, t: f64, x: f64, xi: f64) -> f64 {
        self.eval_order(Order::A1, t, x, xi).re
    }

    /// Whether every `a₂`, `a₁` part is `L`-periodic in `x`, so flows may wrap around the grid.
    pub fn principal_x_periodic(&self, length: f64) -> bool {
        self.samples
            .iter()
            .flat_map(|s| s.parts.iter())
            .filter(|(o, _)| *o != Order::A0)
            .all(|(_, p)| p.x_periodic(length))
    }

    /// Whether `a₂` depends on `ξ` only, so the flow preserves `ξ`.
    pub fn principal_is_multiplier(&self) -> bool {
        self.samples.iter().flat_map(|s| s.parts.iter()).filter(|(o, _)| *o == Order::A2).all(|(_, p)| match p {
            SymbolPart::Multiplier(_) => true,
            SymbolPart::Quadratic(q) => q.cx == 0.0 && q.cxx == 0.0 && q.cxxi == 0.0,
            _ => false,
        })
    }

    /// Whether any part is a generic sampled symbol.
    pub fn has_sampled_parts(&self) -> bool {
        self.samples.iter().flat_map(|s| s.parts.iter()).any(|(_, p)| matches!(p, SymbolPart::Sampled(_)))
    }

    /// Whether the symbol is affine and fully tagged `a₂` (the remainder symbol vanishes).
    pub fn is_affine(&self) -> bool {
        self.samples.iter().flat_map(|s| s.parts.iter()).all(|(o, p)| match p {
            SymbolPart::Quadratic(q) => *o == Order::A2 && q.is_affine(),
            _ => false,
        })
    }
}

#[derive(Default)]
struct Jet(f64, f64, f64);

impl std::ops::AddAssign for Jet {
    fn add_assign(&mut self, o: Jet) {
        self.0 += o.0;
        self.1 += o.1;
        self.2 += o.2;
    }
}

impl From<Jet> for (f64, f64, f64) {
    fn from(j: Jet) -> Self {
        (j.0, j.1, j.2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::profile::TrigTerm;

    #[test]
    fn quadratic_jet() {
        let a = SymbolModel::harmonic();
        assert_eq!(a.a2_jet(0.0, 1.0, 2.0), (5.0, 2.0, 4.0));
        assert!(!a.principal_x_periodic(32.0));
        assert!(SymbolModel::free().principal_x_periodic(32.0));
    }

    #[test]
    fn time_interpolation() {
        let samples = vec![
            TimeSample { t: 0.0, parts: vec![(Order::A2, SymbolPart::Quadratic(QuadPoly::constant(1.0)))] },
            TimeSample { t: 1.0, parts: vec![(Order::A2, SymbolPart::Quadratic(QuadPoly::constant(3.0)))] },
        ];
        let a = SymbolModel::time_dependent(samples).unwrap();
        assert!((a.eval(0.25, 0.0, 0.0).re - 1.5).abs() < 1e-15);
        assert!((a.eval(2.0, 0.0, 0.0).re - 3.0).abs() < 1e-15);
        let bad = vec![
            TimeSample { t: 1.0, parts: vec![] },
            TimeSample { t: 1.0, parts: vec![] },
        ];
        assert!(SymbolModel::time_dependent(bad).is_err());
    }

    #[test]
    fn sampled_interpolation() {
        let grid = SpatialGrid::new(8.0, 64).unwrap();
        let f = |x: f64, xi: f64| C64::new((0.5 * std::f64::consts::PI * x).cos() * (0.1 * xi).sin(), 0.0);
        let values: Vec<C64> = (0..64).flat_map(|j| (0..64).map(move |l| (j, l))).map(|(j, l)| f(grid.x(j), grid.fft_freq(l))).collect();
        let s = SampledSymbol::from_samples(grid, &values).unwrap();
        let exact = SampledSymbol::from_fn(grid, f).unwrap();
        let err = s.half_rows().iter().zip(exact.half_rows()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        let (v, dx, _) = s.jet(0.3, 1.0);
        assert!((v.re - f(0.3, 1.0).re).abs() < 1e-4);
        assert!((dx.re + 0.5 * std::f64::consts::PI * (0.15 * std::f64::consts::PI).sin() * 0.1f64.sin()).abs() < 1e-3);
        let p = SymbolPart::Potential(Profile::Trig { terms: vec![TrigTerm { amp: 1.0, freq: 3.0, phase: 0.0 }] });
        assert!(p.x_periodic(2.0 * std::f64::consts::PI));
    }
}
