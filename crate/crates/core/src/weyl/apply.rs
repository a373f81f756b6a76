use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::symbol::{SampledSymbol, SymbolModel, SymbolPart};
use crate::corekit::fourier::{fft_in_place, ifft_in_place, spectral_d};
use crate::corekit::{Field, SpatialGrid};
use crate::{Error, Result, C64};

/// Anti-diagonal kernel table: `A[s * n + d]`, with `K_{jk} = A[(j + k) n + (j - k mod n)]`.
fn kernel_table(sym: &SampledSymbol) -> Arc<Vec<C64>> {
    sym.kernel_cell()
        .get_or_init(|| {
            let n = sym.grid().n();
            let half = sym.half_rows();
            let mut table = half.to_vec();
            table.par_chunks_mut(n).for_each(|row| {
                ifft_in_place(row);
                let inv = 1.0 / n as f64;
                row.iter_mut().for_each(|v| *v *= inv);
            });
            Arc::new(table)
        })
        .clone()
}

/// `a^w f` for a generic sampled symbol: `(a^w f)_j = Σ_k K_{jk} f_k`,
/// `K_{jk} = (1/n) Σ_ℓ e^{i(x_j - x_k)ξ_ℓ} a((x_j + x_k)/2, ξ_ℓ)`.
pub fn apply_sampled(sym: &SampledSymbol, f: &Field) -> Result<Field> {
    sym.grid().ensure_same(f.grid())?;
    let n = f.len();
    let table = kernel_table(sym);
    let v = f.values();
    let out: Vec<C64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut acc = C64::new(0.0, 0.0);
            for (k, fk) in v.iter().enumerate() {
                let d = (j + n - k) % n;
                acc += table[(j + k) * n + d] * fk;
            }
            acc
        })
        .collect();
    Ok(Field::from_vec(*f.grid(), out))
}

fn check_band(part: &SymbolPart, grid: &SpatialGrid) -> Result<()> {
    match part {
        SymbolPart::Potential(p) => match p.max_frequency() {
            Some(w) if w > grid.nyquist() * (1.0 + 1e-12) => Err(Error::SymbolBand(format!(
                "potential frequency {w} above π/h = {}",
                grid.nyquist()
            ))),
            _ => Ok(()),
        },
        SymbolPart::Sampled(s) => s.grid().ensure_same(grid),
        _ => Ok(()),
    }
}

/// `a^w(t) f` with the `(2π)⁻¹` constant, so that `1^w = Id`.
///
/// Polynomial, multiplier and potential parts are collected into one pointwise factor,
/// one Fourier multiplier and one symmetrized `xξ` term.
pub fn weyl_apply(a: &SymbolModel, t: f64, f: &Field) -> Result<Field> {
    let grid = *f.grid();
    let n = grid.n();
    let xs = grid.points();
    let freqs = grid.fft_freqs();
    let mut pointwise = vec![0.0; n];
    let mut multiplier = vec![0.0; n];
    let mut cross = 0.0;
    let mut sampled: Vec<(f64, &SampledSymbol)> = Vec::new();
    let mut has_multiplier = false;
    for (i, w) in a.weights(t) {
        for (_, part) in &a.samples()[i].parts {
            check_band(part, &grid)?;
            match part {
                SymbolPart::Quadratic(q) => {
                    for (p, &x) in pointwise.iter_mut().zip(&xs) {
                        *p += w * (q.c0 + q.cx * x + q.cxx * x * x);
                    }
                    if q.cxi != 0.0 || q.cxixi != 0.0 {
                        has_multiplier = true;
                        for (m, &xi) in multiplier.iter_mut().zip(&freqs) {
                            *m += w * (q.cxi * xi + q.cxixi * xi * xi);
                        }
                    }
                    cross += w * q.cxxi;
                }
                SymbolPart::Multiplier(p) => {
                    has_multiplier = true;
                    for (m, &xi) in multiplier.iter_mut().zip(&freqs) {
                        *m += w * p.value(xi);
                    }
                }
                SymbolPart::Potential(p) => {
                    for (q, &x) in pointwise.iter_mut().zip(&xs) {
                        *q += w * p.value(x);
                    }
                }
                SymbolPart::Sampled(s) => sampled.push((w, s)),
            }
        }
    }
    let mut out: Vec<C64> = f.values().iter().zip(&pointwise).map(|(v, p)| v * p).collect();
    if has_multiplier {
        let mut buf = f.values().to_vec();
        fft_in_place(&mut buf);
        for (b, m) in buf.iter_mut().zip(&multiplier) {
            *b *= m / n as f64;
        }
        ifft_in_place(&mut buf);
        for (o, b) in out.iter_mut().zip(&buf) {
            *o += b;
        }
    }
    if cross != 0.0 {
        // (xξ)^w = ½(x D + D x).
        let xf = Field::from_vec(grid, f.values().iter().zip(&xs).map(|(v, &x)| v * x).collect());
        let dxf = spectral_d(&xf);
        let df = spectral_d(f);
        for j in 0..n {
            out[j] += 0.5 * cross * (xs[j] * df[j] + dxf[j]);
        }
    }
    for (w, s) in sampled {
        let g = apply_sampled(s, f)?;
        for (o, v) in out.iter_mut().zip(g.values()) {
            *o += w * v;
        }
    }
    let out = Field::new(grid, out).map_err(|_| Error::NonFinite("weyl_apply"))?;
    Ok(out)
}

/// Residuals of the three commutator identities.
#[derive(Clone, Debug, Serialize)]
pub struct CommutatorReport {
    /// `‖[a^w, x] f - (D_ξ a)^w f‖_∞`.
    pub commutator: f64,
    /// `‖(x a)^w f - a^w(x f) + ½ (D_ξ a)^w f‖_∞`.
    pub position: f64,
    /// `‖(ξ a)^w f - ½ (D_x a)^w f - a^w(D f)‖_∞`.
    pub momentum: f64,
    /// `‖f‖_∞`, for relative comparisons.
    pub scale: f64,
}

impl CommutatorReport {
    pub fn max(&self) -> f64 {
        self.commutator.max(self.position).max(self.momentum)
    }
}

/// Checks the commutator identities for a symbol given with its gradient `(a, ∂_x a, ∂_ξ a)`.
///
/// Every operator is assembled as a sampled Weyl kernel from the closed-form symbols.
pub fn commutator_check<F>(grid: SpatialGrid, a: F, f: &Field) -> Result<CommutatorReport>
where
    F: Fn(f64, f64) -> (C64, C64, C64) + Sync,
{
    grid.ensure_same(f.grid())?;
    let mi = C64::new(0.0, -1.0);
    let op = |g: &dyn Fn(f64, f64) -> C64| SampledSymbol::from_fn(grid, g);
    let a0 = op(&|x, xi| a(x, xi).0)?;
    let dxi_a = op(&|x, xi| mi * a(x, xi).2)?;
    let dx_a = op(&|x, xi| mi * a(x, xi).1)?;
    let x_a = op(&|x, xi| x * a(x, xi).0)?;
    let xi_a = op(&|x, xi| xi * a(x, xi).0)?;
    let times_x = |h: &Field| h.map(|x, v| v * x);
    let af = apply_sampled(&a0, f)?;
    let axf = apply_sampled(&a0, &times_x(f))?;
    let dxia_f = apply_sampled(&dxi_a, f)?;
    let comm = &(&axf - &times_x(&af)) - &dxia_f;
    let pos = &(&apply_sampled(&x_a, f)? - &axf) + &dxia_f.scaled(C64::new(0.5, 0.0));
    let mom = &(&apply_sampled(&xi_a, f)? - &apply_sampled(&dx_a, f)?.scaled(C64::new(0.5, 0.0)))
        - &apply_sampled(&a0, &spectral_d(f))?;
    Ok(CommutatorReport { commutator: comm.max_abs(), position: pos.max_abs(), momentum: mom.max_abs(), scale: f.max_abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corekit::fourier::spectral_d;
    use crate::weyl::profile::{Profile, TrigTerm};
    use crate::weyl::symbol::{Order, QuadPoly};
    use std::f64::consts::PI;

    fn grid() -> SpatialGrid {
        SpatialGrid::new(16.0, 256).unwrap()
    }

    fn g() -> Field {
        Field::from_real_fn(grid(), |x| 2f64.powf(0.25) * (-PI * x * x).exp())
    }

    #[test]
    fn identity_and_derivative() {
        let f = Field::from_fn(grid(), |x| C64::new((-x * x).exp(), 0.5 * x * (-x * x).exp()));
        let one = SymbolModel::quadratic(QuadPoly::constant(1.0));
        assert!((&weyl_apply(&one, 0.0, &f).unwrap() - &f).max_abs() <= 1e-12);
        let xi = SymbolModel::quadratic(QuadPoly { cxi: 1.0, ..QuadPoly::default() });
        let d = weyl_apply(&xi, 0.0, &g()).unwrap();
        let want = g().map(|x, v| C64::new(0.0, 2.0 * PI * x) * v);
        assert!((&d - &want).max_abs() < 1e-10);
    }

    #[test]
    fn symmetrized_product() {
        let f = g();
        let a = SymbolModel::quadratic(QuadPoly { cxxi: 1.0, ..QuadPoly::default() });
        let lhs = weyl_apply(&a, 0.0, &f).unwrap();
        let xdf = spectral_d(&f).map(|x, v| v * x);
        let dxf = spectral_d(&f.map(|x, v| v * x));
        let want = (&xdf + &dxf).scaled(C64::new(0.5, 0.0));
        assert!((&lhs - &want).max_abs() < 1e-10);
    }

    #[test]
    fn kernel_agrees_with_fast_paths() {
        let f = Field::from_fn(grid(), |x| C64::from_polar((-0.7 * (x - 0.5).powi(2)).exp(), 1.5 * x));
        let q = QuadPoly { c0: 0.3, cx: -0.2, cxi: 0.7, cxx: 0.4, cxxi: 0.25, cxixi: 1.1 };
        let fast = weyl_apply(&SymbolModel::quadratic(q), 0.0, &f).unwrap();
        let s = SampledSymbol::from_fn(grid(), |x, xi| C64::new(q.jet(x, xi).0, 0.0)).unwrap();
        let slow = apply_sampled(&s, &f).unwrap();
        assert!((&fast - &slow).max_abs() < 1e-8 * fast.max_abs(), "{}", (&fast - &slow).max_abs());
        let v = Profile::Trig { terms: vec![TrigTerm { amp: 0.5, freq: 2.0 * PI / 16.0 * 3.0, phase: 0.1 }] };
        let a = SymbolModel::free().with_part(Order::A0, SymbolPart::Potential(v.clone())).unwrap();
        let s = SampledSymbol::from_fn(grid(), |x, xi| C64::new(xi * xi + v.value(x), 0.0)).unwrap();
        let d = &weyl_apply(&a, 0.0, &f).unwrap() - &apply_sampled(&s, &f).unwrap();
        assert!(d.max_abs() < 1e-9);
    }

    #[test]
    fn real_symbol_is_symmetric() {
        let s = SampledSymbol::from_fn(grid(), |x, xi| C64::new((x * 0.4).cos() * (1.0 + xi * xi).sqrt(), 0.0)).unwrap();
        let f = Field::from_fn(grid(), |x| C64::from_polar((-(x - 1.0).powi(2)).exp(), x));
        let h = Field::from_fn(grid(), |x| C64::from_polar((-0.5 * (x + 1.0).powi(2)).exp(), -2.0 * x));
        let lhs = apply_sampled(&s, &f).unwrap().inner(&h);
        let rhs = f.inner(&apply_sampled(&s, &h).unwrap());
        assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn commutators() {
        let f = Field::from_fn(grid(), |x| C64::from_polar((-0.8 * x * x).exp(), 0.7 * x));
        let z = C64::new(0.0, 0.0);
        let one = commutator_check(grid(), |_, _| (C64::new(1.0, 0.0), z, z), &f).unwrap();
        assert!(one.max() < 1e-12);
        let sq = commutator_check(grid(), |_, xi| (C64::new(xi * xi, 0.0), z, C64::new(2.0 * xi, 0.0)), &f).unwrap();
        assert!(sq.commutator < 1e-9, "{sq:?}");
    }

    #[test]
    fn band_check() {
        let v = Profile::Trig { terms: vec![TrigTerm { amp: 1.0, freq: 200.0, phase: 0.0 }] };
        let a = SymbolModel::free().with_part(Order::A0, SymbolPart::Potential(v)).unwrap();
        assert!(matches!(weyl_apply(&a, 0.0, &g()), Err(Error::SymbolBand(_))));
    }
}
