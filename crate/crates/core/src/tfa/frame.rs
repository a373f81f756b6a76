use nalgebra::DMatrix;
use rayon::prelude::*;

use super::lattice::PhaseLattice;
use crate::corekit::{Field, Window};
use crate::{Error, Result, C64};

/// CG tolerance (relative residual) and iteration cap for the canonical dual.
pub const CG_TOL: f64 = 1e-10;
pub const CG_MAX_ITER: usize = 500;

/// Frame operator `S f = cell · Σ_λ ⟨f, π(λ)g⟩ π(λ)g` of the full periodic lattice.
///
/// Summing the modulations first leaves the Walnut form
/// `S f(y) = α Σ_r f(y + rP) G_r(y)`, `P = 2π/β`, `G_r(y) = Σ_a g(y - a) conj g(y + rP - a)`,
/// so `S` only couples samples congruent modulo `P`.
#[derive(Clone, Debug)]
pub struct FrameOperator {
    lattice: PhaseLattice,
    alpha: f64,
    /// Samples per period `P`.
    period: usize,
    /// Number of periods in `L`.
    reps: usize,
    /// `table[r * n + y] = G_r(y)`.
    table: Vec<C64>,
}

impl FrameOperator {
    pub fn new(g: &Window, lat: &PhaseLattice) -> Result<Self> {
        g.grid().ensure_same(lat.grid())?;
        let n = lat.grid().n();
        let period = lat.full_nxi();
        let reps = n / period;
        let nx = lat.full_nx() as isize;
        let gv = g.field().values();
        let half = n / 2;
        let cols: Vec<usize> = (-nx / 2..nx - nx / 2).map(|j| lat.column_index(j)).collect();
        let table: Vec<C64> = (0..reps)
            .into_par_iter()
            .flat_map_iter(|r| {
                let cols = &cols;
                (0..n).map(move |y| {
                    let y2 = (y + r * period) % n;
                    cols.iter()
                        .map(|&a| gv[(y + n + half - a) % n] * gv[(y2 + n + half - a) % n].conj())
                        .sum::<C64>()
                })
            })
            .collect();
        Ok(Self { lattice: lat.clone(), alpha: lat.alpha(), period, reps, table })
    }

    pub fn lattice(&self) -> &PhaseLattice {
        &self.lattice
    }

    pub fn apply(&self, f: &Field) -> Field {
        let n = f.len();
        let v = f.values();
        let out = (0..n)
            .map(|y| {
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..self.reps {
                    acc += v[(y + r * self.period) % n] * self.table[r * n + y];
                }
                acc * self.alpha
            })
            .collect();
        Field::from_vec(*f.grid(), out)
    }

    /// Extreme eigenvalues `(A, B)` of `S`, from its `reps × reps` diagonal blocks.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.lattice.grid().n();
        let (p, m) = (self.period, self.reps);
        let extremes: Vec<(f64, f64)> = (0..p)
            .into_par_iter()
            .map(|c| {
                let block = DMatrix::from_fn(m, m, |a, b| {
                    let y = c + a * p;
                    // S[y, y + rP] with y + rP ≡ c + bP.
                    let r = (b + m - a) % m;
                    self.table[r * n + y] * self.alpha
                });
                let eig = block.symmetric_eigenvalues();
                eig.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| (lo.min(e), hi.max(e)))
            })
            .collect();
        extremes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(a, b)| (lo.min(a), hi.max(b)))
    }

    /// Solves `S x = rhs` by conjugate gradients.
    pub fn solve(&self, rhs: &Field) -> Result<(Field, usize)> {
        let mut x = Field::zeros(*rhs.grid());
        let mut r = rhs.clone();
        let mut p = r.clone();
        let b_norm = rhs.norm();
        if b_norm == 0.0 {
            return Ok((x, 0));
        }
        let mut rr = r.inner(&r).re;
        for it in 1..=CG_MAX_ITER {
            let sp = self.apply(&p);
            let step = rr / p.inner(&sp).re;
            x.axpy(C64::new(step, 0.0), &p);
            r.axpy(C64::new(-step, 0.0), &sp);
            let rr_new = r.inner(&r).re;
            if rr_new.sqrt() <= CG_TOL * b_norm {
                return Ok((x, it));
            }
            let beta = rr_new / rr;
            p = p.scaled(C64::new(beta, 0.0));
            p.axpy(C64::new(1.0, 0.0), &r);
            rr = rr_new;
        }
        Err(Error::CgNotConverged { iterations: CG_MAX_ITER, residual: rr.sqrt() / b_norm })
    }
}

/// Canonical dual window `γ = S⁻¹ g`.
pub fn dual_window(g: &Window, lat: &PhaseLattice) -> Result<Window> {
    let s = FrameOperator::new(g, lat)?;
    let (gamma, _) = s.solve(g.field())?;
    Ok(Window::from_field(gamma))
}

/// Frame bounds `(A, B)` of `(g, Λ)`.
pub fn frame_bounds(g: &Window, lat: &PhaseLattice) -> Result<(f64, f64)> {
    Ok(FrameOperator::new(g, lat)?.bounds())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::corekit::window::gaussian_window;
    use crate::corekit::{time_freq_shift, SpatialGrid};
    use crate::tfa::lattice::{gabor_analysis, gabor_synthesis};

    fn setup() -> (Window, PhaseLattice) {
        let grid = SpatialGrid::new(32.0, 512).unwrap();
        let g = gaussian_window(grid).unwrap();
        let lat = PhaseLattice::new(grid, 0.5, PI, 14.0, 6.0 * PI).unwrap();
        (g, lat)
    }

    #[test]
    fn reconstruction() {
        let (g, lat) = setup();
        let gamma = dual_window(&g, &lat).unwrap();
        let f = Field::from_fn(*g.grid(), |x| {
            C64::from_polar((-0.4 * (x - 1.0).powi(2)).exp(), 2.0 * x)
        });
        let c = gabor_analysis(&f, &g, &lat).unwrap();
        let back = gabor_synthesis(&c, &gamma).unwrap();
        assert!(back.rel_err(&f) < 1e-8, "{}", back.rel_err(&f));
    }

    #[test]
    fn bounds_are_tight_and_commute() {
        let (g, lat) = setup();
        let s = FrameOperator::new(&g, &lat).unwrap();
        let (a, b) = s.bounds();
        assert!(a > 0.0 && b / a < 1.2, "{a} {b}");
        let f = Field::from_real_fn(*g.grid(), |x| (-(x - 0.7).powi(2)).exp());
        let z = lat.node(lat.index(3, 2));
        let lhs = s.apply(&time_freq_shift(z, &f));
        let rhs = time_freq_shift(z, &s.apply(&f));
        assert!((&lhs - &rhs).max_abs() < 1e-10);
    }
}
