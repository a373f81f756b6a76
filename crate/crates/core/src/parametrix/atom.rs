use rayon::prelude::*;

use super::{FlowSample, PropagatorPlan, COEFF_CUTOFF};
use crate::corekit::{time_freq_shift, Field, SpatialGrid, Window};
use crate::weyl::{apply_sampled, SampledSymbol, SymbolModel};
use crate::{Result, C64};

/// `b(y, η) = a(t, x + y, ξ + η) - (a₂ + a₁)(z) - ∂_x a₂(z) y - ∂_ξ a₂(z) η` around `z = (x, ξ)`.
#[derive(Clone, Copy, Debug)]
pub struct RemainderSymbol<'a> {
    symbol: &'a SymbolModel,
    t: f64,
    sample: FlowSample,
}

impl RemainderSymbol<'_> {
    pub fn eval(&self, y: f64, eta: f64) -> C64 {
        let s = &self.sample;
        self.symbol.eval(self.t, s.z.x + y, s.z.xi + eta) - (s.c + s.p * y + s.q * eta)
    }

    pub fn center(&self) -> FlowSample {
        self.sample
    }
}

pub fn b_symbol<'a>(a: &'a SymbolModel, t: f64, sample: &FlowSample) -> RemainderSymbol<'a> {
    RemainderSymbol { symbol: a, t, sample: *sample }
}

fn local_grid(grid: &SpatialGrid) -> Result<SpatialGrid> {
    SpatialGrid::new(0.25 * grid.length(), grid.n() / 4)
}

/// `b^w g` on a grid of a quarter of the length around the origin (same spacing).
pub fn atom_image(plan: &PropagatorPlan, k: usize, sample: &FlowSample) -> Result<Field> {
    let local = local_grid(&plan.grid)?;
    let (amp, width) = plan.kernel.gaussian().expect("plan windows are Gaussian");
    let g = Window::gaussian_profile(local, amp, width)?;
    let b = b_symbol(&plan.symbol, plan.times[k], sample);
    let sym = SampledSymbol::from_fn(local, |y, eta| b.eval(y, eta))?;
    apply_sampled(&sym, g.field())
}

/// `K(t_k, t_j) f = cell · Σ_λ V_γ f(λ) e^{iΔψ} π(χλ)[b^w g]`, each image computed separately.
///
/// Much slower than [`super::apply_k`]; used to cross-check it.
pub fn apply_k_images(plan: &PropagatorPlan, k: usize, j: usize, f: &Field) -> Result<Field> {
    plan.check_index(j, k)?;
    let c = plan.coefficients(f)?;
    let grid = plan.grid;
    let n = grid.n();
    let peak = c.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let cell = plan.lattice.cell();
    let nodes: Vec<usize> = (0..c.values.len()).filter(|&i| peak > 0.0 && c.values[i].norm() > COEFF_CUTOFF * peak).collect();
    let images: Vec<Field> = nodes
        .par_iter()
        .map(|&node| {
            let fs = plan.flows.sample(j, k, node);
            let img = atom_image(plan, k, fs)?;
            let m = img.len();
            let mut wide = vec![C64::new(0.0, 0.0); n];
            for (i, v) in img.values().iter().enumerate() {
                wide[n / 2 + i - m / 2] = *v;
            }
            let shifted = time_freq_shift(fs.z, &Field::new(grid, wide)?);
            Ok(shifted.scaled(c.values[node] * C64::from_polar(cell, fs.dpsi)))
        })
        .collect::<Result<_>>()?;
    let mut out = Field::zeros(grid);
    for img in &images {
        out.axpy(C64::new(1.0, 0.0), img);
    }
    Ok(out)
}
