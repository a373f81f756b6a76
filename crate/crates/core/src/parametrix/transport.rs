use std::f64::consts::PI;

use rayon::prelude::*;

use super::{PropagatorPlan, COEFF_CUTOFF};
use crate::corekit::Field;
use crate::weyl::weyl_apply;
use crate::{Result, C64};

/// Coefficients `V_γ f(λ)` of a field anchored at source time index `j`, with a scalar weight.
pub(crate) struct Source<'a> {
    pub j: usize,
    pub coeffs: &'a [C64],
    pub weight: C64,
}

/// Work items are processed in fixed-size chunks and summed in chunk order, so results do
/// not depend on the number of worker threads.
const CHUNK: usize = 512;

/// Sums `weight · cell · c_λ e^{iΔψ} π(z)g` over all sources and nodes into the first buffer and,
/// if requested, `weight · cell · c_λ e^{iΔψ} π(z)[(a₂+a₁) g + ∂_x a₂ · y g + ∂_ξ a₂ · D g]` into the second.
pub(crate) fn transport(plan: &PropagatorPlan, k: usize, sources: &[Source<'_>], with_d: bool) -> (Vec<C64>, Vec<C64>) {
    let n = plan.grid.n();
    let cell = plan.lattice.cell();
    let mut items: Vec<(usize, usize)> = Vec::new();
    for (si, src) in sources.iter().enumerate() {
        let peak = src.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if peak == 0.0 || src.weight == C64::new(0.0, 0.0) {
            continue;
        }
        let cut = COEFF_CUTOFF * peak;
        items.extend(src.coeffs.iter().enumerate().filter(|(_, c)| c.norm() > cut).map(|(i, _)| (si, i)));
    }
    let (_, width) = plan.kernel.gaussian().expect("plan windows are Gaussian");
    let d_factor = C64::new(0.0, 2.0 * PI / (width * width));
    let grid = plan.grid;
    let partial: Vec<(Vec<C64>, Vec<C64>)> = items
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut s_buf = vec![C64::new(0.0, 0.0); n];
            let mut d_buf = if with_d { vec![C64::new(0.0, 0.0); n] } else { Vec::new() };
            for &(si, node) in chunk {
                let src = &sources[si];
                let fs = plan.flows.sample(src.j, k, node);
                let coef = src.weight * src.coeffs[node] * C64::from_polar(cell, fs.dpsi);
                if with_d {
                    let poly = (C64::new(fs.c, 0.0), C64::new(fs.p, 0.0) + d_factor * fs.q);
                    plan.kernel.accumulate_pair(&mut s_buf, &mut d_buf, &grid, fs.z, coef, poly);
                } else {
                    plan.kernel.accumulate(&mut s_buf, &grid, fs.z, coef);
                }
            }
            (s_buf, d_buf)
        })
        .collect();
    let mut s_tot = vec![C64::new(0.0, 0.0); n];
    let mut d_tot = if with_d { vec![C64::new(0.0, 0.0); n] } else { Vec::new() };
    for (s, d) in partial {
        for (a, b) in s_tot.iter_mut().zip(&s) {
            *a += b;
        }
        for (a, b) in d_tot.iter_mut().zip(&d) {
            *a += b;
        }
    }
    (s_tot, d_tot)
}

/// `K`-type combination `a^w(t_k) S - D`.
pub(crate) fn k_combine(plan: &PropagatorPlan, k: usize, s: Vec<C64>, d: Vec<C64>) -> Result<Field> {
    let s = Field::new(plan.grid, s)?;
    let mut out = weyl_apply(&plan.symbol, plan.times[k], &s)?;
    for (o, v) in out.values_mut().iter_mut().zip(&d) {
        *o -= v;
    }
    Ok(out)
}

/// `S̃(t_k, t_j) f = cell · Σ_λ e^{i(ψ(t_k) - ψ(t_j))} π(χ(t_k,t_j)λ)g · V_γ f(λ)`.
pub fn apply_s_tilde(plan: &PropagatorPlan, k: usize, j: usize, f: &Field) -> Result<Field> {
    plan.check_index(j, k)?;
    let c = plan.coefficients(f)?;
    let (s, _) = transport(plan, k, &[Source { j, coeffs: &c.values, weight: C64::new(1.0, 0.0) }], false);
    Field::new(plan.grid, s)
}

/// `K(t_k, t_j) f = (D_t + a^w) S̃(t_k, t_j) f`, assembled through the covariance of the Weyl calculus:
/// `a^w π(z)g - π(z)[(a₂+a₁)(z) g + ∂_x a₂(z) y g + ∂_ξ a₂(z) D g] = π(z) b^w g`.
pub fn apply_k(plan: &PropagatorPlan, k: usize, j: usize, f: &Field) -> Result<Field> {
    plan.check_index(j, k)?;
    let c = plan.coefficients(f)?;
    let (s, d) = transport(plan, k, &[Source { j, coeffs: &c.values, weight: C64::new(1.0, 0.0) }], true);
    k_combine(plan, k, s, d)
}
