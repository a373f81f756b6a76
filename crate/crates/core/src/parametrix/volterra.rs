use std::f64::consts::PI;

use serde::Serialize;

use super::transport::{k_combine, transport, Source};
use super::PropagatorPlan;
use crate::corekit::Field;
use crate::tfa::gabor_analysis;
use crate::{Error, Result, C64};

/// Picard solution of `v(t) = -K(t,s)u - i ∫_s^t K(t,r) v(r) dr` on the time grid.
#[derive(Clone, Debug, Serialize)]
pub struct VolterraSolution {
    /// Source time index `s`.
    pub start: usize,
    /// `v(t_k)` for `k = start..=N`.
    #[serde(skip)]
    pub fields: Vec<Field>,
    pub iterations: usize,
    /// Final successive-iterate distance `max_k ‖v^{m+1}(t_k) - v^m(t_k)‖_{M¹}` (lattice norm, see [`lattice_m1`]).
    pub residual: f64,
    /// Ratios of successive distances in the norm `sup_t e^{-λ(t-s)} ‖·‖_{M¹}`.
    pub ratios: Vec<f64>,
    pub lambda: f64,
    /// `max_k ‖K(t_k,s)u‖_{M¹} / ‖u‖_{M¹}`.
    pub k_norm: f64,
    /// `‖v(t_k)‖_{M¹}`.
    pub m1_norms: Vec<f64>,
    pub u_m1: f64,
}

impl VolterraSolution {
    /// Largest measured contraction ratio (0 when the first iterate is already exact).
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }
}

/// Lattice Riemann sum of the `M¹` norm, `(2π)^{-1/2} αβ Σ_λ |V_g f(λ)|` over the plan's box.
/// Equivalent to `‖f‖_{M¹}` for fields localized in the box and far cheaper than the full STFT.
pub fn lattice_m1(plan: &PropagatorPlan, f: &Field) -> Result<f64> {
    let c = gabor_analysis(f, &plan.window, &plan.lattice)?;
    let sum: f64 = c.values.iter().map(|v| v.norm()).sum();
    Ok((2.0 * PI).sqrt() * plan.lattice.cell() * sum)
}

/// Trapezoid weight of node `j` in `∫_{t_s}^{t_k}`.
pub(crate) fn trapezoid(dt: f64, start: usize, k: usize, j: usize) -> f64 {
    if k == start || j < start || j > k {
        0.0
    } else if j == start || j == k {
        0.5 * dt
    } else {
        dt
    }
}

/// One application of the Volterra map for every `t_k`.
fn volterra_map(
    plan: &PropagatorPlan,
    start: usize,
    cu: &[C64],
    cv: &[Vec<C64>],
) -> Result<Vec<Field>> {
    let dt = plan.dt();
    (start..=plan.steps())
        .map(|k| {
            let mut sources = vec![Source { j: start, coeffs: cu, weight: C64::new(1.0, 0.0) }];
            for j in start..=k {
                let w = trapezoid(dt, start, k, j);
                if w != 0.0 && !cv.is_empty() {
                    sources.push(Source { j, coeffs: &cv[j - start], weight: C64::new(0.0, w) });
                }
            }
            let (s, d) = transport(plan, k, &sources, true);
            Ok(k_combine(plan, k, s, d)?.scaled(C64::new(-1.0, 0.0)))
        })
        .collect()
}

pub fn volterra_solve(plan: &PropagatorPlan, u0: &Field) -> Result<VolterraSolution> {
    volterra_solve_from(plan, 0, u0)
}

/// Picard iteration from `v⁰ = -K(·, t_s)u` until successive iterates differ by less than
/// `tol · ‖u‖_{M¹}` in `sup_k ‖·‖_{M¹}`.
pub fn volterra_solve_from(plan: &PropagatorPlan, start: usize, u: &Field) -> Result<VolterraSolution> {
    plan.check_index(start, plan.steps())?;
    plan.grid.ensure_same(u.grid())?;
    let cu_full = plan.coefficients(u)?;
    let u_energy = cu_full.energy();
    let cu = cu_full.values;
    let u_m1 = lattice_m1(plan, u)?;
    let v = volterra_map(plan, start, &cu, &[])?;
    let norms0: Vec<f64> = v.iter().map(|f| lattice_m1(plan, f)).collect::<Result<_>>()?;
    let k_norm = if u_m1 > 0.0 { norms0.iter().copied().fold(0.0, f64::max) / u_m1 } else { 0.0 };
    let lambda = 2.0 * k_norm.max(0.5);
    let tol = plan.config.volterra_tol * u_m1.max(f64::MIN_POSITIVE);
    let trace = picard(plan, start, lambda, tol, u_energy, v, |cv| volterra_map(plan, start, &cu, cv))?;
    let m1_norms = trace.fields.iter().map(|f| lattice_m1(plan, f)).collect::<Result<_>>()?;
    Ok(VolterraSolution {
        start,
        fields: trace.fields,
        iterations: trace.iterations,
        residual: trace.residual,
        ratios: trace.ratios,
        lambda,
        k_norm,
        m1_norms,
        u_m1,
    })
}

pub(crate) struct PicardTrace {
    pub fields: Vec<Field>,
    pub iterations: usize,
    pub residual: f64,
    pub ratios: Vec<f64>,
}

/// Fixed-point iteration `x ← map(coeffs(x))` on fields indexed by `t_start..=t_N`.
/// Contraction is measured in `sup_k e^{-λ(t_k - t_s)} ‖·‖_{M¹}`; the loop stops once the
/// unweighted distance drops below `tol`.
pub(crate) fn picard(
    plan: &PropagatorPlan,
    start: usize,
    lambda: f64,
    tol: f64,
    reference_energy: f64,
    first: Vec<Field>,
    mut map: impl FnMut(&[Vec<C64>]) -> Result<Vec<Field>>,
) -> Result<PicardTrace> {
    let decay: Vec<f64> = (start..=plan.steps()).map(|k| (-lambda * (plan.times[k] - plan.times[start])).exp()).collect();
    let mut x = first;
    let mut ratios = Vec::new();
    let mut prev_weighted: Option<f64> = None;
    let mut iterations = 0;
    while iterations < plan.config.max_picard {
        iterations += 1;
        let coeffs: Vec<Vec<C64>> = x
            .iter()
            .map(|f| plan.coefficients_against(f, reference_energy).map(|c| c.values))
            .collect::<Result<_>>()?;
        let next = map(&coeffs)?;
        let diffs: Vec<f64> = next.iter().zip(&x).map(|(a, b)| lattice_m1(plan, &(a - b))).collect::<Result<_>>()?;
        let residual = diffs.iter().copied().fold(0.0, f64::max);
        let weighted = diffs.iter().zip(&decay).map(|(d, w)| d * w).fold(0.0, f64::max);
        if let Some(p) = prev_weighted {
            if p > 0.0 {
                let r = weighted / p;
                ratios.push(r);
                if r >= 1.0 && residual >= tol {
                    return Err(Error::NonContraction { ratio: r, iterations });
                }
            }
        }
        prev_weighted = Some(weighted);
        x = next;
        if residual < tol {
            return Ok(PicardTrace { fields: x, iterations, residual, ratios });
        }
    }
    Err(Error::NonContraction { ratio: ratios.last().copied().unwrap_or(f64::NAN), iterations })
}

/// The full propagator applied to `u` from `t_s` to every later grid time.
#[derive(Clone, Debug)]
pub struct Propagation {
    pub start: usize,
    /// `S(t_k, t_s)u` for `k = start..=N`.
    pub fields: Vec<Field>,
    pub volterra: VolterraSolution,
}

impl Propagation {
    pub fn at(&self, k: usize) -> &Field {
        &self.fields[k - self.start]
    }
}

/// `S(t_k, t_s)u = S̃(t_k, t_s)u + i ∫_{t_s}^{t_k} S̃(t_k, r) v(r) dr` (composite trapezoid).
pub fn propagate_from(plan: &PropagatorPlan, start: usize, u: &Field) -> Result<Propagation> {
    let volterra = volterra_solve_from(plan, start, u)?;
    let cu_full = plan.coefficients(u)?;
    let u_energy = cu_full.energy();
    let cu = cu_full.values;
    let cv: Vec<Vec<C64>> = volterra.fields.iter().map(|f| plan.coefficients_against(f, u_energy).map(|c| c.values)).collect::<Result<_>>()?;
    let dt = plan.dt();
    let fields = (start..=plan.steps())
        .map(|k| {
            let mut sources = vec![Source { j: start, coeffs: &cu, weight: C64::new(1.0, 0.0) }];
            for j in start..=k {
                let w = trapezoid(dt, start, k, j);
                if w != 0.0 {
                    sources.push(Source { j, coeffs: &cv[j - start], weight: C64::new(0.0, w) });
                }
            }
            let (s, _) = transport(plan, k, &sources, false);
            Field::new(plan.grid, s)
        })
        .collect::<Result<_>>()?;
    Ok(Propagation { start, fields, volterra })
}

pub fn propagate_all(plan: &PropagatorPlan, u0: &Field) -> Result<Propagation> {
    propagate_from(plan, 0, u0)
}

/// `S(t_k, 0) u0`.
pub fn propagate(plan: &PropagatorPlan, u0: &Field, k: usize) -> Result<Field> {
    plan.check_index(0, k)?;
    Ok(propagate_all(plan, u0)?.fields.swap_remove(k))
}

/// `W(t_k) = ∫_0^{t_k} S(t_k, s) F(s) ds` (trapezoid in `s` on the plan grid).
#[derive(Clone, Debug)]
pub struct DuhamelIntegral {
    /// `W(t_k)` for `k = 0..=N`.
    pub fields: Vec<Field>,
    pub iterations: usize,
    pub residual: f64,
    pub ratios: Vec<f64>,
}

/// Sums `Σ_j w_kj S̃(t_k, t_j) G_j` (or the `K` analogue) for one `k`.
fn weighted_sum(plan: &PropagatorPlan, k: usize, coeffs: &[Vec<C64>], with_k: bool) -> Result<Field> {
    let dt = plan.dt();
    let sources: Vec<Source<'_>> = (0..=k)
        .filter_map(|j| {
            let w = trapezoid(dt, 0, k, j);
            (w != 0.0).then(|| Source { j, coeffs: &coeffs[j], weight: C64::new(w, 0.0) })
        })
        .collect();
    let (s, d) = transport(plan, k, &sources, with_k);
    if with_k {
        k_combine(plan, k, s, d)
    } else {
        Field::new(plan.grid, s)
    }
}

/// Writes `W = ∫ S̃(t, s) G(s) ds` with `G = F - i ∫_0^t K(t, s) G(s) ds`, so that
/// `(D_t + a^w)W = -iF`; `G` is found by Picard iteration from `G⁰ = F`.
pub fn duhamel_integral(plan: &PropagatorPlan, sources: &[Field]) -> Result<DuhamelIntegral> {
    let steps = plan.steps();
    if sources.len() != steps + 1 {
        return Err(Error::InvalidParameter(format!("expected {} source fields, got {}", steps + 1, sources.len())));
    }
    for f in sources {
        plan.grid.ensure_same(f.grid())?;
    }
    let coeffs_f: Vec<_> = sources.iter().map(|f| plan.coefficients(f)).collect::<Result<_>>()?;
    let energy = coeffs_f.iter().map(|c| c.energy()).fold(0.0, f64::max);
    let f_m1 = sources.iter().map(|f| lattice_m1(plan, f)).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
    let zero = || DuhamelIntegral { fields: vec![Field::zeros(plan.grid); steps + 1], iterations: 0, residual: 0.0, ratios: Vec::new() };
    if f_m1 == 0.0 {
        return Ok(zero());
    }
    let step = |cg: &[Vec<C64>]| -> Result<Vec<Field>> {
        (0..=steps)
            .map(|k| {
                let mut out = sources[k].clone();
                if k > 0 {
                    out.axpy(C64::new(0.0, -1.0), &weighted_sum(plan, k, cg, true)?);
                }
                Ok(out)
            })
            .collect()
    };
    let cf: Vec<Vec<C64>> = coeffs_f.into_iter().map(|c| c.values).collect();
    let first = step(&cf)?;
    let k_est = first
        .iter()
        .zip(sources)
        .enumerate()
        .skip(1)
        .map(|(k, (g, f))| lattice_m1(plan, &(g - f)).map(|d| d / (plan.times[k] * f_m1)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let lambda = 2.0 * k_est.max(0.5);
    let tol = plan.config.volterra_tol * f_m1;
    let trace = picard(plan, 0, lambda, tol, energy, first, step)?;
    let cg: Vec<Vec<C64>> = trace
        .fields
        .iter()
        .map(|g| plan.coefficients_against(g, energy).map(|c| c.values))
        .collect::<Result<_>>()?;
    let fields = (0..=steps)
        .map(|k| if k == 0 { Ok(Field::zeros(plan.grid)) } else { weighted_sum(plan, k, &cg, false) })
        .collect::<Result<_>>()?;
    Ok(DuhamelIntegral { fields, iterations: trace.iterations + 1, residual: trace.residual, ratios: trace.ratios })
}
