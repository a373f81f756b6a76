use serde::Serialize;

use super::analytic::{apply_F, AnalyticNonlinearity};
use super::solver::LinearSolver;
use crate::corekit::Field;
use crate::reference::{split_step_with, SplitStepConfig};
use crate::{Error, Result, C64};

/// Iteration cap of the Duhamel–Picard loop.
pub const MAX_DUHAMEL_ITER: usize = 30;

#[derive(Clone, Debug, Serialize)]
pub struct NlsSolution {
    pub times: Vec<f64>,
    /// `u(t_k)`.
    #[serde(skip)]
    pub fields: Vec<Field>,
    pub iterations: usize,
    /// Ratios of successive iterate distances.
    pub ratios: Vec<f64>,
    /// `sup_k ‖u(t_k) - S(t_k,0)u₀ + i ∫_0^{t_k} S(t_k,s)F(u(s)) ds‖_{M¹}` for the returned iterate.
    pub residual: f64,
    /// `sup_k ‖u(t_k)‖₂ / ‖u₀‖₂ - 1` in absolute value.
    pub mass_drift: f64,
}

impl NlsSolution {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }
}

fn duhamel_map<S: LinearSolver + ?Sized>(
    solver: &S,
    f: &AnalyticNonlinearity,
    linear: &[Field],
    u: &[Field],
) -> Result<Vec<Field>> {
    if f.is_zero() {
        return Ok(linear.to_vec());
    }
    let sources: Vec<Field> = u.iter().map(|v| apply_F(f, v)).collect();
    let w = solver.duhamel(&sources)?;
    Ok(linear
        .iter()
        .zip(&w)
        .map(|(l, w)| {
            let mut out = l.clone();
            out.axpy(C64::new(0.0, -1.0), w);
            out
        })
        .collect())
}

fn sup_m1<S: LinearSolver + ?Sized>(solver: &S, a: &[Field], b: &[Field]) -> Result<f64> {
    let mut m: f64 = 0.0;
    for (x, y) in a.iter().zip(b) {
        m = m.max(solver.m1(&(x - y))?);
    }
    Ok(m)
}

/// Picard iteration of `u = S(·,0)u₀ - i ∫ S(·,s) F(u(s)) ds` from `u⁰ = S(·,0)u₀`, stopping when
/// successive iterates differ by less than `tol` in `sup_k ‖·‖_{M¹}`.
pub fn duhamel_picard<S: LinearSolver + ?Sized>(
    u0: &Field,
    f: &AnalyticNonlinearity,
    solver: &S,
    tol: f64,
) -> Result<NlsSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let times = solver.times();
    let linear = solver.evolve_all(u0)?;
    let mut u = linear.clone();
    let mut ratios = Vec::new();
    let mut prev: Option<f64> = None;
    let mut iterations = 0;
    loop {
        if iterations == MAX_DUHAMEL_ITER {
            return Err(Error::DuhamelNonContraction { ratio: ratios.last().copied().unwrap_or(f64::NAN), iterations });
        }
        iterations += 1;
        let next = duhamel_map(solver, f, &linear, &u)?;
        let diff = sup_m1(solver, &next, &u)?;
        if let Some(p) = prev {
            if p > 0.0 {
                let r = diff / p;
                ratios.push(r);
                if r >= 1.0 && diff >= tol {
                    return Err(Error::DuhamelNonContraction { ratio: r, iterations });
                }
            }
        }
        prev = Some(diff);
        u = next;
        if diff < tol {
            break;
        }
    }
    let residual = if f.is_zero() { 0.0 } else { sup_m1(solver, &duhamel_map(solver, f, &linear, &u)?, &u)? };
    let n0 = u0.norm();
    let mass_drift = if n0 > 0.0 { u.iter().map(|v| (v.norm() / n0 - 1.0).abs()).fold(0.0, f64::max) } else { 0.0 };
    Ok(NlsSolution { times, fields: u, iterations, ratios, residual, mass_drift })
}

/// Largest `T0 ≤ t_max` (by bisection, `rounds` halvings) whose Duhamel run converges with
/// every Picard ratio at most `target`. `build(T0)` constructs the linear solver on `[0, T0]`.
pub fn find_t0<S, B>(
    u0: &Field,
    f: &AnalyticNonlinearity,
    t_max: f64,
    target: f64,
    tol: f64,
    rounds: usize,
    build: B,
) -> Result<(f64, NlsSolution)>
where
    S: LinearSolver,
    B: Fn(f64) -> Result<S>,
{
    let attempt = |t: f64| -> Option<NlsSolution> {
        let solver = build(t).ok()?;
        duhamel_picard(u0, f, &solver, tol).ok().filter(|s| s.max_ratio() <= target)
    };
    if let Some(s) = attempt(t_max) {
        return Ok((t_max, s));
    }
    let (mut lo, mut hi) = (0.0, t_max);
    let mut best = None;
    for _ in 0..rounds {
        let mid = 0.5 * (lo + hi);
        match attempt(mid) {
            Some(s) => {
                lo = mid;
                best = Some(s);
            }
            None => hi = mid,
        }
    }
    best.map(|s| (lo, s)).ok_or(Error::DuhamelNonContraction { ratio: f64::NAN, iterations: MAX_DUHAMEL_ITER })
}

/// Nonlinear Strang splitting for `D_t u + σ(D)u + V u + F(u) = 0`; the pointwise flow
/// `u' = -iF(u)` is exact for gauge-real `F` and RK4 (four substeps) otherwise.
pub fn nls_split_step(u0: &Field, f: &AnalyticNonlinearity, cfg: &SplitStepConfig, every: usize) -> Result<Vec<Field>> {
    let gauge = f.is_gauge_real();
    let mut flow = |u: &mut [C64], dt: f64| {
        if f.is_zero() {
            return;
        }
        for z in u.iter_mut() {
            if gauge {
                let r2 = z.norm_sqr();
                let phase: f64 = f.terms().iter().map(|m| m.re * r2.powi(m.k as i32)).sum();
                *z *= C64::from_polar(1.0, -dt * phase);
            } else {
                let h = 0.25 * dt;
                let rhs = |w: C64| C64::new(0.0, -1.0) * f.eval(w);
                for _ in 0..4 {
                    let k1 = rhs(*z);
                    let k2 = rhs(*z + 0.5 * h * k1);
                    let k3 = rhs(*z + 0.5 * h * k2);
                    let k4 = rhs(*z + h * k3);
                    *z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                }
            }
        }
    };
    split_step_with(u0, cfg, every, &mut flow)
}
