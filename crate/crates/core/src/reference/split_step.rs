use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::corekit::{Field, SpatialGrid};
use crate::weyl::{SymbolModel, SymbolPart};
use crate::{Error, Result, C64};

/// Potential samples `V(t, x_j)` for a split-step run.
#[derive(Clone, Debug, PartialEq)]
pub enum PotentialSamples {
    Zero,
    Static(Vec<f64>),
    /// One row per step, sampled at the step midpoint.
    PerStep(Vec<Vec<f64>>),
}

/// Strang splitting data for `D_t u + σ(D)u + V(t, x)u = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitStepConfig {
    pub grid: SpatialGrid,
    /// `σ(ξ_k)` in FFT order.
    pub sigma: Vec<f64>,
    pub potential: PotentialSamples,
    pub dt: f64,
    pub steps: usize,
}

impl SplitStepConfig {
    pub fn new(grid: SpatialGrid, sigma: impl Fn(f64) -> f64, potential: PotentialSamples, t_end: f64, steps: usize) -> Result<Self> {
        if !(t_end >= 0.0 && t_end.is_finite()) || steps == 0 {
            return Err(Error::InvalidParameter(format!("split-step needs T ≥ 0 and steps ≥ 1 (T={t_end}, steps={steps})")));
        }
        let cfg = Self { grid, sigma: grid.fft_freqs().into_iter().map(sigma).collect(), potential, dt: t_end / steps as f64, steps };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Splits a symbol of the form `σ(ξ) + V(t, x)`; mixed `xξ` terms and sampled parts are rejected.
    pub fn from_symbol(a: &SymbolModel, grid: SpatialGrid, t_end: f64, steps: usize) -> Result<Self> {
        let xs = grid.points();
        let freqs = grid.fft_freqs();
        let split_at = |t: f64| -> Result<(Vec<f64>, Vec<f64>)> {
            let mut sigma = vec![0.0; grid.n()];
            let mut pot = vec![0.0; grid.n()];
            for (i, w) in a.weights(t) {
                for (_, part) in &a.samples()[i].parts {
                    match part {
                        SymbolPart::Quadratic(q) => {
                            if q.cxxi != 0.0 {
                                return Err(Error::InvalidSymbol("split-step needs a symbol without xξ terms".into()));
                            }
                            for (s, xi) in sigma.iter_mut().zip(&freqs) {
                                *s += w * (q.c0 + q.cxi * xi + q.cxixi * xi * xi);
                            }
                            for (p, x) in pot.iter_mut().zip(&xs) {
                                *p += w * (q.cx * x + q.cxx * x * x);
                            }
                        }
                        SymbolPart::Multiplier(p) => {
                            for (s, xi) in sigma.iter_mut().zip(&freqs) {
                                *s += w * p.value(*xi);
                            }
                        }
                        SymbolPart::Potential(p) => {
                            for (v, x) in pot.iter_mut().zip(&xs) {
                                *v += w * p.value(*x);
                            }
                        }
                        SymbolPart::Sampled(_) => {
                            return Err(Error::InvalidSymbol("split-step cannot handle generic sampled symbols".into()))
                        }
                    }
                }
            }
            Ok((sigma, pot))
        };
        if a.is_autonomous() {
            let (sigma, pot) = split_at(0.0)?;
            let potential = if pot.iter().all(|v| *v == 0.0) { PotentialSamples::Zero } else { PotentialSamples::Static(pot) };
            let cfg = Self { grid, sigma, potential, dt: t_end / steps as f64, steps };
            cfg.validate()?;
            return Ok(cfg);
        }
        let dt = t_end / steps as f64;
        let (sigma, _) = split_at(0.0)?;
        let mut rows = Vec::with_capacity(steps);
        for k in 0..steps {
            let (s, pot) = split_at((k as f64 + 0.5) * dt)?;
            if s != sigma {
                return Err(Error::InvalidSymbol("split-step needs a time-independent multiplier part".into()));
            }
            rows.push(pot);
        }
        let cfg = Self { grid, sigma, potential: PotentialSamples::PerStep(rows), dt, steps };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let n = self.grid.n();
        let rows_ok = match &self.potential {
            PotentialSamples::Zero => true,
            PotentialSamples::Static(v) => v.len() == n && v.iter().all(|x| x.is_finite()),
            PotentialSamples::PerStep(rows) => {
                rows.len() == self.steps && rows.iter().all(|r| r.len() == n && r.iter().all(|x| x.is_finite()))
            }
        };
        if self.sigma.len() != n || !rows_ok || !self.sigma.iter().all(|s| s.is_finite()) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter("split-step samples do not match the grid or are not finite".into()));
        }
        Ok(())
    }

    pub fn t_end(&self) -> f64 {
        self.dt * self.steps as f64
    }

    fn potential_row(&self, k: usize) -> Option<&[f64]> {
        match &self.potential {
            PotentialSamples::Zero => None,
            PotentialSamples::Static(v) => Some(v),
            PotentialSamples::PerStep(rows) => Some(&rows[k]),
        }
    }
}

/// Stepper state: FFT plans and the half-step multiplier.
pub(crate) struct Stepper<'a> {
    cfg: &'a SplitStepConfig,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    half: Vec<C64>,
    scratch: Vec<C64>,
}

impl<'a> Stepper<'a> {
    pub(crate) fn new(cfg: &'a SplitStepConfig) -> Self {
        let n = cfg.grid.n();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scale = 1.0 / n as f64;
        let half = cfg.sigma.iter().map(|s| C64::from_polar(scale, -0.5 * cfg.dt * s)).collect();
        let scratch = vec![C64::new(0.0, 0.0); fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len())];
        Self { cfg, fwd, inv, half, scratch }
    }

    /// `e^{-i dt/2 σ(D)}`. Grid offsets only contribute a phase that cancels between the transforms.
    fn kinetic(&mut self, u: &mut [C64]) {
        self.fwd.process_with_scratch(u, &mut self.scratch);
        for (v, m) in u.iter_mut().zip(&self.half) {
            *v *= m;
        }
        self.inv.process_with_scratch(u, &mut self.scratch);
    }

    /// One Strang step `k`; `middle` acts between the half kinetic steps after the potential.
    pub(crate) fn step(&mut self, u: &mut [C64], k: usize, middle: &mut dyn FnMut(&mut [C64], f64)) {
        self.kinetic(u);
        if let Some(v) = self.cfg.potential_row(k) {
            for (x, p) in u.iter_mut().zip(v) {
                *x *= C64::from_polar(1.0, -self.cfg.dt * p);
            }
        }
        middle(u, self.cfg.dt);
        self.kinetic(u);
    }
}

/// Strang splitting `e^{-i dt/2 σ(D)} e^{-i dt V} e^{-i dt/2 σ(D)}` per step.
pub fn split_step(u0: &Field, cfg: &SplitStepConfig) -> Result<Field> {
    Ok(split_step_trajectory(u0, cfg, cfg.steps)?.pop().expect("trajectory holds the initial field"))
}

/// Snapshots after every `every` steps, starting with `u0`.
pub fn split_step_trajectory(u0: &Field, cfg: &SplitStepConfig, every: usize) -> Result<Vec<Field>> {
    split_step_with(u0, cfg, every, &mut |_, _| {})
}

/// Split-step run with an extra pointwise flow `middle(u, dt)` applied after the potential in each step.
pub fn split_step_with(
    u0: &Field,
    cfg: &SplitStepConfig,
    every: usize,
    middle: &mut dyn FnMut(&mut [C64], f64),
) -> Result<Vec<Field>> {
    cfg.grid.ensure_same(u0.grid())?;
    if every == 0 {
        return Err(Error::InvalidParameter("snapshot interval must be positive".into()));
    }
    let mut stepper = Stepper::new(cfg);
    let mut u = u0.values().to_vec();
    let mut out = vec![u0.clone()];
    for k in 0..cfg.steps {
        stepper.step(&mut u, k, middle);
        if (k + 1) % every == 0 || k + 1 == cfg.steps {
            out.push(Field::new(cfg.grid, u.clone())?);
        }
    }
    Ok(out)
}
