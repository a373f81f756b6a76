use crate::corekit::window::gaussian_window;
use crate::corekit::{Field, SpatialGrid, Weight, Window};
use crate::parametrix::{duhamel_integral, propagate_all, PropagatorPlan};
use crate::reference::split_step::Stepper;
use crate::reference::SplitStepConfig;
use crate::tfa::modulation_norm;
use crate::weyl::SymbolModel;
use crate::{Error, Result, C64};

/// A linear propagator `S(t, s)` on a uniform time grid `t_0 = 0 < … < t_N`.
pub trait LinearSolver {
    fn grid(&self) -> SpatialGrid;
    fn times(&self) -> Vec<f64>;
    /// `S(t_k, 0)u₀` for every `k`.
    fn evolve_all(&self, u0: &Field) -> Result<Vec<Field>>;
    /// `∫_0^{t_k} S(t_k, s)F(s) ds`, trapezoid in `s`.
    fn duhamel(&self, sources: &[Field]) -> Result<Vec<Field>>;
    /// Window for `M¹` norms.
    fn window(&self) -> &Window;

    fn m1(&self, f: &Field) -> Result<f64> {
        modulation_norm(f, 1.0, 1.0, &Weight::UNIT, self.window())
    }
}

impl LinearSolver for PropagatorPlan {
    fn grid(&self) -> SpatialGrid {
        *PropagatorPlan::grid(self)
    }
    fn times(&self) -> Vec<f64> {
        PropagatorPlan::times(self).to_vec()
    }
    fn evolve_all(&self, u0: &Field) -> Result<Vec<Field>> {
        Ok(propagate_all(self, u0)?.fields)
    }
    fn duhamel(&self, sources: &[Field]) -> Result<Vec<Field>> {
        Ok(duhamel_integral(self, sources)?.fields)
    }
    fn window(&self) -> &Window {
        PropagatorPlan::window(self)
    }
}

/// Strang splitting with `substeps` steps per grid interval.
#[derive(Clone, Debug)]
pub struct SplitStepPropagator {
    config: SplitStepConfig,
    steps: usize,
    substeps: usize,
    window: Window,
}

impl SplitStepPropagator {
    pub fn new(a: &SymbolModel, grid: SpatialGrid, t_end: f64, steps: usize, substeps: usize) -> Result<Self> {
        if steps == 0 || substeps == 0 {
            return Err(Error::InvalidParameter("split-step propagator needs steps, substeps ≥ 1".into()));
        }
        let config = SplitStepConfig::from_symbol(a, grid, t_end, steps * substeps)?;
        Ok(Self { config, steps, substeps, window: gaussian_window(grid)? })
    }

    pub fn config(&self) -> &SplitStepConfig {
        &self.config
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    /// `S(t_{k+1}, t_k)` in place.
    pub(crate) fn advance(&self, stepper: &mut Stepper<'_>, u: &mut [C64], k: usize) {
        for s in 0..self.substeps {
            stepper.step(u, k * self.substeps + s, &mut |_, _| {});
        }
    }
}

impl LinearSolver for SplitStepPropagator {
    fn grid(&self) -> SpatialGrid {
        self.config.grid
    }
    fn times(&self) -> Vec<f64> {
        let dt = self.config.t_end() / self.steps as f64;
        (0..=self.steps).map(|k| k as f64 * dt).collect()
    }
    fn evolve_all(&self, u0: &Field) -> Result<Vec<Field>> {
        self.config.grid.ensure_same(u0.grid())?;
        let mut stepper = Stepper::new(&self.config);
        let mut u = u0.values().to_vec();
        let mut out = vec![u0.clone()];
        for k in 0..self.steps {
            self.advance(&mut stepper, &mut u, k);
            out.push(Field::new(self.config.grid, u.clone())?);
        }
        Ok(out)
    }
    /// `P_k = S(t_k, t_{k-1})P_{k-1} + c_k F_k` with trapezoid weights `c_k`; `W_k = P_k - (dt/2) F_k`.
    fn duhamel(&self, sources: &[Field]) -> Result<Vec<Field>> {
        if sources.len() != self.steps + 1 {
            return Err(Error::InvalidParameter(format!("expected {} source fields, got {}", self.steps + 1, sources.len())));
        }
        let dt = self.config.t_end() / self.steps as f64;
        let grid = self.config.grid;
        let mut stepper = Stepper::new(&self.config);
        let mut p: Vec<C64> = sources[0].values().iter().map(|v| v * (0.5 * dt)).collect();
        let mut out = vec![Field::zeros(grid)];
        for k in 1..=self.steps {
            grid.ensure_same(sources[k].grid())?;
            self.advance(&mut stepper, &mut p, k - 1);
            for (x, f) in p.iter_mut().zip(sources[k].values()) {
                *x += f * dt;
            }
            let w: Vec<C64> = p.iter().zip(sources[k].values()).map(|(x, f)| x - f * (0.5 * dt)).collect();
            out.push(Field::new(grid, w)?);
        }
        Ok(out)
    }
    fn window(&self) -> &Window {
        &self.window
    }
}
