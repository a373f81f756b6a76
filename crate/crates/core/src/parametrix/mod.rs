//! Gabor-frame parametrix `S̃(t,s)`, error operator `K(t,s)`, Volterra correction and the full propagator.
//!
//! Lattice nodes `λ` are anchored at the source time `s`: the coefficients `V_γ f(λ)` are taken on
//! the lattice itself and the atoms `π(λ)g` are transported to `χ(t,s)λ`. Since `χ(t,s)` is
//! symplectic this is the same phase-space integral, and `S̃(s,s) = Id` holds by frame duality.

mod atom;
mod transport;
mod uniqueness;
mod volterra;

use serde::{Deserialize, Serialize};

pub use atom::{apply_k_images, atom_image, b_symbol, RemainderSymbol};
pub use transport::{apply_k, apply_s_tilde};
pub use uniqueness::{uniqueness_residual, UniquenessReport};
pub use volterra::{duhamel_integral, lattice_m1, propagate, DuhamelIntegral, propagate_all, propagate_from, volterra_solve, volterra_solve_from, Propagation, VolterraSolution};

use crate::corekit::shift::AtomKernel;
use crate::corekit::window::gaussian_window;
use crate::corekit::{Field, PhasePoint, SpatialGrid, Window};
use crate::hamflow::{integrate_flow, uniform_times, PhaseBox};
use crate::tfa::{dual_window, gabor_analysis, gabor_synthesis, GaborCoeffs, PhaseLattice};
use crate::weyl::SymbolModel;
use crate::{Error, Result, C64};
use rayon::prelude::*;

/// Numerical parameters of a propagator plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub alpha: f64,
    pub beta: f64,
    pub x_max: f64,
    pub xi_max: f64,
    pub t_end: f64,
    pub steps: usize,
    #[serde(default = "default_volterra_tol")]
    pub volterra_tol: f64,
    #[serde(default = "default_max_picard")]
    pub max_picard: usize,
    #[serde(default = "default_truncation_tol")]
    pub truncation_tol: f64,
    /// Phase box `(X, Ξ)` for the flow; defaults to the grid domain and band.
    #[serde(default)]
    pub phase_box: Option<(f64, f64)>,
    /// Memory budget for cached flow samples, in bytes.
    #[serde(default = "default_cache_budget")]
    pub cache_budget: usize,
}

fn default_volterra_tol() -> f64 {
    1e-8
}
fn default_max_picard() -> usize {
    30
}
fn default_truncation_tol() -> f64 {
    1e-6
}
fn default_cache_budget() -> usize {
    1 << 30
}

impl PlanConfig {
    pub fn new(alpha: f64, beta: f64, x_max: f64, xi_max: f64, t_end: f64, steps: usize) -> Self {
        Self {
            alpha,
            beta,
            x_max,
            xi_max,
            t_end,
            steps,
            volterra_tol: default_volterra_tol(),
            max_picard: default_max_picard(),
            truncation_tol: default_truncation_tol(),
            phase_box: None,
            cache_budget: default_cache_budget(),
        }
    }
}

/// Flow data of one node between two grid times.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FlowSample {
    /// `χ(t, s)λ`.
    pub z: PhasePoint,
    /// `ψ(t) - ψ(s)` along the trajectory.
    pub dpsi: f64,
    /// `a₂ + a₁` at `z`.
    pub c: f64,
    /// `∂_x a₂`, `∂_ξ a₂` at `z`.
    pub p: f64,
    pub q: f64,
}

/// Trajectories of all lattice nodes for every source time (one source for autonomous symbols).
#[derive(Clone, Debug)]
pub(crate) struct FlowTable {
    autonomous: bool,
    steps: usize,
    data: Vec<Vec<FlowSample>>,
}

impl FlowTable {
    fn sample(&self, j: usize, k: usize, node: usize) -> &FlowSample {
        debug_assert!(k >= j);
        if self.autonomous {
            &self.data[0][node * (self.steps + 1) + (k - j)]
        } else {
            let len = self.steps + 1 - j;
            &self.data[j][node * len + (k - j)]
        }
    }
}

/// Everything needed to apply `S̃`, `K` and the full propagator on a fixed time grid.
#[derive(Clone, Debug)]
pub struct PropagatorPlan {
    pub(crate) symbol: SymbolModel,
    pub(crate) grid: SpatialGrid,
    pub(crate) lattice: PhaseLattice,
    pub(crate) window: Window,
    pub(crate) dual: Window,
    pub(crate) kernel: AtomKernel,
    pub(crate) times: Vec<f64>,
    pub(crate) flows: FlowTable,
    pub(crate) config: PlanConfig,
    pub(crate) frame_error: f64,
    pub(crate) phase_box: PhaseBox,
}

/// Relative size below which coefficients are skipped.
pub(crate) const COEFF_CUTOFF: f64 = 1e-12;

impl PropagatorPlan {
    pub fn new(symbol: SymbolModel, grid: SpatialGrid, config: PlanConfig) -> Result<Self> {
        if !(config.t_end > 0.0 && config.t_end.is_finite()) || config.steps == 0 {
            return Err(Error::InvalidParameter("time grid needs T > 0 and N ≥ 1".into()));
        }
        if !(config.volterra_tol > 0.0) || config.max_picard == 0 {
            return Err(Error::InvalidParameter("Volterra tolerance and iteration cap must be positive".into()));
        }
        let lattice = PhaseLattice::new(grid, config.alpha, config.beta, config.x_max, config.xi_max)?;
        let window = gaussian_window(grid)?;
        let dual = dual_window(&window, &lattice)?;
        let frame_error = frame_check(&window, &dual, &lattice)?;
        if frame_error > 1e-8 {
            return Err(Error::InvalidLattice(format!("frame reconstruction error {frame_error:e} above 1e-8")));
        }
        let (bx, bxi) = config.phase_box.unwrap_or((0.5 * grid.length(), grid.nyquist()));
        let phase_box = PhaseBox { x_max: bx, xi_max: bxi, x_periodic: symbol.principal_x_periodic(grid.length()) };
        let times = uniform_times(config.t_end, config.steps);
        let flows = build_flows(&symbol, &lattice, &times, &phase_box, config.cache_budget)?;
        let kernel = AtomKernel::new(&window);
        Ok(Self { symbol, grid, lattice, window, dual, kernel, times, flows, config, frame_error, phase_box })
    }

    pub fn symbol(&self) -> &SymbolModel {
        &self.symbol
    }
    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }
    pub fn lattice(&self) -> &PhaseLattice {
        &self.lattice
    }
    pub fn window(&self) -> &Window {
        &self.window
    }
    pub fn dual(&self) -> &Window {
        &self.dual
    }
    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn dt(&self) -> f64 {
        self.config.t_end / self.config.steps as f64
    }
    pub fn steps(&self) -> usize {
        self.config.steps
    }
    pub fn config(&self) -> &PlanConfig {
        &self.config
    }
    pub fn frame_error(&self) -> f64 {
        self.frame_error
    }
    pub fn phase_box(&self) -> &PhaseBox {
        &self.phase_box
    }

    /// Flow data of node `node` from `t_j` to `t_k`.
    pub fn flow_sample(&self, j: usize, k: usize, node: usize) -> FlowSample {
        *self.flows.sample(j, k, node)
    }

    /// `V_γ f(λ)` on the lattice, rejecting fields that leak past the lattice box.
    pub fn coefficients(&self, f: &Field) -> Result<GaborCoeffs> {
        let c = gabor_analysis(f, &self.dual, &self.lattice)?;
        if c.truncation_loss > self.config.truncation_tol {
            return Err(Error::TruncationLoss { loss: c.truncation_loss });
        }
        Ok(c)
    }

    /// As [`Self::coefficients`], but the lost energy is measured against `reference` (an energy),
    /// so that tiny correction fields are not rejected for roundoff spread.
    pub(crate) fn coefficients_against(&self, f: &Field, reference: f64) -> Result<GaborCoeffs> {
        let c = gabor_analysis(f, &self.dual, &self.lattice)?;
        let kept = c.energy();
        let lost = if c.truncation_loss < 1.0 { kept * c.truncation_loss / (1.0 - c.truncation_loss) } else { f64::INFINITY };
        let loss = if reference > 0.0 { lost / reference } else { c.truncation_loss };
        if loss > self.config.truncation_tol {
            return Err(Error::TruncationLoss { loss });
        }
        Ok(c)
    }

    pub(crate) fn check_index(&self, j: usize, k: usize) -> Result<()> {
        if j > k || k > self.config.steps {
            return Err(Error::InvalidParameter(format!("need s ≤ t on the grid, got indices s={j}, t={k}")));
        }
        Ok(())
    }
}

/// Relative error of analysis with `g`, synthesis with `γ` on a localized test field.
fn frame_check(g: &Window, gamma: &Window, lat: &PhaseLattice) -> Result<f64> {
    let grid = *lat.grid();
    let c = 0.25 * lat.x_max().min(4.0);
    let f = Field::from_fn(grid, |x| {
        C64::from_polar((-0.5 * (x - c).powi(2)).exp(), 1.5 * x) + 0.5 * (-(x + c).powi(2)).exp()
    });
    let back = gabor_synthesis(&gabor_analysis(&f, g, lat)?, gamma)?;
    Ok(back.rel_err(&f))
}

fn build_flows(
    a: &SymbolModel,
    lat: &PhaseLattice,
    times: &[f64],
    bx: &PhaseBox,
    budget: usize,
) -> Result<FlowTable> {
    let nodes = lat.nodes();
    let steps = times.len() - 1;
    let autonomous = a.is_autonomous();
    let starts = if autonomous { 1 } else { steps + 1 };
    let samples: usize = (0..starts).map(|j| nodes.len() * (steps + 1 - j)).sum();
    let needed = samples * std::mem::size_of::<FlowSample>();
    if needed > budget {
        return Err(Error::CacheBudget { needed, budget });
    }
    let data = (0..starts)
        .map(|j| {
            let ts = &times[j..];
            let per_node: Vec<Vec<FlowSample>> = nodes
                .par_iter()
                .map(|&z| {
                    let tr = integrate_flow(a, z, ts, bx)?;
                    Ok((0..tr.len())
                        .map(|i| FlowSample {
                            z: tr.point(i),
                            dpsi: tr.psi[i],
                            c: tr.a21[i],
                            p: tr.dx_a2[i],
                            q: tr.dxi_a2[i],
                        })
                        .collect())
                })
                .collect::<Result<_>>()?;
            Ok(per_node.into_iter().flatten().collect())
        })
        .collect::<Result<Vec<Vec<FlowSample>>>>()?;
    Ok(FlowTable { autonomous, steps, data })
}

#[cfg(test)]
mod tests;
