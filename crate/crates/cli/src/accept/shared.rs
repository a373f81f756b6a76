use std::sync::OnceLock;

use gaborprop::corekit::Field;
use gaborprop::nonlinear::{LinearSolver, SplitStepPropagator};
use gaborprop::parametrix::{propagate_all, Propagation, PropagatorPlan};
use gaborprop::{Error, Result};

use crate::config::{presets, RunConfig};

/// A shipped configuration propagated by the parametrix and by split-step.
pub struct Evolved {
    pub cfg: RunConfig,
    pub plan: PropagatorPlan,
    pub u0: Field,
    pub prop: Propagation,
    pub reference: Vec<Field>,
}

impl Evolved {
    pub fn build(cfg: RunConfig) -> Result<Self> {
        let a = cfg.symbol()?;
        let grid = cfg.grid()?;
        let u0 = cfg.initial_field()?;
        let plan = PropagatorPlan::new(a.clone(), grid, cfg.plan_config())?;
        let prop = propagate_all(&plan, &u0)?;
        let ss = SplitStepPropagator::new(&a, grid, cfg.time.t_end, cfg.time.steps, cfg.tolerances.reference_substeps)?;
        let reference = ss.evolve_all(&u0)?;
        Ok(Self { cfg, plan, u0, prop, reference })
    }

    pub fn final_error(&self) -> f64 {
        let n = self.plan.steps();
        self.prop.at(n).rel_err(&self.reference[n])
    }
}

/// Propagations reused across criteria, computed on first use.
#[derive(Default)]
pub struct Shared {
    evolved: [OnceLock<std::result::Result<Evolved, String>>; 3],
}

pub const SHIPPED: [&str; 3] = ["free", "harmonic", "weierstrass"];

impl Shared {
    pub fn evolved(&self, name: &str) -> Result<&Evolved> {
        let i = SHIPPED.iter().position(|n| *n == name).ok_or_else(|| Error::InvalidParameter(format!("no shipped config {name}")))?;
        let cell = self.evolved[i].get_or_init(|| {
            let cfg = presets::by_name(name).expect("shipped names have presets");
            Evolved::build(cfg).map_err(|e| format!("{name}: {e}"))
        });
        cell.as_ref().map_err(|e| Error::InvalidParameter(e.clone()))
    }
}
