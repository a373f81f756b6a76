use gaborprop::nonlinear::{duhamel_picard, nls_split_step, AnalyticNonlinearity, LinearSolver};
use gaborprop::parametrix::PropagatorPlan;
use gaborprop::reference::SplitStepConfig;
use gaborprop::Result;

use super::{Check, Outcome, Shared};
use crate::config::presets;

/// Total Strang steps of the nonlinear oracle.
const ORACLE_STEPS: usize = 2048;

pub fn nls(_: &Shared) -> Result<Outcome> {
    let mut o = Outcome::default();
    let cfg = presets::nls();
    let a = cfg.symbol()?;
    let grid = cfg.grid()?;
    let u0 = cfg.initial_field()?;
    let f = cfg.nonlinearity()?;
    let plan = PropagatorPlan::new(a.clone(), grid, cfg.plan_config())?;
    let tol = cfg.tolerances.duhamel;
    let sol = duhamel_picard(&u0, &f, &plan, tol)?;
    o.check(Check::lt("picard_max_ratio", sol.max_ratio(), 0.9));
    o.check(Check::lt("duhamel_residual", sol.residual, tol));

    let n = cfg.time.steps;
    let every = ORACLE_STEPS / n;
    let oracle = nls_split_step(&u0, &f, &SplitStepConfig::from_symbol(&a, grid, cfg.time.t_end, every * n)?, every)?;
    o.check(Check::lt("err_vs_split_step_at_T", sol.fields[n].rel_err(&oracle[n]), 1e-2));

    let zero = duhamel_picard(&u0, &AnalyticNonlinearity::zero(), &plan, tol)?;
    let linear = plan.evolve_all(&u0)?;
    let identical = zero.fields.iter().zip(&linear).all(|(x, y)| x.values() == y.values());
    o.check(Check::ge("zero_nonlinearity_bitwise_linear", identical as u8 as f64, 1.0));

    o.detail("iterations", sol.iterations);
    o.detail("ratios", &sol.ratios);
    o.detail("mass_drift", sol.mass_drift);
    o.detail("oracle_steps", every * n);
    Ok(o)
}
