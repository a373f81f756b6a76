use std::f64::consts::PI;

use serde::Serialize;

use super::PropagatorPlan;
use crate::corekit::Field;
use crate::weyl::weyl_apply;
use crate::{Error, Result, C64};

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessReport {
    /// Number of lattice nodes tested.
    pub nodes: usize,
    /// `max_λ |defect(t_k, λ)|` per grid time.
    pub per_time: Vec<f64>,
    pub max_defect: f64,
    /// `max_defect / max_λ |V_g u0(λ)|`.
    pub relative: f64,
}

/// Checks the transport identity along the flow for a candidate solution `u(t_k)`:
///
/// `e^{-iψ(t)} V_g u(t)(χ(t)λ) - V_g u0(λ) + i ∫_0^t e^{-iψ(s)} ⟨u(s), π(χ(s)λ) b_s^w g⟩ ds = 0`,
///
/// with the integral by the trapezoid rule on the plan's time grid. Nodes where
/// `|V_g u0| < node_tol · max |V_g u0|` are skipped.
pub fn uniqueness_residual(plan: &PropagatorPlan, u_fields: &[Field], node_tol: f64) -> Result<UniquenessReport> {
    let steps = plan.steps();
    if u_fields.len() != steps + 1 {
        return Err(Error::InvalidParameter(format!("expected {} fields, got {}", steps + 1, u_fields.len())));
    }
    for u in u_fields {
        plan.grid.ensure_same(u.grid())?;
    }
    let kernel = &plan.kernel;
    let (_, width) = kernel.gaussian().expect("plan windows are Gaussian");
    let d_factor = C64::new(0.0, 2.0 * PI / (width * width));
    let nodes = plan.lattice.nodes();
    let v0: Vec<C64> = nodes.iter().map(|&z| kernel.inner(&u_fields[0], z)).collect();
    let peak = v0.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let active: Vec<usize> = (0..nodes.len()).filter(|&i| peak > 0.0 && v0[i].norm() >= node_tol * peak).collect();
    let au: Vec<Field> = u_fields
        .iter()
        .enumerate()
        .map(|(k, u)| weyl_apply(&plan.symbol, plan.times[k], u))
        .collect::<Result<_>>()?;
    let dt = plan.dt();
    let mut per_time = vec![0.0; steps + 1];
    for &node in &active {
        let mut integral = C64::new(0.0, 0.0);
        let mut prev = C64::new(0.0, 0.0);
        for k in 0..=steps {
            let fs = plan.flow_sample(0, k, node);
            let rot = C64::from_polar(1.0, -fs.dpsi);
            let poly = (C64::new(fs.c, 0.0), C64::new(fs.p, 0.0) + d_factor * fs.q);
            let g_term = kernel.inner(&au[k], fs.z) - kernel.inner_poly(&u_fields[k], fs.z, poly);
            let cur = rot * g_term;
            if k > 0 {
                integral += 0.5 * dt * (prev + cur);
            }
            prev = cur;
            let lhs = rot * kernel.inner(&u_fields[k], fs.z);
            let d = (lhs - v0[node] + C64::new(0.0, 1.0) * integral).norm();
            per_time[k] = f64::max(per_time[k], d);
        }
    }
    let max_defect = per_time.iter().copied().fold(0.0, f64::max);
    Ok(UniquenessReport {
        nodes: active.len(),
        per_time,
        max_defect,
        relative: if peak > 0.0 { max_defect / peak } else { 0.0 },
    })
}
