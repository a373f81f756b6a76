use std::f64::consts::PI;

use gaborprop::corekit::corpus::{packet_corpus, PacketRanges};
use gaborprop::corekit::{Field, Weight};
use gaborprop::parametrix::{apply_k, apply_s_tilde, propagate_all, PropagatorPlan};
use gaborprop::reference::free_gaussian;
use gaborprop::tfa::{dilated_window_mass, mixed_norm, stft};
use gaborprop::weyl::{weyl_apply, QuadPoly, SymbolModel};
use gaborprop::{Result, C64};
use serde_json::json;

use super::shared::{Evolved, SHIPPED};
use super::{Check, Outcome, Shared, SEED};
use crate::config::{presets, RunConfig};

pub fn affine(_: &Shared) -> Result<Outcome> {
    let mut o = Outcome::default();
    let mut cfg = presets::free();
    cfg.time.t_end = 1.0;
    cfg.time.steps = 16;
    let grid = cfg.grid()?;
    let u0 = cfg.initial_field()?;
    let cases = [
        ("transport", QuadPoly { cxi: 1.0, ..Default::default() }),
        ("position", QuadPoly { cx: 1.0, ..Default::default() }),
    ];
    for (name, poly) in cases {
        let plan = PropagatorPlan::new(SymbolModel::quadratic(poly), grid, cfg.plan_config())?;
        let p = propagate_all(&plan, &u0)?;
        let t = cfg.time.t_end;
        // D_t u + D u = 0 translates; D_t u + x u = 0 modulates.
        let exact = if poly.cxi != 0.0 {
            u0.map(|x, _| gaussian_packet(&cfg, x - t))
        } else {
            u0.map(|x, v| v * C64::from_polar(1.0, -t * x))
        };
        o.check(Check::le(format!("{name}_k_norm"), p.volterra.k_norm, 1e-12));
        o.check(Check::lt(format!("{name}_error_T1"), p.at(plan.steps()).rel_err(&exact), 1e-6));
        o.detail(&format!("{name}_picard_iterations"), p.volterra.iterations);
    }
    Ok(o)
}

fn gaussian_packet(cfg: &RunConfig, x: f64) -> C64 {
    match cfg.initial {
        crate::config::InitialSpec::Packet { x0, xi0, width, amp } => {
            C64::from_polar(amp * (-(x - x0).powi(2) / (2.0 * width * width)).exp(), xi0 * x)
        }
        crate::config::InitialSpec::File { .. } => C64::new(0.0, 0.0),
    }
}

/// `max_k ‖(D_t + a^w)S̃(t_k,0)u₀ - K(t_k,0)u₀‖ / ‖u₀‖` with a fourth-order time difference.
fn residual_of(e: &Evolved) -> Result<(f64, Vec<f64>)> {
    let plan = &e.plan;
    let n = plan.steps();
    let dt = plan.dt();
    let s: Vec<Field> = (0..=n).map(|k| apply_s_tilde(plan, k, 0, &e.u0)).collect::<Result<_>>()?;
    let mut per_k = Vec::new();
    for k in 2..=n - 2 {
        let mut dt_s = &(&s[k - 2] - &s[k + 2]) + &(&s[k + 1] - &s[k - 1]).scaled(C64::new(8.0, 0.0));
        dt_s.scale(C64::new(0.0, -1.0 / (12.0 * dt)));
        let lhs = &dt_s + &weyl_apply(plan.symbol(), plan.times()[k], &s[k])?;
        per_k.push((&lhs - &apply_k(plan, k, 0, &e.u0)?).norm() / e.u0.norm());
    }
    Ok((per_k.iter().copied().fold(0.0, f64::max), per_k))
}

pub fn residual(shared: &Shared) -> Result<Outcome> {
    let mut o = Outcome::default();
    for name in ["free", "harmonic"] {
        let (worst, per_k) = residual_of(shared.evolved(name)?)?;
        o.check(Check::lt(format!("{name}_residual_over_u0"), worst, 5e-3));
        o.detail(&format!("{name}_residual_by_step"), per_k);
    }
    o.detail("time_derivative", "fourth-order central difference on interior grid times");
    Ok(o)
}

/// Coarser levels of a shipped config: each halves `N` and the lattice density.
fn refinement_levels(base: &RunConfig) -> Vec<RunConfig> {
    let mut mid = base.clone();
    mid.lattice.beta = 2.0 * PI;
    mid.time.steps = base.time.steps / 2;
    mid.tolerances.truncation = 1e-4;
    let mut coarse = mid.clone();
    coarse.lattice.alpha = 2.0 * base.lattice.alpha;
    coarse.time.steps = base.time.steps / 4;
    coarse.tolerances.truncation = 1e-1;
    vec![coarse, mid]
}

pub fn oracle(shared: &Shared) -> Result<Outcome> {
    let mut o = Outcome::default();
    let free = shared.evolved("free")?;
    let harm = shared.evolved("harmonic")?;
    let weier = shared.evolved("weierstrass")?;
    o.check(Check::lt("free_err_vs_split_step", free.final_error(), 1e-3));
    if let crate::config::InitialSpec::Packet { x0, xi0, width, .. } = free.cfg.initial {
        let exact = free_gaussian(*free.plan.grid(), free.cfg.time.t_end, x0, xi0, width);
        o.detail("free_err_vs_closed_form", free.prop.at(free.plan.steps()).rel_err(&exact));
    }
    o.check(Check::lt("harmonic_err_vs_split_step", harm.final_error(), 1e-2));

    let n0 = weier.u0.norm();
    let (mut drift, mut agree): (f64, f64) = (0.0, 0.0);
    for k in 0..=weier.plan.steps() {
        drift = drift.max((weier.prop.at(k).norm() / n0 - 1.0).abs());
        agree = agree.max(weier.prop.at(k).rel_err(&weier.reference[k]));
    }
    o.check(Check::lt("weierstrass_unitarity_drift", drift, 1e-2));
    o.check(Check::lt("weierstrass_err_vs_split_step", agree, 3e-2));

    for (name, e) in [("free", free), ("harmonic", harm)] {
        let mut errs = Vec::new();
        let mut levels = Vec::new();
        for cfg in refinement_levels(&e.cfg) {
            let lv = Evolved::build(cfg.clone())?;
            errs.push(lv.final_error());
            levels.push(json!({ "steps": cfg.time.steps, "alpha": cfg.lattice.alpha, "beta": cfg.lattice.beta }));
        }
        errs.push(e.final_error());
        levels.push(json!({ "steps": e.cfg.time.steps, "alpha": e.cfg.lattice.alpha, "beta": e.cfg.lattice.beta }));
        let worst_step = errs.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        o.check(Check::lt(format!("{name}_refinement_error_ratio"), worst_step, 1.0));
        o.detail(&format!("{name}_refinement"), json!({ "levels": levels, "errors": errs }));
    }
    Ok(o)
}

pub fn norm_bounds(shared: &Shared) -> Result<Outcome> {
    let mut o = Outcome::default();
    let base = &shared.evolved("weierstrass")?.plan;
    let grid = *base.grid();
    let g = base.window();
    let ranges = PacketRanges { x0: 3.0, xi0: 4.0, width: (0.7, 1.4) };
    let corpus = packet_corpus(grid, 10, SEED, ranges);
    let every = 8;
    let ps = [1.0, 2.0, f64::INFINITY];
    let mut ratios: Vec<f64> = Vec::new();
    let mut per_p = [0.0f64; 3];
    for u0 in &corpus {
        let p = propagate_all(base, u0)?;
        let v0 = stft(u0, g)?;
        let n0: Vec<f64> = ps.iter().map(|&p| mixed_norm(&v0, p, p, &Weight::UNIT)).collect::<Result<_>>()?;
        for k in (every..=base.steps()).step_by(every) {
            let v = stft(p.at(k), g)?;
            for (i, &pp) in ps.iter().enumerate() {
                let r = mixed_norm(&v, pp, pp, &Weight::UNIT)? / n0[i];
                per_p[i] = per_p[i].max(r);
                ratios.push(r);
            }
        }
    }
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let constant = sorted[sorted.len() - 1];
    o.check(Check::lt("max_ratio_finite", constant, f64::INFINITY));
    o.check(Check::le("max_ratio_over_median", constant / median, 2.0));
    o.detail("constant", constant);
    o.detail("median", median);
    o.detail("max_ratio_by_p", json!({ "1": per_p[0], "2": per_p[1], "inf": per_p[2] }));
    o.detail("samples", ratios.len());
    Ok(o)
}

pub fn contraction(shared: &Shared) -> Result<Outcome> {
    let mut o = Outcome::default();
    for name in SHIPPED {
        let e = shared.evolved(name)?;
        let v = &e.prop.volterra;
        o.check(Check::lt(format!("{name}_picard_ratio"), v.max_ratio(), 0.9));
        // Gronwall: ‖v(t)‖ ≤ ‖K‖ e^{‖K‖ t} ‖u₀‖.
        let c = v.m1_norms.iter().copied().fold(0.0, f64::max) / v.u_m1;
        let bound = v.k_norm * (v.k_norm * e.cfg.time.t_end).exp();
        o.check(Check::le(format!("{name}_v_m1_over_u0_m1"), c, bound));
        o.detail(&format!("{name}_k_norm"), v.k_norm);
    }
    let grid = gaborprop::corekit::SpatialGrid::new(16.0, 2048)?;
    let g = gaborprop::corekit::window::gaussian_window(grid)?;
    let m1 = dilated_window_mass(&g, 1.0)?.mass;
    let mut masses = Vec::new();
    for tau in [1.0, 0.5, 0.25, 0.125] {
        let m = dilated_window_mass(&g, tau)?.mass;
        o.check(Check::le(format!("dilated_mass_ratio_tau{tau}"), m / m1, 1.5));
        masses.push([tau, m]);
    }
    o.detail("dilated_masses", masses);
    Ok(o)
}
