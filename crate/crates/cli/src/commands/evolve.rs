use gaborprop::corekit::Field;
use gaborprop::nonlinear::{duhamel_picard, nls_split_step, LinearSolver, SplitStepPropagator};
use gaborprop::parametrix::{propagate_all, Propagation, PropagatorPlan};
use gaborprop::reference::{free_gaussian, SplitStepConfig};
use gaborprop::Result;

use super::Run;
use crate::config::{InitialSpec, SymbolSpec};
use crate::report::Report;
use crate::svg::{line_plot, Axes, Series};

struct Evolution {
    u0: Field,
    plan: PropagatorPlan,
    prop: Propagation,
    reference: Vec<Field>,
}

fn evolve(run: &mut Run) -> Result<Evolution> {
    let a = run.cfg.symbol()?;
    let grid = run.cfg.grid()?;
    let u0 = run.cfg.initial_field()?;
    let plan = PropagatorPlan::new(a.clone(), grid, run.cfg.plan_config())?;
    run.timings.lap("plan");
    let prop = propagate_all(&plan, &u0)?;
    run.timings.lap("propagate");
    let ss = SplitStepPropagator::new(&a, grid, run.cfg.time.t_end, run.cfg.time.steps, run.cfg.tolerances.reference_substeps)?;
    let reference = ss.evolve_all(&u0)?;
    run.timings.lap("reference");
    Ok(Evolution { u0, plan, prop, reference })
}

fn volterra_summary(run: &mut Run, ev: &Evolution) {
    let v = &ev.prop.volterra;
    run.report.set("picard_iterations", v.iterations);
    run.report.set("picard_max_ratio", v.max_ratio());
    run.report.set("picard_ratios", &v.ratios);
    run.report.set("k_norm", v.k_norm);
    run.report.set("lambda", v.lambda);
    run.report.set("frame_error", ev.plan.frame_error());
    run.report.set("v_m1_over_u0_m1", v.m1_norms.iter().fold(0.0f64, |m, &x| m.max(x)) / v.u_m1);
}

/// `S(T,0)u₀` by the parametrix, checked against split-step (and the closed form for free packets).
pub fn propagate(mut run: Run) -> Result<Report> {
    let ev = evolve(&mut run)?;
    let steps = ev.plan.steps();
    let u_t = ev.prop.at(steps);
    volterra_summary(&mut run, &ev);
    run.report.set("l2_rel_err_vs_reference", u_t.rel_err(&ev.reference[steps]));
    run.report.set("unitarity_drift", (u_t.norm() / ev.u0.norm() - 1.0).abs());
    if let (SymbolSpec::Free, InitialSpec::Packet { x0, xi0, width, amp }) = (&run.cfg.symbol, &run.cfg.initial) {
        let mut exact = free_gaussian(*ev.plan.grid(), run.cfg.time.t_end, *x0, *xi0, *width);
        exact.scale((*amp).into());
        run.report.set("l2_rel_err_vs_exact", u_t.rel_err(&exact));
    }
    run.emit_field("u_T.field", u_t)?;
    run.finish()
}

/// Parametrix against split-step at every grid time.
pub fn compare(mut run: Run) -> Result<Report> {
    let ev = evolve(&mut run)?;
    volterra_summary(&mut run, &ev);
    let n0 = ev.u0.norm();
    let times = ev.plan.times().to_vec();
    let mut csv = String::from("t,rel_err,norm_ratio\n");
    let (mut errs, mut ratios) = (Vec::new(), Vec::new());
    for (k, &t) in times.iter().enumerate() {
        let e = ev.prop.at(k).rel_err(&ev.reference[k]);
        let r = ev.prop.at(k).norm() / n0;
        csv.push_str(&format!("{t},{e:e},{r:e}\n"));
        errs.push((t, e));
        ratios.push((t, (r - 1.0).abs()));
    }
    run.report.set("max_rel_err", errs.iter().map(|p| p.1).fold(0.0, f64::max));
    run.report.set("final_rel_err", errs.last().map(|p| p.1));
    run.report.set("max_unitarity_drift", ratios.iter().map(|p| p.1).fold(0.0, f64::max));
    run.emit("compare.csv", &csv)?;
    let series = [
        Series { label: "rel. error", points: errs.into_iter().filter(|p| p.0 > 0.0).collect(), markers: false },
        Series { label: "|‖u‖/‖u₀‖ - 1|", points: ratios.into_iter().filter(|p| p.0 > 0.0).collect(), markers: false },
    ];
    let axes = Axes { title: "parametrix vs split-step", x_label: "t", y_label: "", log_y: true, ..Default::default() };
    run.emit("compare.svg", &line_plot(axes, &series))?;
    run.finish()
}

/// Duhamel-Picard solution of the nonlinear problem on the parametrix, against nonlinear split-step.
pub fn nls(mut run: Run) -> Result<Report> {
    let a = run.cfg.symbol()?;
    let grid = run.cfg.grid()?;
    let u0 = run.cfg.initial_field()?;
    let f = run.cfg.nonlinearity()?;
    let plan = PropagatorPlan::new(a.clone(), grid, run.cfg.plan_config())?;
    run.timings.lap("plan");
    let sol = duhamel_picard(&u0, &f, &plan, run.cfg.tolerances.duhamel)?;
    run.timings.lap("duhamel");
    let (t_end, steps, sub) = (run.cfg.time.t_end, run.cfg.time.steps, run.cfg.tolerances.reference_substeps);
    let oracle = nls_split_step(&u0, &f, &SplitStepConfig::from_symbol(&a, grid, t_end, steps * sub)?, sub)?;
    run.timings.lap("oracle");
    let mut csv = String::from("t,rel_err_vs_oracle,l2\n");
    let mut worst = 0.0f64;
    for (k, t) in sol.times.iter().enumerate() {
        let e = sol.fields[k].rel_err(&oracle[k]);
        worst = worst.max(e);
        csv.push_str(&format!("{t},{e:e},{:e}\n", sol.fields[k].norm()));
    }
    run.report.set("terms", f.terms());
    run.report.set("iterations", sol.iterations);
    run.report.set("ratios", &sol.ratios);
    run.report.set("max_ratio", sol.max_ratio());
    run.report.set("residual", sol.residual);
    run.report.set("mass_drift", sol.mass_drift);
    run.report.set("final_rel_err_vs_oracle", sol.fields[steps].rel_err(&oracle[steps]));
    run.report.set("max_rel_err_vs_oracle", worst);
    run.emit("nls.csv", &csv)?;
    run.emit_field("u_T.field", &sol.fields[steps])?;
    run.finish()
}
