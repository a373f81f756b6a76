use std::f64::consts::PI;

use super::*;
use crate::corekit::fourier::apply_multiplier;
use crate::weyl::QuadPoly;

fn grid() -> SpatialGrid {
    SpatialGrid::new(32.0, 512).unwrap()
}

fn config(t_end: f64, steps: usize) -> PlanConfig {
    PlanConfig::new(0.25, PI, 10.0, 5.0 * PI, t_end, steps)
}

fn packet(g: SpatialGrid) -> Field {
    Field::from_fn(g, |x| C64::from_polar((-0.5 * (x + 1.0).powi(2)).exp(), 2.0 * x))
}

fn linear(cx: f64, cxi: f64) -> SymbolModel {
    SymbolModel::quadratic(QuadPoly { cx, cxi, ..QuadPoly::default() })
}

#[test]
fn s_tilde_is_identity_at_the_source() {
    let plan = PropagatorPlan::new(SymbolModel::free(), grid(), config(0.25, 8)).unwrap();
    let u = packet(plan.grid);
    for j in [0, 3, 8] {
        let back = apply_s_tilde(&plan, j, j, &u).unwrap();
        assert!(back.rel_err(&u) < 1e-8, "j={j}: {}", back.rel_err(&u));
    }
    assert!(apply_s_tilde(&plan, 2, 5, &u).is_err());
}

#[test]
fn translation_symbol_transports_exactly() {
    let plan = PropagatorPlan::new(linear(0.0, 1.0), grid(), config(1.0, 4)).unwrap();
    let u = packet(plan.grid);
    let out = apply_s_tilde(&plan, 4, 0, &u).unwrap();
    let exact = Field::from_fn(plan.grid, |x| C64::from_polar((-0.5 * x.powi(2)).exp(), 2.0 * (x - 1.0)));
    assert!(out.rel_err(&exact) < 1e-8, "{}", out.rel_err(&exact));
}

#[test]
fn position_symbol_modulates() {
    let plan = PropagatorPlan::new(linear(1.0, 0.0), grid(), config(1.0, 4)).unwrap();
    let u = packet(plan.grid);
    let out = apply_s_tilde(&plan, 4, 0, &u).unwrap();
    let exact = u.map(|x, v| v * C64::from_polar(1.0, -x));
    assert!(out.rel_err(&exact) < 1e-8, "{}", out.rel_err(&exact));
}

#[test]
fn affine_symbols_have_no_remainder() {
    let plan = PropagatorPlan::new(linear(0.7, -1.3), grid(), config(0.5, 4)).unwrap();
    let u = packet(plan.grid);
    let k = apply_k(&plan, 3, 1, &u).unwrap();
    assert!(k.max_abs() < 1e-9 * u.max_abs(), "{}", k.max_abs());
    let sol = volterra_solve(&plan, &u).unwrap();
    assert!(sol.iterations <= 2);
}

#[test]
fn free_remainder_is_eta_squared() {
    let plan = PropagatorPlan::new(SymbolModel::free(), grid(), config(0.25, 4)).unwrap();
    let fs = plan.flow_sample(0, 2, plan.lattice.index(1, 1));
    let b = b_symbol(&plan.symbol, plan.times[2], &fs);
    for (y, eta) in [(0.3, -1.0), (-2.0, 4.5)] {
        assert!((b.eval(y, eta) - C64::new(eta * eta, 0.0)).norm() < 1e-9);
    }
    let img = atom_image(&plan, 2, &fs).unwrap();
    let (amp, w) = plan.kernel.gaussian().unwrap();
    let exact = Field::from_real_fn(*img.grid(), |x| {
        amp * (-PI * (x / w).powi(2)).exp() * (2.0 * PI / (w * w) - 4.0 * PI * PI * x * x / w.powi(4))
    });
    assert!(img.rel_err(&exact) < 1e-8, "{}", img.rel_err(&exact));
}

#[test]
fn k_routes_agree() {
    let cfg = PlanConfig::new(0.25, PI, 8.0, 4.0 * PI, 0.25, 4);
    let plan = PropagatorPlan::new(SymbolModel::harmonic(), grid(), cfg).unwrap();
    let u = packet(plan.grid);
    let fast = apply_k(&plan, 3, 0, &u).unwrap();
    let slow = apply_k_images(&plan, 3, 0, &u).unwrap();
    assert!(fast.max_abs() > 1e-3);
    assert!(fast.rel_err(&slow) < 1e-6, "{}", fast.rel_err(&slow));
}

#[test]
fn free_propagation_matches_spectral_solution() {
    let plan = PropagatorPlan::new(SymbolModel::free(), grid(), config(0.25, 16)).unwrap();
    let u = packet(plan.grid);
    let prop = propagate_all(&plan, &u).unwrap();
    let exact = apply_multiplier(&u, |xi| C64::from_polar(1.0, -0.25 * xi * xi));
    let err = prop.at(16).rel_err(&exact);
    assert!(err < 1e-3, "{err}");
    assert!(prop.volterra.max_ratio() < 1.0);
    let report = uniqueness_residual(&plan, &prop.fields, 1e-3).unwrap();
    assert!(report.relative < 1e-2, "{:?}", report.relative);
}

#[test]
fn duhamel_integral_of_constant_source() {
    let g = grid();
    let plan = PropagatorPlan::new(SymbolModel::free(), g, PlanConfig::new(0.25, PI, 15.75, 5.0 * PI, 0.25, 16)).unwrap();
    let f = packet(g);
    let w = duhamel_integral(&plan, &vec![f.clone(); 17]).unwrap();
    let t = 0.25;
    let exact = apply_multiplier(&f, |xi| {
        let s = xi * xi;
        if s < 1e-12 { C64::new(t, 0.0) } else { (C64::new(1.0, 0.0) - C64::from_polar(1.0, -t * s)) / C64::new(0.0, s) }
    });
    let err = w.fields[16].rel_err(&exact);
    assert!(err < 1e-3, "{err}");
    assert!(w.fields[0].max_abs() == 0.0);
    let none = duhamel_integral(&plan, &vec![Field::zeros(g); 17]).unwrap();
    assert_eq!(none.iterations, 0);
}
