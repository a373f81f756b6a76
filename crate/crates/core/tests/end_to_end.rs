use std::f64::consts::PI;

use gaborprop::corekit::window::gaussian_window;
use gaborprop::corekit::{Field, SpatialGrid};
use gaborprop::nonlinear::{LinearSolver, SplitStepPropagator};
use gaborprop::parametrix::{propagate_all, PlanConfig, PropagatorPlan};
use gaborprop::reference::free_gaussian;
use gaborprop::tfa::{dual_window, gabor_analysis, gabor_synthesis, stft, PhaseLattice};
use gaborprop::weyl::SymbolModel;
use gaborprop::C64;

fn packet(grid: SpatialGrid) -> Field {
    Field::from_fn(grid, |x| C64::from_polar((-(x + 1.0).powi(2) / 2.0).exp(), 2.0 * x))
}

#[test]
fn stft_energy_is_field_energy() {
    // ‖V_g f‖² = 2π ‖f‖² ‖g‖² on the STFT grid, with ‖g‖ = 1.
    let grid = SpatialGrid::new(32.0, 256).unwrap();
    let f = packet(grid);
    let v = stft(&f, &gaussian_window(grid).unwrap()).unwrap();
    let cell = grid.h() * grid.dxi();
    let energy: f64 = v.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * cell;
    let want = 2.0 * PI * f.norm().powi(2);
    assert!((energy / want - 1.0).abs() < 1e-10, "{energy} vs {want}");
}

#[test]
fn gabor_frame_reconstructs_packet() {
    let grid = SpatialGrid::new(32.0, 512).unwrap();
    let g = gaussian_window(grid).unwrap();
    let lat = PhaseLattice::new(grid, 0.5, PI, 14.0, 6.0 * PI).unwrap();
    let gamma = dual_window(&g, &lat).unwrap();
    let f = packet(grid);
    let back = gabor_synthesis(&gabor_analysis(&f, &g, &lat).unwrap(), &gamma).unwrap();
    assert!(back.rel_err(&f) < 1e-8);
}

#[test]
fn free_propagation_matches_closed_form_and_split_step() {
    let grid = SpatialGrid::new(32.0, 512).unwrap();
    let (t, steps) = (0.2, 16);
    let a = SymbolModel::free();
    let plan = PropagatorPlan::new(a.clone(), grid, PlanConfig::new(0.25, PI, 15.75, 5.0 * PI, t, steps)).unwrap();
    let u0 = packet(grid);
    let p = propagate_all(&plan, &u0).unwrap();
    let exact = free_gaussian(grid, t, -1.0, 2.0, 1.0);
    assert!(p.at(steps).rel_err(&exact) < 1e-3);
    assert!((p.at(steps).norm() / u0.norm() - 1.0).abs() < 1e-3);

    let ss = SplitStepPropagator::new(&a, grid, t, steps, 4).unwrap();
    let reference = ss.evolve_all(&u0).unwrap();
    for k in [steps / 2, steps] {
        assert!(p.at(k).rel_err(&reference[k]) < 1e-3, "step {k}");
    }
    // The plan is itself a linear solver.
    let again = plan.evolve_all(&u0).unwrap();
    assert_eq!(again[steps].values(), p.at(steps).values());
}
