use std::f64::consts::PI;

use super::*;
use crate::corekit::{Field, SpatialGrid};
use crate::hamflow::{integrate_flow, PhaseBox};
use crate::corekit::PhasePoint;
use crate::weyl::{Order, SymbolModel, SymbolPart};
use crate::C64;

fn grid() -> SpatialGrid {
    SpatialGrid::new(32.0, 512).unwrap()
}

#[test]
fn free_split_step_matches_closed_form() {
    let g = grid();
    let u0 = free_gaussian(g, 0.0, -1.0, 1.5, 1.0);
    let cfg = SplitStepConfig::from_symbol(&SymbolModel::free(), g, 1.0, 10).unwrap();
    let u = split_step(&u0, &cfg).unwrap();
    let exact = free_gaussian(g, 1.0, -1.0, 1.5, 1.0);
    assert!(u.rel_err(&exact) < 1e-8, "{}", u.rel_err(&exact));
}

#[test]
fn harmonic_half_period_flips_sign() {
    let g = grid();
    let u0 = Field::from_fn(g, |x| C64::from_polar((-0.5 * (x - 1.0).powi(2)).exp(), 0.7 * x));
    let cfg = SplitStepConfig::from_symbol(&SymbolModel::harmonic(), g, PI, 4000).unwrap();
    let u = split_step(&u0, &cfg).unwrap();
    let flipped = u0.scaled(C64::new(-1.0, 0.0));
    assert!(u.rel_err(&flipped) < 1e-4, "{}", u.rel_err(&flipped));
}

#[test]
fn split_step_is_second_order_and_unitary() {
    let g = grid();
    let u0 = Field::from_fn(g, |x| C64::from_polar((-0.5 * x * x).exp(), x));
    let a = SymbolModel::harmonic();
    let run = |steps| split_step(&u0, &SplitStepConfig::from_symbol(&a, g, 1.0, steps).unwrap()).unwrap();
    let fine = run(1600);
    let (e1, e2) = (run(50).rel_err(&fine), run(100).rel_err(&fine));
    assert!(e1 / e2 >= 3.5, "{e1} {e2}");
    let traj = split_step_trajectory(&u0, &SplitStepConfig::from_symbol(&a, g, 1.0, 100).unwrap(), 100).unwrap();
    assert!((traj[1].norm() / u0.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn mixed_terms_are_rejected() {
    let q = crate::weyl::QuadPoly { cxxi: 1.0, ..Default::default() };
    assert!(SplitStepConfig::from_symbol(&SymbolModel::quadratic(q), grid(), 1.0, 4).is_err());
}

#[test]
fn fractional_split_sums_and_flows() {
    let g = grid();
    let two = fractional_symbol_split(2.0).unwrap();
    assert!(two.sum_defect(&g) < 1e-12);
    let one = fractional_symbol_split(1.0).unwrap();
    assert!(one.sum_defect(&g) < 1e-12);
    let only_principal = SymbolModel::autonomous(vec![(Order::A2, one.principal.clone())]).unwrap();
    let tr = integrate_flow(&only_principal, PhasePoint::new(0.0, 20.0), &[0.0, 1.0], &PhaseBox::unbounded()).unwrap();
    assert!((tr.x[1] - 1.0).abs() < 1e-3);
    assert!(fractional_symbol_split(2.5).is_err());
    assert!(matches!(one.cutoff, SymbolPart::Multiplier(_)));
}

#[test]
fn chirp_closed_form_matches_quadrature() {
    let probe: Vec<f64> = (-10..=10).map(|i| 0.3 * i as f64).collect();
    for t in [0.1, 0.5, 1.0] {
        let c = chirp_check(t, &probe, &probe);
        assert!(c.max_rel_err < 1e-8, "t={t}: {}", c.max_rel_err);
        assert!(c.max_printed_mismatch < 1e-12);
    }
    for xi in [0.0, 1.0, -3.0] {
        assert!((chirp_stft_modulus_with(1.0, 0.0, 2.0, xi) - (-xi * xi / (4.0 * PI)).exp()).abs() < 1e-14);
    }
    assert!(chirp_stft_modulus(0.5, 30.0, 0.0) < 1e-10);
}

#[test]
fn chirp_grid_stft_matches_closed_form() {
    for t in [0.1, 0.5] {
        let e = chirp_grid_error(grid(), t).unwrap();
        assert!(e < 1e-6, "t={t}: {e}");
    }
    assert!(chirp_grid_error(grid(), 3.0).is_err());
}

#[test]
fn minfty_lower_bound() {
    let g = grid();
    let xis: Vec<f64> = (-16..=16).map(|i| 0.25 * i as f64).collect();
    let mut prev = 0.0;
    for t in [0.05, 0.1, 0.2] {
        let r = minfty_illposedness_demo(g, t, &xis).unwrap();
        assert!(r.holds(1e-3), "t={t}: {}", r.min_margin);
        let m = r.sup.iter().copied().fold(0.0, f64::min);
        assert!(m >= prev - 1e-9);
        prev = m;
    }
    let zero = minfty_illposedness_demo(g, 0.0, &xis).unwrap();
    assert!(zero.sup.iter().all(|s| *s < 1e-14));
}

#[test]
fn weierstrass_folding_is_exact_on_the_grid() {
    let g = SpatialGrid::new(16.0 * PI, 512).unwrap();
    let v = weierstrass_potential(&g, 9).unwrap();
    for j in (0..512).step_by(7) {
        let x = g.x(j);
        assert!((v.value(x) - weierstrass_value(x, 9)).abs() < 1e-9);
    }
    assert!(v.max_frequency().unwrap() <= g.nyquist());
    assert!(weierstrass_potential(&SpatialGrid::new(30.0, 512).unwrap(), 9).is_err());
}
