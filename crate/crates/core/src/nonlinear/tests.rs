use std::f64::consts::PI;

use super::*;
use crate::corekit::{Field, SpatialGrid};
use crate::parametrix::{PlanConfig, PropagatorPlan};
use crate::reference::SplitStepConfig;
use crate::weyl::SymbolModel;
use crate::C64;

fn grid() -> SpatialGrid {
    SpatialGrid::new(32.0, 512).unwrap()
}

fn packet(amp: f64) -> Field {
    Field::from_fn(grid(), |x| C64::from_polar(amp * (-0.5 * (x + 1.0).powi(2)).exp(), 2.0 * x))
}

fn oracle(u0: &Field, f: &AnalyticNonlinearity, t: f64) -> Field {
    let cfg = SplitStepConfig::from_symbol(&SymbolModel::free(), grid(), t, 2000).unwrap();
    nls_split_step(u0, f, &cfg, 2000).unwrap().pop().unwrap()
}

#[test]
fn cubic_arithmetic_and_validation() {
    let f = AnalyticNonlinearity::cubic(1.0);
    assert_eq!(f.eval(C64::new(1.0, 1.0)), C64::new(2.0, 2.0));
    assert_eq!(f.eval(C64::new(0.0, 0.0)), C64::new(0.0, 0.0));
    assert!(f.is_gauge_real());
    assert!(AnalyticNonlinearity::new(vec![Monomial { j: 0, k: 0, re: 1.0, im: 0.0 }]).is_err());
    assert!(AnalyticNonlinearity::new(vec![Monomial { j: 5, k: 5, re: 1.0, im: 0.0 }]).is_err());
    let json = serde_json::to_string(&f).unwrap();
    let back: AnalyticNonlinearity = serde_json::from_str(&json).unwrap();
    assert_eq!(back, f);
    assert!(serde_json::from_str::<AnalyticNonlinearity>(r#"[{"j":0,"k":0,"re":1}]"#).is_err());
}

#[test]
fn zero_nonlinearity_is_linear() {
    let prop = SplitStepPropagator::new(&SymbolModel::free(), grid(), 0.1, 8, 4).unwrap();
    let u0 = packet(0.5);
    let sol = duhamel_picard(&u0, &AnalyticNonlinearity::zero(), &prop, 1e-10).unwrap();
    let lin = prop.evolve_all(&u0).unwrap();
    for (a, b) in sol.fields.iter().zip(&lin) {
        assert_eq!(a.values(), b.values());
    }
    assert_eq!(sol.residual, 0.0);
}

#[test]
fn split_step_duhamel_matches_oracle() {
    let prop = SplitStepPropagator::new(&SymbolModel::free(), grid(), 0.1, 16, 8).unwrap();
    let f = AnalyticNonlinearity::cubic(1.0);
    let u0 = packet(0.5);
    let sol = duhamel_picard(&u0, &f, &prop, 1e-10).unwrap();
    assert!(sol.max_ratio() < 0.9);
    assert!(sol.residual < 1e-9);
    let err = sol.fields[16].rel_err(&oracle(&u0, &f, 0.1));
    assert!(err < 1e-3, "{err}");
    assert!(sol.mass_drift < 1e-3);
    let phase = C64::from_polar(1.0, 0.7);
    let rotated = duhamel_picard(&u0.scaled(phase), &f, &prop, 1e-10).unwrap();
    assert!(rotated.fields[16].rel_err(&sol.fields[16].scaled(phase)) < 1e-8);
    let big = duhamel_picard(&packet(1.0), &f, &prop, 1e-10).unwrap();
    assert!(big.max_ratio() > sol.max_ratio());
}

#[test]
fn parametrix_duhamel_matches_oracle() {
    let cfg = PlanConfig::new(0.25, PI, 15.75, 5.0 * PI, 0.1, 8);
    let plan = PropagatorPlan::new(SymbolModel::free(), grid(), cfg).unwrap();
    let f = AnalyticNonlinearity::cubic(1.0);
    let u0 = packet(0.5);
    let sol = duhamel_picard(&u0, &f, &plan, 1e-8).unwrap();
    assert!(sol.max_ratio() < 0.9);
    let err = sol.fields[8].rel_err(&oracle(&u0, &f, 0.1));
    assert!(err < 1e-2, "{err}");
}

#[test]
fn bisection_finds_a_contracting_horizon() {
    let f = AnalyticNonlinearity::cubic(1.0);
    let u0 = packet(2.0);
    let (t0, sol) = find_t0(&u0, &f, 2.0, 0.9, 1e-8, 6, |t| SplitStepPropagator::new(&SymbolModel::free(), grid(), t, 16, 4)).unwrap();
    assert!(t0 > 0.0 && t0 <= 2.0);
    assert!(sol.max_ratio() <= 0.9);
}

#[test]
fn algebra_constant_is_finite() {
    let g = crate::corekit::window::gaussian_window(grid()).unwrap();
    let pairs: Vec<(Field, Field)> = (0..4)
        .map(|i| {
            let s = i as f64;
            (
                Field::from_fn(grid(), |x| C64::from_polar((-(x - s).powi(2)).exp(), s * x)),
                Field::from_fn(grid(), |x| C64::from_polar((-0.5 * (x + s).powi(2)).exp(), -x)),
            )
        })
        .collect();
    let c = algebra_constant(&pairs, &g).unwrap();
    assert!(c > 0.0 && c.is_finite());
}
