use std::f64::consts::PI;

use gaborprop::corekit::window::gaussian_window;
use gaborprop::corekit::{SpatialGrid, Weight};
use gaborprop::reference::{fractional_symbol_split, weierstrass_potential};
use gaborprop::tfa::envelope::{envelope_1d, half_lattice_centers, loglog_slope, EnvelopePatch};
use gaborprop::tfa::{sjostrand_envelope, PhaseLattice};
use gaborprop::weyl::gabor::{cell_distance, gabor_columns};
use gaborprop::weyl::{gabor_matrix, Order, QuadPoly, SymbolModel, SymbolPart};
use gaborprop::{Result, C64};
use serde_json::json;

use super::{Check, Outcome, Shared};

const RADIUS: usize = 8;

/// One Gabor-matrix domination case: a symbol, its lattice and an envelope patch whose frequency
/// spacing divides the lattice steps, so every `j(w - z)` is a stored sample of `H`.
struct Case {
    name: &'static str,
    symbol: SymbolModel,
    lattice: PhaseLattice,
    patch: EnvelopePatch,
}

fn cases() -> Result<Vec<Case>> {
    let grid = SpatialGrid::new(32.0, 512)?;
    let lat = PhaseLattice::new(grid, 0.5, PI, 3.0, 3.0 * PI)?;
    let patch = EnvelopePatch::default();
    // The Weierstrass potential needs 2π | L.
    let wgrid = SpatialGrid::new(16.0 * PI, 512)?;
    let wlat = PhaseLattice::new(wgrid, PI / 4.0, 2.0, 3.0, 6.0)?;
    let wpatch = EnvelopePatch { len_x: 2.0 * PI, len_xi: 32.0, n_x: 256, n_xi: 128 };
    let weier = SymbolModel::free().with_part(Order::A0, SymbolPart::Potential(weierstrass_potential(&wgrid, 9)?))?;
    Ok(vec![
        Case { name: "one", symbol: SymbolModel::quadratic(QuadPoly::constant(1.0)), lattice: lat.clone(), patch },
        Case { name: "free", symbol: SymbolModel::free(), lattice: lat.clone(), patch },
        Case { name: "harmonic", symbol: SymbolModel::harmonic(), lattice: lat, patch },
        Case { name: "weierstrass", symbol: weier, lattice: wlat, patch: wpatch },
    ])
}

pub fn domination(_: &Shared) -> Result<Outcome> {
    let mut o = Outcome::default();
    let mut summary = Vec::new();
    for c in cases()? {
        let lat = &c.lattice;
        let g = gaussian_window(*lat.grid())?;
        let centers = half_lattice_centers(lat.alpha(), lat.beta(), lat.x_max(), lat.xi_max());
        let nodes = lat.nodes();
        let m = gabor_matrix(&c.symbol, 0.0, &g, lat, RADIUS)?;
        let sym = |x: f64, xi: f64| -> C64 { c.symbol.eval(0.0, x, xi) };
        let env = sjostrand_envelope(&sym, &centers, c.patch, Weight::UNIT)?;
        let (mut excess, mut outside): (f64, usize) = (f64::NEG_INFINITY, 0);
        for &(zi, wi, v) in &m.entries {
            let d = nodes[wi] - nodes[zi];
            match env.at(d.xi, -d.x) {
                Some(h) => excess = excess.max(v.norm() - h),
                None => outside += 1,
            }
        }
        let name = c.name;
        o.check(Check::le(format!("{name}_max_excess"), excess, 1e-7));
        o.check(Check::le(format!("{name}_entries_outside_patch"), outside as f64, 0.0));
        summary.push(json!({ "symbol": name, "entries": m.entries.len(), "max_excess": excess, "band_outside_mass": m.outside_mass }));
    }
    o.detail("symbols", summary);

    // Column tails of ξ² beyond six cells, away from the lattice edge.
    let grid = SpatialGrid::new(32.0, 512)?;
    let g = gaussian_window(grid)?;
    let wide = PhaseLattice::new(grid, 0.5, PI, 6.0, 10.0 * PI)?;
    let zs: Vec<usize> = (0..wide.len())
        .filter(|&i| {
            let (j, k) = wide.jk(i);
            j.abs() <= 5 && k.abs() <= 3
        })
        .collect();
    let cols = gabor_columns(&SymbolModel::free(), 0.0, &g, &wide, &zs)?;
    let mut tail: f64 = 0.0;
    for (&zi, col) in zs.iter().zip(&cols) {
        let total: f64 = col.iter().map(|v| v.norm()).sum();
        let far: f64 = col.iter().enumerate().filter(|&(wi, _)| cell_distance(&wide, zi, wi) > 6).map(|(_, v)| v.norm()).sum();
        tail = tail.max(far / total);
    }
    o.check(Check::lt("free_column_mass_beyond_6_cells", tail, 1e-6));
    o.detail("tail_columns", zs.len());
    Ok(o)
}

pub fn fractional(_: &Shared) -> Result<Outcome> {
    let mut o = Outcome::default();
    let centers: Vec<f64> = (-12..=12).map(|i| 0.25 * i as f64).collect();
    let mut rows = Vec::new();
    for kappa in [1.0, 1.5] {
        let split = fractional_symbol_split(kappa)?;
        let sigma = |xi: f64| split.cutoff.jet(0.0, xi).0.re;
        let profile = envelope_1d(&sigma, &centers, 16.0, 4096)?;
        let slope = loglog_slope(&profile, 10.0, 100.0, 12).unwrap_or(f64::NAN);
        o.check(Check::ge(format!("decay_exponent_kappa{kappa}"), -slope, kappa + 0.7));
        rows.push(json!({ "kappa": kappa, "slope": slope, "required": -(kappa + 0.7) }));
    }
    o.detail("fits", rows);
    o.detail("fit_range", [10.0, 100.0]);
    Ok(o)
}
