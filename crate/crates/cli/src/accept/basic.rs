use std::f64::consts::PI;

use gaborprop::corekit::corpus::{packet_corpus, PacketRanges};
use gaborprop::corekit::window::gaussian_window;
use gaborprop::corekit::{time_freq_shift, Field, PhasePoint, SpatialGrid, Window};
use gaborprop::hamflow::{integrate_flow, symplectic_defect, uniform_times, PhaseBox};
use gaborprop::reference::{chirp_check, chirp_grid_error, fractional_symbol_split, minfty_illposedness_demo, CHIRP_CONSTANT_MAP};
use gaborprop::tfa::{change_window_check, dual_window, frame_bounds, gabor_analysis, gabor_synthesis, stft, PhaseLattice};
use gaborprop::weyl::{weyl_apply, Order, QuadPoly, SymbolModel};
use gaborprop::Result;

use super::{Check, Outcome, Shared, SEED};

fn corpus(grid: SpatialGrid, count: usize) -> Vec<Field> {
    packet_corpus(grid, count, SEED, PacketRanges::default())
}

pub fn identity_covariance(_: &Shared) -> Result<Outcome> {
    let mut o = Outcome::default();
    let grid = SpatialGrid::new(32.0, 512)?;
    let fields = corpus(grid, 10);
    let g = gaussian_window(grid)?;

    let one = SymbolModel::quadratic(QuadPoly::constant(1.0));
    let mut id_err: f64 = 0.0;
    for f in &fields {
        id_err = id_err.max((&weyl_apply(&one, 0.0, f)? - f).max_abs() / f.max_abs());
    }
    o.check(Check::le("identity_max_err", id_err, 1e-12));

    // Grid-aligned shifts so that w - z is an STFT sample.
    let (h, dxi, n) = (grid.h(), grid.dxi(), grid.n() as isize);
    let offsets = [(0, 0), (7, 3), (-12, 5), (25, -9), (-40, -14), (3, 30)];
    let mut cov_err: f64 = 0.0;
    for f in &fields {
        let v = stft(f, &g)?;
        for &(jz, kz) in &offsets {
            for &(jw, kw) in &offsets {
                let z = PhasePoint::new(jz as f64 * h, kz as f64 * dxi);
                let w = PhasePoint::new(jw as f64 * h, kw as f64 * dxi);
                let lhs = time_freq_shift(z, f).inner(&time_freq_shift(w, g.field())).norm();
                let j = (n / 2 + (jw - jz) as isize).rem_euclid(n) as usize;
                let k = ((kw - kz) as isize).rem_euclid(n) as usize;
                cov_err = cov_err.max((lhs - v.at(j, k).norm()).abs());
            }
        }
    }
    o.check(Check::le("covariance_max_err", cov_err, 1e-9));

    let g1 = g.dilated(0.7)?;
    let gamma = g.dilated(1.4)?;
    let mut worst: f64 = 0.0;
    for f in &fields {
        let r = change_window_check(f, &g, &g1, &gamma)?;
        worst = worst.max(r.max_violation / r.max_lhs);
    }
    o.check(Check::le("change_of_window_violation_over_scale", worst, 1e-6));
    o.detail("corpus_size", fields.len());
    o.detail("windows", "g0 = Gaussian, g1 = g0(x/0.7), γ = g0(x/1.4)");
    Ok(o)
}

pub fn constant_stft(_: &Shared) -> Result<Outcome> {
    let mut o = Outcome::default();
    let grid = SpatialGrid::new(16.0, 512)?;
    let g = Window::raw_gaussian(grid)?;
    let v = stft(&Field::from_real_fn(grid, |_| 1.0), &g)?;
    // Interior: frequencies where the target is above 1e-6, so the relative error is not roundoff.
    let cut = (4.0 * PI * 1e6f64.ln()).sqrt();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for j in 0..grid.n() {
        for k in 0..grid.n() {
            let xi = grid.fft_freq(k);
            if xi.abs() > cut {
                continue;
            }
            let want = (-xi * xi / (4.0 * PI)).exp();
            worst = worst.max((v.at(j, k).norm() - want).abs() / want);
            count += 1;
        }
    }
    o.check(Check::lt("max_rel_err", worst, 1e-6));
    o.detail("interior_xi_max", cut);
    o.detail("samples", count);
    o.detail("window", "e^{-πx²} (unnormalized)");
    Ok(o)
}

pub fn chirp(_: &Shared) -> Result<Outcome> {
    let mut o = Outcome::default();
    let grid = SpatialGrid::new(32.0, 512)?;
    let probe: Vec<f64> = (-10..=10).map(|i| 0.3 * i as f64).collect();
    let xis: Vec<f64> = (-16..=16).map(|i| 0.25 * i as f64).collect();
    let mut demos = Vec::new();
    for t in [0.1, 0.5] {
        o.check(Check::lt(format!("grid_stft_vs_closed_form_t{t}"), chirp_grid_error(grid, t)?, 1e-6));
        let c = chirp_check(t, &probe, &probe);
        o.check(Check::lt(format!("closed_form_vs_quadrature_t{t}"), c.max_rel_err, 1e-6));
        o.check(Check::lt(format!("printed_formula_after_map_t{t}"), c.max_printed_mismatch, 1e-12));
        let d = minfty_illposedness_demo(grid, t, &xis)?;
        o.check(Check::ge(format!("minfty_min_margin_t{t}"), d.min_margin, -1e-3));
        demos.push(d);
    }
    o.detail("constant_map", CHIRP_CONSTANT_MAP);
    o.detail("minfty_demo", demos);
    Ok(o)
}

pub fn frame(_: &Shared) -> Result<Outcome> {
    let mut o = Outcome::default();
    let grid = SpatialGrid::new(32.0, 512)?;
    let g = gaussian_window(grid)?;
    let lat = PhaseLattice::new(grid, 0.5, PI, 14.0, 6.0 * PI)?;
    let gamma = dual_window(&g, &lat)?;
    let mut worst: f64 = 0.0;
    for f in corpus(grid, 10) {
        let back = gabor_synthesis(&gabor_analysis(&f, &g, &lat)?, &gamma)?;
        worst = worst.max(back.rel_err(&f));
    }
    let (a, b) = frame_bounds(&g, &lat)?;
    o.check(Check::lt("reconstruction_rel_err", worst, 1e-8));
    o.check(Check::lt("frame_bound_ratio", b / a, 1.2));
    o.detail("alpha_beta", lat.density());
    o.detail("bounds", [a, b]);
    Ok(o)
}

pub fn flows(_: &Shared) -> Result<Outcome> {
    let mut o = Outcome::default();
    let times = uniform_times(1.0, 100);
    let starts: Vec<PhasePoint> =
        [(-2.0, 1.5), (0.0, 0.0), (0.7, -1.3), (1.0, 0.5), (3.0, -4.0)].iter().map(|&(x, xi)| PhasePoint::new(x, xi)).collect();
    let free = SymbolModel::free();
    let harm = SymbolModel::harmonic();
    let (mut free_err, mut harm_err, mut psi_err, mut defect): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for &z in &starts {
        let tf = integrate_flow(&free, z, &times, &PhaseBox::unbounded())?;
        let th = integrate_flow(&harm, z, &times, &PhaseBox::unbounded())?;
        for (k, &t) in times.iter().enumerate() {
            free_err = free_err.max((tf.x[k] - (z.x + 2.0 * t * z.xi)).abs()).max((tf.xi[k] - z.xi).abs());
            psi_err = psi_err.max((tf.psi[k] - t * z.xi * z.xi).abs());
            let (c, s) = ((2.0 * t).cos(), (2.0 * t).sin());
            harm_err = harm_err.max((th.x[k] - (c * z.x + s * z.xi)).abs()).max((th.xi[k] - (-s * z.x + c * z.xi)).abs());
        }
        let frac = fractional_symbol_split(1.5)?;
        let principal = SymbolModel::autonomous(vec![(Order::A2, frac.principal.clone())])?;
        for a in [&free, &harm, &principal] {
            defect = defect.max(symplectic_defect(a, z, 1.0));
        }
    }
    o.check(Check::lt("free_flow_err", free_err, 1e-8));
    o.check(Check::lt("harmonic_flow_err", harm_err, 1e-8));
    o.check(Check::lt("symplectic_defect", defect, 1e-6));
    o.check(Check::lt("free_phase_err", psi_err, 1e-9));
    o.detail("starts", starts.iter().map(|z| [z.x, z.xi]).collect::<Vec<_>>());
    Ok(o)
}
