use gaborprop::corekit::{PhasePoint, Weight};
use gaborprop::hamflow::{integrate_flow, symplectic_defect, uniform_times, PhaseBox};
use gaborprop::tfa::envelope::{half_lattice_centers, loglog_slope, EnvelopePatch};
use gaborprop::tfa::{self, mixed_norm, sjostrand_envelope};
use gaborprop::weyl::{self, gabor::cell_distance};
use gaborprop::{Result, C64};
use serde_json::json;

use super::Run;
use crate::config::{InitialSpec, SymbolSpec};
use crate::report::Report;
use crate::svg::{heatmap, line_plot, Axes, Series};

/// Keeps at most `max` evenly spaced indices out of `n`.
fn stride(n: usize, max: usize) -> usize {
    n.div_ceil(max).max(1)
}

pub fn stft(mut run: Run) -> Result<Report> {
    let f = run.cfg.initial_field()?;
    let g = run.cfg.window()?;
    let v = tfa::stft(&f, &g)?;
    run.timings.lap("stft");
    let grid = *f.grid();
    let n = grid.n();
    let moyal = v.values().iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.h() * grid.dxi() / (2.0 * std::f64::consts::PI);
    let expected = f.norm().powi(2) * g.field().norm().powi(2);
    run.report.set("n", n);
    run.report.set("length", grid.length());
    run.report.set("max_abs", v.max_abs());
    run.report.set("moyal_rel_err", (moyal - expected).abs() / expected);
    run.emit("stft.csv", &v.to_csv())?;

    let s = stride(n, 128);
    let rows: Vec<usize> = (0..n).step_by(s).collect();
    let cols: Vec<usize> = (0..n).step_by(s).map(|c| (c + n / 2) % n).collect();
    let xs: Vec<f64> = rows.iter().map(|&j| grid.x(j)).collect();
    let ys: Vec<f64> = cols.iter().map(|&k| grid.fft_freq(k)).collect();
    let mut vals = Vec::with_capacity(xs.len() * ys.len());
    for &k in &cols {
        for &j in &rows {
            vals.push(v.at(j, k).norm());
        }
    }
    let axes = Axes { title: "|V_g f|", x_label: "x", y_label: "ξ", ..Default::default() };
    run.emit("stft.svg", &heatmap(axes, &xs, &ys, &vals))?;
    run.timings.lap("write");
    run.finish()
}

pub fn norm(mut run: Run) -> Result<Report> {
    let f = run.cfg.initial_field()?;
    let g = run.cfg.window()?;
    let v = tfa::stft(&f, &g)?;
    let exps = [1.0, 2.0, f64::INFINITY];
    let weights = [("unit", Weight::UNIT), ("v1", Weight::polynomial(1.0))];
    let mut csv = String::from("weight,p,q,norm\n");
    let mut table = Vec::new();
    for (name, w) in &weights {
        for &p in &exps {
            for &q in &exps {
                let m = mixed_norm(&v, p, q, w)?;
                csv.push_str(&format!("{name},{p},{q},{m:e}\n"));
                table.push(json!({ "weight": name, "p": p.to_string(), "q": q.to_string(), "norm": m }));
            }
        }
    }
    run.timings.lap("norms");
    run.report.set("l2", f.norm());
    run.report.set("norms", table);
    run.emit("norms.csv", &csv)?;
    run.finish()
}

pub fn gabor_matrix(mut run: Run) -> Result<Report> {
    const RADIUS: usize = 8;
    let a = run.cfg.symbol()?;
    let g = run.cfg.window()?;
    let lat = run.cfg.lattice()?;
    let m = weyl::gabor_matrix(&a, 0.0, &g, &lat, RADIUS)?;
    run.timings.lap("matrix");
    let mut decay = vec![0.0f64; RADIUS + 1];
    for &(z, w, v) in &m.entries {
        let d = cell_distance(&lat, z, w);
        decay[d] = decay[d].max(v.norm());
    }
    run.report.set("nodes", lat.len());
    run.report.set("radius", RADIUS);
    run.report.set("outside_mass", m.outside_mass);
    run.report.set("max_abs_by_distance", &decay);
    run.emit("gabor_matrix.csv", &m.to_csv())?;
    let pts = decay.iter().enumerate().map(|(d, &v)| (d as f64, v)).collect();
    let axes = Axes { title: "Gabor matrix decay", x_label: "cell distance", y_label: "max |M|", log_y: true, ..Default::default() };
    run.emit("gabor_decay.svg", &line_plot(axes, &[Series { label: "max |M|", points: pts, markers: false }]))?;
    run.finish()
}

pub fn envelope(mut run: Run) -> Result<Report> {
    let a = run.cfg.symbol()?;
    let l = &run.cfg.lattice;
    let centers = half_lattice_centers(l.alpha, l.beta, l.x_max, l.xi_max);
    let sym = |x: f64, xi: f64| -> C64 { a.eval(0.0, x, xi) };
    let patch = EnvelopePatch::default();
    let env = sjostrand_envelope(&sym, &centers, patch, Weight::UNIT)?;
    run.timings.lap("envelope");
    let profile = env.radial_profile(0.25);
    let slope = loglog_slope(&profile, 1.0, 10.0, 8);
    run.report.set("centers", centers.len());
    run.report.set("max", env.max());
    run.report.set("mass", env.mass);
    run.report.set("loglog_slope_1_10", slope);
    run.emit("envelope.csv", &env.to_csv())?;

    let (n1, n2) = (patch.n_x, patch.n_xi);
    let s1 = stride(n1, 128);
    let k1s: Vec<usize> = (0..n1).step_by(s1).map(|s| (s + n1 / 2) % n1).collect();
    let k2s: Vec<usize> = (0..n2).map(|s| (s + n2 / 2) % n2).collect();
    let xs: Vec<f64> = k1s.iter().map(|&k| env.zeta(k, 0).0).collect();
    let ys: Vec<f64> = k2s.iter().map(|&k| env.zeta(0, k).1).collect();
    let mut vals = Vec::with_capacity(xs.len() * ys.len());
    for &k2 in &k2s {
        for &k1 in &k1s {
            vals.push(env.values[k1 * n2 + k2]);
        }
    }
    let axes = Axes { title: "envelope H (log)", x_label: "ζ₁", y_label: "ζ₂", log_y: true, ..Default::default() };
    run.emit("envelope.svg", &heatmap(axes, &xs, &ys, &vals))?;
    let radial = Series { label: "H", points: profile.into_iter().filter(|p| p.0 > 0.0).collect(), markers: true };
    let axes = Axes { title: "radial envelope", x_label: "|ζ|", y_label: "H", log_x: true, log_y: true };
    run.emit("envelope_radial.svg", &line_plot(axes, &[radial]))?;
    run.finish()
}

pub fn flow(mut run: Run) -> Result<Report> {
    let a = run.cfg.symbol()?;
    let grid = run.cfg.grid()?;
    let z0 = match run.cfg.initial {
        InitialSpec::Packet { x0, xi0, .. } => PhasePoint::new(x0, xi0),
        InitialSpec::File { .. } => PhasePoint::new(1.0, 0.5),
    };
    let (bx, bxi) = run.cfg.lattice.phase_box.map_or((0.5 * grid.length(), grid.nyquist()), |[x, xi]| (x, xi));
    let pbox = PhaseBox { x_max: bx, xi_max: bxi, x_periodic: a.principal_x_periodic(grid.length()) };
    let times = uniform_times(run.cfg.time.t_end, run.cfg.time.steps);
    let tr = integrate_flow(&a, z0, &times, &pbox)?;
    run.timings.lap("flow");
    let exact = |t: f64| -> Option<(f64, f64)> {
        match run.cfg.symbol {
            SymbolSpec::Free => Some((z0.x + 2.0 * t * z0.xi, z0.xi)),
            SymbolSpec::Harmonic => {
                let (c, s) = ((2.0 * t).cos(), (2.0 * t).sin());
                Some((c * z0.x + s * z0.xi, -s * z0.x + c * z0.xi))
            }
            _ => None,
        }
    };
    let err = (0..tr.len())
        .map(|k| exact(tr.times[k]).map(|(x, xi)| (tr.x[k] - x).abs().max((tr.xi[k] - xi).abs())))
        .collect::<Option<Vec<f64>>>()
        .map(|e| e.into_iter().fold(0.0, f64::max));
    run.report.set("z0", [z0.x, z0.xi]);
    run.report.set("z_end", [tr.x[tr.len() - 1], tr.xi[tr.len() - 1]]);
    run.report.set("psi_end", tr.psi[tr.len() - 1]);
    run.report.set("max_err_vs_analytic", err);
    run.report.set("symplectic_defect", symplectic_defect(&a, z0, run.cfg.time.t_end));
    run.emit("trajectory.csv", &tr.to_csv())?;
    let series = [
        Series { label: "x", points: tr.times.iter().zip(&tr.x).map(|(&t, &x)| (t, x)).collect(), markers: false },
        Series { label: "ξ", points: tr.times.iter().zip(&tr.xi).map(|(&t, &x)| (t, x)).collect(), markers: false },
        Series { label: "ψ", points: tr.times.iter().zip(&tr.psi).map(|(&t, &x)| (t, x)).collect(), markers: false },
    ];
    let axes = Axes { title: "Hamiltonian flow", x_label: "t", y_label: "", ..Default::default() };
    run.emit("trajectory.svg", &line_plot(axes, &series))?;
    run.finish()
}
