//! Hamiltonian flow of the principal symbol, the action phase and symplecticity diagnostics.

use rayon::prelude::*;
use serde::Serialize;

use crate::corekit::PhasePoint;
use crate::weyl::SymbolModel;
use crate::{Error, Result};

/// Largest RK4 step; intervals of the time grid are subdivided to respect it.
pub const MAX_STEP: f64 = 0.01;

/// Region trajectories must stay in. The `x` check is skipped when `x_periodic`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseBox {
    pub x_max: f64,
    pub xi_max: f64,
    pub x_periodic: bool,
}

impl PhaseBox {
    pub fn unbounded() -> Self {
        Self { x_max: f64::INFINITY, xi_max: f64::INFINITY, x_periodic: true }
    }

    pub fn contains(&self, z: PhasePoint) -> bool {
        z.xi.abs() <= self.xi_max && (self.x_periodic || z.x.abs() <= self.x_max)
    }
}

/// Flow samples `(x^t, ξ^t)`, action `ψ` and symbol data along one trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub z0: PhasePoint,
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub psi: Vec<f64>,
    /// `a₂ + a₁` at the flow points.
    pub a21: Vec<f64>,
    pub dx_a2: Vec<f64>,
    pub dxi_a2: Vec<f64>,
}

impl Trajectory {
    pub fn point(&self, k: usize) -> PhasePoint {
        PhasePoint::new(self.x[k], self.xi[k])
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,xi,psi\n");
        for k in 0..self.len() {
            out.push_str(&format!("{},{:e},{:e},{:e}\n", self.times[k], self.x[k], self.xi[k], self.psi[k]));
        }
        out
    }
}

type State = [f64; 3];

fn rhs(a: &SymbolModel, t: f64, y: &State) -> State {
    let (a2, dx, dxi) = a.a2_jet(t, y[0], y[1]);
    let a1 = a.a1(t, y[0], y[1]);
    [dxi, -dx, y[1] * dxi - a2 - a1]
}

fn rk4_step(a: &SymbolModel, t: f64, y: &State, dt: f64) -> State {
    let k1 = rhs(a, t, y);
    let mid = |k: &State, s: f64| [y[0] + s * k[0], y[1] + s * k[1], y[2] + s * k[2]];
    let k2 = rhs(a, t + 0.5 * dt, &mid(&k1, 0.5 * dt));
    let k3 = rhs(a, t + 0.5 * dt, &mid(&k2, 0.5 * dt));
    let k4 = rhs(a, t + dt, &mid(&k3, dt));
    let mut out = *y;
    for i in 0..3 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn advance(a: &SymbolModel, t0: f64, t1: f64, y: State, max_step: f64) -> State {
    let span = t1 - t0;
    if span == 0.0 {
        return y;
    }
    let steps = (span.abs() / max_step).ceil().max(1.0) as usize;
    let dt = span / steps as f64;
    let mut y = y;
    for i in 0..steps {
        y = rk4_step(a, t0 + i as f64 * dt, &y, dt);
    }
    y
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("time grid must be non-empty and finite".into()));
    }
    Ok(())
}

/// RK4 integration of `ẋ = ∂_ξ a₂`, `ξ̇ = -∂_x a₂`, `ψ̇ = ξ ∂_ξ a₂ - a₂ - a₁` over a monotone time grid.
pub fn integrate_flow(a: &SymbolModel, z0: PhasePoint, times: &[f64], bx: &PhaseBox) -> Result<Trajectory> {
    integrate_flow_with_step(a, z0, times, bx, MAX_STEP)
}

pub fn integrate_flow_with_step(
    a: &SymbolModel,
    z0: PhasePoint,
    times: &[f64],
    bx: &PhaseBox,
    max_step: f64,
) -> Result<Trajectory> {
    validate_times(times)?;
    if !z0.is_finite() {
        return Err(Error::InvalidParameter("non-finite initial point".into()));
    }
    let n = times.len();
    let mut tr = Trajectory {
        z0,
        times: times.to_vec(),
        x: Vec::with_capacity(n),
        xi: Vec::with_capacity(n),
        psi: Vec::with_capacity(n),
        a21: Vec::with_capacity(n),
        dx_a2: Vec::with_capacity(n),
        dxi_a2: Vec::with_capacity(n),
    };
    let mut y: State = [z0.x, z0.xi, 0.0];
    for (k, &t) in times.iter().enumerate() {
        if k > 0 {
            y = advance(a, times[k - 1], t, y, max_step);
        }
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("flow"));
        }
        if !bx.contains(PhasePoint::new(y[0], y[1])) {
            return Err(Error::BoxExit { x0: z0.x, xi0: z0.xi, time: t });
        }
        let (a2, dx, dxi) = a.a2_jet(t, y[0], y[1]);
        tr.x.push(y[0]);
        tr.xi.push(y[1]);
        tr.psi.push(y[2]);
        tr.a21.push(a2 + a.a1(t, y[0], y[1]));
        tr.dx_a2.push(dx);
        tr.dxi_a2.push(dxi);
    }
    Ok(tr)
}

/// Trajectories of many nodes, in node order.
pub fn flow_nodes(a: &SymbolModel, nodes: &[PhasePoint], times: &[f64], bx: &PhaseBox) -> Result<Vec<Trajectory>> {
    nodes.par_iter().map(|&z| integrate_flow(a, z, times, bx)).collect()
}

/// The action phase samples `ψ(t_k)` of a trajectory.
pub fn action_phase(traj: &Trajectory) -> &[f64] {
    &traj.psi
}

/// `χ(t, s)(z)`: the flow from time `s` to time `t` (either direction).
pub fn flow_map(a: &SymbolModel, z: PhasePoint, s: f64, t: f64) -> PhasePoint {
    let y = advance(a, s, t, [z.x, z.xi, 0.0], MAX_STEP);
    PhasePoint::new(y[0], y[1])
}

/// `χ(t, s)⁻¹(z)` by backward integration from `t` to `s`.
pub fn inverse_flow(a: &SymbolModel, z: PhasePoint, t: f64, s: f64, bx: &PhaseBox) -> Result<PhasePoint> {
    let w = flow_map(a, z, t, s);
    if !bx.contains(w) {
        return Err(Error::BoxExit { x0: z.x, xi0: z.xi, time: s });
    }
    Ok(w)
}

/// `|det Dχ(t, 0)(z0) - 1|` by central differences with step `1e-4`.
pub fn symplectic_defect(a: &SymbolModel, z0: PhasePoint, t: f64) -> f64 {
    let e = 1e-4;
    let f = |dx: f64, dxi: f64| flow_map(a, PhasePoint::new(z0.x + dx, z0.xi + dxi), 0.0, t);
    let (px, mx) = (f(e, 0.0), f(-e, 0.0));
    let (pk, mk) = (f(0.0, e), f(0.0, -e));
    let j11 = (px.x - mx.x) / (2.0 * e);
    let j21 = (px.xi - mx.xi) / (2.0 * e);
    let j12 = (pk.x - mk.x) / (2.0 * e);
    let j22 = (pk.xi - mk.xi) / (2.0 * e);
    (j11 * j22 - j12 * j21 - 1.0).abs()
}

/// Uniform grid `t_k = k T / N`, `k = 0..=N`.
pub fn uniform_times(t_end: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|k| t_end * k as f64 / steps as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::{Order, Profile, QuadPoly, SymbolPart};

    #[test]
    fn free_flow_and_phase() {
        let a = SymbolModel::free();
        let z = PhasePoint::new(0.7, -1.3);
        let tr = integrate_flow(&a, z, &uniform_times(1.0, 100), &PhaseBox::unbounded()).unwrap();
        for k in 0..tr.len() {
            let t = tr.times[k];
            assert!((tr.x[k] - (z.x + 2.0 * t * z.xi)).abs() < 1e-10);
            assert!((tr.xi[k] - z.xi).abs() < 1e-14);
            assert!((tr.psi[k] - t * z.xi * z.xi).abs() < 1e-9);
        }
        assert_eq!(tr.point(0), z);
    }

    #[test]
    fn harmonic_rotation_and_defect() {
        let a = SymbolModel::harmonic();
        let z = PhasePoint::new(1.0, 0.5);
        let tr = integrate_flow(&a, z, &uniform_times(1.0, 100), &PhaseBox::unbounded()).unwrap();
        let t = 1.0f64;
        let (c, s) = ((2.0 * t).cos(), (2.0 * t).sin());
        assert!((tr.x[100] - (c * z.x + s * z.xi)).abs() < 1e-8);
        assert!((tr.xi[100] - (-s * z.x + c * z.xi)).abs() < 1e-8);
        assert!(symplectic_defect(&a, z, 0.7) < 1e-6);
        assert!(symplectic_defect(&a, z, 0.0) < 1e-12);
    }

    #[test]
    fn constant_a1_phase() {
        let a = SymbolModel::autonomous(vec![(Order::A1, SymbolPart::Quadratic(QuadPoly::constant(2.5)))]).unwrap();
        let tr = integrate_flow(&a, PhasePoint::new(0.0, 1.0), &uniform_times(0.8, 10), &PhaseBox::unbounded()).unwrap();
        assert!((tr.psi[10] + 2.5 * 0.8).abs() < 1e-13);
    }

    #[test]
    fn inverse_and_box() {
        let a = SymbolModel::free();
        let z = PhasePoint::new(0.3, 2.0);
        let w = inverse_flow(&a, z, 0.5, 0.0, &PhaseBox::unbounded()).unwrap();
        assert!((w.x - (0.3 - 2.0)).abs() < 1e-9 && (w.xi - 2.0).abs() < 1e-15);
        let frac = SymbolModel::autonomous(vec![(
            Order::A2,
            SymbolPart::Multiplier(Profile::Fractional { kappa: 1.0, piece: crate::weyl::FractionalPiece::Principal }),
        )])
        .unwrap();
        let w = inverse_flow(&frac, PhasePoint::new(0.0, 1.7), 1.0, 0.0, &PhaseBox::unbounded()).unwrap();
        assert_eq!(w.xi, 1.7);
        let tight = PhaseBox { x_max: 1.0, xi_max: 10.0, x_periodic: false };
        let err = integrate_flow(&SymbolModel::harmonic(), PhasePoint::new(0.0, 2.0), &uniform_times(1.0, 10), &tight);
        assert!(matches!(err, Err(Error::BoxExit { .. })));
    }
}
