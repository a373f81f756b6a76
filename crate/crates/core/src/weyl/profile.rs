//! One-dimensional profiles for multipliers `σ(ξ)` and potentials `V(x)`.

use serde::{Deserialize, Serialize};

/// `amp · cos(freq · u + phase)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub amp: f64,
    pub freq: f64,
    #[serde(default)]
    pub phase: f64,
}

/// Which piece of `|ξ|^κ` a fractional profile represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FractionalPiece {
    /// `|ξ|^κ`.
    Full,
    /// `|ξ|^κ (1 - χ(ξ))`.
    Principal,
    /// `χ(ξ) |ξ|^κ`.
    Cutoff,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum Profile {
    /// Samples at `origin + i · step`, interpolated by Catmull-Rom cubics (C¹).
    Samples { origin: f64, step: f64, values: Vec<f64>, periodic: bool },
    /// `Σ amp cos(freq u + phase)`.
    Trig { terms: Vec<TrigTerm> },
    Fractional { kappa: f64, piece: FractionalPiece },
    /// `Σ c_k u^k`.
    Polynomial { coeffs: Vec<f64> },
}

fn psi(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        (0.0, 0.0)
    } else {
        let v = (-1.0 / t).exp();
        (v, v / (t * t))
    }
}

/// Smooth cutoff: `χ = 1` on `|ξ| ≤ 1`, `χ = 0` on `|ξ| ≥ 2`, built from `e^{-1/t}`.
/// Returns `(χ, χ')`.
pub fn cutoff(xi: f64) -> (f64, f64) {
    let s = xi.abs();
    if s <= 1.0 {
        return (1.0, 0.0);
    }
    if s >= 2.0 {
        return (0.0, 0.0);
    }
    let (u, du) = psi(2.0 - s);
    let (v, dv) = psi(s - 1.0);
    let chi = u / (u + v);
    let dchi = (-du * v - u * dv) / ((u + v) * (u + v));
    (chi, dchi * xi.signum())
}

/// Catmull-Rom value and derivative at fractional index `p` of `values`.
pub(crate) fn catmull_rom(values: &[f64], p: f64, periodic: bool) -> (f64, f64) {
    let n = values.len() as isize;
    let i = p.floor() as isize;
    let t = p - i as f64;
    let at = |k: isize| -> f64 {
        if periodic {
            values[k.rem_euclid(n) as usize]
        } else {
            values[k.clamp(0, n - 1) as usize]
        }
    };
    let (p0, p1, p2, p3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
    let a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
    let b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
    let c = -0.5 * p0 + 0.5 * p2;
    let v = ((a * t + b) * t + c) * t + p1;
    let dv = (3.0 * a * t + 2.0 * b) * t + c;
    (v, dv)
}

impl Profile {
    /// Value and first derivative at `u`.
    pub fn eval(&self, u: f64) -> (f64, f64) {
        match self {
            Profile::Samples { origin, step, values, periodic } => {
                let (v, dv) = catmull_rom(values, (u - origin) / step, *periodic);
                (v, dv / step)
            }
            Profile::Trig { terms } => terms.iter().fold((0.0, 0.0), |(v, d), t| {
                let arg = t.freq * u + t.phase;
                (v + t.amp * arg.cos(), d - t.amp * t.freq * arg.sin())
            }),
            Profile::Fractional { kappa, piece } => {
                let s = u.abs();
                let (p, dp) = if s == 0.0 {
                    (0.0, 0.0)
                } else {
                    (s.powf(*kappa), kappa * s.powf(kappa - 1.0) * u.signum())
                };
                match piece {
                    FractionalPiece::Full => (p, dp),
                    FractionalPiece::Principal => {
                        let (c, dc) = cutoff(u);
                        (p * (1.0 - c), dp * (1.0 - c) - p * dc)
                    }
                    FractionalPiece::Cutoff => {
                        let (c, dc) = cutoff(u);
                        (p * c, dp * c + p * dc)
                    }
                }
            }
            Profile::Polynomial { coeffs } => {
                let mut v = 0.0;
                let mut d = 0.0;
                for &c in coeffs.iter().rev() {
                    d = d * u + v;
                    v = v * u + c;
                }
                (v, d)
            }
        }
    }

    pub fn value(&self, u: f64) -> f64 {
        self.eval(u).0
    }

    /// Largest frequency present, when known (trigonometric profiles).
    pub fn max_frequency(&self) -> Option<f64> {
        match self {
            Profile::Trig { terms } => Some(terms.iter().map(|t| t.freq.abs()).fold(0.0, f64::max)),
            _ => None,
        }
    }

    /// Whether the profile is periodic with period `length` (for potentials on the grid).
    pub fn is_periodic(&self, length: f64) -> bool {
        match self {
            Profile::Samples { periodic, .. } => *periodic,
            Profile::Trig { terms } => terms.iter().all(|t| {
                let m = t.freq * length / (2.0 * std::f64::consts::PI);
                (m - m.round()).abs() < 1e-9
            }),
            Profile::Polynomial { coeffs } => coeffs.iter().skip(1).all(|&c| c == 0.0),
            Profile::Fractional { .. } => false,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Profile::Samples { origin, step, values, .. } => {
                origin.is_finite() && step.is_finite() && *step > 0.0 && values.len() >= 2 && values.iter().all(|v| v.is_finite())
            }
            Profile::Trig { terms } => terms.iter().all(|t| t.amp.is_finite() && t.freq.is_finite() && t.phase.is_finite()),
            Profile::Fractional { kappa, .. } => kappa.is_finite() && *kappa > 0.0,
            Profile::Polynomial { coeffs } => coeffs.iter().all(|c| c.is_finite()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff(0.5), (1.0, 0.0));
        assert_eq!(cutoff(-2.5), (0.0, 0.0));
        let (c, _) = cutoff(1.5);
        assert!((c - 0.5).abs() < 1e-12);
        let e = 1e-6;
        let fd = (cutoff(1.3 + e).0 - cutoff(1.3 - e).0) / (2.0 * e);
        assert!((fd - cutoff(1.3).1).abs() < 1e-6);
        let fd = (cutoff(-1.7 + e).0 - cutoff(-1.7 - e).0) / (2.0 * e);
        assert!((fd - cutoff(-1.7).1).abs() < 1e-6);
    }

    #[test]
    fn fractional_pieces_sum() {
        for &k in &[1.0, 1.5, 2.0] {
            for i in -40..40 {
                let xi = i as f64 * 0.1;
                let p = Profile::Fractional { kappa: k, piece: FractionalPiece::Principal }.value(xi);
                let c = Profile::Fractional { kappa: k, piece: FractionalPiece::Cutoff }.value(xi);
                assert!((p + c - xi.abs().powf(k)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn polynomial_and_samples() {
        let p = Profile::Polynomial { coeffs: vec![1.0, -2.0, 3.0] };
        assert_eq!(p.eval(2.0), (9.0, 10.0));
        let s = Profile::Samples { origin: 0.0, step: 0.5, values: (0..10).map(|i| 0.5 * i as f64).collect(), periodic: false };
        let (v, d) = s.eval(1.3);
        assert!((v - 1.3).abs() < 1e-12 && (d - 1.0).abs() < 1e-12);
    }
}
