use rayon::prelude::*;

use super::stft::{stft, StftGrid};
use crate::corekit::conventions::modulation_norm_constant;
use crate::corekit::weight::weight_eval;
use crate::corekit::{Field, PhasePoint, Weight, Window};
use crate::{Error, Result};

fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("exponent {p} outside [1, ∞]")))
    }
}

fn lp(values: impl Iterator<Item = f64>, p: f64, measure: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, f64::max)
    } else if p == 1.0 {
        values.sum::<f64>() * measure
    } else {
        (values.map(|v| v.powf(p)).sum::<f64>() * measure).powf(1.0 / p)
    }
}

/// `‖V_g f‖_{L^{p,q}_m}`: inner `L^p` in `x`, outer `L^q` in `ξ`, scaled by `(2π)^{-1/2}`.
///
/// Requires a full-grid STFT (all rows).
pub fn mixed_norm(v: &StftGrid, p: f64, q: f64, m: &Weight) -> Result<f64> {
    check_exponent(p)?;
    check_exponent(q)?;
    let grid = *v.grid();
    let n = grid.n();
    if v.rows().len() != n {
        return Err(Error::InvalidParameter("mixed norm needs the full STFT grid".into()));
    }
    let unit = matches!(m, Weight::Polynomial { r } if *r == 0.0);
    let inner: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            let xi = grid.fft_freq(k);
            let col = (0..n).map(|r| {
                let a = v.at(r, k).norm();
                if unit {
                    a
                } else {
                    a * weight_eval(m, PhasePoint::new(grid.x(r), xi))
                }
            });
            lp(col, p, grid.h())
        })
        .collect();
    Ok(modulation_norm_constant() * lp(inner.into_iter(), q, grid.dxi()))
}

/// Discrete `‖f‖_{M^{p,q}_m}` computed with window `g`.
pub fn modulation_norm(f: &Field, p: f64, q: f64, m: &Weight, g: &Window) -> Result<f64> {
    mixed_norm(&stft(f, g)?, p, q, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corekit::window::gaussian_window;
    use crate::corekit::{time_freq_shift, SpatialGrid};

    #[test]
    fn window_has_unit_m2_norm() {
        let g = gaussian_window(SpatialGrid::new(16.0, 256).unwrap()).unwrap();
        let v = modulation_norm(g.field(), 2.0, 2.0, &Weight::UNIT, &g).unwrap();
        assert!((v - 1.0).abs() < 1e-8);
        let z = Field::zeros(*g.grid());
        assert_eq!(modulation_norm(&z, 1.0, 1.0, &Weight::UNIT, &g).unwrap(), 0.0);
    }

    #[test]
    fn shift_invariance_and_monotonicity() {
        let grid = SpatialGrid::new(16.0, 256).unwrap();
        let g = gaussian_window(grid).unwrap();
        let f = Field::from_real_fn(grid, |x| (-0.6 * x * x).exp() * (1.0 + x));
        let sf = time_freq_shift(PhasePoint::new(1.25, 4.0 * grid.dxi()), &f);
        for (p, q) in [(1.0, 1.0), (2.0, 2.0), (f64::INFINITY, 1.0), (1.0, f64::INFINITY)] {
            let a = modulation_norm(&f, p, q, &Weight::UNIT, &g).unwrap();
            let b = modulation_norm(&sf, p, q, &Weight::UNIT, &g).unwrap();
            assert!((a - b).abs() < 1e-9 * a.max(1.0), "{p} {q}");
            let c = modulation_norm(&f, p, q, &Weight::polynomial(1.0), &g).unwrap();
            assert!(c >= a);
        }
    }
}
