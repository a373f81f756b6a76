use rayon::prelude::*;
use serde::Serialize;

use super::apply::weyl_apply;
use super::symbol::SymbolModel;
use crate::corekit::fourier::spectral_d;
use crate::corekit::shift::AtomKernel;
use crate::corekit::weight::ModerateForm;
use crate::corekit::{Field, Weight, Window};
use crate::tfa::{modulation_norm, PhaseLattice};
use crate::{Error, Result, C64};

/// Required fraction of each column's `ℓ¹` mass inside the stored band.
pub const BAND_MASS: f64 = 1.0 - 1e-8;

/// Banded Gabor matrix `M(w, z) = ⟨a^w π(z)g, π(w)g⟩`.
#[derive(Clone, Debug, Serialize)]
pub struct GaborMatrix {
    #[serde(skip)]
    pub lattice: PhaseLattice,
    /// Band radius in lattice cells (Chebyshev distance of lattice indices).
    pub radius: usize,
    /// `(z index, w index, M(w, z))`.
    pub entries: Vec<(usize, usize, C64)>,
    /// Worst column fraction of `ℓ¹` mass outside the band.
    pub outside_mass: f64,
}

impl GaborMatrix {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("z_idx,w_idx,abs\n");
        for &(z, w, v) in &self.entries {
            out.push_str(&format!("{z},{w},{:e}\n", v.norm()));
        }
        out
    }
}

/// Cell distance `max(|Δj|, |Δk|)` between two nodes.
pub fn cell_distance(lat: &PhaseLattice, a: usize, b: usize) -> usize {
    let (ja, ka) = lat.jk(a);
    let (jb, kb) = lat.jk(b);
    (ja - jb).unsigned_abs().max((ka - kb).unsigned_abs())
}

/// Full Gabor-matrix columns for the given node indices, `cols[i][w] = M(w, z_i)`.
pub fn gabor_columns(a: &SymbolModel, t: f64, g: &Window, lat: &PhaseLattice, zs: &[usize]) -> Result<Vec<Vec<C64>>> {
    g.grid().ensure_same(lat.grid())?;
    let grid = *lat.grid();
    let kernel = AtomKernel::new(g);
    let nodes = lat.nodes();
    zs.par_iter()
        .map(|&zi| {
            let mut atom = vec![C64::new(0.0, 0.0); grid.n()];
            kernel.accumulate(&mut atom, &grid, nodes[zi], C64::new(1.0, 0.0));
            let image = weyl_apply(a, t, &Field::new(grid, atom)?)?;
            Ok(nodes.iter().map(|&w| kernel.inner(&image, w)).collect())
        })
        .collect()
}

/// Gabor matrix of `a^w(t)` banded at `radius` cells, after checking the band holds the column mass.
pub fn gabor_matrix(a: &SymbolModel, t: f64, g: &Window, lat: &PhaseLattice, radius: usize) -> Result<GaborMatrix> {
    if radius < 4 {
        return Err(Error::InvalidParameter(format!("band radius {radius} below 4 cells")));
    }
    let zs: Vec<usize> = (0..lat.len()).collect();
    let cols = gabor_columns(a, t, g, lat, &zs)?;
    let mut entries = Vec::new();
    let mut outside_mass = 0.0f64;
    for (zi, col) in cols.iter().enumerate() {
        let total: f64 = col.iter().map(|v| v.norm()).sum();
        let mut inside = 0.0;
        for (wi, &v) in col.iter().enumerate() {
            if cell_distance(lat, zi, wi) <= radius {
                inside += v.norm();
                entries.push((zi, wi, v));
            }
        }
        if total > 0.0 {
            outside_mass = outside_mass.max(1.0 - inside / total);
        }
    }
    if outside_mass > 1.0 - BAND_MASS {
        return Err(Error::BandMass { retained: 1.0 - outside_mass, required: BAND_MASS });
    }
    Ok(GaborMatrix { lattice: lat.clone(), radius, entries, outside_mass })
}

/// Ratios of `‖x f‖_{M^{p,q}_m}` and `‖D f‖_{M^{p,q}_m}` to `‖f‖_{M^{p,q}_{v₁ m}}`.
#[derive(Clone, Debug, Serialize)]
pub struct PositionMomentumReport {
    pub ratios_x: Vec<f64>,
    pub ratios_d: Vec<f64>,
    pub skipped: usize,
    pub max_x: f64,
    pub max_d: f64,
}

fn raise(m: &Weight) -> Result<Weight> {
    match *m {
        Weight::Polynomial { r } => Ok(Weight::Polynomial { r: r + 1.0 }),
        Weight::Moderate { form: ModerateForm::Phase { s }, .. } => Ok(Weight::moderate(ModerateForm::Phase { s: s + 1.0 })),
        _ => Err(Error::InvalidParameter("v₁·m is only available for weights ⟨z⟩^s".into())),
    }
}

pub fn position_momentum_bound(corpus: &[Field], p: f64, q: f64, m: &Weight, g: &Window) -> Result<PositionMomentumReport> {
    let vm = raise(m)?;
    let mut ratios_x = Vec::new();
    let mut ratios_d = Vec::new();
    let mut skipped = 0;
    for f in corpus {
        let base = modulation_norm(f, p, q, &vm, g)?;
        if base == 0.0 {
            skipped += 1;
            continue;
        }
        let xf = f.map(|x, v| v * x);
        ratios_x.push(modulation_norm(&xf, p, q, m, g)? / base);
        ratios_d.push(modulation_norm(&spectral_d(f), p, q, m, g)? / base);
    }
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(PositionMomentumReport { max_x: max(&ratios_x), max_d: max(&ratios_d), ratios_x, ratios_d, skipped })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::corekit::window::gaussian_window;
    use crate::corekit::{time_freq_shift, PhasePoint, SpatialGrid};
    use crate::weyl::symbol::QuadPoly;

    #[test]
    fn identity_matrix_is_window_stft() {
        let grid = SpatialGrid::new(32.0, 512).unwrap();
        let g = gaussian_window(grid).unwrap();
        let lat = PhaseLattice::new(grid, 0.5, PI, 3.0, 3.0 * PI).unwrap();
        let one = SymbolModel::quadratic(QuadPoly::constant(1.0));
        let m = gabor_matrix(&one, 0.0, &g, &lat, 8).unwrap();
        for &(z, w, v) in &m.entries {
            let d = lat.node(w) - lat.node(z);
            let want = (-PI * d.x * d.x / 2.0 - d.xi * d.xi / (8.0 * PI)).exp();
            assert!((v.norm() - want).abs() < 1e-9);
        }
    }

    #[test]
    fn position_momentum_uniform_over_shifts() {
        let grid = SpatialGrid::new(32.0, 256).unwrap();
        let g = gaussian_window(grid).unwrap();
        let corpus: Vec<Field> = [(0.0, 0.0), (6.0, 0.0), (-9.0, 12.0), (0.0, 0.0)]
            .iter()
            .enumerate()
            .map(|(i, &(x, xi))| if i == 3 { Field::zeros(grid) } else { time_freq_shift(PhasePoint::new(x, xi), g.field()) })
            .collect();
        let r = position_momentum_bound(&corpus, 2.0, 2.0, &Weight::UNIT, &g).unwrap();
        assert_eq!(r.skipped, 1);
        // The ratios approach |x|/⟨z⟩ and |ξ|/⟨z⟩ for far shifts: bounded, not constant.
        assert!(r.max_x < 1.2 && r.max_d < 1.2, "{r:?}");
        assert!(r.ratios_x[1] < 2.0 * r.ratios_x[2] && r.ratios_x[2] < 2.0 * r.ratios_x[1]);
    }
}
