use crate::corekit::SpatialGrid;
use crate::weyl::{FractionalPiece, Order, Profile, SymbolModel, SymbolPart};
use crate::{Error, Result};

/// `|ξ|^κ = |ξ|^κ(1 - χ(ξ)) + χ(ξ)|ξ|^κ`, with `χ` = [`crate::weyl::cutoff`]
/// (plateau `|ξ| ≤ 1`, support `|ξ| < 2`).
#[derive(Clone, Debug)]
pub struct FractionalSplit {
    pub kappa: f64,
    /// `a₂`-part `|ξ|^κ(1 - χ)`, smooth with bounded second derivatives.
    pub principal: SymbolPart,
    /// `a₀`-part `χ|ξ|^κ`.
    pub cutoff: SymbolPart,
}

impl FractionalSplit {
    /// The split symbol with the pieces tagged `a₂` and `a₀`.
    pub fn symbol(&self) -> Result<SymbolModel> {
        SymbolModel::autonomous(vec![(Order::A2, self.principal.clone()), (Order::A0, self.cutoff.clone())])
    }

    /// `max_k |a₂(ξ_k) + a₀(ξ_k) - |ξ_k|^κ|` over the grid frequencies.
    pub fn sum_defect(&self, grid: &SpatialGrid) -> f64 {
        grid.fft_freqs()
            .iter()
            .map(|&xi| (self.principal.jet(0.0, xi).0.re + self.cutoff.jet(0.0, xi).0.re - xi.abs().powf(self.kappa)).abs())
            .fold(0.0, f64::max)
    }
}

pub fn fractional_symbol_split(kappa: f64) -> Result<FractionalSplit> {
    if !(kappa > 0.0 && kappa <= 2.0) {
        return Err(Error::InvalidParameter(format!("κ = {kappa} outside (0, 2]")));
    }
    let piece = |piece| SymbolPart::Multiplier(Profile::Fractional { kappa, piece });
    Ok(FractionalSplit { kappa, principal: piece(FractionalPiece::Principal), cutoff: piece(FractionalPiece::Cutoff) })
}
