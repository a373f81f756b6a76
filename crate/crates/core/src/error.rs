use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("n not a power of two: {0}")]
    NotPowerOfTwo(usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("field not negligible at the domain boundary (|f| = {0:e})")]
    BoundaryLeak(f64),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("truncation loses {loss:e} of the coefficient energy")]
    TruncationLoss { loss: f64 },
    #[error("conjugate gradient did not converge in {iterations} iterations (residual {residual:e})")]
    CgNotConverged { iterations: usize, residual: f64 },
    #[error("degenerate window pairing <gamma, g1> = {0:e}")]
    DegeneratePairing(f64),
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("symbol band exceeds grid Nyquist: {0}")]
    SymbolBand(String),
    #[error("trajectory from ({x0}, {xi0}) left the phase box at t = {time}")]
    BoxExit { x0: f64, xi0: f64, time: f64 },
    #[error("band mass check failed: retained fraction {retained} < {required}")]
    BandMass { retained: f64, required: f64 },
    #[error("Picard iteration does not contract (ratio {ratio:.3} after {iterations} iterations); shrink T or enlarge the box")]
    NonContraction { ratio: f64, iterations: usize },
    #[error("Duhamel iteration does not contract (ratio {ratio:.3} after {iterations} iterations); shrink T0 or u0")]
    DuhamelNonContraction { ratio: f64, iterations: usize },
    #[error("atom cache would exceed the memory budget ({needed} > {budget} bytes)")]
    CacheBudget { needed: usize, budget: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical failures (as opposed to invalid input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::CgNotConverged { .. }
                | Error::BoxExit { .. }
                | Error::NonContraction { .. }
                | Error::DuhamelNonContraction { .. }
                | Error::BandMass { .. }
                | Error::TruncationLoss { .. }
                | Error::NonFinite(_)
        )
    }
}
