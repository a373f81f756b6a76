use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use gaborprop::corekit::io::read_field;
use gaborprop::corekit::window::gaussian_window;
use gaborprop::corekit::{Field, SpatialGrid, Window};
use gaborprop::nonlinear::{AnalyticNonlinearity, Monomial};
use gaborprop::parametrix::PlanConfig;
use gaborprop::reference::{fractional_symbol_split, weierstrass_potential};
use gaborprop::tfa::PhaseLattice;
use gaborprop::weyl::{Order, Profile, QuadPoly, SampledSymbol, SymbolModel, SymbolPart};
use gaborprop::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub length: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub alpha: f64,
    pub beta: f64,
    pub x_max: f64,
    pub xi_max: f64,
    /// Half-widths `(X, Ξ)` of the box trajectories must stay in.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_box: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WindowSpec {
    /// Normalized Gaussian, optionally dilated `g(x/τ)`.
    Gaussian {
        #[serde(default = "one")]
        dilation: f64,
    },
    File { path: PathBuf },
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec::Gaussian { dilation: 1.0 }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PartSpec {
    Quadratic { order: Order, poly: QuadPoly },
    Multiplier { order: Order, profile: Profile },
    Potential { order: Order, profile: Profile },
    /// JSON `{"re": [...], "im": [...]}` with `a(x_j, ξ_ℓ)` at index `j·n + ℓ`, `ξ_ℓ` in FFT order.
    Sampled { order: Order, path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolSpec {
    /// `ξ²`.
    Free,
    /// `x² + ξ²`.
    Harmonic,
    Quadratic { poly: QuadPoly },
    /// `ξ² + Σ_{j<terms} 2^{-j} cos(3^j x)`, the potential tagged `a₀`.
    Weierstrass {
        #[serde(default = "nine")]
        terms: usize,
    },
    /// `|ξ|^κ` split into `a₂ = |ξ|^κ(1-χ)` and `a₀ = χ|ξ|^κ`.
    Fractional { kappa: f64 },
    Parts { parts: Vec<PartSpec> },
}

fn nine() -> usize {
    9
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t_end: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub volterra: f64,
    pub truncation: f64,
    pub max_picard: usize,
    pub duhamel: f64,
    /// Split-step substeps per time step of the reference solver.
    pub reference_substeps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { volterra: 1e-8, truncation: 1e-6, max_picard: 30, duhamel: 1e-8, reference_substeps: 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// `amp · e^{-(x-x0)²/(2 width²)} e^{i xi0 x}`.
    Packet { x0: f64, xi0: f64, width: f64, amp: f64 },
    File { path: PathBuf },
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec::Packet { x0: -1.0, xi0: 2.0, width: 1.0, amp: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearSpec {
    pub terms: Vec<Monomial>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

/// A complete run description, stored as TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub grid: GridSpec,
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub window: WindowSpec,
    pub symbol: SymbolSpec,
    pub time: TimeSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonlinear: Option<NonlinearSpec>,
    #[serde(default)]
    pub output: OutputSpec,
    /// Directory that relative paths are resolved against (not serialized).
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse { line: toml_line(text, &e), msg: e.message().to_string() })?;
        cfg.check_values()?;
        Ok(cfg)
    }

    /// Reads, parses and validates a config; relative paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs always serialize")
    }

    /// SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    /// Checks that need no file access.
    fn check_values(&self) -> Result<()> {
        let l = &self.lattice;
        let finite = [self.grid.length, l.alpha, l.beta, l.x_max, l.xi_max, self.time.t_end].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("non-finite number in config".into()));
        }
        if !(l.alpha * l.beta < 2.0 * PI) {
            return Err(Error::InvalidLattice(format!("αβ = {} must be below 2π", l.alpha * l.beta)));
        }
        if !(self.time.t_end > 0.0) || self.time.steps == 0 {
            return Err(Error::InvalidParameter("time grid needs t_end > 0 and steps ≥ 1".into()));
        }
        let t = &self.tolerances;
        if !(t.volterra > 0.0 && t.truncation > 0.0 && t.duhamel > 0.0) || t.max_picard == 0 || t.reference_substeps == 0 {
            return Err(Error::InvalidParameter("tolerances and iteration counts must be positive".into()));
        }
        if let WindowSpec::Gaussian { dilation } = self.window {
            if !(dilation > 0.0 && dilation.is_finite()) {
                return Err(Error::InvalidParameter(format!("window dilation {dilation} must be positive")));
            }
        }
        if let Some(nl) = &self.nonlinear {
            AnalyticNonlinearity::new(nl.terms.clone())?;
        }
        Ok(())
    }

    /// Full validation: values, grid, lattice and referenced files.
    pub fn validate(&self) -> Result<()> {
        self.check_values()?;
        let grid = self.grid()?;
        self.lattice_on(grid)?;
        for p in self.referenced_files() {
            if !p.is_file() {
                return Err(Error::InvalidParameter(format!("referenced file {} does not exist", p.display())));
            }
        }
        Ok(())
    }

    pub fn referenced_files(&self) -> Vec<PathBuf> {
        let mut out = Vec::new();
        if let WindowSpec::File { path } = &self.window {
            out.push(self.resolve(path));
        }
        if let InitialSpec::File { path } = &self.initial {
            out.push(self.resolve(path));
        }
        if let SymbolSpec::Parts { parts } = &self.symbol {
            for p in parts {
                if let PartSpec::Sampled { path, .. } = p {
                    out.push(self.resolve(path));
                }
            }
        }
        out
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output.dir)
    }

    pub fn grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(self.grid.length, self.grid.n)
    }

    fn lattice_on(&self, grid: SpatialGrid) -> Result<PhaseLattice> {
        let l = &self.lattice;
        PhaseLattice::new(grid, l.alpha, l.beta, l.x_max, l.xi_max)
    }

    pub fn lattice(&self) -> Result<PhaseLattice> {
        self.lattice_on(self.grid()?)
    }

    pub fn window(&self) -> Result<Window> {
        let grid = self.grid()?;
        match &self.window {
            WindowSpec::Gaussian { dilation } if *dilation == 1.0 => gaussian_window(grid),
            WindowSpec::Gaussian { dilation } => gaussian_window(grid)?.dilated(*dilation),
            WindowSpec::File { path } => {
                let f = read_field(&self.resolve(path))?;
                grid.ensure_same(f.grid())?;
                Ok(Window::from_field(f))
            }
        }
    }

    pub fn initial_field(&self) -> Result<Field> {
        let grid = self.grid()?;
        match &self.initial {
            InitialSpec::Packet { x0, xi0, width, amp } => {
                if !(*width > 0.0) {
                    return Err(Error::InvalidParameter("packet width must be positive".into()));
                }
                let (x0, xi0, w, a) = (*x0, *xi0, *width, *amp);
                Ok(Field::from_fn(grid, |x| C64::from_polar(a * (-(x - x0).powi(2) / (2.0 * w * w)).exp(), xi0 * x)))
            }
            InitialSpec::File { path } => {
                let f = read_field(&self.resolve(path))?;
                grid.ensure_same(f.grid())?;
                Ok(f)
            }
        }
    }

    pub fn symbol(&self) -> Result<SymbolModel> {
        let grid = self.grid()?;
        match &self.symbol {
            SymbolSpec::Free => Ok(SymbolModel::free()),
            SymbolSpec::Harmonic => Ok(SymbolModel::harmonic()),
            SymbolSpec::Quadratic { poly } => SymbolModel::autonomous(vec![(Order::A2, SymbolPart::Quadratic(*poly))]),
            SymbolSpec::Weierstrass { terms } => {
                SymbolModel::free().with_part(Order::A0, SymbolPart::Potential(weierstrass_potential(&grid, *terms)?))
            }
            SymbolSpec::Fractional { kappa } => fractional_symbol_split(*kappa)?.symbol(),
            SymbolSpec::Parts { parts } => {
                let built = parts
                    .iter()
                    .map(|p| {
                        Ok(match p {
                            PartSpec::Quadratic { order, poly } => (*order, SymbolPart::Quadratic(*poly)),
                            PartSpec::Multiplier { order, profile } => (*order, SymbolPart::Multiplier(profile.clone())),
                            PartSpec::Potential { order, profile } => (*order, SymbolPart::Potential(profile.clone())),
                            PartSpec::Sampled { order, path } => (*order, SymbolPart::Sampled(read_sampled(&self.resolve(path), grid)?)),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                SymbolModel::autonomous(built)
            }
        }
    }

    pub fn plan_config(&self) -> PlanConfig {
        let l = &self.lattice;
        let mut c = PlanConfig::new(l.alpha, l.beta, l.x_max, l.xi_max, self.time.t_end, self.time.steps);
        c.volterra_tol = self.tolerances.volterra;
        c.truncation_tol = self.tolerances.truncation;
        c.max_picard = self.tolerances.max_picard;
        c.phase_box = l.phase_box.map(|[x, xi]| (x, xi));
        c
    }

    pub fn nonlinearity(&self) -> Result<AnalyticNonlinearity> {
        match &self.nonlinear {
            Some(nl) => AnalyticNonlinearity::new(nl.terms.clone()),
            None => Ok(AnalyticNonlinearity::zero()),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SampledFile {
    re: Vec<f64>,
    im: Vec<f64>,
}

/// Reads a sampled symbol `a(x_j, ξ_ℓ)` stored as JSON real/imaginary arrays.
pub fn read_sampled(path: &Path, grid: SpatialGrid) -> Result<SampledSymbol> {
    parse_sampled(&std::fs::read_to_string(path)?, grid)
}

pub fn parse_sampled(text: &str, grid: SpatialGrid) -> Result<SampledSymbol> {
    let s: SampledFile = serde_json::from_str(text)?;
    if s.re.len() != s.im.len() {
        return Err(Error::GridMismatch("re and im lengths differ".into()));
    }
    if !s.re.iter().chain(&s.im).all(|v| v.is_finite()) {
        return Err(Error::NonFinite("sampled symbol"));
    }
    let values: Vec<C64> = s.re.iter().zip(&s.im).map(|(r, i)| C64::new(*r, *i)).collect();
    SampledSymbol::from_samples(grid, &values)
}

fn toml_line(text: &str, e: &toml::de::Error) -> usize {
    e.span().map(|s| text[..s.start.min(text.len())].lines().count().max(1)).unwrap_or(0)
}

/// Built-in configurations matching the files under `configs/`.
pub mod presets {
    use super::*;

    fn base(length: f64, n: usize, x_max: f64, symbol: SymbolSpec) -> RunConfig {
        RunConfig {
            seed: 0,
            grid: GridSpec { length, n },
            lattice: LatticeSpec { alpha: 0.25, beta: PI, x_max, xi_max: 5.0 * PI, phase_box: None },
            window: WindowSpec::default(),
            symbol,
            time: TimeSpec { t_end: 0.5, steps: 64 },
            tolerances: Tolerances::default(),
            initial: InitialSpec::default(),
            nonlinear: None,
            output: OutputSpec::default(),
            base_dir: PathBuf::new(),
        }
    }

    /// `ξ²` on a periodic box wide enough that the flow stays inside the lattice.
    pub fn free() -> RunConfig {
        base(32.0, 512, 15.75, SymbolSpec::Free)
    }

    pub fn harmonic() -> RunConfig {
        base(64.0, 1024, 10.0, SymbolSpec::Harmonic)
    }

    /// `ξ² + Σ_{j≤8} 2^{-j} cos(3^j x)`.
    pub fn weierstrass() -> RunConfig {
        let mut c = base(16.0 * PI, 512, 12.0, SymbolSpec::Weierstrass { terms: 9 });
        c.lattice = LatticeSpec { alpha: PI / 16.0, beta: 2.0, x_max: 12.0, xi_max: 15.5, phase_box: None };
        c.tolerances.truncation = 5e-2;
        c.initial = InitialSpec::Packet { x0: 0.0, xi0: 0.0, width: 1.0, amp: 1.0 };
        c
    }

    /// Defocusing cubic NLS `F(u) = g|u|²u` with small data.
    pub fn nls() -> RunConfig {
        let mut c = free();
        c.time = TimeSpec { t_end: 0.1, steps: 16 };
        c.initial = InitialSpec::Packet { x0: -1.0, xi0: 2.0, width: 1.0, amp: 0.5 };
        c.nonlinear = Some(NonlinearSpec { terms: AnalyticNonlinearity::cubic(1.0).terms().to_vec() });
        c
    }

    pub fn by_name(name: &str) -> Option<RunConfig> {
        match name {
            "free" => Some(free()),
            "harmonic" => Some(harmonic()),
            "weierstrass" => Some(weierstrass()),
            "nls" => Some(nls()),
            _ => None,
        }
    }

    pub const NAMES: [&str; 4] = ["free", "harmonic", "weierstrass", "nls"];
}
