use std::path::{Path, PathBuf};

use gaborprop::{Error, Result};

use crate::config::RunConfig;
use crate::report::{Report, Timings};

mod analysis;
mod evolve;

pub use analysis::{envelope, flow, gabor_matrix, norm, stft};
pub use evolve::{compare, nls, propagate};

/// Command-line overrides applied on top of a config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidParameter(format!("--tol {t} must be positive")));
            }
            cfg.tolerances.volterra = t;
            cfg.tolerances.duhamel = t;
        }
        Ok(())
    }
}

/// One run: the effective config, its output directory, report and timings.
pub struct Run {
    pub cfg: RunConfig,
    pub out: PathBuf,
    pub hash: String,
    pub report: Report,
    pub timings: Timings,
}

impl Run {
    pub fn new(command: &str, mut cfg: RunConfig, ov: &Overrides) -> Result<Self> {
        ov.apply(&mut cfg)?;
        cfg.validate()?;
        let out = ov.out.clone().unwrap_or_else(|| cfg.output_dir());
        std::fs::create_dir_all(&out)?;
        let hash = cfg.hash();
        let report = Report::new(command, hash.clone(), cfg.seed);
        Ok(Self { cfg, out, hash, report, timings: Timings::default() })
    }

    pub fn load(command: &str, path: &Path, ov: &Overrides) -> Result<Self> {
        Self::new(command, RunConfig::load(path)?, ov)
    }

    /// Writes an artifact into the output directory and lists it in the report.
    pub fn emit(&mut self, name: &str, contents: &str) -> Result<()> {
        std::fs::write(self.out.join(name), contents)?;
        self.report.artifact(name);
        Ok(())
    }

    pub fn emit_field(&mut self, name: &str, f: &gaborprop::corekit::Field) -> Result<()> {
        gaborprop::corekit::io::write_field(&self.out.join(name), f)?;
        self.report.artifact(name);
        Ok(())
    }

    pub fn finish(self) -> Result<Report> {
        self.report.write(&self.out)?;
        self.timings.write(&self.out, &self.hash)?;
        Ok(self.report)
    }
}
