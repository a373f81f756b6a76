use std::path::PathBuf;

use clap::{Parser, Subcommand};
use gaborprop::{Error, Result};

use crate::accept;
use crate::commands::{self, Overrides, Run};
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(name = "gaborprop", version, about = "Gabor-frame propagation of Schrödinger-type equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides the config's `output.dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, env = "GABORPROP_THREADS")]
    pub threads: Option<usize>,
    /// Seed for generated corpora.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Iteration tolerance (Volterra and Duhamel).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// STFT of the initial field (CSV + heatmap).
    Stft,
    /// Modulation norms of the initial field.
    Norm,
    /// Banded Gabor matrix of the symbol at t = 0.
    GaborMatrix,
    /// Frequency envelope of the symbol.
    Envelope,
    /// Hamiltonian trajectory from the packet centre.
    Flow,
    /// Full propagator to T, with reference error.
    Propagate,
    /// Parametrix against split-step at every grid time.
    Compare,
    /// Nonlinear Duhamel iteration against nonlinear split-step.
    Nls,
    /// Full acceptance suite on the built-in configurations.
    Accept,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Stft => "stft",
            Command::Norm => "norm",
            Command::GaborMatrix => "gabor-matrix",
            Command::Envelope => "envelope",
            Command::Flow => "flow",
            Command::Propagate => "propagate",
            Command::Compare => "compare",
            Command::Nls => "nls",
            Command::Accept => "accept",
        }
    }
}

/// A finished run. `passed` is false only when `accept` found a failing criterion.
pub struct Outcome {
    pub report: Report,
    pub passed: bool,
}

pub fn install_threads(threads: Option<usize>) -> Result<()> {
    if let Some(k) = threads {
        if k == 0 {
            return Err(Error::InvalidParameter("--threads must be at least 1".into()));
        }
        // A second installation in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    install_threads(cli.threads)?;
    let ov = Overrides { out: cli.out.clone(), seed: cli.seed, tol: cli.tol };
    if cli.command == Command::Accept {
        let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out/accept"));
        let suite = accept::run_suite(&accept::Selection::all(), &|line| println!("{line}"))?;
        let report = suite.write(&out)?;
        return Ok(Outcome { passed: suite.all_passed(), report });
    }
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter(format!("`{}` needs --config", cli.command.name())))?;
    let run = Run::load(cli.command.name(), path, &ov)?;
    let report = match cli.command {
        Command::Stft => commands::stft(run),
        Command::Norm => commands::norm(run),
        Command::GaborMatrix => commands::gabor_matrix(run),
        Command::Envelope => commands::envelope(run),
        Command::Flow => commands::flow(run),
        Command::Propagate => commands::propagate(run),
        Command::Compare => commands::compare(run),
        Command::Nls => commands::nls(run),
        Command::Accept => unreachable!(),
    }?;
    Ok(Outcome { report, passed: true })
}
