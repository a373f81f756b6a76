//! The acceptance suite: thirteen criteria, each a list of numeric checks against fixed bounds.

use std::path::Path;
use std::time::Instant;

use gaborprop::corekit::conventions::LEDGER_VERSION;
use gaborprop::Result;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{Report, Versions};

mod basic;
mod evolution;
mod nonlinear;
mod shared;
mod symbols;

pub use shared::Shared;

/// Seed of every generated corpus in the suite.
pub const SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Cmp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub cmp: Cmp,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, cmp: Cmp, bound: f64) -> Self {
        let passed = match cmp {
            Cmp::Lt => value < bound,
            Cmp::Le => value <= bound,
            Cmp::Ge => value >= bound,
        };
        Self { name: name.into(), value, cmp, bound, passed }
    }

    pub fn lt(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value, Cmp::Lt, bound)
    }

    pub fn le(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value, Cmp::Le, bound)
    }

    pub fn ge(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value, Cmp::Ge, bound)
    }

    fn short(&self) -> String {
        let op = match self.cmp {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Ge => ">=",
        };
        format!("{} {:.3e} {op} {:.1e}", self.name, self.value, self.bound)
    }
}

/// What a criterion returns: its checks plus free-form details for the report.
#[derive(Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub details: serde_json::Map<String, Value>,
}

impl Outcome {
    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        self.details.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }
}

type Runner = fn(&Shared) -> Result<Outcome>;

pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    /// Wall-clock budget in seconds, where the criterion states one.
    pub budget: Option<f64>,
    run: Runner,
}

pub const CRITERIA: [Criterion; 13] = [
    Criterion { id: 1, title: "identity and covariance", budget: Some(30.0), run: basic::identity_covariance },
    Criterion { id: 2, title: "STFT of the constant", budget: Some(5.0), run: basic::constant_stft },
    Criterion { id: 3, title: "chirp STFT", budget: Some(60.0), run: basic::chirp },
    Criterion { id: 4, title: "frame machinery", budget: Some(60.0), run: basic::frame },
    Criterion { id: 5, title: "Hamiltonian flows", budget: Some(30.0), run: basic::flows },
    Criterion { id: 6, title: "affine exactness", budget: None, run: evolution::affine },
    Criterion { id: 7, title: "parametrix residual", budget: None, run: evolution::residual },
    Criterion { id: 8, title: "propagator vs split-step", budget: Some(600.0), run: evolution::oracle },
    Criterion { id: 9, title: "modulation-norm boundedness", budget: None, run: evolution::norm_bounds },
    Criterion { id: 10, title: "Gabor-matrix domination", budget: None, run: symbols::domination },
    Criterion { id: 11, title: "fractional envelope decay", budget: None, run: symbols::fractional },
    Criterion { id: 12, title: "Volterra contraction", budget: None, run: evolution::contraction },
    Criterion { id: 13, title: "nonlinear Duhamel", budget: None, run: nonlinear::nls },
];

/// Full-suite budget in seconds.
pub const SUITE_BUDGET: f64 = 1200.0;

#[derive(Clone, Debug)]
pub struct Selection(pub Vec<u8>);

impl Selection {
    pub fn all() -> Self {
        Self((1..=13).collect())
    }

    /// Parses a comma-separated id list such as `"1,2,8"`.
    pub fn parse(s: &str) -> Option<Self> {
        let ids: Option<Vec<u8>> = s.split(',').map(|p| p.trim().parse().ok().filter(|i| (1..=13).contains(i))).collect();
        ids.filter(|v| !v.is_empty()).map(Self)
    }
}

pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub details: Value,
    pub error: Option<String>,
    pub seconds: f64,
    pub budget: Option<f64>,
}

impl CriterionResult {
    pub fn checks_passed(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn within_budget(&self) -> bool {
        self.budget.is_none_or(|b| self.seconds <= b)
    }

    pub fn passed(&self) -> bool {
        self.checks_passed() && self.within_budget()
    }

    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut parts: Vec<String> = match &self.error {
            Some(e) => vec![format!("error: {e}")],
            None => {
                let failing: Vec<String> = self.checks.iter().filter(|c| !c.passed).map(Check::short).collect();
                if failing.is_empty() {
                    self.checks.iter().take(3).map(Check::short).collect()
                } else {
                    failing
                }
            }
        };
        let time = match self.budget {
            Some(b) => format!("{:.1}s/{b:.0}s", self.seconds),
            None => format!("{:.1}s", self.seconds),
        };
        if !self.within_budget() {
            parts.push("over time budget".into());
        }
        format!("[{status}] {:>2} {:<28} {time:>12}  {}", self.id, self.title, parts.join("; "))
    }
}

pub struct Suite {
    pub results: Vec<CriterionResult>,
    pub seconds: f64,
}

impl Suite {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed()) && self.seconds <= SUITE_BUDGET
    }

    /// Writes `report.json` (timing-free) and `timings.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Report> {
        std::fs::create_dir_all(dir)?;
        let criteria: Vec<Value> = self
            .results
            .iter()
            .map(|r| json!({ "id": r.id, "title": r.title, "passed": r.checks_passed(), "error": r.error, "checks": r.checks, "details": r.details }))
            .collect();
        let ids: Vec<u8> = self.results.iter().map(|r| r.id).collect();
        let mut report = Report::new("accept", hex_of(&ids), SEED);
        report.set("criteria", criteria);
        report.set("all_checks_passed", self.results.iter().all(|r| r.checks_passed()));
        report.write(dir)?;
        let timings = json!({
            "ledger_version": LEDGER_VERSION,
            "versions": Versions::current(),
            "criteria": self.results.iter().map(|r| json!({ "id": r.id, "seconds": r.seconds, "budget": r.budget, "within_budget": r.within_budget() })).collect::<Vec<_>>(),
            "total_seconds": self.seconds,
            "suite_budget": SUITE_BUDGET,
        });
        std::fs::write(dir.join("timings.json"), serde_json::to_string_pretty(&timings)? + "\n")?;
        Ok(report)
    }
}

/// The accept report has no config file; it is keyed by the hash of the selected criteria.
fn hex_of(ids: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let text = format!("accept:{ids:?}:{SEED}");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Runs the selected criteria in order, reporting each line through `emit` as soon as it is known.
pub fn run_suite(sel: &Selection, emit: &dyn Fn(&str)) -> Result<Suite> {
    let start = Instant::now();
    let shared = Shared::default();
    let mut results = Vec::new();
    for c in CRITERIA.iter().filter(|c| sel.0.contains(&c.id)) {
        let t = Instant::now();
        let (checks, details, error) = match (c.run)(&shared) {
            Ok(o) => (o.checks, Value::Object(o.details), None),
            Err(e) => (Vec::new(), Value::Null, Some(e.to_string())),
        };
        let r = CriterionResult { id: c.id, title: c.title, checks, details, error, seconds: t.elapsed().as_secs_f64(), budget: c.budget };
        emit(&r.line());
        results.push(r);
    }
    let seconds = start.elapsed().as_secs_f64();
    Ok(Suite { results, seconds })
}
