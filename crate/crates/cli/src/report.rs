use std::path::Path;
use std::time::Instant;

use gaborprop::corekit::conventions::LEDGER_VERSION;
use gaborprop::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

pub const CLI_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything in a report is a function of config and seed, so runs compare byte for byte.
/// Wall-clock times go to a sibling `timings.json`.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub ledger_version: &'static str,
    pub versions: Versions,
    pub artifacts: Vec<String>,
    pub results: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Versions {
    pub gaborprop: &'static str,
    pub cli: &'static str,
}

impl Versions {
    pub fn current() -> Self {
        Self { gaborprop: gaborprop::VERSION, cli: CLI_VERSION }
    }
}

impl Report {
    pub fn new(command: &str, config_hash: String, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            config_hash,
            seed,
            ledger_version: LEDGER_VERSION,
            versions: Versions::current(),
            artifacts: Vec::new(),
            results: Value::Object(Default::default()),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        if let Value::Object(m) = &mut self.results {
            m.insert(key.to_string(), v);
        }
    }

    pub fn artifact(&mut self, name: &str) {
        self.artifacts.push(name.to_string());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::write(dir.join("report.json"), self.to_json())?;
        Ok(())
    }
}

/// Named wall-clock stages in insertion order.
#[derive(Debug)]
pub struct Timings {
    start: Instant,
    last: Instant,
    stages: Vec<(String, f64)>,
}

impl Default for Timings {
    fn default() -> Self {
        let now = Instant::now();
        Self { start: now, last: now, stages: Vec::new() }
    }
}

impl Timings {
    /// Closes the current stage under `name`.
    pub fn lap(&mut self, name: &str) {
        let now = Instant::now();
        self.stages.push((name.to_string(), (now - self.last).as_secs_f64()));
        self.last = now;
    }

    pub fn total(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    pub fn write(&self, dir: &Path, config_hash: &str) -> Result<()> {
        let stages: Vec<Value> = self.stages.iter().map(|(n, s)| json!({ "stage": n, "seconds": s })).collect();
        let v = json!({
            "config_hash": config_hash,
            "stages": stages,
            "total_seconds": self.total(),
        });
        std::fs::write(dir.join("timings.json"), serde_json::to_string_pretty(&v)? + "\n")?;
        Ok(())
    }
}

/// Machine-readable failure description; `exit_code` is 1 for invalid input, 2 for numerical failure.
pub fn error_json(e: &Error) -> Value {
    let kind = if e.is_numerical() { "numerical" } else { "validation" };
    json!({
        "error": {
            "kind": kind,
            "variant": variant_name(e),
            "message": e.to_string(),
            "exit_code": exit_code(e),
        },
        "ledger_version": LEDGER_VERSION,
    })
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        2
    } else {
        1
    }
}

fn variant_name(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("").to_string()
}
