//! Runs the acceptance criteria. `GABORPROP_ACCEPT_ONLY=1,8` restricts the selection.

use std::path::PathBuf;
use std::process::ExitCode;

use gaborprop_cli::accept::{run_suite, Selection};

fn main() -> ExitCode {
    let sel = match std::env::var("GABORPROP_ACCEPT_ONLY") {
        Ok(s) => match Selection::parse(&s) {
            Some(sel) => sel,
            None => {
                eprintln!("GABORPROP_ACCEPT_ONLY: expected ids 1..=13, got {s:?}");
                return ExitCode::FAILURE;
            }
        },
        Err(_) => Selection::all(),
    };
    let suite = match run_suite(&sel, &|line| println!("{line}")) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("acceptance suite aborted: {e}");
            return ExitCode::FAILURE;
        }
    };
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("accept");
    if let Err(e) = suite.write(&dir) {
        eprintln!("could not write {}: {e}", dir.display());
    }
    let passed = suite.results.iter().filter(|r| r.passed()).count();
    println!("{passed}/{} criteria passed in {:.1}s (report in {})", suite.results.len(), suite.seconds, dir.display());
    if suite.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
