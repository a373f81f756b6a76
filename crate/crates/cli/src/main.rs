use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use gaborprop::corekit::conventions::LEDGER_VERSION;
use gaborprop_cli::cli::{run, Cli};
use gaborprop_cli::report::{error_json, exit_code};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let v = serde_json::json!({
                "error": { "kind": "validation", "variant": "Usage", "message": e.to_string(), "exit_code": 1 },
                "ledger_version": LEDGER_VERSION,
            });
            eprintln!("{v}");
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(o) if o.passed => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
