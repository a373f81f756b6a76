//! Replays the checked-in fuzz seeds through the same round-trip checks as the fuzz targets.

use std::path::{Path, PathBuf};

use gaborprop::corekit::io::{from_json, from_text, to_json, to_text};
use gaborprop::corekit::SpatialGrid;
use gaborprop_cli::config::{parse_sampled, RunConfig};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(PathBuf, String)> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn field_text_seeds() {
    let mut ok = 0;
    for (_, s) in seeds("field_text") {
        if let Ok(f) = from_text(&s) {
            assert_eq!(from_text(&to_text(&f)).unwrap().values(), f.values());
            ok += 1;
        }
    }
    assert!(ok >= 1);
}

#[test]
fn field_json_seeds() {
    let mut ok = 0;
    for (_, s) in seeds("field_json") {
        if let Ok(f) = from_json(&s) {
            assert_eq!(from_json(&to_json(&f)).unwrap().values(), f.values());
            ok += 1;
        }
    }
    assert!(ok >= 1);
}

#[test]
fn run_config_seeds() {
    let mut ok = 0;
    for (p, s) in seeds("run_config") {
        if let Ok(cfg) = RunConfig::parse(&s) {
            assert_eq!(RunConfig::parse(&cfg.to_toml()).unwrap(), cfg, "{}", p.display());
            ok += 1;
        }
    }
    assert!(ok >= 5);
}

#[test]
fn sampled_symbol_seeds() {
    let grid = SpatialGrid::new(2.0 * std::f64::consts::PI, 8).unwrap();
    let parsed: Vec<bool> = seeds("sampled_symbol").iter().map(|(_, s)| parse_sampled(s, grid).is_ok()).collect();
    assert!(parsed.contains(&true) && parsed.contains(&false));
}
