use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gaborprop_cli::config::{presets, RunConfig};
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gaborprop"));
    c.env_remove("GABORPROP_THREADS");
    c
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write_config(dir: &Path, cfg: &RunConfig) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, cfg.to_toml()).unwrap();
    path
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    bin().args(args).arg("--config").arg(config).arg("--out").arg(out).output().unwrap()
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn shipped_configs_match_presets() {
    for name in presets::NAMES {
        let path = configs_dir().join(format!("{name}.toml"));
        let mut cfg = RunConfig::load(&path).unwrap();
        cfg.base_dir = PathBuf::new();
        assert_eq!(cfg, presets::by_name(name).unwrap(), "{name}");
    }
}

#[test]
fn config_round_trips_through_toml() {
    for name in presets::NAMES {
        let cfg = presets::by_name(name).unwrap();
        let back = RunConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
    }
}

#[test]
fn report_is_byte_identical_across_runs_and_threads() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &presets::free());
    let mut bodies = Vec::new();
    for (i, threads) in ["1", "1", "2"].iter().enumerate() {
        let out = tmp.path().join(format!("out{i}"));
        let o = run(&["norm", "--threads", threads], &cfg, &out);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        bodies.push(std::fs::read(out.join("report.json")).unwrap());
        assert!(out.join("timings.json").exists());
    }
    assert_eq!(bodies[0], bodies[1]);
    assert_eq!(bodies[0], bodies[2]);
}

#[test]
fn invalid_config_exits_1_with_json() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = presets::free();
    cfg.lattice.alpha = 0.3; // not a multiple of h = 1/16
    let path = write_config(tmp.path(), &cfg);
    let o = run(&["propagate"], &path, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "validation");
    assert_eq!(err["error"]["exit_code"], 1);

    std::fs::write(&path, "[grid]\nlength = \"long\"\n").unwrap();
    let o = run(&["norm"], &path, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(serde_json::from_slice::<Value>(&o.stderr).unwrap()["error"]["variant"], "Parse");
}

#[test]
fn missing_config_and_bad_usage_exit_1() {
    let o = bin().arg("norm").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = bin().arg("no-such-command").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(bin().arg("--help").output().unwrap().status.success());
}

#[test]
fn box_exit_is_numerical_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = presets::harmonic();
    cfg.lattice.phase_box = Some([1.5, 1.5]);
    let path = write_config(tmp.path(), &cfg);
    let o = run(&["flow"], &path, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "numerical");
}

#[test]
fn harmonic_flow_csv_is_a_rotation() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = presets::harmonic();
    let path = write_config(tmp.path(), &cfg);
    let out = tmp.path().join("out");
    let o = run(&["flow"], &path, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let (x0, xi0) = (-1.0f64, 2.0f64);
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let (c, s) = ((2.0 * v[0]).cos(), (2.0 * v[0]).sin());
        assert!((v[1] - (c * x0 + s * xi0)).abs() < 1e-8, "{line}");
        assert!((v[2] - (-s * x0 + c * xi0)).abs() < 1e-8, "{line}");
        rows += 1;
    }
    assert_eq!(rows, cfg.time.steps + 1);
    assert!(out.join("trajectory.svg").exists());
}

#[test]
fn propagate_free_matches_exact_solution() {
    let tmp = tempfile::tempdir().unwrap();
    let path = configs_dir().join("free.toml");
    let out = tmp.path().join("out");
    let o = run(&["propagate"], &path, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert!(r["results"]["l2_rel_err_vs_exact"].as_f64().unwrap() < 1e-3);
    assert!(r["results"]["l2_rel_err_vs_reference"].as_f64().unwrap() < 1e-3);
    assert!(out.join("u_T.field").exists());
}
