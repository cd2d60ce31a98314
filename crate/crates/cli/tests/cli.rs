use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hyperfront"))
}

fn reference(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn write_config(dir: &Path, geometry: &str, data: &str, tau: f64) -> PathBuf {
    let text = format!(
        r#"{{"schema_version": 1, "params": {{"gamma": 1.4, "a_inf": 0.5, "tau": {tau}}},
            "geometry": {geometry}, "initial_data": {data},
            "h": 0.05, "nu": 8, "x_end": 1.0, "query_xs": [0.5, 1.0]}}"#
    );
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p
}

const FLAT: &str = r#"{"kind": "piecewise_linear", "breakpoints": [], "slopes": [0.0]}"#;
const BG: &str = r#"{"kind": "constant", "state": [1.0, 0.0]}"#;

#[test]
fn background_run_writes_empty_event_log() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), FLAT, BG, 0.1);
    let out = d.path().join("out");
    let st = bin()
        .args(["run", cfg.to_str().unwrap(), "--quiet", "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let events = fs::read_to_string(out.join("events.csv")).unwrap();
    assert_eq!(events.lines().count(), 1);
    assert!(events.starts_with("event_index,x,kind,"));
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(s["fronts_created"], 0);
    assert!(out.join("profiles.csv").exists());
}

#[test]
fn compare_at_zero_tau_exits_one_without_files() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), FLAT, BG, 0.0);
    let out = d.path().join("out");
    let o = bin()
        .args(["compare", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tau > 0"));
    assert!(!out.exists());
}

#[test]
fn bad_configs_exit_one() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(
        d.path(),
        FLAT,
        r#"{"kind": "constant", "state": [1.0, 0.0], "extra": 1}"#,
        0.1,
    );
    let st = bin()
        .args(["run", cfg.to_str().unwrap(), "--quiet"])
        .current_dir(d.path())
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(1));
    let st = bin()
        .args(["run", "missing.json"])
        .current_dir(d.path())
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(1));
    let st = bin().args(["launch"]).status().unwrap();
    assert_eq!(st.code(), Some(1));
}

#[test]
fn reference_run_is_bit_identical_and_seed_sensitive() {
    let d = tempfile::tempdir().unwrap();
    let cfg = reference("wedge_small.json");
    let run = |name: &str, seed: Option<&str>| {
        let out = d.path().join(name);
        let mut c = bin();
        c.args(["run", cfg.to_str().unwrap(), "--quiet", "--out", out.to_str().unwrap()]);
        if let Some(s) = seed {
            c.args(["--seed", s]);
        }
        assert_eq!(c.status().unwrap().code(), Some(0));
        out
    };
    let (a, b, c) = (run("a", None), run("b", None), run("c", Some("7")));
    for f in ["events.csv", "profiles.csv", "summary.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_ne!(
        fs::read(a.join("events.csv")).unwrap(),
        fs::read(c.join("events.csv")).unwrap()
    );
}
