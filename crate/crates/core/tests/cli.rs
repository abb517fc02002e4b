use std::fs;
use std::path::{Path, PathBuf};

use kwcopt::cli::{fmt_f64, main_with};
use serde_json::{json, Value};
use tempfile::TempDir;

fn write_config(dir: &Path, cfg: &Value) -> PathBuf {
    let path = dir.join("run.json");
    fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path
}

fn run(sub: &str, config: &Path, out: &Path) -> i32 {
    main_with(["kwcopt", sub, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn small_reference() -> Value {
    json!({
        "grid": { "dim": 1, "resolution": [17], "extents": [1.0] },
        "time": { "horizon": 1.0, "tau": 0.005 },
        "fields": {
            "eta0": { "shape": "sine", "wavevector": [1.0], "amplitude": 0.25, "offset": 0.5 },
            "theta0": { "shape": "bubble", "amplitude": 1.0 }
        },
        "output": { "field_stride": 50 }
    })
}

fn meta(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("meta.json")).unwrap()).unwrap()
}

fn listing(dir: &Path) -> Vec<PathBuf> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                files.push(p.strip_prefix(dir).unwrap().to_path_buf());
            }
        }
    }
    files.sort();
    files
}

#[test]
fn stationary_state_keeps_constant_energy() {
    let tmp = TempDir::new().unwrap();
    let cfg = json!({
        "grid": { "dim": 1, "resolution": [33], "extents": [1.0] },
        "time": { "horizon": 0.5, "tau": 0.01 },
        "fields": {
            "eta0": { "shape": "constant", "value": 0.8 },
            "theta0": { "shape": "constant", "value": 0.3 },
            "u": { "shape": "constant", "value": 0.6 }
        },
        "output": { "field_stride": 0 }
    });
    let out = tmp.path().join("out");
    assert_eq!(run("solve-state", &write_config(tmp.path(), &cfg), &out), 0);
    let mut rdr = csv::Reader::from_path(out.join("energy.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["t", "energy"]);
    let energies: Vec<f64> = rdr.records().map(|r| r.unwrap()[1].parse().unwrap()).collect();
    assert_eq!(energies.len(), 51);
    assert!(energies.iter().all(|e| (e - energies[0]).abs() <= 1e-12));
    assert!(!out.join("fields").exists());
    let m = meta(&out);
    assert_eq!((m["tool"].as_str(), m["exit_code"].as_i64()), (Some("kwcopt"), Some(0)));
    assert!(m["seed"].is_u64());
}

#[test]
fn missing_step_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = json!({
        "grid": { "dim": 1, "resolution": [9], "extents": [1.0] },
        "time": { "horizon": 1.0 },
        "fields": {
            "eta0": { "shape": "constant", "value": 0.5 },
            "theta0": { "shape": "constant", "value": 0.0 }
        }
    });
    let out = tmp.path().join("out");
    assert_eq!(run("solve-state", &write_config(tmp.path(), &cfg), &out), 2);
    assert_eq!(listing(&out), [PathBuf::from("meta.json")]);
    let m = meta(&out);
    assert_eq!(m["exit_code"], 2);
    assert_eq!(m["error"]["kind"], "config");
    assert!(m["config"].is_null());
}

#[test]
fn unreadable_config_and_empty_eps_list_are_config_errors() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    assert_eq!(run("solve-state", &tmp.path().join("absent.json"), &out), 2);

    let mut cfg = small_reference();
    cfg["eps_list"] = json!([]);
    assert_eq!(run("eps-sweep", &write_config(tmp.path(), &cfg), &out), 2);
    cfg["eps_list"] = json!([0.25, 0.5]);
    assert_eq!(run("eps-sweep", &write_config(tmp.path(), &cfg), &out), 2);
    cfg["eps_list"] = json!([0.5]);
    cfg["grid"]["resolution"] = json!([1]);
    assert_eq!(run("eps-sweep", &write_config(tmp.path(), &cfg), &out), 2);
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), &small_reference());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(run("solve-ocp", &cfg, &a), 0);
    assert_eq!(run("solve-ocp", &cfg, &b), 0);
    let files = listing(&a);
    assert_eq!(files, listing(&b));
    for name in ["cost.csv", "energy.csv", "diagnostics.json", "meta.json", "fields/u_0200.csv"] {
        assert!(files.contains(&PathBuf::from(name)), "{name} missing");
    }
    for f in &files {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{}", f.display());
    }
    let diag: Value = serde_json::from_str(&fs::read_to_string(a.join("diagnostics.json")).unwrap()).unwrap();
    assert_eq!(diag["stop"], "Converged");
    assert_eq!(diag["terminal_adjoint"], json!([0.0, 0.0]));
}

#[test]
fn gradient_check_passes_at_small_steps_and_fails_at_large_ones() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = small_reference();
    let out = tmp.path().join("ok");
    assert_eq!(run("gradcheck", &write_config(tmp.path(), &cfg), &out), 0);
    let rows = csv::Reader::from_path(out.join("gradcheck.csv")).unwrap().records().count();
    assert_eq!(rows, 2);

    cfg["fd_deltas"] = json!([40.0]);
    let out = tmp.path().join("bad");
    assert_eq!(run("gradcheck", &write_config(tmp.path(), &cfg), &out), 1);
    assert_eq!(meta(&out)["error"]["kind"], "check");
}

#[test]
fn eps_sweep_writes_one_row_per_level() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = small_reference();
    cfg["eps_list"] = json!([0.5, 0.25]);
    let out = tmp.path().join("out");
    assert_eq!(run("eps-sweep", &write_config(tmp.path(), &cfg), &out), 0);
    let text = fs::read_to_string(out.join("eps.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0.5,"));
    // No predecessor for the first level.
    assert_eq!(lines[1].split(',').nth(3), Some(""));
    assert!(lines[2].starts_with("0.25,"));
}

#[test]
fn check_runs_the_named_suites() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = small_reference();
    cfg["suites"] = json!(["A1", "A2"]);
    let out = tmp.path().join("out");
    assert_eq!(run("check", &write_config(tmp.path(), &cfg), &out), 0);
    let text = fs::read_to_string(out.join("check.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));

    cfg["suites"] = json!(["A99"]);
    assert_eq!(run("check", &write_config(tmp.path(), &cfg), &out), 2);
}

#[test]
fn non_finite_values_are_spelled_out() {
    assert_eq!(fmt_f64(f64::NAN), "nan");
    assert_eq!(fmt_f64(f64::INFINITY), "inf");
    assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
    assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(main_with(["kwcopt", "no-such-command"]), 2);
    assert_eq!(main_with(["kwcopt", "solve-state"]), 2);
}
