use std::process::{Command, Output};

fn cat_teleport(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cat-teleport")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn minus_channel_teleport_report() {
    let out = cat_teleport(&["teleport", "--alpha", "1,0", "--eps-plus", "1,0", "--eps-minus", "1,0", "--channel-sign", "minus"]);
    let v = json(&out);
    assert!((v["success_probability"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(v["params"]["input"]["alpha"], serde_json::json!([1.0, 0.0]));
    for o in v["outcomes"].as_array().unwrap() {
        for key in ["n", "m", "class", "probability", "fidelity"] {
            assert!(o.get(key).is_some(), "missing {key}");
        }
    }
    assert!(out.stderr.is_empty());
}

#[test]
fn plus_channel_scan_matches_the_closed_form() {
    let out = cat_teleport(&["scan-success", "--channel-sign", "plus", "--alpha-grid", "0:3:0.1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 32);
    assert_eq!(lines[0], "alpha,value");
    for line in &lines[1..] {
        let (a, p) = line.split_once(',').unwrap();
        let (a, p): (f64, f64) = (a.parse().unwrap(), p.parse().unwrap());
        let x = (-4.0 * a * a).exp();
        assert!((p - (1.0 - x).powi(2) / (2.0 * (1.0 + x * x))).abs() < 1e-8, "{line}");
    }
}

#[test]
fn parity_demo_prints_the_readout() {
    let out = cat_teleport(&["parity-demo", "--n", "5"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), r#"{"parity":"odd","atom":"excited"}"#);
    let out = cat_teleport(&["parity-demo", "--n", "8", "--engine", "both"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), r#"{"parity":"even","atom":"ground"}"#);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| cat_teleport(args).status.code().unwrap();
    assert_eq!(code(&["teleport", "--mass-tolerance", "1.5"]), 2);
    assert_eq!(code(&["no-such-experiment"]), 2);
    assert_eq!(code(&["teleport", "--alpha", "one"]), 2);
    assert_eq!(code(&["parity-demo", "--n", "3", "--format", "csv"]), 2);
    assert_eq!(code(&["teleport", "--alpha", "0,0", "--eps-minus", "-1,0"]), 3);
    assert_eq!(code(&["teleport", "--alpha", "3,0", "--engine", "fock", "--cutoff", "3"]), 3);
    assert_eq!(code(&["teleport", "--output", "/nonexistent-dir/report.json"]), 1);
    assert_eq!(code(&["teleport", "--config", "/nonexistent-dir/config.json"]), 1);
}

#[test]
fn diagnostics_go_to_stderr() {
    let out = cat_teleport(&["teleport", "--alpha", "0,0", "--eps-minus", "-1,0"]);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("near-singular"));
}

#[test]
fn photon_cap_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_cat-teleport"))
        .args(["teleport", "--alpha", "2,0"])
        .env("CAT_TELEPORT_MAX_PHOTONS", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("photon cap 4"));
}

#[test]
fn output_file_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.json"), dir.path().join("b.json")];
    for p in &paths {
        let out = cat_teleport(&["teleport", "--alpha", "0.7,0.3", "--eps-minus", "0.2,-0.4", "--seed", "9", "--shots", "500", "--output", p.to_str().unwrap()]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["sampled"]["shots"], 500);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, r#"{"experiment": "teleport", "alpha": [0.5, 0.0], "channel_sign": "plus"}"#).unwrap();
    let v = json(&cat_teleport(&["--config", path.to_str().unwrap(), "--alpha", "1.2,0"]));
    assert_eq!(v["params"]["channel"]["sign"], "plus");
    assert_eq!(v["params"]["input"]["alpha"], serde_json::json!([1.2, 0.0]));

    std::fs::write(&path, r#"{"experiment": "teleport", "alhpa": [0.5, 0.0]}"#).unwrap();
    assert_eq!(cat_teleport(&["--config", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn every_experiment_accepts_both_engines() {
    let runs: [&[&str]; 8] = [
        &["teleport", "--alpha", "0.6,0"],
        &["teleport-tripartite", "--alpha", "0.5,0"],
        &["channel-prepare", "--alpha", "0.8,0"],
        &["scan-success", "--alpha-grid", "0.5:1:0.5"],
        &["scan-concurrence", "--alpha-grid", "0.5:1:0.5"],
        &["limit-check"],
        &["parity-demo", "--alpha", "0.9,0", "--eps-minus", "0.4,0"],
        &["cross-validate", "--alpha", "0.6,0.1"],
    ];
    for args in runs {
        let mut full = args.to_vec();
        full.extend(["--engine", "both"]);
        let out = cat_teleport(&full);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn tripartite_success_probability() {
    let v = json(&cat_teleport(&["teleport-tripartite", "--alpha", "1,0", "--eps-minus", "0.5,0.5"]));
    assert!((v["success_probability"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(v["params"]["input"]["parties"], 3);
}
