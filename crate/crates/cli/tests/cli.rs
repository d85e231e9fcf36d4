//! End-to-end runs of the `g2frames` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_g2frames"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn shipped_configs_pass() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let o = run(&["run", "--config", path.to_str().unwrap(), "--quiet"]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}: {}{}",
            path.display(),
            stdout(&o),
            stderr(&o)
        );
        assert!(stdout(&o).contains("PASS"));
    }
}

#[test]
fn sphere_bs_is_parallel() {
    let cfg = configs().join("sphere4-x-bs.json");
    let o = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("torsion: parallel"), "{out}");
    assert!(out.lines().filter(|l| l.starts_with("PASS ")).count() > 3);
}

#[test]
fn hyperbolic_tuning_is_pure_w3() {
    let cfg = configs().join("hyperbolic4-p-w3.json");
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--quiet"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("torsion: pure W3"), "{}", stdout(&o));
}

#[test]
fn invalid_configs_exit_2_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            r#"{"model": {"name": "sphere4"}, "space": "X", "profile": {"kind": "bs", "s": 1, "c0": 1, "c1": 1}}"#,
            "branch",
        ),
        (
            r#"{"model": {"name": "sphere4"}, "space": "M", "colour": "red"}"#,
            "colour",
        ),
        (
            r#"{"model": {"name": "sphere4", "kappa": 0}, "space": "M"}"#,
            "model.kappa",
        ),
        (
            r#"{"model": {"name": "flat"}, "space": "M", "tolerances": {"residual": -1}}"#,
            "tolerances.residual",
        ),
        ("not json", "config"),
    ];
    for (k, (text, key)) in cases.iter().enumerate() {
        let p = write(&dir, &format!("bad{k}.json"), text);
        let o = run(&["run", "--config", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert!(stderr(&o).contains(key), "{key} not in {}", stderr(&o));
    }
    let o = run(&["run", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = configs().join("catalog-base.json");
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--probes", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_1_with_the_record() {
    let cfg = configs().join("catalog-base.json");
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--tol", "1e-300", "--quiet"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("FAIL"), "{}", stdout(&o));
    assert!(stderr(&o).lines().all(|l| l.starts_with("FAIL ")), "{}", stderr(&o));
    assert!(!stderr(&o).is_empty());
}

#[test]
fn json_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("hyperbolic4-x-disk.json");
    let mut texts = Vec::new();
    for (k, extra) in [[].as_slice(), &[], &["--sequential"]].iter().enumerate() {
        let out = dir.path().join(format!("r{k}.json"));
        let mut args = vec![
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--quiet",
            "--seed",
            "9",
            "--json",
            out.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        assert_eq!(run(&args).status.code(), Some(0));
        texts.push(std::fs::read_to_string(&out).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    assert_eq!(texts[0], texts[2]);
    let v: serde_json::Value = serde_json::from_str(&texts[0]).unwrap();
    assert_eq!(v["environment"]["seed"], 9);
    assert_eq!(v["pass"], true);
    let rec = &v["records"][0];
    for key in ["checkId", "anchor", "maxResidual", "tolerance", "pass"] {
        assert!(rec.get(key).is_some(), "record lacks {key}");
    }
    assert!(v["environment"]["conventions"]["sphereAnchorS"].as_f64().is_some());
}

#[test]
fn overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let cfg = configs().join("catalog-base.json");
    let o = run(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--quiet",
        "--probes",
        "3",
        "--seed",
        "4",
        "--tol",
        "1e-6",
        "--json",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["config"]["probes"], 3);
    assert_eq!(v["config"]["seed"], 4);
    assert_eq!(v["config"]["tolerances"]["residual"], 1e-6);
}

#[test]
fn list_suites_shows_ids_and_anchors() {
    let o = run(&["list-suites"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for id in [
        "cocalibration-P:",
        "torsion-X-closed-vs-numeric:",
        "radial-incompleteness:",
        "frames4-invariants:",
    ] {
        assert!(out.contains(id), "{id} missing");
    }
    let o = run(&["list-suites", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 12);
}

#[test]
fn unknown_flags_are_usage_errors() {
    let o = run(&["run", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn schemas_match_the_binary() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas");
    let config: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(root.join("config.schema.json")).unwrap()).unwrap();
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(root.join("report.schema.json")).unwrap()).unwrap();
    let ids: Vec<String> = g2frames::runner::list_suites()
        .iter()
        .map(|s| s.id.as_str().to_string())
        .collect();
    let listed: Vec<String> = config["properties"]["suites"]["items"]["enum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert_eq!(listed, ids);
    let models: Vec<&str> = config["properties"]["model"]["properties"]["name"]["enum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    let want: Vec<&str> = g2frames::models::ModelName::ALL.iter().map(|m| m.as_str()).collect();
    assert_eq!(models, want);

    // every top-level and record key of a real report is declared
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let cfg = configs().join("sphere4-x-bs.json");
    run(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--quiet",
        "--json",
        out.to_str().unwrap(),
    ]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    for key in v.as_object().unwrap().keys() {
        assert!(report["properties"].get(key).is_some(), "undeclared report key {key}");
    }
    for key in v["records"][0].as_object().unwrap().keys() {
        assert!(
            report["properties"]["records"]["items"]["properties"]
                .get(key)
                .is_some(),
            "undeclared record key {key}"
        );
    }
}
