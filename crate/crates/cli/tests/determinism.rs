//! Criterion: identical configurations reproduce byte-identical artifacts,
//! and `compare` classifies artifact pairs correctly.

use std::path::Path;
use std::process::Command;

fn run(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_subshift"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    entries.sort();
    entries
}

fn assert_identical_runs(args: &[&str]) {
    let tmp = tempfile::tempdir().unwrap();
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    for out in [&out_a, &out_b] {
        let mut full: Vec<&str> = args.to_vec();
        let out_str = out.to_str().unwrap().to_string();
        let leaked: &'static str = Box::leak(out_str.into_boxed_str());
        full.push("--out");
        full.push(leaked);
        let status = run(&full);
        assert!(
            status.status.success(),
            "command failed: {:?}\n{}",
            args,
            String::from_utf8_lossy(&status.stderr)
        );
    }
    let a = read_dir_sorted(&out_a);
    let b = read_dir_sorted(&out_b);
    assert_eq!(a.len(), b.len());
    for ((name_a, bytes_a), (name_b, bytes_b)) in a.iter().zip(b.iter()) {
        assert_eq!(name_a, name_b);
        assert_eq!(
            bytes_a, bytes_b,
            "artifact {name_a} differs between identical runs"
        );
    }
}

#[test]
fn acceptance_13_byte_identical_reruns() {
    assert_identical_runs(&[
        "generate",
        "--model",
        "fibonacci",
        "--from",
        "-64",
        "--to",
        "64",
    ]);
    assert_identical_runs(&[
        "words",
        "--model",
        "thue_morse",
        "--length",
        "2048",
        "--complexity",
        "24",
        "--palindromes",
        "4",
    ]);
    assert_identical_runs(&[
        "spectrum",
        "--model",
        "fibonacci",
        "--lambda",
        "1",
        "--k",
        "8",
    ]);
    assert_identical_runs(&[
        "trace", "--lambda", "2", "--energy", "0.5", "--kmax", "25", "--sigma", "6",
    ]);
    assert_identical_runs(&[
        "--workers",
        "2",
        "dynamics",
        "--model",
        "fibonacci",
        "--lambda",
        "2",
        "--half-width",
        "128",
        "--t-grid",
        "5:50:6",
        "--p",
        "1,2",
        "--plancherel",
        "3,10",
    ]);
    assert_identical_runs(&[
        "cmv",
        "--model",
        "fibonacci",
        "--sizes",
        "64,128",
        "--eps",
        "0.05,0.02",
    ]);
    println!("acceptance 13 determinism: PASS (byte-identical artifacts across reruns)");
}

#[test]
fn compare_reports_identity_and_mismatch() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let status = run(&[
        "spectrum",
        "--model",
        "fibonacci",
        "--lambda",
        "1",
        "--k",
        "6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let sigma = out.join("sigma.csv");
    // identical files compare clean
    let eq = run(&["compare", sigma.to_str().unwrap(), sigma.to_str().unwrap()]);
    assert!(eq.status.success());
    let report: serde_json::Value = serde_json::from_slice(&eq.stdout).unwrap();
    assert_eq!(report["within_tolerance"], serde_json::Value::Bool(true));
    assert_eq!(report["symmetric_difference"], serde_json::json!(0.0));
    // kind mismatch is a hard error
    let manifest = out.join("manifest.json");
    let ne = run(&[
        "compare",
        sigma.to_str().unwrap(),
        manifest.to_str().unwrap(),
    ]);
    assert_eq!(ne.status.code(), Some(2));
}

#[test]
fn config_file_overrides_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("config.json");
    std::fs::write(&config, r#"{"k": 5}"#).unwrap();
    let out = tmp.path().join("out");
    let status = run(&[
        "spectrum",
        "--model",
        "fibonacci",
        "--lambda",
        "1",
        "--k",
        "3",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(doc["params"]["k"], serde_json::json!(5));
}

#[test]
fn invalid_config_is_a_clean_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    // empty grid
    let bad = run(&[
        "dynamics",
        "--model",
        "fibonacci",
        "--t-grid",
        "10:100:0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("grid"));
    // unknown model
    let bad = run(&[
        "generate",
        "--model",
        "nope",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn catalog_emission_and_window_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("cat");
    let status = run(&["generate", "--emit-catalog", "--out", out.to_str().unwrap()]);
    assert!(status.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("catalog.json")).unwrap()).unwrap();
    assert_eq!(doc["kind"], "model_catalog");
    let names: Vec<&str> =
        doc["models"].as_array().unwrap().iter().map(|m| m["name"].as_str().unwrap()).collect();
    for expected in ["fibonacci", "thue_morse", "period_doubling", "rudin_shapiro", "golden_sturmian"] {
        assert!(names.contains(&expected), "{expected} missing from catalog");
    }

    let out2 = tmp.path().join("win");
    let status = run(&[
        "generate", "--model", "period_doubling", "--from", "0", "--to", "32",
        "--out", out2.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let text = std::fs::read_to_string(out2.join("window.txt")).unwrap();
    assert_eq!(&text[..18], "101110101011101110");
    let wdoc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out2.join("window.json")).unwrap()).unwrap();
    assert_eq!(wdoc["labels"].as_array().unwrap().len(), 32);
    assert!(out2.join("potential.csv").exists());
    assert!(out2.join("sampling.json").exists());
}
