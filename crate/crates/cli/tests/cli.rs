use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn magicwit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magicwit"))
        .args(args)
        .env_remove("MAGICWIT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", stderr(out));
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn close(v: &Value, expected: f64, tol: f64) -> bool {
    (v.as_f64().unwrap() - expected).abs() < tol
}

#[test]
fn classes_table_and_json() {
    let out = magicwit(&["classes", "--n", "3", "--d", "2"]);
    assert!(out.status.success());
    let lines: Vec<_> = stdout(&out).lines().map(String::from).collect();
    assert_eq!(lines.len(), 6, "{lines:?}");
    assert!(lines[0].starts_with("class"));

    let report = json(&magicwit(&["classes", "--n", "3", "--d", "3", "--json"]));
    assert_eq!(report["n"], 3);
    assert_eq!(report["d"], 3);
    let classes = report["classes"].as_array().unwrap();
    let orbit_sum: u64 = classes.iter().map(|c| c["orbit_size"].as_u64().unwrap()).sum();
    assert_eq!(orbit_sum, 27);
    assert_eq!(report["total"], 27);
    for c in classes {
        for e in c["edges"].as_array().unwrap() {
            let e = e.as_array().unwrap();
            assert!(e[0].as_u64() < e[1].as_u64());
            assert!((1..3).contains(&e[2].as_u64().unwrap()));
        }
    }
}

#[test]
fn classes_errors() {
    let out = magicwit(&["classes", "--n", "3", "--d", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("prime"));

    let out = magicwit(&["classes", "--n", "7", "--d", "7"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));

    let out = magicwit(&["classes", "--n", "3", "--d", "2", "--budget", "4"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bounds_catalog() {
    let r = json(&magicwit(&["bounds", "tilted-chsh", "--alpha", "0.5", "--restarts", "8"]));
    assert!(close(&r["local"], 2.5, 1e-9));
    assert!(close(&r["stabilizer"], 8f64.sqrt(), 1e-6));
    assert!(close(&r["quantum"], 8.5f64.sqrt(), 1e-6));
    assert!(close(&r["gap"], 8.5f64.sqrt() - 8f64.sqrt(), 1e-6));
    assert_eq!(r["outcomes"], serde_json::json!([2, 2]));

    let r = json(&magicwit(&["bounds", "svetlichny-r2", "--which", "local"]));
    assert!(close(&r["local"], 6.0, 1e-9));
    assert!(r["stabilizer"].is_null() && r["quantum"].is_null());
}

#[test]
fn bounds_usage_errors() {
    for args in [
        &["bounds", "nonsense"][..],
        &["bounds", "tilted-chsh", "--alpha", "2.5"],
        &["bounds", "cglmp", "--d", "4"],
        &["bounds", "chsh", "--dims", "3,3"],
        &["bounds", "chsh", "--restarts", "0"],
    ] {
        let out = magicwit(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn bounds_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut entries = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    let s = if (a + b + x * y) % 2 == 0 { 1 } else { -1 };
                    entries.push(format!(r#"{{"a": [{a}, {b}], "x": [{x}, {y}], "value": {s}}}"#));
                }
            }
        }
    }
    let text = format!(
        r#"{{"name": "my-chsh", "parties": 2, "outcomes": [2, 2], "settings": [2, 2], "coefficients": [{}]}}"#,
        entries.join(", ")
    );
    let path = write(dir.path(), "chsh.json", &text);
    let r = json(&magicwit(&["bounds", &path, "--restarts", "8", "--dims", "2,2"]));
    assert_eq!(r["inequality"], "my-chsh");
    assert!(close(&r["local"], 2.0, 1e-9));
    assert!(close(&r["stabilizer"], 8f64.sqrt(), 1e-6));
    assert!(close(&r["quantum"], 8f64.sqrt(), 1e-6));
}

#[test]
fn bounds_file_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("broken.json", "{\n  \"parties\": 2,\n  \"outcomes\": [2, 2,\n}", "line 4"),
        (
            "dup.json",
            r#"{"parties": 1, "outcomes": [2], "settings": [1],
                "coefficients": [{"a": [0], "x": [0], "value": 1}, {"a": [0], "x": [0], "value": 1}]}"#,
            "duplicate",
        ),
        (
            "range.json",
            r#"{"parties": 1, "outcomes": [2], "settings": [1],
                "coefficients": [{"a": [0], "x": [3], "value": 1}]}"#,
            "coefficients[0].x[0]",
        ),
    ];
    for (name, text, needle) in cases {
        let path = write(dir.path(), name, text);
        let out = magicwit(&["bounds", &path]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        let err = stderr(&out);
        assert!(err.contains(needle) && err.contains(name), "{name}: {err}");
    }
    let out = magicwit(&["bounds", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

fn scan(jobs: &str, seed: Option<&str>) -> String {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_magicwit"));
    cmd.args(["scan", "tilted-chsh", "--restarts", "8", "--jobs", jobs]);
    match seed {
        Some(s) => cmd.env("MAGICWIT_SEED", s),
        None => cmd.env_remove("MAGICWIT_SEED"),
    };
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    stdout(&out)
}

#[test]
fn scan_tilted_chsh() {
    let csv = scan("1", None);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "param,local,stab,quantum,gap");
    assert_eq!(lines.len(), 22);
    let rows: Vec<Vec<f64>> =
        lines[1..].iter().map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    for (i, r) in rows.iter().enumerate() {
        let alpha = i as f64 * 0.1;
        assert!((r[0] - alpha).abs() < 1e-9);
        assert!((r[1] - (2.0 + alpha)).abs() < 1e-9);
        assert!((r[3] - (8.0 + 2.0 * alpha * alpha).sqrt()).abs() < 1e-6, "{r:?}");
        assert!((r[4] - (r[3] - r[2])).abs() < 1e-9);
        assert!(r[4] >= -1e-9);
    }
    assert!(rows[0][4].abs() < 1e-8);
    assert!(rows[20][4].abs() < 1e-8);

    assert_eq!(csv, scan("1", None));
    assert_eq!(csv, scan("8", None));
    assert_eq!(scan("2", Some("11")), scan("1", Some("11")));
}

#[test]
fn scan_output_file_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let out = magicwit(&[
        "scan", "tilted-chsh", "--from", "0", "--to", "0.2", "--step", "0.1", "--restarts", "4", "--seed", "3",
        "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 4);
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("scan.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["restarts"], 4);
}

#[test]
fn heatmap_small_grid() {
    let out = magicwit(&["heatmap", "--theta-steps", "2", "--phi-steps", "2", "--restarts", "4"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theta,phi,value");
    assert_eq!(lines.len(), 5);
    for l in &lines[1..] {
        let v: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
        assert!(v >= 6.0 - 1e-6, "{l}");
    }

    let out = magicwit(&["heatmap", "--theta-steps", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_quick_passes() {
    let out = magicwit(&["verify", "--quick"]);
    assert_eq!(out.status.code(), Some(0), "{}{}", stdout(&out), stderr(&out));
}

#[test]
fn verify_detects_injected_fault() {
    let out = magicwit(&["verify", "--check", "4", "--inject-fault", "cglmp"]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).contains("FAIL"));

    let out = magicwit(&["verify", "--check", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}
