use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spa_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spa-lab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema_path(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"))
}

fn assert_valid(schema: &str, instance: &Value) {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path(schema)).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
}

fn json_out(args: &[&str]) -> Value {
    let o = spa_lab(args);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).expect("stdout is JSON")
}

#[test]
fn critical_transpose_3x3() {
    let v = json_out(&["--json", "spa", "critical", "--map", "transpose", "--dims", "3,3"]);
    assert!((v["p_star"].as_f64().unwrap() - 0.75).abs() < 1e-9);
    assert!((v["lambda_min"].as_f64().unwrap() + 1.0 / 3.0).abs() < 1e-9);
    assert_valid("spa_critical", &v);
}

#[test]
fn critical_every_catalog_map() {
    let cases: [(&[&str], f64); 6] = [
        (&["--map", "reduction", "--dims", "4,4"], 0.8),
        (&["--map", "choi"], 0.6),
        (&["--map", "breuer-hall", "--dims", "6,6"], 6.0 / 7.0),
        (&["--map", "id-tensor-t", "--dims", "2,3"], 12.0 / 13.0),
        (&["--map", "upb-tiles"], f64::NAN),
        (&["--map", "upb-pyramid"], f64::NAN),
    ];
    for (extra, expected) in cases {
        let mut args = vec!["--json", "spa", "critical"];
        args.extend_from_slice(extra);
        let v = json_out(&args);
        assert_valid("spa_critical", &v);
        let p = v["p_star"].as_f64().unwrap();
        if expected.is_nan() {
            assert!(p > 0.0 && p < 1.0);
        } else {
            assert!((p - expected).abs() < 1e-9, "{extra:?}: {p}");
        }
    }
}

#[test]
fn critical_from_q_file() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.json");
    // Q = P₊ on 2⊗2: Q^Γ/tr Q = F/2.
    std::fs::write(
        &q,
        r#"{"dims":[2,2],"re":[[0.5,0,0,0.5],[0,0,0,0],[0,0,0,0],[0.5,0,0,0.5]],"im":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#,
    )
    .unwrap();
    let v = json_out(&["--json", "spa", "critical", "--q", q.to_str().unwrap()]);
    assert!((v["p_star"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-9);
    assert_eq!(v["map"], "q-gamma");
}

#[test]
fn symplectic_sweep_has_all_labels() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("region.csv");
    let v = json_out(&["--json", "family", "sweep", "--family", "symplectic", "--d", "4", "--grid", "41", "--out", out.to_str().unwrap()]);
    assert_valid("family_sweep", &v);
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(!csv.contains('\r'));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("f,pj,class"));
    let labels: std::collections::BTreeSet<&str> = lines.map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(
        labels.into_iter().collect::<Vec<_>>(),
        ["invalid", "npt_entangled", "ppt_entangled", "separable"]
    );
    assert_eq!(csv.lines().count(), 41 * 41 + 1);
}

#[test]
fn symplectic_sweep_verifies_against_matrices() {
    let o = spa_lab(&["family", "sweep", "--family", "symplectic", "--d", "4", "--grid", "21", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("disagreements: 0"));
}

#[test]
fn werner_and_isotropic_sweeps() {
    for (family, expected_npt) in [("werner", true), ("isotropic", true)] {
        let o = spa_lab(&["family", "sweep", "--family", family, "--d", "3", "--grid", "11"]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        assert!(text.starts_with("param,min_eig,min_eig_pt,class\n"));
        assert_eq!(text.lines().count(), 12);
        assert_eq!(text.contains("npt_entangled"), expected_npt);
        assert!(!text.contains("invalid"));
    }
}

#[test]
fn classify_point() {
    let v = json_out(&["--json", "family", "classify", "--d", "4", "--f", "-0.5", "--pj", "0.1"]);
    assert_valid("family_classify", &v);
    assert_eq!(v["class"], "npt_entangled");
    let o = spa_lab(&["family", "classify", "--d", "4", "--f", "0.5", "--pj", "0.1"]);
    assert_eq!(stdout(&o).trim(), "separable");
}

#[test]
fn sep_check_maximally_mixed_is_separable() {
    let v = json_out(&["--json", "sep", "check", "--identity", "2,2"]);
    assert_eq!(v["verdict"], "separable");
    assert_valid("sep_check", &v);
    let v = json_out(&["--json", "sep", "check", "--identity", "3,3"]);
    assert_eq!(v["verdict"], "separable");
    assert_eq!(v["method"], "search");
}

#[test]
fn sep_check_entangled_state_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bell.json");
    std::fs::write(
        &path,
        r#"{"dims":[2,2],"re":[[0.5,0,0,0.5],[0,0,0,0],[0,0,0,0],[0.5,0,0,0.5]],"im":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#,
    )
    .unwrap();
    let v = json_out(&["--json", "sep", "check", "--input", path.to_str().unwrap()]);
    assert_eq!(v["verdict"], "entangled");
    let v = json_out(&["--json", "sep", "check", "--input", path.to_str().unwrap(), "--mode", "search"]);
    assert_eq!(v["verdict"], "unknown");
}

#[test]
fn sep_decompose_writes_valid_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    for case in ["choi", "circle", "rank2", "rank4"] {
        let out = dir.path().join(format!("{case}.json"));
        let v = json_out(&["--json", "sep", "decompose", "--case", case, "--out", out.to_str().unwrap()]);
        assert_valid("sep_decompose", &v);
        assert!(v["residual"].as_f64().unwrap() < 1e-8);
        let dec: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_valid("decomposition", &dec);
    }
}

#[test]
fn holevo_build_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t2.json");
    let v = json_out(&[
        "--json", "--seed", "7", "holevo", "build", "--map", "transpose", "--d", "2", "--n", "512", "--out",
        out.to_str().unwrap(),
    ]);
    assert_valid("holevo_build", &v);
    assert!(v["povm_residual"].as_f64().unwrap() < 1e-8);
    let channel: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_valid("holevo_channel", &channel);
    let c = json_out(&["--json", "holevo", "check", "--channel", out.to_str().unwrap()]);
    assert_valid("holevo_check", &c);
    assert_eq!(c["complete"], true);
    assert_eq!(c["elements"], v["elements"]);
}

#[test]
fn spa_mix_emits_matrix() {
    let v = json_out(&["spa", "mix", "--map", "transpose", "--dims", "2,2", "--p", "1"]);
    assert_valid("matrix", &v);
    assert!((v["re"][0][0].as_f64().unwrap() - 0.25).abs() < 1e-15);
}

#[test]
fn bad_input_exits_2() {
    let cases: [&[&str]; 8] = [
        &["spa", "critical", "--map", "nope"],
        &["spa", "critical", "--map", "transpose", "--dims", "2,3"],
        &["spa", "critical", "--map", "breuer-hall", "--dims", "5,5"],
        &["spa", "critical", "--witness", "/nonexistent/file.json"],
        &["family", "classify", "--d", "3", "--f", "0", "--pj", "0"],
        &["holevo", "build", "--map", "choi"],
        &["holevo", "build", "--map", "id-tensor-t", "--dims", "2,3"],
        &["sep", "check", "--identity", "2,2", "--mode", "oracle", "--max-iter", "x"],
    ];
    for args in cases {
        let o = spa_lab(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dims\":[2,2],\"re\":[[1]]}").unwrap();
    let o = spa_lab(&["sep", "check", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = spa_lab(&["sep", "check", "--identity", "3,3", "--mode", "oracle"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn thread_cap_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_spa-lab"))
        .env("SPA_LAB_THREADS", "zero")
        .args(["family", "classify", "--d", "4", "--f", "0", "--pj", "0"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_spa-lab"))
        .env("SPA_LAB_THREADS", "2")
        .args(["family", "classify", "--d", "4", "--f", "0", "--pj", "0"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn reproduce_is_deterministic_and_schema_valid() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let ra = spa_lab(&["reproduce", "--out-dir", a.to_str().unwrap()]);
    let rb = spa_lab(&["reproduce", "--out-dir", b.to_str().unwrap()]);
    // Three rows compare printed values that the computation does not reproduce.
    assert_eq!(ra.status.code(), Some(3));
    assert_eq!(ra.stdout, rb.stdout);
    for file in ["report.json", "report.txt"] {
        assert_eq!(std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap());
    }
    let report: Value = serde_json::from_str(&std::fs::read_to_string(a.join("report.json")).unwrap()).unwrap();
    assert_valid("repro_report", &report);
    assert_eq!(report["seed"], 42);
    let rows = report["rows"].as_array().unwrap();
    let ids: Vec<&str> = rows.iter().map(|r| r["id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    let failed: Vec<&str> = rows.iter().filter(|r| r["pass"] == false).map(|r| r["id"].as_str().unwrap()).collect();
    assert_eq!(
        failed,
        ["rank2 p_c", "rank4 condition (a+1)^2-4/9", "symplectic area decreasing d=4..10"]
    );
    let choi = rows.iter().find(|r| r["id"] == "choi p*").unwrap();
    assert!((choi["computed"].as_f64().unwrap() - 0.6).abs() < 1e-9);
}

#[test]
fn reproduce_accepts_custom_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.toml");
    std::fs::write(&path, "format_version = 1\n[[case]]\nid = \"choi p*\"\nexpected = 0.6\ntol = 1e-9\n").unwrap();
    // Rows missing from the manifest are an input error.
    let o = spa_lab(&["reproduce", "--manifest", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
