use std::process::Command;

use serde_json::Value;

fn kcone(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_kcone"))
        .args(args)
        .output()
        .expect("kcone runs");
    let code = out.status.code().expect("exit code");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (code, value, String::from_utf8(out.stderr).unwrap())
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn all_pass(v: &Value) -> bool {
    v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"] == true)
}

#[test]
fn metric_on_p1xp1() {
    let (code, v, _) = kcone(&["metric", "P1XP1", "--at", "1,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "metric");
    assert_eq!(v["form"], "P1XP1");
    assert!((f(&v["outputs"]["vol"]) - 1.0).abs() < 1e-14);
    let gram = &v["outputs"]["gram"];
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((f(&gram[i][j]) - want).abs() < 1e-14);
        }
    }
    assert!(all_pass(&v));
}

#[test]
fn report_has_schema_fields() {
    let (_, v, _) = kcone(&["metric", "QUINTIC"]);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(keys, ["command", "form", "inputs", "outputs", "checks"]);
    let check = &v["checks"][0];
    let keys: Vec<&str> = check
        .as_object()
        .unwrap()
        .keys()
        .map(|k| k.as_str())
        .collect();
    assert_eq!(keys, ["name", "max_dev", "tol", "pass"]);
}

#[test]
fn lor3_sectional() {
    let (code, v, _) = kcone(&[
        "curvature",
        "LOR3",
        "--at",
        "1,0,0",
        "--sectional",
        "0,1,0",
        "0,0,1",
        "--ricci",
        "--scalar",
    ]);
    assert_eq!(code, 0);
    assert!((f(&v["outputs"]["sectional"]) + 0.5).abs() < 1e-8);
    assert!((f(&v["outputs"]["scalar"]) + 1.0).abs() < 1e-7);
}

#[test]
fn inadmissible_point_exits_two() {
    let (code, v, _) = kcone(&["metric", "P1XP1", "--at", "1,-1"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "NonPositiveVolume");
    let (code, v, _) = kcone(&["metric", "LOR3", "--at", "0,1,0"]);
    assert_eq!(code, 2);
    assert!(v["error"] == "NonPositiveVolume" || v["error"] == "IndefiniteMetric");
}

#[test]
fn usage_errors_exit_one() {
    let (code, _, err) = kcone(&["frobnicate"]);
    assert_eq!(code, 1);
    assert!(!err.is_empty());
    let (code, v, _) = kcone(&["metric", "NOSUCHFORM"]);
    assert_eq!(code, 1);
    assert!(v.get("error").is_some());
    let (code, _, _) = kcone(&["metric", "P1XP1", "--at", "1,x"]);
    assert_eq!(code, 1);
    let (code, _, _) = kcone(&["metric", "P1XP1", "--at", "1,1,1"]);
    assert_eq!(code, 1);
}

#[test]
fn failed_check_exits_three() {
    let (code, v, _) = kcone(&[
        "pullback", "P1XP1", "P1XP1", "--matrix", "1,0;0,1", "--degree", "2",
    ]);
    assert_eq!(code, 3);
    assert!(!all_pass(&v));
    let (code, v, _) = kcone(&[
        "pullback", "P1XP1", "P1XP1", "--matrix", "0,1;1,0", "--degree", "1",
    ]);
    assert_eq!(code, 0);
    assert!(all_pass(&v));
}

#[test]
fn geodesic_csv() {
    let dir = std::env::temp_dir().join(format!("kcone-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("radial.csv");
    let (code, _, _) = kcone(&[
        "geodesic",
        "QUINTIC",
        "--at",
        "1",
        "--v",
        "1",
        "--T",
        "1",
        "--steps",
        "100",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["t", "x1", "speed"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 101);
    let last = &rows[100];
    let t: f64 = last[0].parse().unwrap();
    let x: f64 = last[1].parse().unwrap();
    assert!((t - 1.0).abs() < 1e-12);
    // the radial geodesic with velocity ω is e^t ω
    assert!((x - 1.0f64.exp()).abs() < 1e-8);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn manifold_file_input() {
    let dir = std::env::temp_dir().join(format!("kcone-file-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("quad.json");
    std::fs::write(
        &path,
        r#"{"name":"QUAD","dim":3,"h11":1,"intersection":[{"index":[1,1,1],"value":2}]}"#,
    )
    .unwrap();
    let (code, v, _) = kcone(&["metric", path.to_str().unwrap(), "--at", "1"]);
    assert_eq!(code, 0, "{v}");
    assert!((f(&v["outputs"]["vol"]) - 2.0 / 6.0).abs() < 1e-14);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn algebra_flags() {
    let (code, v, _) = kcone(&[
        "algebra",
        "LOR3",
        "--derivations",
        "--kn",
        "--constant-curvature",
    ]);
    assert_eq!(code, 0, "{v}");
    assert!(all_pass(&v));
}

#[test]
fn split_and_probe() {
    let (code, v, _) = kcone(&["split", "QUINTIC", "--at", "2"]);
    assert_eq!(code, 0);
    assert!(all_pass(&v));
    let (code, v, _) = kcone(&[
        "probe",
        "BLP2",
        "--alpha",
        "1,0",
        "--omega",
        "2,-1",
        "--halvings",
        "30",
    ]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["outputs"]["classification"], "CONVERGENT");
}

#[test]
fn verify_subset_and_determinism() {
    let (code, a, _) = kcone(&["verify", "LOR3", "P3"]);
    assert_eq!(code, 0);
    assert_eq!(f(&a["outputs"]["failed"]), 0.0);
    let (_, b, _) = kcone(&["verify", "LOR3", "P3"]);
    assert_eq!(a.to_string(), b.to_string());
}
