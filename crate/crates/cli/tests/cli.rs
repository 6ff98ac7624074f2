use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn kml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kml"))
        .args(args)
        .env_remove("KML_THREADS")
        .output()
        .expect("spawn kml")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad json ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn schema_path(command: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{command}.schema.json"))
}

fn assert_schema(v: &Value) {
    let command = v["command"].as_str().expect("command field");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path(command)).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator
        .iter_errors(v)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{command} report violates schema: {errors:#?}");
}

#[test]
fn betti_on_annulus() {
    let out = kml(&["--no-timestamp", "betti", "--gen", "annulus:16,2", "--gt", "none"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_schema(&v);
    assert_eq!(v["report"]["dims"], serde_json::json!([1, 1, 0]));
    assert_eq!(v["report"]["exact"], v["report"]["dims"]);
}

#[test]
fn betti_with_full_tangential_boundary() {
    let out = kml(&["--no-timestamp", "betti", "--gen", "annulus:16,2", "--gt", "all"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["dims"], serde_json::json!([0, 1, 1]));
}

#[test]
fn poincare_constant_on_unit_square() {
    let out = kml(&[
        "--no-timestamp",
        "constants",
        "--gen",
        "box:2,16",
        "--gt",
        "all",
        "--q",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_schema(&v);
    let c = v["report"]["poincare"][0].as_f64().unwrap();
    let exact = 1.0 / (std::f64::consts::SQRT_2 * std::f64::consts::PI);
    assert!((c - exact).abs() / exact < 0.02, "c_p = {c}");
    assert!(v["report"]["poincare"][1].is_null());
}

#[test]
fn full_constants_report_validates() {
    let out = kml(&["--no-timestamp", "constants", "--gen", "box:2,6", "--gt", "side:y-"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_schema(&v);
    let r = &v["report"];
    for key in ["maxwell", "korn_tangential", "c1", "c2", "sharp"] {
        assert!(r[key].as_f64().is_some_and(|x| x > 0.0), "{key} missing: {r}");
    }
    assert!(r["sharp"].as_f64().unwrap() <= 2f64.sqrt() * r["c1"].as_f64().unwrap() * (1.0 + 1e-9));
}

#[test]
fn verify_case_i_passes() {
    let out = kml(&[
        "--no-timestamp",
        "verify",
        "--gen",
        "box:2,8",
        "--gt",
        "side:y-",
        "--case",
        "i",
        "--samples",
        "50",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_schema(&v);
    assert_eq!(v["report"]["passed"], Value::Bool(true));
    assert_eq!(v["report"]["ratios"].as_array().unwrap().len(), 50);
}

#[test]
fn verify_case_ii_on_annulus() {
    let out = kml(&[
        "--no-timestamp",
        "verify",
        "--gen",
        "annulus:16,2",
        "--gt",
        "none",
        "--slices",
        "auto",
        "--case",
        "ii",
        "--samples",
        "20",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_schema(&v);
    assert_eq!(v["report"]["bound_name"], "c2");
}

#[test]
fn verify_with_identity_material() {
    let dir = tempfile::tempdir().unwrap();
    let mu = dir.path().join("mu.json");
    // box:2,4 has 25 vertices.
    let id: Vec<Vec<Vec<f64>>> = (0..25).map(|_| vec![vec![1.0, 0.0], vec![0.0, 1.0]]).collect();
    std::fs::write(&mu, serde_json::to_string(&id).unwrap()).unwrap();
    let out = kml(&[
        "--no-timestamp",
        "verify",
        "--gen",
        "box:2,4",
        "--gt",
        "side:x-",
        "--case",
        "i",
        "--samples",
        "10",
        "--seed",
        "3",
        "--mu",
        mu.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_schema(&v);
    assert_eq!(v["report"]["media"]["mu_hat"].as_f64(), Some(1.0));
}

#[test]
fn output_is_byte_identical_across_thread_counts() {
    let args = |t: &'static str| {
        [
            "--no-timestamp",
            "--threads",
            t,
            "verify",
            "--gen",
            "box:2,6",
            "--gt",
            "side:y-",
            "--case",
            "i",
            "--samples",
            "40",
            "--seed",
            "11",
        ]
    };
    let one = kml(&args("1"));
    let four = kml(&args("4"));
    assert_eq!(one.status.code(), Some(0));
    let strip = |o: &Output| {
        let mut v = json(o);
        v["config"].as_object_mut().unwrap().remove("threads");
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(strip(&one), strip(&four));
    assert_eq!(kml(&args("1")).stdout, one.stdout);
}

#[test]
fn timestamp_present_by_default() {
    let out = kml(&["betti", "--gen", "box:2,2"]);
    let v = json(&out);
    assert_schema(&v);
    assert!(v["timestamp"].as_u64().is_some());
    let out = kml(&["--no-timestamp", "betti", "--gen", "box:2,2"]);
    assert!(json(&out).get("timestamp").is_none());
}

#[test]
fn empty_sweep_is_usage_error() {
    let out = kml(&["sweep"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["frobnicate"],
        vec!["betti", "--gen", "box:7,2"],
        vec!["betti", "--gen", "sphere:3"],
        vec!["betti"],
        vec![
            "verify", "--gen", "box:2,4", "--gt", "none", "--case", "i", "--seed", "1",
        ],
        vec![
            "verify", "--gen", "box:2,4", "--gt", "all", "--case", "x", "--seed", "1",
        ],
        vec!["--threads", "0", "betti", "--gen", "box:2,2"],
        vec!["betti", "--mesh", "/nonexistent/mesh.json"],
    ] {
        let out = kml(&args);
        assert_eq!(
            out.status.code(),
            Some(1),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty(), "{args:?} printed no diagnostic");
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(kml(&["--help"]).status.code(), Some(0));
    assert_eq!(kml(&["verify", "--help"]).status.code(), Some(0));
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = kml(&[
        "--no-timestamp",
        "sweep",
        "--gen",
        "annulus:8,1",
        "--gen",
        "annulus:16,2",
        "--gt",
        "none",
        "--q",
        "0,1",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_schema(&v);
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header[0], "mesh");
    assert!(header.contains(&"harmonic_dims".to_string()));
    let col = header.iter().position(|h| h == "harmonic_dims").unwrap();
    let h = header.iter().position(|h| h == "h").unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| &r[col] == "1;1;0"));
    assert!(rows[1][h].parse::<f64>().unwrap() <= rows[0][h].parse::<f64>().unwrap());
}

#[test]
fn sweep_rejects_coarsening() {
    let out = kml(&[
        "sweep", "--gen", "box:2,8", "--gen", "box:2,4", "--gt", "all", "--q", "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_csv_to_stdout_without_path() {
    let out = kml(&["--no-timestamp", "sweep", "--gen", "box:2,4", "--gt", "all", "--q", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("mesh,h,cells"), "{text}");
}

#[test]
fn decompose_random_writes_parts() {
    let dir = tempfile::tempdir().unwrap();
    let out = kml(&[
        "--no-timestamp",
        "decompose",
        "--gen",
        "annulus:16,2",
        "--gt",
        "none",
        "--random",
        "1",
        "--seed",
        "5",
        "--parts-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_schema(&v);
    let r = &v["report"];
    assert_eq!(r["harmonic_dim"], 1);
    let n = r["norms"].as_object().unwrap();
    let total: f64 = n.values().map(|x| x.as_f64().unwrap().powi(2)).sum();
    let norm = r["norm"].as_f64().unwrap();
    assert!((total - norm * norm).abs() <= 1e-10 * norm * norm);
    let files = r["files"].as_array().unwrap();
    assert_eq!(files.len(), 3);
    for f in files {
        let p = Path::new(f.as_str().unwrap());
        let body: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        assert_eq!(body["degree"], 1);
    }
}

#[test]
fn decompose_cochain_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    // box:2,2 has 16 edges.
    let values: Vec<f64> = (0..16).map(|i| (i as f64 * 0.7).sin()).collect();
    std::fs::write(&path, serde_json::json!({"degree": 1, "values": values}).to_string()).unwrap();
    let out = kml(&[
        "--no-timestamp",
        "decompose",
        "--gen",
        "box:2,2",
        "--cochain",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_schema(&json(&out));
    std::fs::write(
        &path,
        serde_json::json!({"degree": 1, "values": [1.0, 2.0]}).to_string(),
    )
    .unwrap();
    let out = kml(&["decompose", "--gen", "box:2,2", "--cochain", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn mesh_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("annulus.json");
    let out = kml(&[
        "--no-timestamp",
        "mesh",
        "--gen",
        "annulus:16,2",
        "--gt",
        "outer",
        "--write",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let first = json(&out);
    assert_schema(&first);
    assert_eq!(first["report"]["admissibility"]["admissible"], Value::Bool(true));
    let out = kml(&["--no-timestamp", "mesh", "--mesh", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let second = json(&out);
    assert_schema(&second);
    assert_eq!(first["report"]["counts"], second["report"]["counts"]);
    assert_eq!(
        first["report"]["admissibility"]["betti"],
        second["report"]["admissibility"]["betti"]
    );
    assert_eq!(
        first["report"]["admissibility"]["gamma_t_facets"],
        second["report"]["admissibility"]["gamma_t_facets"]
    );
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = kml(&[
        "--no-timestamp",
        "betti",
        "--gen",
        "box:2,2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_schema(&v);
}
