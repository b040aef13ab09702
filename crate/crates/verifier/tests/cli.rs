use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn rheojet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rheojet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read_report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_chernov_passes() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("report.json");
    let out = rheojet(&["verify", "--metric", "chernov", "--h", "exp:1", "--samples", "20", "--seed", "42", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_report(&path);
    assert_eq!(r["overall_pass"], true);
    assert_eq!(r["seed"], 42);
    assert_eq!(r["samples"], 20);
    assert_eq!(r["config"]["metric"], "chernov");
    assert!(r["timestamp_unix"].as_u64().is_some());
    for c in r["checks"].as_array().unwrap() {
        assert_eq!(c["samples_used"], 20);
        assert_eq!(c["passed"], true);
    }
}

#[test]
fn forced_tolerance_fails_with_exit_one() {
    let out = rheojet(&["verify", "--samples", "5", "--tol", "metric-definitional=1e-20"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["overall_pass"], false);
    let failed: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["metric-definitional"]);
    assert_eq!(r["config"]["tolerance_overrides"]["metric-definitional"].as_f64(), Some(1e-20));
}

#[test]
fn f2_preset_is_flat() {
    let out = rheojet(&["verify", "--metric", "f2", "--samples", "25"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    for name in ["curvature-zero", "einstein-trivial", "em-zero"] {
        let c = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap();
        assert!(c["max_residual"].as_f64().unwrap() < 1e-12, "{name}");
    }
}

#[test]
fn reports_match_apart_from_timestamp() {
    let dir = TempDir::new().unwrap();
    let runs: Vec<String> = (0..2)
        .map(|i| {
            let path = dir.path().join(format!("r{i}.json"));
            let out = rheojet(&["verify", "--samples", "30", "--seed", "7", "--out", path.to_str().unwrap()]);
            assert_eq!(out.status.code(), Some(0));
            std::fs::read_to_string(&path)
                .unwrap()
                .lines()
                .filter(|l| !l.contains("timestamp_unix"))
                .collect::<Vec<_>>()
                .join("\n")
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn custom_metric_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("cubic.txt");
    std::fs::write(&path, "# scaled Chernov\n1 2 3 0.5\n1 2 4 0.5\n1 3 4 0.5\n2 3 4 0.5\n").unwrap();
    let metric = format!("custom:{}", path.display());
    let out = rheojet(&["verify", "--metric", &metric, "--samples", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["config"]["metric"], metric);

    std::fs::write(&path, "1 2 3 0.5\n1 2 3 0.25\n").unwrap();
    let out = rheojet(&["verify", "--metric", &metric, "--samples", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["verify", "--metric", "finsler"],
        vec!["verify", "--h", "cosh:1"],
        vec!["verify", "--samples", "0"],
        vec!["verify", "--tol", "nonexistent-check=1e-3"],
        vec!["verify", "--k", "0"],
        vec!["verify", "--h", "poly:1,0,-3"],
        vec!["eval", "--tensor", "Weyl", "--point", "y=1,2,3,4"],
        vec!["eval", "--tensor", "g", "--point", "y=1,2"],
        vec!["frobnicate"],
    ] {
        let out = rheojet(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn degenerate_point_exits_three() {
    let out = rheojet(&["eval", "--tensor", "g", "--point", "t=0,x=0,0,0,0,y=1,0,0,0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn eval_metric_at_ones() {
    let out = rheojet(&["eval", "--tensor", "g", "--point", "t=0,x=0,0,0,0,y=1,1,1,1", "--h", "const:1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["tensor"], "g");
    assert_eq!(v["shape"], serde_json::json!([4, 4]));
    for i in 0..4 {
        for j in 0..4 {
            let g = v["values"][i][j].as_f64().unwrap();
            let expected = if i == j { -0.1574901 } else { 0.2624836 };
            assert!((g - expected).abs() < 1e-7);
        }
    }
}

#[test]
fn eval_nonlinear_connection_and_field() {
    let out = rheojet(&["eval", "--tensor", "N", "--point", "t=0.3,x=0,0,0,0,y=1.2,-0.4,0.7,1.9", "--h", "exp:1"]);
    let v = json(&out);
    for i in 0..4 {
        for j in 0..4 {
            let expected = if i == j { -0.5 } else { 0.0 };
            assert!((v["values"][i][j].as_f64().unwrap() - expected).abs() < 1e-12);
        }
    }
    let out = rheojet(&["eval", "--tensor", "em.F", "--point", "t=0.3,x=0,0,0,0,y=1.2,-0.4,0.7,1.9"]);
    let v = json(&out);
    let max = v["values"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|row| row.as_array().unwrap().iter().map(|x| x.as_f64().unwrap().abs()))
        .fold(0.0, f64::max);
    assert!(max < 1e-10);
}

#[test]
fn eval_family_and_negative_coordinates() {
    let out = rheojet(&["eval", "--tensor", "einstein.*", "--point", "t=-0.5,x=-1,0,0,0,y=-1.2,0.4,0.7,1.9", "--k", "-2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["tij"]["values"][0][0].as_f64().is_some());
    assert_eq!(v["t_1i"]["index_signature"], serde_json::json!(["spatial-lower"]));
}
