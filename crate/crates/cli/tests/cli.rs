use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pl_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pl-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn certify(text: &str) -> (Option<i32>, String, String) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "certify.json", text);
    let out = pl_lab(&["certify", "--config", &cfg]);
    (
        out.status.code(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

const CIRCLE: &str = r#"{"variant": "sphere", "center": [0.0, 0.0], "radius": 1.0}"#;

#[test]
fn certify_pl_on_circle_holds() {
    let (code, stdout, _) = certify(&format!(
        r#"{{
            "function": {{"kind": "power_distance", "mu": 1.0, "p": 2.0, "set": {CIRCLE}}},
            "property": "pl",
            "claimed": 1.0,
            "plan": {{"mode": "grid", "bounds": [[-2, 2], [-2, 2]], "points_per_axis": 21}}
        }}"#
    ));
    assert_eq!(code, Some(0));
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["verdict"], "holds");
    assert_eq!(report["property"]["kind"], "pl");
    assert!((report["estimated_constant"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn certify_clarke_mode_is_violated() {
    let (code, stdout, _) = certify(&format!(
        r#"{{
            "function": {{"kind": "power_distance", "mu": 1.0, "p": 2.0, "set": {CIRCLE}}},
            "property": "pl",
            "claimed": 1.0,
            "subgradients": "clarke",
            "plan": {{"mode": "grid", "bounds": [[-1, 1], [-1, 1]], "points_per_axis": 3}}
        }}"#
    ));
    assert_eq!(code, Some(2));
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["estimated_constant"].as_f64(), Some(0.0));
    assert_eq!(report["witness"], serde_json::json!([0.0, 0.0]));
}

#[test]
fn certify_empty_plan_is_inconclusive() {
    let (code, stdout, _) = certify(
        r#"{
            "function": {"kind": "power_norm", "mu": 1.0, "p": 2.0},
            "property": "p-loja",
            "plan": {"mode": "random_uniform", "bounds": [[-1, 1]], "count": 0, "seed": 1}
        }"#,
    );
    assert_eq!(code, Some(3));
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["verdict"], "inconclusive");
    assert_eq!(report["estimated_constant"], "inf");
}

#[test]
fn certify_sandwich_with_l_below_mu_is_usage_error() {
    let (code, stdout, stderr) = certify(
        r#"{
            "function": {"kind": "quadratic", "a": [[1, 0], [0, 4]], "b": [0, 0]},
            "property": "sandwich",
            "claimed": 2.0,
            "L": 1.0,
            "plan": {"mode": "grid", "bounds": [[-1, 1], [-1, 1]], "points_per_axis": 5}
        }"#,
    );
    assert_eq!(code, Some(1));
    assert!(stdout.is_empty());
    assert!(stderr.contains("L >= mu"), "{stderr}");
}

#[test]
fn certify_malformed_config_exits_1() {
    let (code, _, stderr) = certify(r#"{"function": {"kind": "nope"}}"#);
    assert_eq!(code, Some(1));
    assert!(stderr.starts_with("pl-lab:"));
    let (code, _, _) = certify(&format!(
        r#"{{
            "function": {{"kind": "power_distance", "mu": -1.0, "p": 2.0, "set": {CIRCLE}}},
            "property": "pl",
            "plan": {{"mode": "grid", "bounds": [[-1, 1], [-1, 1]], "points_per_axis": 3}}
        }}"#
    ));
    assert_eq!(code, Some(1));
}

#[test]
fn certify_output_is_deterministic() {
    let cfg = format!(
        r#"{{
            "function": {{"kind": "power_distance", "mu": 2.0, "p": 3.0, "set": {{"variant": "parabola_graph", "scale": 1.0}}}},
            "property": "conditioning",
            "p": 3.0,
            "claimed": 2.0,
            "plan": {{"mode": "random_uniform", "bounds": [[-2, 2], [-2, 2]], "count": 500, "seed": 9}}
        }}"#
    );
    let a = certify(&cfg);
    let b = certify(&cfg);
    assert_eq!(a.0, Some(0));
    assert_eq!(a, b);
}

#[test]
fn prox_writes_trace_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "prox.json",
        &format!(
            r#"{{
                "function": {{"kind": "power_distance", "mu": 1.0, "p": 2.0, "set": {CIRCLE}}},
                "x0": [2.0, 0.0]
            }}"#
        ),
    );
    let csv = dir.path().join("trace.csv");
    let out = pl_lab(&[
        "prox",
        "--config",
        &cfg,
        "--trace-out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["certificate"]["verdict"], "holds");
    assert_eq!(doc["trace"]["converged"], true);
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,x1,x2,gap,step"));
    assert_eq!(lines.next(), Some("0,2,0,0.5,0.5"));
    assert!(text.trim_end().ends_with(','));
}

#[test]
fn prox_without_convergence_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "prox.json",
        &format!(
            r#"{{
                "function": {{"kind": "power_distance", "mu": 1.0, "p": 2.0, "set": {CIRCLE}}},
                "x0": [3.0, 0.0],
                "max_iter": 2
            }}"#
        ),
    );
    let out = pl_lab(&["prox", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn figure_rejects_bad_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let set = write(dir.path(), "set.json", CIRCLE);
    let out_path = dir.path().join("f.csv");
    let out = out_path.to_str().unwrap();
    let base = [
        "figure", "--set", &set, "--mu", "1", "--p", "2", "--bounds", "-1,1",
    ];
    let run = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        pl_lab(&args).status.code()
    };
    assert_eq!(run(&["--res", "1", "--out", out]), Some(1));
    assert_eq!(
        run(&["--res", "3", "--out", "/nonexistent/dir/f.csv"]),
        Some(1)
    );
    assert_eq!(run(&["--res", "3", "--out", out]), Some(0));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().count(), 10);
    assert!(text.contains("0,0,0.5\n"));
}

#[test]
fn missing_subcommand_is_usage_error() {
    assert_eq!(pl_lab(&[]).status.code(), Some(1));
    assert_eq!(pl_lab(&["certify"]).status.code(), Some(1));
}
