use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_needlecomp")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn json(stdout: &str) -> Value {
    serde_json::from_str(stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn bound_command() {
    let (code, out) = run(&["bound", "--K", "0", "--H", "1", "--N", "2"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["results"]["r"], 1.0);
    assert_eq!(v["results"]["case"], "zero_kappa_positive_lambda");

    let (code, out) = run(&["bound", "--K", "0", "--H", "2", "--N", "3"]);
    assert_eq!((code, json(&out)["results"]["r"].as_f64()), (0, Some(1.0)));

    let (code, out) = run(&["bound", "--K", "-1", "--H", "0", "--N", "2"]);
    let v = json(&out);
    assert_eq!((code, &v["results"]["r"], &v["results"]["case"]), (0, &Value::from("+inf"), &Value::from("fails")));

    assert_eq!(run(&["bound", "--K", "0", "--H", "1", "--N", "1"]).0, 1);
    assert_eq!(run(&["bound", "--K", "0", "--N", "2"]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 1);
}

#[test]
fn extremal_and_needle_check_commands() {
    let dir = tempfile::tempdir().unwrap();
    let ext = dir.path().join("ext.csv");
    let (code, out) = run(&["extremal", "--K", "2", "--H", "0", "--N", "3", "--out", p(&ext)]);
    assert_eq!(code, 0);
    assert!((json(&out)["results"]["r"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);

    let (code, out) = run(&["needle-check", "--density", p(&ext), "--K", "2", "--N", "3"]);
    assert_eq!(code, 0, "{out}");
    let (code, _) = run(&["needle-check", "--density", p(&ext), "--K", "2", "--N", "3", "--mode", "mcp"]);
    assert_eq!(code, 0);

    let text = std::fs::read_to_string(&ext).unwrap();
    let stretched: String = text
        .lines()
        .enumerate()
        .map(|(i, l)| {
            if i == 0 {
                return format!("{l}\n");
            }
            let (r, h) = l.split_once(',').unwrap();
            format!("{:e},{h}\n", 1.2 * r.parse::<f64>().unwrap())
        })
        .collect();
    let bad = dir.path().join("stretched.csv");
    std::fs::write(&bad, stretched).unwrap();
    assert_eq!(run(&["needle-check", "--density", p(&bad), "--K", "2", "--N", "3"]).0, 2);

    let corrupt = dir.path().join("corrupt.csv");
    std::fs::write(&corrupt, "r,h\n-1,1\n-0.5,-2\n0,1\n0.5,1\n").unwrap();
    assert_eq!(run(&["needle-check", "--density", p(&corrupt), "--K", "0", "--N", "3"]).0, 1);
    assert_eq!(run(&["needle-check", "--density", "/nonexistent.csv", "--K", "0", "--N", "3"]).0, 1);

    assert_eq!(run(&["extremal", "--K", "-1", "--H", "0", "--N", "2", "--out", p(&ext)]).0, 1);
}

#[test]
fn model_and_verify_commands() {
    let dir = tempfile::tempdir().unwrap();
    let cone = dir.path().join("cone.json");
    let (code, out) = run(&[
        "model", "--kind", "euclidean", "--N", "2", "--R", "1", "--radial-steps", "32", "--base-points", "16", "--out",
        p(&cone),
    ]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(json(&out)["results"]["volume_cone"]["passed"], true);

    let args = ["verify", "--space", p(&cone), "--omega-ulevel", "1", "--K", "0", "--N", "2"];
    let (code, first) = run(&args);
    assert_eq!(code, 0, "{first}");
    let v = json(&first);
    assert!(v["results"]["margin"].as_f64().unwrap().abs() < 0.05);
    let (_, second) = run(&args);
    assert_eq!(first, second);

    let mut inflated = args.to_vec();
    inflated.extend(["--H-override", "3"]);
    assert_eq!(run(&inflated).0, 2);

    assert_eq!(run(&["verify", "--space", p(&cone), "--K", "0", "--N", "2"]).0, 1);
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{\"n\": 2}").unwrap();
    assert_eq!(run(&["verify", "--space", p(&junk), "--omega-ulevel", "0", "--K", "0", "--N", "2"]).0, 1);

    let (code, _) = run(&[
        "model", "--kind", "spherical", "--N", "2", "--R", "1", "--radial-steps", "100000", "--out", p(&cone),
    ]);
    assert_eq!(code, 1);
}

#[test]
fn verify_reads_csv_pairs_and_membership_files() {
    let dir = tempfile::tempdir().unwrap();
    let n = 101;
    let xs: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 / (n - 1) as f64).collect();
    let matrix: String = xs
        .iter()
        .map(|a| xs.iter().map(|b| format!("{:e}", (a - b).abs())).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    let weights: String = xs.iter().map(|_| "0.02\n").collect();
    let omega: String = xs.iter().map(|&x| if x <= 1.0 + 1e-9 { "1\n" } else { "0\n" }).collect();
    let (m, w, o) = (dir.path().join("d.csv"), dir.path().join("w.csv"), dir.path().join("omega.txt"));
    std::fs::write(&m, matrix).unwrap();
    std::fs::write(&w, weights).unwrap();
    std::fs::write(&o, omega).unwrap();
    let rays = dir.path().join("rays.json");
    let (code, out) = run(&[
        "verify", "--matrix", p(&m), "--weights", p(&w), "--omega", p(&o), "--K", "0", "--N", "2", "--rays-out",
        p(&rays),
    ]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    assert_eq!(v["results"]["r_comparison"], "+inf");
    assert!((v["results"]["inradius"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let decomposition: Value = serde_json::from_str(&std::fs::read_to_string(rays).unwrap()).unwrap();
    assert_eq!(decomposition["rays"].as_array().unwrap().len(), 1);

    let (code, out) = run(&[
        "verify", "--matrix", p(&m), "--weights", p(&w), "--omega-ball", "0", "1.0", "--K", "0", "--N", "2", "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("key,value\ncommand,verify\npassed,true\n"));
}

#[test]
fn stability_command() {
    let mut deltas = Vec::new();
    for eps in ["0.1", "0.01", "0.001"] {
        let (code, out) = run(&["stability", "--K", "0", "--H", "2", "--N", "3", "--epsilon", eps, "--format", "json"]);
        assert_eq!(code, 0);
        deltas.push(json(&out)["results"]["delta"].as_f64().unwrap());
    }
    assert!(deltas[0] > deltas[1] && deltas[1] > deltas[2]);
    assert_eq!(run(&["stability", "--K", "-1", "--H", "0", "--N", "2", "--epsilon", "0.1"]).0, 1);
}

#[test]
fn text_reports_and_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.txt");
    let (code, out) = run(&["bound", "--K", "1", "--H", "0", "--N", "2", "--format", "text", "--report", p(&report)]);
    assert_eq!((code, out.as_str()), (0, ""));
    let text = std::fs::read_to_string(report).unwrap();
    assert!(text.starts_with("command: bound\npassed: true\n"));
    assert!(text.contains("config.defaults.quantile: 0.05"));
}
