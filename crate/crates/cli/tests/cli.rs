use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matchfab"))
        .args(args)
        .env_remove("MATCHFAB_MAX_G")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn generate_nonfractal_edge_list() {
    let o = run(&["generate", "--family", "nonfractal", "--g", "2", "--format", "edgelist"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines[0], "12 16");
    assert_eq!(lines.len(), 17);
}

#[test]
fn generate_sierpinski_first_generation_is_k4() {
    let o = run(&["generate", "--family", "sierpinski", "--g", "1", "--format", "edgelist"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut edges: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    edges.sort();
    assert_eq!(edges, ["0 1", "0 2", "0 3", "1 2", "1 3", "2 3"]);
}

#[test]
fn generation_cap_exits_three() {
    let o = run(&["generate", "--family", "fractal", "--g", "99"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
}

#[test]
fn environment_overrides_generation_cap() {
    let o = Command::new(env!("CARGO_BIN_EXE_matchfab"))
        .args(["generate", "--family", "fractal", "--g", "3"])
        .env("MATCHFAB_MAX_G", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_matchfab"))
        .args(["generate", "--family", "fractal", "--g", "3"])
        .env("MATCHFAB_MAX_G", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_arguments_exit_two() {
    for args in [
        vec!["generate", "--family", "tree", "--g", "2"],
        vec!["generate", "--family", "fractal", "--g", "0"],
        vec!["generate", "--family", "fractal", "--g", "2", "--format", "table"],
        vec!["generate", "--family", "fractal", "--g", "2", "--oriented", "--out", "x"],
        vec!["verify", "--family", "fractal", "--g", "2", "--enum-cap", "0"],
        vec!["report", "--family", "fractal", "--g", "3", "--g-max", "2"],
        vec!["frobnicate"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn oriented_generation_writes_sidecar() {
    let dir = std::env::temp_dir().join(format!("matchfab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("h2.edges");
    let o = run(&[
        "generate", "--family", "nonfractal", "--g", "2", "--oriented", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let sidecar = std::fs::read_to_string(dir.join("h2.edges.orient")).unwrap();
    assert_eq!(sidecar.lines().filter(|l| !l.starts_with('#')).count(), 16);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn json_generation_reports_hubs() {
    let o = run(&["generate", "--family", "fractal", "--g", "2", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 12);
    assert_eq!(v["m"], 16);
    assert_eq!(v["hubs"].as_object().unwrap().len(), 4);
}

fn verify_json(family: &str, g: &str) -> (Option<i32>, Value) {
    let o = run(&["verify", "--family", family, "--g", g]);
    (o.status.code(), serde_json::from_str(&stdout(&o)).unwrap())
}

#[test]
fn verify_fractal_second_generation() {
    let (code, v) = verify_json("fractal", "2");
    assert_eq!(code, Some(0));
    assert_eq!(v["counts"]["theta"], "136");
    assert!(v["verdicts"].as_object().unwrap().values().all(|x| x == "pass"));
}

#[test]
fn verify_nonfractal_third_generation() {
    let (code, v) = verify_json("nonfractal", "3");
    assert_eq!(code, Some(0));
    let text = v.to_string();
    assert!(text.contains("512"));
}

#[test]
fn verify_sierpinski_second_generation() {
    let (code, v) = verify_json("sierpinski", "2");
    assert_eq!(code, Some(0));
    assert!(v.to_string().contains("\"8\""));
}

#[test]
fn verify_reports_skipped_checks_with_exit_three() {
    let o = run(&["verify", "--family", "nonfractal", "--g", "3", "--enum-cap", "10"]);
    assert_eq!(o.status.code(), Some(3));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let verdicts = v["verdicts"].as_object().unwrap();
    assert!(verdicts.values().any(|x| x == "skipped"));
    assert!(verdicts.values().all(|x| x != "fail"));
}

#[test]
fn report_columns() {
    let o = run(&["report", "--family", "fractal", "--g", "1", "--g-max", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<Value> = serde_json::from_str(&stdout(&o)).unwrap();
    let nu: Vec<&str> = rows.iter().map(|r| r["matching_number"].as_str().unwrap()).collect();
    assert_eq!(nu, ["2", "4", "12", "44"]);

    let o = run(&["report", "--family", "sierpinski", "--g", "2", "--g-max", "5", "--format", "json"]);
    let rows: Vec<Value> = serde_json::from_str(&stdout(&o)).unwrap();
    let psi: Vec<String> = rows.iter().map(|r| r["count"].as_str().unwrap().to_string()).collect();
    assert_eq!(psi, ["8", "128", &(1u64 << 19).to_string(), &(1u64 << 55).to_string()]);

    let o = run(&["report", "--family", "nonfractal", "--g", "1", "--g-max", "8", "--format", "json"]);
    let rows: Vec<Value> = serde_json::from_str(&stdout(&o)).unwrap();
    let z: Vec<f64> = rows.iter().map(|r| r["entropy"].as_f64().unwrap()).collect();
    let limit = std::f64::consts::LN_2 / 3.0;
    assert!(z.windows(2).skip(1).all(|w| w[1] < w[0]));
    assert!((z[7] - limit).abs() < 2e-4);
}

#[test]
fn table_output_has_header_and_rows() {
    let o = run(&["report", "--family", "nonfractal", "--g-max", "3"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("g\tN\tE"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["generate", "--family", "nonfractal", "--g", "3", "--format", "dot"],
        vec!["verify", "--family", "fractal", "--g", "3"],
        vec!["report", "--family", "fractal", "--g-max", "4"],
    ] {
        assert_eq!(run(&args).stdout, run(&args).stdout, "{args:?}");
    }
}
