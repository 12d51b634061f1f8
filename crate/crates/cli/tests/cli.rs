use serde_json::Value;
use std::path::PathBuf;
use std::process::Command;

const BALL_H1: &str = r#"
dim = 2
cost = "H1"
alpha2 = 1.0
x0 = [0.5, 0.5]
order = 5
[domain]
lo = [0.0, 0.0]
hi = [1.0, 1.0]
nodes = 65
dirichlet = ["x-"]
[shape]
kind = "ball"
[data]
f1 = [[3.0, [0, 0]]]
f2 = [[1.0, [0, 0]]]
u_star = [[1.0, [2, 0]], [0.5, [0, 1]]]
"#;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("topoderiv-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &std::path::Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_topoderiv")).args(args).output().unwrap()
}

fn read_json(p: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn moments_of_unit_disk() {
    let dir = scratch("moments");
    let cfg = write_config(&dir, BALL_H1);
    let out = run(&["moments", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["measure"].as_f64().unwrap(), std::f64::consts::PI);
}

#[test]
fn expand_reproduces_ball_d4_and_is_deterministic() {
    let dir = scratch("expand");
    let cfg = write_config(&dir, BALL_H1);
    let (a, b) = (dir.join("a"), dir.join("b"));
    for o in [&a, &b] {
        let out = run(&["expand", "--config", cfg.to_str().unwrap(), "--out", o.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let ta = std::fs::read(a.join("ledger.json")).unwrap();
    assert_eq!(ta, std::fs::read(b.join("ledger.json")).unwrap());
    let v = read_json(a.join("ledger.json"));
    let d4 = v["entries"].as_array().unwrap().iter().find(|e| e["k"] == 4).unwrap()["coeff"].as_f64().unwrap();
    assert!((d4 - (-2.0)).abs() < 1e-8, "{d4}");
}

#[test]
fn verify_with_equal_sources_is_zero() {
    let dir = scratch("verify");
    let text = BALL_H1
        .replace("f1 = [[3.0", "f1 = [[1.0")
        .replace("nodes = 65", "nodes = 129")
        .replace("order = 5\n", "order = 3\neps = [0.125, 0.1, 0.08, 0.0625, 0.05]\n");
    let cfg = write_config(&dir, &text);
    let o = dir.join("out");
    let out = run(&["verify", "--config", cfg.to_str().unwrap(), "--out", o.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(o.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    let head: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = head.iter().position(|h| *h == "dj_direct").unwrap();
    let rows: Vec<f64> = lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|v| *v == 0.0), "{rows:?}");
}

#[test]
fn invalid_config_lists_every_violation() {
    let dir = scratch("invalid");
    let text = BALL_H1.replace("x0 = [0.5, 0.5]", "x0 = [0.05, 0.5]").replace("dirichlet = [\"x-\"]", "dirichlet = []");
    let cfg = write_config(&dir, &text);
    let out = run(&["expand", "--config", cfg.to_str().unwrap(), "--grid", "65"]);
    assert_eq!(out.status.code(), Some(2));
    let rec: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(rec["kind"], "validation");
    let codes: Vec<&str> = rec["violations"].as_array().unwrap().iter().map(|v| v["code"].as_str().unwrap()).collect();
    assert!(codes.contains(&"gamma_empty") && codes.contains(&"x0_margin"), "{codes:?}");
}

#[test]
fn order_override_is_validated() {
    let dir = scratch("order");
    let cfg = write_config(&dir, BALL_H1);
    let out = run(&["expand", "--config", cfg.to_str().unwrap(), "--order", "40"]);
    assert_eq!(out.status.code(), Some(2));
    let rec: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(rec["violations"].as_array().unwrap().iter().any(|v| v["code"] == "order"));
}
