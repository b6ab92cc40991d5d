use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use semilab::graph::DirectedGraph;
use semilab::linalg::C64;
use semilab::repn::{pi_w_lambda_mu, MatrixRep};
use serde_json::Value;
use tempfile::TempDir;

fn semilab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semilab"))
        .args(args)
        .env_remove("SEMILAB_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn fixture(dir: &TempDir, family: &str, n: &str) -> PathBuf {
    let o = semilab(&["graph", "new", family, n]);
    assert_eq!(code(&o), 0);
    write(dir, &format!("{family}{n}.json"), &String::from_utf8(o.stdout).unwrap())
}

fn chord(dir: &TempDir) -> PathBuf {
    write(
        dir,
        "chord.json",
        r#"{"vertices":["v1","v2"],"edges":[
            {"id":"e1","src":"v2","dst":"v1"},{"id":"e2","src":"v1","dst":"v2"},{"id":"c","src":"v1","dst":"v2"}]}"#,
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn graph_new_round_trips() {
    let o = semilab(&["graph", "new", "cycle", "3"]);
    let g = DirectedGraph::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert_eq!((g.vertex_count(), g.edge_count()), (3, 3));
    assert!(g.is_transitive());
}

#[test]
fn graph_cycles_and_check() {
    let dir = TempDir::new().unwrap();
    let c2 = fixture(&dir, "cycle", "2");
    let v = json(&semilab(&["graph", "cycles", s(&c2), "--max-len", "2"]));
    assert_eq!(v["count"], 2);
    assert_eq!(v["cycles"][0], serde_json::json!(["e1", "e2"]));

    let v = json(&semilab(&["graph", "check", s(&c2)]));
    assert_eq!(v["vertices"], 2);

    let bad = write(&dir, "bad.json", r#"{"vertices": ["a"], "edges": [{"id": "x", "src": "a"}]}"#);
    let o = semilab(&["graph", "check", s(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(!o.stderr.is_empty());
    assert_eq!(code(&semilab(&["graph", "check", "/nonexistent/g.json"])), 2);
}

#[test]
fn rep_verify_reports() {
    let dir = TempDir::new().unwrap();
    let c2 = fixture(&dir, "cycle", "2");
    let v = json(&semilab(&["rep", "verify", s(&c2), "--cycle", "e1,e2", "--lambda", "0.5", "--mu", "0"]));
    assert_eq!(v["cc"]["passed"], true);
    assert_eq!(v["onto"], true);
    assert!(v["factorization"]["max_discrepancy"].as_f64().unwrap() <= 1e-12);

    let v = json(&semilab(&["rep", "verify", s(&c2), "--cycle", "e1,e2", "--lambda", "0"]));
    assert_eq!(v["onto"], false);

    for (lam, cyc) in [("1.5", "e1,e2"), ("0.3+bi", "e1,e2"), ("0.5", "e1,e1")] {
        let o = semilab(&["rep", "build", s(&c2), "--cycle", cyc, "--lambda", lam]);
        assert_eq!(code(&o), 2, "{lam} {cyc}");
    }
}

#[test]
fn rep_build_round_trips() {
    let dir = TempDir::new().unwrap();
    let c3 = fixture(&dir, "cycle", "3");
    let o = semilab(&["rep", "build", s(&c3), "--cycle", "e2,e3,e1", "--lambda", "0.3+0.2i", "--mu", "0.25"]);
    assert_eq!(code(&o), 0);
    let rep = MatrixRep::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    let g = Arc::new(DirectedGraph::from_json(&fs::read_to_string(&c3).unwrap()).unwrap());
    let w = g.path(&["e2", "e3", "e1"]).unwrap();
    let direct = pi_w_lambda_mu(&g, &w, C64::new(0.3, 0.2), C64::new(0.0, 1.0)).unwrap();
    for e in 0..3 {
        let diff = rep.edge_image(e) - direct.edge_image(e);
        assert!(diff.iter().all(|z| z.norm() < 1e-15));
    }
}

#[test]
fn classify_inner_sample() {
    let dir = TempDir::new().unwrap();
    let c2 = fixture(&dir, "cycle", "2");
    let v = json(&semilab(&["deriv", "classify", s(&c2), "--cycle", "e1,e2"]));
    assert_eq!(v["validation"]["passed"], true);
    assert_eq!(v["classification"]["inner"], true);
    assert_eq!(v["classification"]["factors"], true);

    let v = json(&semilab(&["deriv", "classify", s(&c2), "--cycle", "e1,e2", "--sample", "lambda"]));
    assert_eq!(v["classification"]["inner"], false);
}

#[test]
fn construct_case_i_on_chord() {
    let dir = TempDir::new().unwrap();
    let g = chord(&dir);
    let v = json(&semilab(&["deriv", "construct-i", s(&g), "--cycle", "e1,e2"]));
    assert_eq!(v["edge"], "c");
    assert_eq!(v["certificate"]["cases"][0]["case"], "i");
    assert_eq!(v["classification"]["inner"], false);
    assert_eq!(v["classification"]["factors"], false);
    assert_eq!(v["classification"]["witnesses"][0], "L_c");

    // no loop on the cycle: exit 2, certificate still printed
    let o = semilab(&["deriv", "construct-ii", s(&g), "--cycle", "e1,e2"]);
    assert_eq!(code(&o), 2);
    let cert: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cert["exists"], true);
}

#[test]
fn construct_case_ii_on_double_loop() {
    let dir = TempDir::new().unwrap();
    let b2 = fixture(&dir, "single", "2");
    let v = json(&semilab(&["deriv", "construct-ii", s(&b2), "--cycle", "f1,f2", "--lambda", "0.4"]));
    assert_eq!(v["validation"]["passed"], true);
    assert_eq!(v["classification"]["factors"], false);
    let c3 = fixture(&dir, "cycle", "3");
    assert_eq!(code(&semilab(&["deriv", "construct-i", s(&c3), "--cycle", "e1,e2,e3"])), 2);
}

#[test]
fn profile_grows_on_the_circle() {
    let dir = TempDir::new().unwrap();
    let c1 = fixture(&dir, "cycle", "1");
    let args = ["deriv", "profile", s(&c1), "--cycle", "e1", "--lambda", "1.0", "--sample", "lambda", "--truncation", "16"];
    let v = json(&semilab(&args));
    let vals: Vec<f64> = v["profile"].as_array().unwrap().iter().map(|p| p["value"].as_f64().unwrap()).collect();
    assert_eq!(vals.len(), 5);
    assert!(vals.windows(2).all(|w| w[1] > w[0]), "{vals:?}");
    assert!(vals[4] >= 16.0 - 1e-6);

    let mut csv_args = args.to_vec();
    csv_args.extend(["--output", "csv"]);
    let o = semilab(&csv_args);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("n,value,at_n,witness\n1,"));
    assert_eq!(text.lines().count(), 6);
    // csv is only for profiles
    assert_eq!(code(&semilab(&["graph", "new", "cycle", "2", "--output", "csv"])), 2);
}

#[test]
fn characters() {
    let dir = TempDir::new().unwrap();
    let b2 = fixture(&dir, "single", "2");
    let v = json(&semilab(&["char", "list", s(&b2)]));
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["loops"].as_array().unwrap().len(), 2);

    let v = json(&semilab(&["char", "deriv", "--lambda", "0.5,0", "--d", "2,3"]));
    assert_eq!(v["decomposition"]["omega"], serde_json::json!([{"index": 2, "value": {"re": 3.0, "im": 0.0}}]));
    assert_eq!(v["formula"]["passed"], true);
    assert_eq!(v["cauchy"]["passed"], true);

    let v = json(&semilab(&["char", "boundary", "--lambda", "0.6,0.8"]));
    assert!(v["peaking"]["gap"].as_f64().unwrap() > 0.0);
    assert_eq!(code(&semilab(&["char", "boundary", "--lambda", "0.6,0.6"])), 2);
    assert_eq!(code(&semilab(&["char", "deriv", "--lambda", "0.9,0.9", "--d", "1,1"])), 2);
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let c3 = fixture(&dir, "cycle", "3");
    let run = |seed: &str| semilab(&["deriv", "classify", s(&c3), "--cycle", "e1,e2,e3", "--seed", seed]).stdout;
    assert_eq!(run("7"), run("7"));
    let a = semilab(&["deriv", "space", s(&c3), "--cycle", "e1,e2,e3"]).stdout;
    assert_eq!(a, semilab(&["deriv", "space", s(&c3), "--cycle", "e1,e2,e3"]).stdout);

    let from_env = Command::new(env!("CARGO_BIN_EXE_semilab"))
        .args(["char", "deriv", "--lambda", "0.5,0.25i", "--d", "1,2"])
        .env("SEMILAB_SEED", "11")
        .output()
        .unwrap();
    let from_flag = semilab(&["char", "deriv", "--lambda", "0.5,0.25i", "--d", "1,2", "--seed", "11"]);
    assert_eq!(from_env.stdout, from_flag.stdout);
    let other = semilab(&["char", "deriv", "--lambda", "0.5,0.25i", "--d", "1,2", "--seed", "12"]);
    assert_ne!(other.stdout, from_flag.stdout);
}

#[test]
fn markdown_output() {
    let dir = TempDir::new().unwrap();
    let c2 = fixture(&dir, "cycle", "2");
    let o = semilab(&["rep", "verify", s(&c2), "--cycle", "e1,e2", "--output", "md"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("# rep verify\n"));
    assert!(text.contains("| onto | true |"));
}
