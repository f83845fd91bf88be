use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use densedelta::graph::verify_coloring;
use densedelta::{Coloring, Graph, RoundTrace};
use tempfile::TempDir;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_densedelta")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

#[test]
fn gen_run_verify_stats() {
    let dir = TempDir::new().unwrap();
    let (graph, col, trace, art) = (p(&dir, "g.txt"), p(&dir, "c.json"), p(&dir, "t.json"), p(&dir, "a.json"));
    let out = cli(&["gen", "--kind", "mixed", "--k", "128", "--delta", "63", "--seed", "2", "--out", &graph, "--easy-drop", "1", "--easy-double", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(format!("{graph}.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["meta"]["cliques"].as_array().unwrap().len(), 128);
    assert!(!meta["meta"]["planted_easy"].as_array().unwrap().is_empty());

    let out = cli(&["run", "--in", &graph, "--out-coloring", &col, "--out-trace", &trace, "--out-artifacts", &art]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let g = Graph::read_text(&fs::read_to_string(&graph).unwrap()).unwrap();
    let c = Coloring::from_json(&fs::read_to_string(&col).unwrap()).unwrap();
    assert!(verify_coloring(&g, &c, true).passed());
    let t = RoundTrace::from_json(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(t.phase("easy/bfs").is_some());
    assert!(Path::new(&art).exists());

    assert_eq!(code(&cli(&["verify", "--in", &graph, "--coloring", &col])), 0);
    let out = cli(&["stats", "--trace", &trace]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("easy/ruling-set"));
    assert!(text.lines().any(|l| l.starts_with("total") && l.trim_end().ends_with(&t.total.to_string())));
}

#[test]
fn runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let graph = p(&dir, "g.txt");
    assert_eq!(code(&cli(&["gen", "--kind", "hard", "--k", "128", "--delta", "63", "--seed", "5", "--out", &graph])), 0);
    let mut outputs = Vec::new();
    for i in 0..2 {
        let (col, trace) = (p(&dir, &format!("c{i}.json")), p(&dir, &format!("t{i}.json")));
        assert_eq!(code(&cli(&["run", "--in", &graph, "--out-coloring", &col, "--out-trace", &trace])), 0);
        outputs.push((fs::read(&col).unwrap(), fs::read(&trace).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn verify_flags_a_bad_coloring() {
    let dir = TempDir::new().unwrap();
    let (graph, col) = (p(&dir, "g.txt"), p(&dir, "c.json"));
    fs::write(&graph, "4 4 2\n0 1\n0 3\n1 2\n2 3\n").unwrap();
    fs::write(&col, r#"{"delta": 2, "colors": [0, 1, 0, 1]}"#).unwrap();
    assert_eq!(code(&cli(&["verify", "--in", &graph, "--coloring", &col])), 0);
    fs::write(&col, r#"{"delta": 2, "colors": [0, 0, 1, -1]}"#).unwrap();
    let out = cli(&["verify", "--in", &graph, "--coloring", &col]);
    assert_eq!(code(&out), 1);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["monochromatic"], serde_json::json!([[0, 1]]));
    assert_eq!(report["uncolored"], serde_json::json!([3]));
}

#[test]
fn out_of_scope_input_writes_witness_not_coloring() {
    let dir = TempDir::new().unwrap();
    let (graph, col, trace) = (p(&dir, "k5.txt"), p(&dir, "c.json"), p(&dir, "t.json"));
    let mut text = String::from("5 10 4\n");
    for u in 0..5 {
        for v in u + 1..5 {
            text.push_str(&format!("{u} {v}\n"));
        }
    }
    fs::write(&graph, text).unwrap();
    let out = cli(&["run", "--in", &graph, "--out-coloring", &col, "--out-trace", &trace]);
    assert_eq!(code(&out), 2);
    assert!(!Path::new(&col).exists() && !Path::new(&trace).exists());
    let w: serde_json::Value = serde_json::from_str(&fs::read_to_string(format!("{col}.witness.json")).unwrap()).unwrap();
    assert_eq!(w["error"], "k_delta_plus_one");
    assert_eq!(w["clique"], serde_json::json!([0, 1, 2, 3, 4]));

    // a 6-cycle is not dense
    fs::write(&graph, "6 6 2\n0 1\n0 5\n1 2\n2 3\n3 4\n4 5\n").unwrap();
    let out = cli(&["run", "--in", &graph, "--out-coloring", &col, "--out-trace", &trace]);
    assert_eq!(code(&out), 2);
    assert!(!Path::new(&col).exists());
}

#[test]
fn malformed_input_and_params() {
    let dir = TempDir::new().unwrap();
    let (graph, col, trace) = (p(&dir, "g.txt"), p(&dir, "c.json"), p(&dir, "t.json"));
    fs::write(&graph, "3 2 1\n0 1\n1 1\n").unwrap();
    let out = cli(&["run", "--in", &graph, "--out-coloring", &col, "--out-trace", &trace]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    assert_eq!(code(&cli(&["gen", "--kind", "hard", "--k", "64", "--delta", "63", "--out", &graph])), 2);
    assert_eq!(code(&cli(&["gen", "--kind", "hard", "--k", "128", "--delta", "63", "--easy-drop", "1", "--out", &graph])), 2);
    assert_eq!(code(&cli(&["stats", "--trace", &p(&dir, "missing.json")])), 2);
    fs::write(&trace, r#"{"phases": [{"name": "x", "rounds": 3, "mode": "simulated-distributed"}], "total": 4}"#).unwrap();
    assert_eq!(code(&cli(&["stats", "--trace", &trace])), 2);
}
