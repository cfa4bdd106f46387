use std::path::PathBuf;
use std::process::{Command, Output};

fn muscc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_muscc")).args(args).env_remove("MUSCC_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("muscc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const ACCEPT_ALL: &str = r#"{"predicates":["F"],"states":["q0"],"priorities":[0],"initial":"q0","delta":[
  {"state":"q0","letter":[],"clauses":[{"kind":"cover","states":["q0"]},{"kind":"cover","states":[]}]},
  {"state":"q0","letter":["F"],"clauses":[{"kind":"cover","states":["q0"]},{"kind":"cover","states":[]}]}]}"#;

#[test]
fn generated_graph_validates() {
    let gen = muscc(&["graph", "gen", "--family", "gk", "--k", "2"]);
    assert!(gen.status.success());
    let path = scratch("gk2.json", &stdout(&gen));
    let v = muscc(&["graph", "validate", path.to_str().unwrap()]);
    assert!(v.status.success());
    assert!(stdout(&v).contains("13 vertices"), "{}", stdout(&v));
}

#[test]
fn dangling_edge_is_rejected() {
    let path = scratch("bad.json", r#"{"predicates":["F"],"vertices":[0],"edges":[[0,3]],"sat":[],"point":0}"#);
    let v = muscc(&["graph", "validate", path.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&v.stderr).contains("missing vertex"));
}

#[test]
fn formula_commands() {
    assert_eq!(stdout(&muscc(&["formula", "classify", "nu Y. mu Z. (F & [] Y) | (!F & <> Z)"])).trim(), "Pi2");
    let bad = muscc(&["formula", "parse", "mu X ."]);
    assert_eq!(bad.status.code(), Some(1));
    let g = scratch("nloop.json", &stdout(&muscc(&["graph", "gen", "--family", "nloop"])));
    let e = muscc(&["--json", "formula", "eval", "mu X. F | <> X", g.to_str().unwrap()]);
    assert!(e.status.success());
}

#[test]
fn random_generation_is_seeded() {
    let run = |seed: &str| stdout(&muscc(&["--seed", seed, "graph", "gen", "--family", "random-scck", "--k", "2"]));
    assert_eq!(run("5"), run("5"));
    assert_ne!(run("5"), run("6"));
}

#[test]
fn game_solve_verifies_strategies() {
    let arena = r#"{"positions":[{"id":0,"owner":"even","priority":1,"moves":[1]},
        {"id":1,"owner":"odd","priority":0,"moves":[0,1]}],"start":0}"#;
    let path = scratch("arena.json", arena);
    let o = muscc(&["game", "solve", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("even wins"));
}

#[test]
fn falsifier_finds_witness() {
    let path = scratch("accept_all.json", ACCEPT_ALL);
    let o = muscc(&["--json", "gamma", "falsify", path.to_str().unwrap()]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["automaton_verdict"], true);
    assert_eq!(report["semantic_verdict"], false);
}

#[test]
fn box_star_check_on_gk() {
    let g = scratch("gk3.json", &stdout(&muscc(&["graph", "gen", "--family", "gk", "--k", "3"])));
    let o = muscc(&["gamma", "check-bstar", g.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn sweeps_report_and_exit() {
    let ok = muscc(&["--threads", "2", "collapse", "sweep", "--samples", "40"]);
    assert!(ok.status.success());
    assert!(stdout(&ok).contains("40/40 passed"));
    let mutant = muscc(&["--seed", "1", "collapse", "sweep", "--suite", "collapse-mutant", "--samples", "200"]);
    assert!(mutant.status.success(), "{}", stdout(&mutant));
    let unknown = muscc(&["collapse", "sweep", "--suite", "nope"]);
    assert_eq!(unknown.status.code(), Some(1));
}
