use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn gamedec(args: &[&str], stdin: Option<&str>) -> Output {
    gamedec_env(args, stdin, &[])
}

fn gamedec_env(args: &[&str], stdin: Option<&str>, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gamedec"));
    cmd.args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("spawn gamedec");
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", stdout(o)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn example(name: &str) -> String {
    let o = gamedec(&["example", name], None);
    assert_eq!(o.status.code(), Some(0));
    stdout(&o)
}

#[test]
fn matching_pennies_is_harmonic_not_potential() {
    let mp = example("matching-pennies");
    assert_eq!(gamedec(&["check", "--harmonic"], Some(&mp)).status.code(), Some(0));
    assert_eq!(gamedec(&["check", "--potential"], Some(&mp)).status.code(), Some(1));
    let both = gamedec(&["check", "--harmonic", "--zero-sum", "--is-normalized"], Some(&mp));
    assert_eq!(both.status.code(), Some(0));
    assert_eq!(json(&both)["passed"], Value::Bool(true));
}

#[test]
fn decompose_matching_pennies() {
    let mp = example("matching-pennies");
    let o = gamedec(&["decompose", "-"], Some(&mp));
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let zeros = |key: &str| {
        v[key]["utilities"]
            .as_array()
            .unwrap()
            .iter()
            .flat_map(|row| row.as_array().unwrap())
            .all(|x| x.as_f64().unwrap().abs() < 1e-12)
    };
    assert!(zeros("non_strategic"), "{v}");
    assert!(zeros("potential_part"), "{v}");
    assert!(!zeros("harmonic_part"));
}

#[test]
fn example_pipes_into_minimal_graph_dot() {
    let game = gamedec(&["example", "paper-8node", "--cost", "0.5"], None);
    let o = gamedec(&["minimal-graph", "--normalized", "--dot"], Some(&stdout(&game)));
    assert_eq!(o.status.code(), Some(0));
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph") || dot.starts_with("graph"), "{dot}");
    assert!(dot.contains("->") || dot.contains("--"));
}

#[test]
fn malformed_input_exits_2_with_location() {
    let o = gamedec(&["normalize"], Some("{\"players\": [\n  oops"));
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");

    let o = gamedec(&["normalize"], Some(r#"{"players":[{"name":"a","actions":["x","y"]}],"utilities":[[1.0]]}"#));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("utilities"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(gamedec(&["check"], Some(&example("coordination"))).status.code(), Some(2));
    assert_eq!(gamedec(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(gamedec(&["random", "--actions", "0,2"], None).status.code(), Some(2));
    assert_eq!(gamedec(&["normalize", "/nonexistent/game.json"], None).status.code(), Some(2));
}

fn max_utility_gap(a: &Value, b: &Value) -> f64 {
    let flat = |v: &Value| -> Vec<f64> {
        v["utilities"]
            .as_array()
            .unwrap()
            .iter()
            .flat_map(|row| row.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()))
            .collect()
    };
    flat(a).iter().zip(flat(b)).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn json_outputs_round_trip() {
    let random = stdout(&gamedec(&["random", "--kind", "graphical", "--actions", "2,3,2", "--seed", "5"], None));
    let normalized = gamedec(&["normalize"], Some(&random));
    let graph = gamedec(&["minimal-graph"], Some(&random));
    let decomposition = gamedec(&["decompose"], Some(&random));
    // every emitted document re-serializes to the same bytes
    for o in [&normalized, &graph, &decomposition] {
        let text = stdout(o);
        let reparsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&reparsed).unwrap() + "\n", text);
    }
    // and games read back are accepted as-is
    let again = gamedec(&["normalize"], Some(&stdout(&normalized)));
    assert!(max_utility_gap(&json(&normalized), &json(&again)) <= 1e-12);
    assert_eq!(gamedec(&["check", "--is-normalized"], Some(&stdout(&normalized))).status.code(), Some(0));

    let closed = stdout(&gamedec(&["extend-graph", "--kind", "symmetric"], Some(&stdout(&graph))));
    let closed_again = stdout(&gamedec(&["extend-graph", "--kind", "symmetric"], Some(&closed)));
    assert_eq!(closed, closed_again);
}

#[test]
fn fixed_seed_is_byte_identical() {
    for kind in ["dense", "graphical", "pairwise", "potential", "harmonic", "nonstrategic"] {
        let args = ["random", "--kind", kind, "--actions", "2,2,3", "--seed", "11"];
        let a = gamedec(&args, None);
        let b = gamedec(&args, None);
        assert_eq!(a.status.code(), Some(0), "{kind}");
        assert_eq!(a.stdout, b.stdout, "{kind}");
    }
    let game = stdout(&gamedec(&["random", "--actions", "3,2,2", "--seed", "2"], None));
    assert_eq!(gamedec(&["decompose"], Some(&game)).stdout, gamedec(&["decompose"], Some(&game)).stdout);
}

#[test]
fn files_splittings_and_verification() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "g.json", r#"{"num_nodes":4,"edges":[[0,1],[0,2],[1,0],[2,3],[3,2]]}"#);
    let split = write(dir.path(), "s.json", r#"{"groups":[[[1],[2]],[[0]],[[3]],[[2]]]}"#);
    let game_path = dir.path().join("game.json");
    let o = gamedec(
        &[
            "random", "--kind", "graphical", "--actions", "2,2,2,2", "--seed", "3", "--graph", &graph, "--out",
            game_path.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let game = game_path.to_str().unwrap();

    let o = gamedec(&["check", game, "--graphical", "--graph", &graph], None);
    assert_eq!(o.status.code(), Some(0));

    let ext = gamedec(&["extend-graph", &graph, "--kind", "splitting", "--splitting", &split], None);
    assert_eq!(ext.status.code(), Some(0));
    let cliques = gamedec(&["extend-graph", &graph, "--kind", "triangle", "--cliques"], None);
    assert!(json(&cliques)["cliques"].is_array());

    // a generic graphical game with two groups for player 0 is not separable
    let o = gamedec(&["separable", game, "--splitting", &split, "--graph", &graph], None);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["separable"], Value::Bool(false));

    let o = gamedec(&["verify", "corollary3", game], None);
    assert_eq!(o.status.code(), Some(0));
    let report = json(&o);
    assert!(report["clauses"].as_array().unwrap().iter().all(|c| c["passed"] == Value::Bool(true)));

    let edges = gamedec(&["random", "--kind", "pairwise", "--edges", "--actions", "2,2,2,2", "--graph", &graph], None);
    let edges_path = write(dir.path(), "e.json", &stdout(&edges));
    assert_eq!(gamedec(&["verify", "corollary4", &edges_path], None).status.code(), Some(0));
}

#[test]
fn profile_limit_can_be_overridden() {
    let args = ["random", "--actions", "2,2,2,2,2"];
    let o = gamedec_env(&args, None, &[("GAMEDEC_MAX_PROFILES", "16")]);
    assert_eq!(o.status.code(), Some(2));
    let o = gamedec_env(&args, None, &[("GAMEDEC_MAX_PROFILES", "32")]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn help_lists_defaults() {
    let o = gamedec(&["random", "--help"], None);
    let help = stdout(&o);
    assert!(help.contains("[default: 0]"), "{help}");
    assert!(stdout(&gamedec(&["example", "--help"], None)).contains("[default: 0.5]"));
}
