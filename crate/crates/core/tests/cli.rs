use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn scratch() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

/// Runs the binary, returning the exit code and stdout parsed as JSON
/// (`Null` when stdout is not JSON).
fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_gadgets")).args(args).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    (out.status.code().unwrap(), serde_json::from_str(&text).unwrap_or(Value::Null))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn classify_report() {
    let (code, v) = run(&["classify", p(&fixture("l2t.json"))]);
    assert_eq!(code, 0);
    assert_eq!(v["gadget"], "locking-2-toggle");
    for k in ["reversible", "deterministic", "interacting_tunnels"] {
        assert_eq!(v["predicates"][k]["value"], true, "{k}");
    }
    assert_eq!(v["predicates"]["dag"]["value"], false);
    assert!(v["labels"]["reachability"]["label"].as_str().unwrap().contains("PSPACE"));

    let (code, v) = run(&["classify", "catalog:rdni"]);
    assert_eq!(code, 0);
    assert_eq!(v["predicates"]["interacting_tunnels"]["value"], false);
}

#[test]
fn classify_pretty_is_a_table() {
    let out = Command::new(env!("CARGO_BIN_EXE_gadgets"))
        .args(["classify", p(&fixture("toggle.json")), "--pretty"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("gadget 1-toggle"));
    assert!(serde_json::from_str::<Value>(&text).is_err());
}

#[test]
fn solve_exit_codes() {
    let (code, v) = run(&["solve", p(&fixture("reach_yes.json"))]);
    assert_eq!((code, v["decision"].as_str()), (0, Some("yes")));
    assert_eq!(v["witness"]["moves"].as_array().unwrap().len(), 1);

    let (code, v) = run(&["solve", p(&fixture("reach_no.json"))]);
    assert_eq!((code, v["decision"].as_str()), (1, Some("no")));
    assert!(v["witness"].is_null());

    let (code, v) = run(&["solve", p(&fixture("two_toggles.json")), "--objective", "traverse", "--max-nodes", "1"]);
    assert_eq!((code, v["decision"].as_str()), (2, Some("budgetExceeded")));
}

#[test]
fn solve_objectives_and_algorithms() {
    let sys = fixture("two_toggles.json");
    let (code, v) = run(&["solve", p(&sys), "--objective", "reconfig", "--target", "B,B", "--algorithm", "auto"]);
    assert_eq!(code, 0);
    assert_eq!(v["objective"]["states"], serde_json::json!([1, 1]));
    assert!(v["algorithm"].is_string());

    // The first toggle cannot be back in A with the second in B.
    let (code, _) = run(&["solve", p(&sys), "--objective", "reconfig", "--target", "A,B"]);
    assert_eq!(code, 1);

    let (code, v) = run(&["solve", p(&sys), "--target", "2", "--agents", "2"]);
    assert_eq!((code, v["objective"]["target"].as_u64()), (0, Some(2)));

    assert_eq!(run(&["solve", p(&sys), "--objective", "reconfig"]).0, 65);
    assert_eq!(run(&["solve", p(&sys), "--objective", "reconfig", "--target", "B"]).0, 65);
    assert_eq!(run(&["solve", p(&sys), "--objective", "sideways"]).0, 64);
    assert_eq!(run(&["solve", p(&fixture("missing.json"))]).0, 66);
}

/// Compiles with `-o`, then solves the compiled system with the emitted
/// objective and returns the exit code.
fn reduce_then_solve(args: &[&str]) -> i32 {
    let dir = scratch();
    let sys = dir.path().join("system.json");
    let doc = dir.path().join("reduction.json");
    let mut full = vec!["reduce"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", p(&sys), "--output", p(&doc)]);
    let (code, _) = run(&full);
    assert_eq!(code, 0, "{args:?}");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&doc).unwrap()).unwrap();
    for k in ["system", "objective", "correspondence", "expectedEquivalence", "metadata"] {
        assert!(v.get(k).is_some(), "{args:?} lacks {k}");
    }
    run(&["solve", p(&sys), "--objective-file", p(&doc)]).0
}

#[test]
fn reduce_every_reduction() {
    let f = |n: &str| fixture(n).to_str().unwrap().to_string();
    let cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["3sat".into(), "--input".into(), f("sat.cnf")], 0),
        (vec!["3sat".into(), "--input".into(), f("unsat.cnf")], 1),
        (vec!["stcon".into(), "--input".into(), f("stcon_yes.txt")], 0),
        (vec!["stcon".into(), "--input".into(), f("stcon_no.txt")], 1),
        (vec!["hampath-dir".into(), "--input".into(), f("hampath_dir.txt")], 0),
        (vec!["hampath-undir-close".into(), "--input".into(), f("hampath_dir.txt")], 0),
        (vec!["hampath-spiral".into(), "--input".into(), f("cubic.txt")], 0),
        (vec!["reach2traversal".into(), "--input".into(), f("l2t_system.json")], 0),
        (vec!["reach2reconfig".into(), "--input".into(), f("two_toggles.json")], 0),
        (vec!["reach2reconfig".into(), "--input".into(), f("reach_no.json")], 1),
        (vec!["shadow".into(), "--input".into(), f("two_toggles.json"), "--target".into(), "B,A".into()], 0),
        (vec!["verified".into(), "--input".into(), f("two_toggles.json")], 0),
        (vec!["verified".into(), "--input".into(), f("two_toggles.json"), "--scheme".into(), "opening".into()], 0),
        (vec!["collapse".into(), "--input".into(), f("reach_yes.json")], 0),
        (vec!["extra-agents".into(), "--input".into(), f("reach_no.json"), "--agents".into(), "0,1".into()], 0),
    ];
    for (args, want) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(reduce_then_solve(&args), want, "{args:?}");
    }
}

#[test]
fn reduce_errors() {
    let sys = fixture("two_toggles.json");
    assert_eq!(run(&["reduce", "4sat", "--input", p(&sys)]).0, 64);
    // Wrong gadget class: a 1-toggle has no second tunnel to interact with.
    assert_eq!(run(&["reduce", "reach2traversal", "--input", p(&fixture("reach_yes.json"))]).0, 65);
    assert_eq!(run(&["reduce", "shadow", "--input", p(&sys), "--target", "B,_"]).0, 65);
    assert_eq!(run(&["reduce", "3sat", "--input", p(&fixture("stcon_yes.txt"))]).0, 65);
    assert_eq!(run(&["reduce", "stcon", "--input", p(&fixture("nope.txt"))]).0, 66);
    assert_eq!(run(&["reduce", "stcon", "--input", p(&fixture("stcon_yes.txt")), "--gadget", "catalog:nope"]).0, 64);
}

#[test]
fn catalog_export_round_trips() {
    let dir = scratch();
    for (key, states) in [("locking-2-toggle", 3), ("rdni", 12), ("1-toggle", 2)] {
        let path = dir.path().join(format!("{key}.json"));
        let (code, v) = run(&["catalog", "export", key, "-o", p(&path)]);
        assert_eq!((code, v["states"].as_u64()), (0, Some(states)));
        let g = motion_gadgets::io::read_gadget(&path).unwrap();
        assert_eq!(g.state_count(), states as usize);
        assert_eq!(motion_gadgets::io::gadget_to_json(&g) + "\n", std::fs::read_to_string(&path).unwrap());
    }
    assert_eq!(run(&["catalog", "export", "door", "-o", p(&dir.path().join("x.json"))]).0, 64);

    let (code, v) = run(&["catalog", "list"]);
    assert_eq!(code, 0);
    assert!(v["gadgets"].as_array().unwrap().iter().any(|e| e["key"] == "rdni" && e["states"] == 12));
    assert_eq!(v["networks"].as_array().unwrap().len(), 3);
}

#[test]
fn netsim_interface_and_bisim() {
    let dir = scratch();
    let net = dir.path().join("net.json");
    let (a, b, c) = (dir.path().join("a.json"), dir.path().join("b.json"), dir.path().join("c.json"));
    assert_eq!(run(&["catalog", "network", "multi-agent-1-toggle", "-o", p(&net)]).0, 0);
    let (code, _) = run(&["netsim", "interface", p(&net), "--cap", "3", "--output", p(&a)]);
    assert_eq!(code, 0);
    let lts: Value = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(lts["boundary"].as_array().unwrap().len(), 2);
    assert!(lts["transitions"][0]["witness"].is_object());

    let toggle = fixture("toggle.json");
    assert_eq!(run(&["netsim", "gadget", p(&toggle), "--state", "A", "--output", p(&b)]).0, 0);
    assert_eq!(run(&["netsim", "gadget", p(&toggle), "--state", "B", "--output", p(&c)]).0, 0);
    let (code, v) = run(&["netsim", "bisim", p(&a), p(&b)]);
    assert_eq!((code, v["bisimilar"].as_bool()), (0, Some(true)));
    let (code, v) = run(&["netsim", "bisim", p(&a), p(&c)]);
    assert_eq!((code, v["bisimilar"].as_bool()), (1, Some(false)));
    assert!(v["trace"].is_array());

    assert_eq!(run(&["netsim", "interface", p(&net), "--max-nodes", "2"]).0, 2);
    assert_eq!(run(&["netsim", "gadget", p(&toggle), "--state", "Z"]).0, 65);
    assert_eq!(run(&["netsim", "bisim", p(&toggle), p(&b)]).0, 65);
}

#[test]
fn verify_is_reproducible() {
    let args = ["verify", "shadow", "--size", "3", "--samples", "15", "--seed", "11"];
    let (code, first) = run(&args);
    assert_eq!(code, 0);
    let (_, again) = run(&args);
    assert_eq!(first, again);
    let n = |k: &str| first[k].as_u64().unwrap();
    assert_eq!(n("agreements") + first["disagreements"].as_array().unwrap().len() as u64 + n("exhaustions"), n("tried"));
    assert_eq!(first["seed"], 11);

    let (code, v) = run(&["verify", "3sat", "--exhaustive", "--samples", "0", "--size", "2", "--clauses", "2"]);
    assert_eq!((code, v["disagreements"].as_array().map(Vec::len)), (0, Some(0)));
    assert_eq!(run(&["verify", "4sat"]).0, 64);
}

#[test]
fn verify_reports_failures() {
    // A gadget without a directed tunnel breaks stcon on every instance.
    let (code, v) = run(&["verify", "stcon", "--samples", "3", "--gadget", "catalog:one-state-0d-1u"]);
    assert_eq!(code, 1);
    let d = &v["disagreements"][0];
    assert!(d["minimized"]["digraph"].is_string());
    assert!(d["note"].as_str().unwrap().contains("directed tunnel"));
}

#[test]
fn output_flag_writes_file() {
    let dir = scratch();
    let out = dir.path().join("o.json");
    let (code, stdout) = run(&["solve", p(&fixture("reach_yes.json")), "--output", p(&out)]);
    assert_eq!((code, stdout), (0, Value::Null));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["decision"], "yes");
}

#[test]
fn help_and_version() {
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["--version"]).0, 0);
    assert_eq!(run(&[]).0, 64);
}
