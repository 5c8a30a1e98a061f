use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "tests", "data", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn rgt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rgt"))
        .args(args)
        .env_remove("GT_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rgt-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn small_tree_is_a_tree() {
    let o = rgt(&["recognize-tree", &data("five-node-tree.graph")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "tree\n");
}

#[test]
fn three_cycle_is_not() {
    let o = rgt(&["recognize-tree", &data("three-cycle.graph")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "not-a-tree\n");
}

#[test]
fn no_matches_in_the_empty_graph() {
    let o = rgt(&["match", "--rule", &data("r2.rule"), &data("empty.graph")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0 matches\n");
}

#[test]
fn matches_are_listed() {
    let o = rgt(&["match", "--rule", &data("r2.rule"), &data("five-node-tree.graph")]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.ends_with("1 matches\n"), "{s}");
    assert!(s.contains("nodes 1->2 2->4"));
}

#[test]
fn derive_prints_the_reduction_trace() {
    let o = rgt(&["--json", "derive", "--rules", "builtin:tree-recognition", &data("five-node-tree.graph")]);
    assert_eq!(o.status.code(), Some(0));
    let rules: Vec<String> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .filter_map(|v| v.get("rule").and_then(|r| r.as_str()).map(str::to_string))
        .collect();
    assert_eq!(rules, ["r2", "r1", "r0", "r2", "r2", "r1", "r1"]);
}

#[test]
fn parse_errors_name_file_and_line() {
    let dir = tmp("bad");
    let f = dir.join("bad.graph");
    std::fs::write(&f, "graph g {\n  node 1 label=box\n  edge 1 1 -> \n}\n").unwrap();
    let o = rgt(&["recognize-tree", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.graph:"), "{err}");
}

#[test]
fn unknown_flags_are_usage_errors() {
    assert_eq!(rgt(&["recognize-tree", "--frobnicate"]).status.code(), Some(2));
}

#[test]
fn budget_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_rgt"))
        .args(["normal-forms", "--rules", "builtin:tree-recognition", &data("five-node-tree.graph")])
        .env("GT_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("budget exceeded"));
}

#[test]
fn membership() {
    let yes = rgt(&["member", "--grammar", "builtin:tree", &data("unrooted-tree.graph")]);
    assert_eq!((yes.status.code(), stdout(&yes).as_str()), (Some(0), "yes\n"));
    let no = rgt(&["member", "--grammar", "builtin:tree", &data("three-cycle.graph")]);
    assert_eq!((no.status.code(), stdout(&no).as_str()), (Some(1), "no\n"));
}

#[test]
fn manifest_grammar() {
    let dir = tmp("grammar");
    std::fs::copy(data("unrooted-tree.graph"), dir.join("g.graph")).unwrap();
    std::fs::write(
        dir.join("start.graph"),
        "graph s {\n  node 1 label=box root=0\n}\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("leaf.rule"),
        "rule leaf {
  left { node 1 label=box root=0 }
  interface { node 1 label=box root=0 }
  right { node 1 label=box root=0 node 2 label=box root=0 edge 1 1 -> 2 label=box }
}\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("tree.grammar"),
        "grammar { start=start.graph nonterminal-nodes= nonterminal-edges= rules=leaf.rule }\n",
    )
    .unwrap();
    let o = rgt(&[
        "member",
        "--grammar",
        dir.join("tree.grammar").to_str().unwrap(),
        dir.join("g.graph").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "yes\n");
}

#[test]
fn critical_pairs_write_witnesses() {
    let dir = tmp("pairs");
    let rules = dir.join("grow.rule");
    // Two ways to extend a node: the overlap at the node is joinable, but
    // competing deletions of the same node are not.
    std::fs::write(
        &rules,
        "rule to_b {
  left { node 1 label=a root=0 }
  interface { }
  right { node 2 label=b root=0 }
}
rule to_c {
  left { node 1 label=a root=0 }
  interface { }
  right { node 2 label=c root=0 }
}\n",
    )
    .unwrap();
    let out = dir.join("w");
    let o = rgt(&[
        "critical-pairs",
        "--rules",
        rules.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("joinable no"));
    assert!(out.join("pair0-overlap.graph").exists());
    assert!(out.join("pair0-left.graph").exists());
}

#[test]
fn encoded_tree_report() {
    let o = rgt(&[
        "--jobs",
        "2",
        "confluence-report",
        "--rules",
        "builtin:encoded-tree-recognition",
        "--garbage",
        "encoded-input-tree",
    ]);
    let s = stdout(&o);
    // The single non-garbage pair is joinable but not strongly joinable,
    // so critical pairs alone settle nothing.
    assert_eq!(o.status.code(), Some(1), "{s}");
    assert!(s.contains("1 non-garbage under `encoded-input-tree`, 0 of them strongly joinable"), "{s}");
    assert!(s.contains("conclusion: inconclusive"), "{s}");
}

#[test]
fn encode_and_decode_round_trip() {
    let dir = tmp("enc");
    let o = rgt(&["encode", "--layout", "tree", &data("forest.graph")]);
    assert_eq!(o.status.code(), Some(0));
    let enc = dir.join("enc.graph");
    std::fs::write(&enc, stdout(&o)).unwrap();
    let d = rgt(&["encode", "--layout", "tree", "--decode", enc.to_str().unwrap()]);
    assert_eq!(d.status.code(), Some(0), "{}", String::from_utf8_lossy(&d.stderr));
    let back = stdout(&d).replace("graph decoded", "graph forest");
    let orig = std::fs::read_to_string(data("forest.graph")).unwrap();
    assert_eq!(back.trim(), orig.trim());
    // The split layout needs disjoint node and edge labels.
    assert_eq!(rgt(&["encode", &data("forest.graph")]).status.code(), Some(2));
}

#[test]
fn split_encoding_round_trip() {
    let dir = tmp("split");
    let g = dir.join("g.graph");
    std::fs::write(&g, "graph g {\n  node 1 label=a root=1\n  node 2 label=b root=0\n  edge 1 1 -> 2 label=x\n}\n").unwrap();
    let o = rgt(&["encode", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let enc = dir.join("enc.graph");
    std::fs::write(&enc, stdout(&o)).unwrap();
    assert!(stdout(&o).contains("label=R"));
    let d = rgt(&["encode", "--decode", "--node-labels", "a,b", enc.to_str().unwrap()]);
    assert_eq!(d.status.code(), Some(0), "{}", String::from_utf8_lossy(&d.stderr));
    assert!(stdout(&d).contains("node 1 label=a root=1"));
    assert!(stdout(&d).contains("edge 1 1 -> 2 label=x"));
}

#[test]
fn bench_writes_csv() {
    let dir = tmp("bench");
    let csv = dir.join("b.csv");
    let o = rgt(&[
        "bench",
        "--class",
        "list,star",
        "--sizes",
        "100,200",
        "--trials",
        "2",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("class,nodes,trial,seconds,steps"));
    assert_eq!(lines.count(), 8);
    assert!(stdout(&o).contains("list: slope"));
}

#[test]
fn validate_reports_violations() {
    let dir = tmp("val");
    let f = dir.join("g.graph");
    std::fs::write(&f, "graph g {\n  node 1 label=box\n  edge 1 1 -> 9 label=box\n}\n").unwrap();
    let o = rgt(&["validate", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("dangling target"));
    let ok = rgt(&["validate", "--node-labels", "box", "--edge-labels", "box", &data("forest.graph")]);
    assert_eq!((ok.status.code(), stdout(&ok).as_str()), (Some(0), "ok\n"));
    let bad_label = rgt(&["validate", "--node-labels", "tri", "--edge-labels", "box", &data("forest.graph")]);
    assert_eq!(bad_label.status.code(), Some(1));
}

#[test]
fn equivalence_modes() {
    let t = "builtin:tree-recognition";
    let o = rgt(&["equivalent", t, t, "--mode", "stepwise(2)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("bounded"));
    let o = rgt(&["equivalent", t, "builtin:tree-grammar"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn runs_are_deterministic() {
    let args = [
        "--seed",
        "5",
        "derive",
        "--strategy",
        "random",
        "--rules",
        "builtin:tree-recognition",
        &data("five-node-tree.graph"),
    ];
    let (a, b) = (rgt(&args), rgt(&args));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
}
