use std::path::{Path, PathBuf};

use roc_cli::{run, EXIT_FINDINGS, EXIT_OK, EXIT_USAGE};

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    p.to_str().unwrap().to_string()
}

fn roc(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("roc").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn validate_fixtures() {
    let (code, _, err) = roc(&["validate", &fixture("electro_tech.roc"), &fixture("geneva.roc"), &fixture("cases.roc")]);
    assert_eq!(code, EXIT_OK, "{err}");
}

#[test]
fn validate_reports_positions() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.roc", "net m level=strategy\n  place a \"A\" start\n  trans t \"s\" a -> q\n");
    let (code, _, err) = roc(&["validate", &f]);
    assert_eq!(code, EXIT_FINDINGS);
    assert!(err.contains(&format!("{f}:3:")), "{err}");
    assert!(err.contains("error:"), "{err}");
}

#[test]
fn missing_file_is_usage_error() {
    let (code, _, _) = roc(&["validate", "/nonexistent/x.roc"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = roc(&["fragments", &fixture("geneva.roc"), "no_such_net"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = roc(&["frobnicate"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn empty_model_lists_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "e.roc", "net e level=strategy\n");
    let (code, out, _) = roc(&["fragments", &f, "e", "--format", "tsv"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "id\tsource\ttarget\tstrategy\tpolarity\n");
    let (_, dot, _) = roc(&["export", &f, "e", "--format", "dot"]);
    assert_eq!(dot, "digraph \"e\" {\n}\n");
}

#[test]
fn export_dot_is_deterministic() {
    let f = fixture("electro_tech.roc");
    let (code, a, _) = roc(&["export", &f, "et_asis", "--format", "dot"]);
    assert_eq!(code, EXIT_OK);
    let (_, b, _) = roc(&["export", &f, "et_asis", "--format", "dot"]);
    assert_eq!(a, b);
    let places = a.lines().filter(|l| l.trim_start().starts_with("\"p:") && l.contains("shape=")).count();
    let transitions = a.lines().filter(|l| l.trim_start().starts_with("\"t:") && l.contains("shape=box")).count();
    assert_eq!((places, transitions), (5, 4));
    let (_, g, _) = roc(&["export", &f, "electro_tech", "--format", "dot"]);
    assert!(g.contains("shape=hexagon") && g.contains("style=dashed"), "{g}");
}

#[test]
fn simulate_witness_and_bounds() {
    let f = fixture("electro_tech.roc");
    let (code, out, _) = roc(&["simulate", &f, "et_asis"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("reachable in 4 steps\n"), "{out}");
    let (code, out, _) = roc(&["simulate", &f, "et_asis", "--from", "Stock", "--to", "Stock"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("reachable in 0 steps"), "{out}");
    let (code, out, _) = roc(&["simulate", &f, "et_asis", "--bound", "1"]);
    assert_eq!(code, EXIT_FINDINGS);
    assert!(out.starts_with("truncated"), "{out}");
    let (code, _, _) = roc(&["simulate", &f, "et_asis", "--from", "exit", "--to", "start"]);
    assert_eq!(code, EXIT_FINDINGS);
    let (code, out, _) = roc(&["simulate", &f, "et_asis", "--soundness"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("dead transitions: (none)"), "{out}");
}

#[test]
fn self_alignment_is_clean() {
    let f = fixture("geneva.roc");
    let (code, out, _) = roc(&["align", &f, "om_sap", "om_sap", "--catalog", "geneva_om"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.ends_with("coverage: 1.00 (4/4)\n"));
    let (code, _, _) = roc(&["align", &f, "om_asis", "om_sap", "--goals", "geneva"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn alias_map_connects_renamed_places() {
    let f = fixture("electro_tech.roc");
    let (_, plain, _) = roc(&["align", &f, "et_asis", "et_tobe", "--format", "tsv"]);
    let (_, aliased, _) = roc(&["align", &f, "et_asis", "et_tobe", "--alias-map", "et_states", "--format", "tsv"]);
    let paired = |s: &str| s.lines().skip(1).filter(|l| !l.starts_with("-/") && !l.contains("/-\t")).count();
    assert_eq!(paired(&plain), 3);
    assert_eq!(paired(&aliased), 6);
}

#[test]
fn refine_and_flatten() {
    let f = fixture("geneva.roc");
    let (code, out, _) = roc(&["refine", &f, "sop_sap", "PF3", "consolidation strategy", "feedback to demand and supply", "--format", "tsv"]);
    assert_eq!(code, EXIT_OK);
    let ids: Vec<&str> = out.lines().skip(1).map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(ids, ["PF3.1", "PF3.2"]);
    let (code, out, _) = roc(&["refine", &f, "sop_sap", "PF3", "a", "b", "--flatten", "--format", "tsv"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 1 + 5);
    let (code, _, _) = roc(&["refine", &f, "sop_sap", "PF9", "a"]);
    assert_ne!(code, EXIT_OK);
}

#[test]
fn case_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let repo = dir.path().join("repo.roc");
    let repo = repo.to_str().unwrap();
    let cases = fixture("cases.roc");
    let (code, _, err) = roc(&["case", "retain", &cases, "geneva_om", "--repo", repo]);
    assert_eq!(code, EXIT_OK, "{err}");
    let before = std::fs::read_to_string(repo).unwrap();
    let (code, _, err) = roc(&["case", "retain", &cases, "geneva_om", "--repo", repo]);
    assert_eq!(code, EXIT_FINDINGS);
    assert!(!err.is_empty());
    assert_eq!(std::fs::read_to_string(repo).unwrap(), before);

    let (code, out, _) = roc(&["case", "retrieve", &cases, "geneva_om", "--repo", repo, "--top", "1"]);
    assert_eq!(code, EXIT_OK);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(&row[..3], ["1", "geneva_om", "1.0000"]);

    let (code, out, _) = roc(&["case", "compare", &cases, "geneva_om", "geneva_om", "--repo", repo]);
    assert_eq!(code, EXIT_OK, "{out}");

    let (code, _, _) = roc(&["case", "retrieve", &cases, "geneva_om"]);
    if std::env::var_os("ROC_REPO").is_none() {
        assert_eq!(code, EXIT_USAGE);
    }
}

#[test]
fn case_new_prints_a_parsable_case() {
    let f = fixture("geneva.roc");
    let (code, out, err) = roc(&["case", "new", &f, "--id", "q", "--asis", "sop_asis", "--goals", "geneva"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let ws = roc_core::parse(&out).unwrap();
    let c = &ws.cases["q"];
    assert_eq!(c.asis_fragments.len(), 4);
    assert!(!c.is_solved());
}
