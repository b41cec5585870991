//! Acceptance suite: one PASS/FAIL line per criterion.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use roc_core::dsl::{parse, print};
use roc_core::engine::{fire, reachable, Marking, Reachability, DEFAULT_BOUND};
use roc_core::fragment::{extract_fragments, flatten, refine, FragmentError, FragmentKey};
use roc_core::goal::{trace, validate_goals, EdgeKind, GoalEdge};
use roc_core::label::normalize_label;
use roc_core::model::{Level, Place, PlaceKind, ProcessModel, Transition, ViolationCode};
use roc_core::reuse::{similarity, Repository, SimilarityWeights};
use roc_core::strategy::normalize_strategy;
use roc_core::{fixtures, Fragment};

type Check = Result<(), String>;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn roc(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("roc").chain(args.iter().copied());
    let code = roc_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// TSV body rows (header dropped) split into cells.
fn tsv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split('\t').map(str::to_string).collect()).collect()
}

fn lower(s: &str) -> String {
    s.to_lowercase()
}

fn triplets_match(got: &str, want: &[(&str, &str, &str)]) -> Check {
    let rows = tsv_rows(got);
    let got: Vec<(String, String, String)> = rows
        .iter()
        .map(|r| (normalize_label(&r[1]), normalize_label(&r[2]), lower(&r[3])))
        .collect();
    let want: Vec<(String, String, String)> = want
        .iter()
        .map(|(s, t, st)| (normalize_label(s), normalize_label(t), lower(st)))
        .collect();
    ensure(got == want, || format!("fragments {got:?} != {want:?}"))?;
    let ids: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    let want_ids: Vec<String> = (1..=want.len()).map(|i| format!("PF{i}")).collect();
    ensure(ids == want_ids, || format!("ids {ids:?}"))
}

fn criterion_1() -> Check {
    let file = fixture("electro_tech.roc");
    let file = file.to_str().unwrap();
    let t0 = Instant::now();
    let (code, asis, err) = roc(&["fragments", file, "et_asis", "--format", "tsv"]);
    ensure(code == 0, || format!("exit {code}: {err}"))?;
    triplets_match(
        &asis,
        &[
            ("(start)", "(support material)", "manual strategy"),
            ("(support material)", "(work with material)", "Not demand management strategy"),
            ("(work with material)", "(stock)", "Not real time production planning strategy"),
            ("(Stock)", "exit", "manual order processing strategy"),
        ],
    )?;
    let (code, tobe, err) = roc(&["fragments", file, "et_tobe", "--format", "tsv"]);
    ensure(code == 0, || format!("exit {code}: {err}"))?;
    triplets_match(
        &tobe,
        &[
            ("(start)", "(Support material)", "planning strategy"),
            ("(Support material)", "(work with material)", "backward strategy"),
            ("(Support material)", "(Work with material)", "forward strategy"),
            ("(Work with material)", "(stock product)", "LIFO"),
            ("(Work with material)", "(stock product)", "FIFO"),
            ("(Stock Product)", "(Stock Product)", "Reservation Strategy"),
            ("(Stock Product)", "(Stock Product)", "Quality Inspection Strategy"),
            ("(Stock Product)", "exit", "Financial Control Strategy"),
        ],
    )?;
    let elapsed = t0.elapsed();
    ensure(elapsed.as_secs_f64() < 1.0, || format!("took {elapsed:?}"))
}

/// Gap class a reader derives from the As-Is label alone.
fn expected_gap(asis: &str, reference: &str) -> &'static str {
    let a = lower(asis);
    if a == lower(reference) {
        "NoGap"
    } else if a.starts_with("not ") {
        "NegatedCapability"
    } else if a.split_whitespace().any(|w| w == "manual") {
        "ManualToAutomated"
    } else {
        "StrategyMismatch"
    }
}

fn check_alignment(asis: &str, reference: &str, catalog: &str, table: &str) -> Result<Vec<Vec<String>>, String> {
    let file = fixture("geneva.roc");
    let file = file.to_str().unwrap();
    let (_, text, err) = roc(&["align", file, asis, reference, "--catalog", catalog]);
    ensure(err.is_empty(), || err.clone())?;
    let components: String = text
        .split("components:\n")
        .nth(1)
        .and_then(|rest| rest.split("coverage:").next())
        .unwrap_or_default()
        .to_string();
    ensure(components == table, || format!("component table:\n{components}\nexpected:\n{table}"))?;
    ensure(text.ends_with("coverage: 1.00 (4/4)\n"), || format!("coverage line in:\n{text}"))?;

    let (_, tsv, _) = roc(&["align", file, asis, reference, "--catalog", catalog, "--format", "tsv"]);
    let rows = tsv_rows(&tsv);
    ensure(rows.len() == 4, || format!("{} rows", rows.len()))?;
    for (i, r) in rows.iter().enumerate() {
        ensure(r[0] == format!("PF{0}/PF{0}", i + 1), || format!("row id {}", r[0]))?;
        let want = expected_gap(&r[3], &r[4]);
        ensure(r[5] == want, || format!("{}: gap {} != {want}", r[0], r[5]))?;
    }
    ensure(!tsv.lines().any(|l| l.ends_with(' ') || l.ends_with('\t')), || "trailing whitespace".into())?;
    Ok(rows)
}

fn criterion_2() -> Check {
    let rows = check_alignment(
        "om_asis",
        "om_sap",
        "geneva_om",
        "PF1\tDemand management\n\
         PF2\tMaster Production Scheduling Material Requirements Planning\n\
         PF3\tInventory Management\n\
         PF4\tFinance and Control\n",
    )?;
    let allowed = ["NegatedCapability", "StrategyMismatch", "ManualToAutomated"];
    ensure(rows.iter().all(|r| allowed.contains(&r[5].as_str())), || format!("{rows:?}"))
}

fn criterion_3() -> Check {
    let rows = check_alignment(
        "sop_asis",
        "sop_sap",
        "geneva_sop",
        "PF1\tForecasting (APO)\n\
         PF2\tSupply chain cockpit (APO)\n\
         PF3\tAdvance planning and scheduling (APO)\n\
         PF4\tSOP & ATP\n",
    )?;
    ensure(rows[2][3] == "not integration strategy" && rows[2][5] == "NegatedCapability", || {
        format!("{:?}", rows[2])
    })
}

fn sorted_keys(frags: &[Fragment]) -> Vec<FragmentKey> {
    let mut v: Vec<_> = frags.iter().map(Fragment::key).collect();
    v.sort();
    v
}

/// Flattening must leave exactly the other fragments plus the children.
fn flatten_law(m: &ProcessModel, parent: &str, children: &[roc_core::Strategy]) -> Result<bool, String> {
    let before = extract_fragments(m).map_err(|e| e.to_string())?;
    let (refined, tree) = match refine(m, parent, children) {
        Ok(x) => x,
        Err(FragmentError::CompositeTransition { .. }) => return Ok(false),
        Err(e) => return Err(e.to_string()),
    };
    let flat = flatten(&refined, &tree).map_err(|e| e.to_string())?;
    let mut want: Vec<Fragment> = before.into_iter().filter(|f| f.id != parent).collect();
    want.extend(tree.children.iter().cloned());
    let got = extract_fragments(&flat).map_err(|e| e.to_string())?;
    ensure(sorted_keys(&got) == sorted_keys(&want), || format!("flatten of {parent} in {}", m.id))?;
    Ok(true)
}

fn chain(r: &mut impl Rng, n: usize) -> ProcessModel {
    let mut m = ProcessModel::new("chain", Level::Strategy);
    for i in 0..n {
        let kind = match i {
            0 => PlaceKind::Start,
            _ if i == n - 1 => PlaceKind::Exit,
            _ => PlaceKind::Intermediate,
        };
        m.places.push(Place::new(format!("p{i}"), common::text(r, 2) + &format!(" {i}"), kind));
    }
    for i in 0..n - 1 {
        m.transitions.push(Transition::new(
            format!("t{i}"),
            common::strategy(r),
            [format!("p{i}")],
            [format!("p{}", i + 1)],
        ));
    }
    m
}

fn criterion_4() -> Check {
    let ws = fixtures::geneva();
    let sop = &ws.models["sop_sap"];
    let expected: [(&str, &[&str]); 4] = [
        ("PF1", &["product planning", "sales planning", "performance management"]),
        (
            "PF2",
            &["Master production scheduling", "capacity planning strategy", "material requirements planning"],
        ),
        ("PF3", &["consolidation strategy", "feedback to demand and supply"]),
        ("PF4", &["performance review", "financial review", "approval/action items"]),
    ];
    let parents = extract_fragments(sop).map_err(|e| e.to_string())?;
    let mut all = sop.clone();
    for (parent, labels) in expected {
        let children: Vec<_> = labels.iter().map(|l| normalize_strategy(l).unwrap()).collect();
        let (next, tree) = refine(&all, parent, &children).map_err(|e| e.to_string())?;
        let p = parents.iter().find(|f| f.id == parent).unwrap();
        let got: Vec<String> = tree.children.iter().map(|c| c.strategy.normalized().to_string()).collect();
        let want: Vec<String> = labels.iter().map(|l| lower(l)).collect();
        ensure(got == want, || format!("{parent} children {got:?}"))?;
        for (k, c) in tree.children.iter().enumerate() {
            ensure(c.id == format!("{parent}.{}", k + 1), || c.id.clone())?;
            ensure(c.source_key() == p.source_key() && c.target_key() == p.target_key(), || {
                format!("{} endpoints", c.id)
            })?;
        }
        ensure(flatten_law(sop, parent, &children)?, || format!("{parent} not refinable"))?;
        all = next;
    }
    // All four refinements recorded at once survive the text format.
    let mut doc = roc_core::Workspace::default();
    doc.models.insert(all.id.clone(), all.clone());
    ensure(parse(&print(&doc)).map_err(|d| format!("{d:?}"))? == doc, || "refined net round trip".into())?;

    let mut r = common::rng(404);
    for _ in 0..1000 {
        let n = r.random_range(2..=8);
        let m = chain(&mut r, n);
        let parent = format!("PF{}", r.random_range(1..n));
        let k = r.random_range(1..=4);
        let children = common::distinct_strategies(&mut r, k);
        ensure(flatten_law(&m, &parent, &children)?, || "chain fragment not refinable".into())?;
    }
    Ok(())
}

fn criterion_5() -> Check {
    let mut r = common::rng(5);
    let (mut nets, mut reached, mut replayed) = (0, 0, 0);
    while nets < 500 {
        let m = common::any_net(&mut r, 10);
        nets += 1;
        let from = Marking::new([m.places[0].id.as_str()]);
        let all = common::enumerate_sequences(&m, &from);
        let mut targets: Vec<Marking> = all.keys().map(|k| Marking::new(k.iter().map(String::as_str))).collect();
        for _ in 0..3 {
            targets.push(common::random_marking(&mut r, &m));
        }
        for to in targets {
            let key: Vec<String> = to.places().map(str::to_string).collect();
            match (reachable(&m, &from, &to, DEFAULT_BOUND), all.get(&key)) {
                (Reachability::Reachable(path), Some(best)) => {
                    reached += 1;
                    ensure(path.len() == best.len(), || format!("witness length differs on {m:?}"))?;
                    let end = path
                        .iter()
                        .try_fold(from.clone(), |mk, t| fire(&m, &mk, t))
                        .map_err(|e| e.to_string())?;
                    if end == to {
                        replayed += 1;
                    }
                }
                (Reachability::Unreachable, None) => {}
                (got, want) => return Err(format!("{m:?} to {to:?}: {got:?} vs {want:?}")),
            }
        }
    }
    ensure(replayed == reached, || format!("{replayed}/{reached} witnesses replay"))
}

fn criterion_6() -> Check {
    let mut r = common::rng(6);
    for i in 0..1000 {
        let ws = common::workspace(&mut r);
        let text = print(&ws);
        let back = parse(&text).map_err(|d| format!("#{i}: {d:?}"))?;
        ensure(back == ws, || format!("#{i} differs after round trip"))?;
        ensure(print(&back) == text, || format!("#{i} prints differently"))?;
    }
    Ok(())
}

fn jaccard_oracle<T: Ord + Clone>(a: &[T], b: &[T]) -> f64 {
    let a: std::collections::BTreeSet<T> = a.iter().cloned().collect();
    let b: std::collections::BTreeSet<T> = b.iter().cloned().collect();
    let union = a.union(&b).count();
    if union == 0 {
        1.0
    } else {
        a.intersection(&b).count() as f64 / union as f64
    }
}

fn criterion_7() -> Check {
    let ws = fixtures::cases();
    let w = SimilarityWeights::default();
    for c in ws.cases.values() {
        let s = similarity(c, c, &w);
        ensure(s.total == 1.0, || format!("similarity({0}, {0}) = {1}", c.id, s.total))?;
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let repo_path = dir.path().join("repo.roc");
    let repo_arg = repo_path.to_str().unwrap();
    let cases_file = fixture("cases.roc");
    for id in ws.cases.keys() {
        let (code, _, err) = roc(&["case", "retain", cases_file.to_str().unwrap(), id, "--repo", repo_arg]);
        ensure(code == 0, || format!("retain {id}: {err}"))?;
    }
    let reloaded = Repository::load(&repo_path).map_err(|e| e.to_string())?;
    let mut expected = Repository::in_memory();
    for c in ws.cases.values() {
        expected.retain(c.clone()).map_err(|e| e.to_string())?;
    }
    ensure(reloaded.cases().eq(expected.cases()), || "reloaded repository differs".into())?;

    // Ranking for the order-management query, scored by hand-rolled Jaccard.
    let q = &ws.cases["geneva_om"];
    let keys = |c: &roc_core::Case| c.asis_fragments.iter().map(Fragment::key).collect::<Vec<_>>();
    let goals = |c: &roc_core::Case| c.goal_labels.iter().cloned().collect::<Vec<_>>();
    let comps = |c: &roc_core::Case| c.component_map.iter().map(|(_, n)| n.clone()).collect::<Vec<_>>();
    let mut want: Vec<(f64, String)> = ws
        .cases
        .values()
        .map(|c| {
            let total = 0.5 * jaccard_oracle(&keys(q), &keys(c))
                + 0.3 * jaccard_oracle(&goals(q), &goals(c))
                + 0.2 * jaccard_oracle(&comps(q), &comps(c));
            (total, c.id.clone())
        })
        .collect();
    want.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let want_ids: Vec<String> = want.iter().map(|(_, id)| id.clone()).collect();
    let mut first: Option<String> = None;
    for _ in 0..10 {
        let (code, out, err) = roc(&["case", "retrieve", cases_file.to_str().unwrap(), "geneva_om", "--repo", repo_arg]);
        ensure(code == 0, || err.clone())?;
        let ids: Vec<String> = tsv_rows(&out).iter().map(|r| r[1].clone()).collect();
        ensure(ids == want_ids, || format!("ranking {ids:?} != {want_ids:?}"))?;
        match &first {
            None => first = Some(out),
            Some(f) => ensure(*f == out, || "retrieve output changed between runs".into())?,
        }
    }

    // Adapt + test: a fresh order-management query against the stored case.
    let geneva = fixture("geneva.roc");
    let (code, query, err) = roc(&["case", "new", geneva.to_str().unwrap(), "--id", "query", "--asis", "om_asis", "--goals", "geneva"]);
    ensure(code == 0, || err.clone())?;
    let combined = dir.path().join("query.roc");
    let text = std::fs::read_to_string(&geneva).map_err(|e| e.to_string())? + "\n" + &query;
    std::fs::write(&combined, text).map_err(|e| e.to_string())?;
    let combined = combined.to_str().unwrap();
    let (code, out, err) = roc(&["case", "adapt", combined, "query", "geneva_om", "--repo", repo_arg]);
    ensure(code == 0, || format!("adapt exit {code}: {err}{out}"))?;
    let (code, out, err) = roc(&["case", "test", combined, "query", "geneva_om", "--repo", repo_arg, "--catalog", "geneva_om"]);
    ensure(code == 0 && out.ends_with("coverage: 1.00 (4/4)\n"), || format!("test exit {code}: {err}{out}"))
}

fn criterion_8() -> Check {
    let ws = fixtures::electro_tech();
    let g = &ws.goals["electro_tech"];
    let v = validate_goals(g);
    ensure(v.is_empty(), || format!("{v:?}"))?;
    let payroll = g.node_by_label("automate payroll").ok_or("no automate payroll node")?;
    let need = g.node_by_label("need for information").ok_or("no need for information node")?;
    let paths = trace(g, &payroll.id).map_err(|e| e.to_string())?;
    ensure(paths.contains(&vec![need.id.clone(), payroll.id.clone()]), || format!("{paths:?}"))?;

    let mut bad = g.clone();
    bad.edges.insert(GoalEdge::new("r_erp", EdgeKind::Derives, need.id.clone()));
    let v = validate_goals(&bad);
    ensure(v.iter().any(|x| x.code == ViolationCode::LayeringViolation), || format!("{v:?}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("Electro Tech fragment listings", criterion_1),
        ("Geneva order management alignment and component map", criterion_2),
        ("Geneva SOP alignment and component map", criterion_3),
        ("SOP refinements and flatten law", criterion_4),
        ("reachability vs firing-sequence enumeration", criterion_5),
        ("DSL round trip on random workspaces", criterion_6),
        ("CBR identity, determinism, persistence, adapt+test", criterion_7),
        ("goal layering and trace", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("criterion {}: PASS  {name}", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {e}", i + 1);
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
