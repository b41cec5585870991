//! Seeded generators and brute-force oracles shared by integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roc_core::align::{AliasMap, Component, ComponentCatalog};
use roc_core::engine::{fire, Marking};
use roc_core::fragment::{extract_fragments, refine, Fragment};
use roc_core::goal::{EdgeKind, GoalEdge, GoalGraph, GoalKind, GoalNode, Horizon, Realization, Stakeholder};
use roc_core::label::normalize_label;
use roc_core::model::{Level, Place, PlaceKind, ProcessModel, Transition};
use roc_core::reuse::{Case, SimilarityWeights};
use roc_core::strategy::{normalize_strategy, Strategy};
use roc_core::workspace::Workspace;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const WORDS: &[&str] = &[
    "stock", "Material", "order", "plan", "FIFO", "demand", "supply", "Billing", "goods", "issue", "forecast",
    "review", "manual", "not", "(entry)", "Qualité", "a\"b", "c\\d", "x#y", "p->q", "k, v", "tab\there",
];

pub fn text(r: &mut impl Rng, max_words: usize) -> String {
    let n = r.random_range(1..=max_words);
    let mut out = String::new();
    for i in 0..n {
        if i > 0 {
            out.push_str([" ", "  ", " \n"].choose(r).unwrap());
        }
        out.push_str(WORDS.choose(r).unwrap());
    }
    out
}

pub fn strategy(r: &mut impl Rng) -> Strategy {
    let mut raw = text(r, 4);
    if r.random_bool(0.2) {
        raw = format!("not {raw}");
    }
    normalize_strategy(&raw).unwrap()
}

/// `n` strategies with pairwise distinct normalized labels.
pub fn distinct_strategies(r: &mut impl Rng, n: usize) -> Vec<Strategy> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < n {
        let s = strategy(r);
        if seen.insert(s.normalized().to_string()) {
            out.push(s);
        }
    }
    out
}

/// A structurally valid net: a start→exit chain of `n` places (n ≥ 2)
/// plus forward alternatives, self-loops and the odd fork.
pub fn valid_net(r: &mut impl Rng, id: &str, n: usize) -> ProcessModel {
    assert!(n >= 2);
    let mut m = ProcessModel::new(id, *[Level::Intentional, Level::Strategy, Level::Operational].choose(r).unwrap());
    for i in 0..n {
        let kind = match i {
            0 => PlaceKind::Start,
            _ if i == n - 1 => PlaceKind::Exit,
            _ => PlaceKind::Intermediate,
        };
        let label = format!("{} {i}", text(r, 2));
        m.places.push(Place::new(format!("p{i}"), label, kind));
    }
    let mut arcs: Vec<(BTreeSet<usize>, BTreeSet<usize>)> = (0..n - 1)
        .map(|i| (BTreeSet::from([i]), BTreeSet::from([i + 1])))
        .collect();
    for _ in 0..r.random_range(0..=n) {
        let i = r.random_range(0..n - 1);
        let kind = r.random_range(0..4);
        let arc = match kind {
            0 if i > 0 => (BTreeSet::from([i]), BTreeSet::from([i])),
            1 if i + 2 < n => (BTreeSet::from([i]), BTreeSet::from([i + 1, r.random_range(i + 2..n)])),
            _ => (BTreeSet::from([i]), BTreeSet::from([r.random_range(i + 1..n)])),
        };
        let at = r.random_range(0..=arcs.len());
        arcs.insert(at, arc);
    }
    for (k, (ins, outs)) in arcs.into_iter().enumerate() {
        m.transitions.push(Transition::new(
            format!("t{k}"),
            strategy(r),
            ins.iter().map(|i| format!("p{i}")),
            outs.iter().map(|o| format!("p{o}")),
        ));
    }
    m
}

/// Refines a few single-arc fragments of a valid net.
pub fn with_refinements(r: &mut impl Rng, mut m: ProcessModel) -> ProcessModel {
    let frags = extract_fragments(&m).unwrap();
    for f in &frags {
        if !r.random_bool(0.2) {
            continue;
        }
        let k = r.random_range(1..=3);
        if let Ok((refined, _)) = refine(&m, &f.id, &distinct_strategies(r, k)) {
            m = refined;
        }
    }
    m
}

/// Any net over at most `max_places` places; not necessarily valid.
pub fn any_net(r: &mut impl Rng, max_places: usize) -> ProcessModel {
    let n = r.random_range(1..=max_places);
    let mut m = ProcessModel::new("n", Level::Strategy);
    for i in 0..n {
        m.places.push(Place::new(format!("p{i}"), format!("P{i}"), PlaceKind::Intermediate));
    }
    m.places[0].kind = PlaceKind::Start;
    if n > 1 {
        m.places[n - 1].kind = PlaceKind::Exit;
    }
    for k in 0..r.random_range(1..=7) {
        let ins = some_places(r, n);
        let outs = some_places(r, n);
        let s = normalize_strategy(&format!("s{k}")).unwrap();
        m.transitions.push(Transition::new(format!("t{k}"), s, ins, outs));
    }
    m
}

fn some_places(r: &mut impl Rng, n: usize) -> BTreeSet<String> {
    let k = r.random_range(1..=2.min(n));
    (0..k).map(|_| format!("p{}", r.random_range(0..n))).collect()
}

pub fn random_marking(r: &mut impl Rng, m: &ProcessModel) -> Marking {
    let ids: Vec<&str> = m.places.iter().map(|p| p.id.as_str()).collect();
    let k = r.random_range(1..=2.min(ids.len()));
    Marking::new((0..k).map(|_| *ids.choose(r).unwrap()))
}

/// Level-by-level enumeration of every firing sequence from `from`, keeping
/// for each marking the smallest sequence (by length, then by transition
/// ids) that reaches it. Returns all reachable markings with that sequence.
pub fn enumerate_sequences(m: &ProcessModel, from: &Marking) -> BTreeMap<Vec<String>, Vec<String>> {
    let key = |mk: &Marking| mk.places().map(str::to_string).collect::<Vec<_>>();
    let mut ids: Vec<&str> = m.transitions.iter().map(|t| t.id.as_str()).collect();
    ids.sort();
    let mut best: BTreeMap<Vec<String>, Vec<String>> = BTreeMap::new();
    best.insert(key(from), Vec::new());
    let mut level: Vec<(Marking, Vec<String>)> = vec![(from.clone(), Vec::new())];
    while !level.is_empty() {
        let mut next: BTreeMap<Vec<String>, (Marking, Vec<String>)> = BTreeMap::new();
        for (mk, seq) in &level {
            for t in &ids {
                let Ok(after) = fire(m, mk, t) else { continue };
                let k = key(&after);
                if best.contains_key(&k) {
                    continue;
                }
                let mut s = seq.clone();
                s.push(t.to_string());
                match next.get(&k) {
                    Some((_, old)) if *old <= s => {}
                    _ => {
                        next.insert(k, (after, s));
                    }
                }
            }
        }
        level = Vec::new();
        for (k, (mk, s)) in next {
            best.insert(k, s.clone());
            level.push((mk, s));
        }
    }
    best
}

pub fn goal_graph(r: &mut impl Rng, id: &str, targets: &[Realization]) -> GoalGraph {
    let mut g = GoalGraph::new(id);
    let mut order: Vec<String> = Vec::new();
    let layers: [&[GoalKind]; 4] = [
        &[GoalKind::Need],
        &[GoalKind::StrategicGoal, GoalKind::OperationalGoal, GoalKind::ChangeGoal],
        &[GoalKind::Objective],
        &[GoalKind::Requirement],
    ];
    let mut objectives = Vec::new();
    for (li, kinds) in layers.iter().enumerate() {
        for i in 0..r.random_range(0..=3) {
            if li == 3 && objectives.is_empty() {
                break;
            }
            let kind = *kinds.choose(r).unwrap();
            let nid = format!("{}{li}_{i}", &kind.as_str()[..1]);
            let mut node = GoalNode::new(&nid, kind, text(r, 3));
            node = match kind {
                GoalKind::Need => node.with_horizon(*[Horizon::Strategic, Horizon::Operational].choose(r).unwrap()),
                GoalKind::Requirement => node,
                _ if r.random_bool(0.3) => {
                    node.with_horizon(*[Horizon::Strategic, Horizon::Operational, Horizon::None].choose(r).unwrap())
                }
                _ => node,
            };
            if kind == GoalKind::Requirement {
                let obj: &String = objectives.choose(r).unwrap();
                g.edges.insert(GoalEdge::new(obj.clone(), EdgeKind::Derives, nid.clone()));
            }
            if kind == GoalKind::Objective {
                objectives.push(nid.clone());
            }
            g.nodes.insert(nid.clone(), node);
            order.push(nid);
        }
    }
    // Edges only run forward in `order`, which keeps the graph acyclic and
    // derives edges never point upward.
    for _ in 0..r.random_range(0..=order.len() * 2) {
        if order.len() < 2 {
            break;
        }
        let i = r.random_range(0..order.len() - 1);
        let j = r.random_range(i + 1..order.len());
        let kind = if r.random_bool(0.7) { EdgeKind::Derives } else { EdgeKind::Supports };
        g.edges.insert(GoalEdge::new(order[i].clone(), kind, order[j].clone()));
    }
    for i in 0..r.random_range(0..=2) {
        let sid = format!("s{i}");
        g.stakeholders.insert(
            sid.clone(),
            Stakeholder {
                id: sid.clone(),
                name: text(r, 2),
                role: if r.random_bool(0.5) { text(r, 1) } else { String::new() },
            },
        );
        if let Some(n) = order.choose(r) {
            g.edges.insert(GoalEdge::new(sid, EdgeKind::Determines, n.clone()));
        }
    }
    if !targets.is_empty() {
        for n in &order {
            if r.random_bool(0.3) {
                g.realizations.insert((n.clone(), targets.choose(r).unwrap().clone()));
            }
        }
    }
    g
}

fn fragment_list(r: &mut impl Rng) -> Vec<Fragment> {
    (0..r.random_range(0..=4))
        .map(|i| Fragment::new(format!("PF{}", i + 1), text(r, 2), text(r, 2), strategy(r)))
        .collect()
}

pub fn case(r: &mut impl Rng, id: &str) -> Case {
    let tobe = fragment_list(r);
    let mut component_map = Vec::new();
    for f in &tobe {
        if r.random_bool(0.7) {
            component_map.push((f.id.clone(), text(r, 2)));
        }
    }
    Case {
        id: id.to_string(),
        enterprise_type: maybe(r),
        targeted_process: maybe(r),
        project_type: maybe(r),
        goal_labels: (0..r.random_range(0..=3)).map(|_| normalize_label(&text(r, 3))).collect(),
        asis_fragments: fragment_list(r),
        tobe_fragments: tobe,
        component_map,
        notes: maybe(r),
    }
}

/// A random workspace that passes every validator.
pub fn workspace(r: &mut impl Rng) -> Workspace {
    let mut ws = Workspace::default();
    let mut targets = Vec::new();
    for i in 0..r.random_range(0..=3) {
        let id = format!("m{i}");
        let n = r.random_range(2..=6);
        let net = valid_net(r, &id, n);
        let m = with_refinements(r, net);
        targets.push(Realization::Model(id.clone()));
        for f in extract_fragments(&m).unwrap() {
            targets.push(Realization::Fragment {
                model: id.clone(),
                fragment: f.id,
            });
        }
        for c in m.refinements.iter().flat_map(|t| &t.children) {
            targets.push(Realization::Fragment {
                model: id.clone(),
                fragment: c.id.clone(),
            });
        }
        ws.models.insert(id, m);
    }
    for i in 0..r.random_range(0..=2) {
        let id = format!("g{i}");
        ws.goals.insert(id.clone(), goal_graph(r, &id, &targets));
    }
    for i in 0..r.random_range(0..=2) {
        let mut cat = ComponentCatalog::new(format!("c{i}"));
        for _ in 0..r.random_range(0..=3) {
            let name = text(r, 2);
            let k = r.random_range(1..=3);
            cat.components.insert(
                name.clone(),
                Component {
                    name,
                    module: text(r, 1),
                    provides: (0..k).map(|_| strategy(r)).collect(),
                },
            );
        }
        ws.catalogs.insert(cat.id.clone(), cat);
    }
    for i in 0..r.random_range(0..=2) {
        let mut a = AliasMap::new(format!("a{i}"));
        for _ in 0..r.random_range(0..=3) {
            a.pairs.push((text(r, 2), text(r, 2)));
        }
        ws.aliases.insert(a.id.clone(), a);
    }
    for i in 0..r.random_range(0..=2) {
        let id = format!("case_{i}");
        ws.cases.insert(id.clone(), case(r, &id));
    }
    if r.random_bool(0.3) {
        let vals = [0.0, 0.25, 0.5, 1.0, 2.5, 0.3];
        let mut w = SimilarityWeights {
            fragment: *vals.choose(r).unwrap(),
            goal: *vals.choose(r).unwrap(),
            component: *vals.choose(r).unwrap(),
        };
        if !w.is_valid() {
            w.fragment = 1.0;
        }
        ws.weights = Some(w);
    }
    ws
}

fn maybe(r: &mut impl Rng) -> String {
    if r.random_bool(0.6) {
        text(r, 3)
    } else {
        String::new()
    }
}
