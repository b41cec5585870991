//! Goal graphs: needs, goals, objectives and requirements linked by
//! derivation edges, with stakeholders and realization links into process
//! models.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::label::normalize_label;
use crate::model::{Violation, ViolationCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GoalKind {
    Need,
    StrategicGoal,
    OperationalGoal,
    ChangeGoal,
    Objective,
    Requirement,
}

impl GoalKind {
    pub const ALL: [GoalKind; 6] = [
        GoalKind::Need,
        GoalKind::StrategicGoal,
        GoalKind::OperationalGoal,
        GoalKind::ChangeGoal,
        GoalKind::Objective,
        GoalKind::Requirement,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GoalKind::Need => "need",
            GoalKind::StrategicGoal => "strategic_goal",
            GoalKind::OperationalGoal => "operational_goal",
            GoalKind::ChangeGoal => "change_goal",
            GoalKind::Objective => "objective",
            GoalKind::Requirement => "requirement",
        }
    }

    pub fn parse(s: &str) -> Option<GoalKind> {
        GoalKind::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Position in the need → goal → objective → requirement layering.
    pub fn rank(self) -> u8 {
        match self {
            GoalKind::Need => 0,
            GoalKind::StrategicGoal | GoalKind::OperationalGoal | GoalKind::ChangeGoal => 1,
            GoalKind::Objective => 2,
            GoalKind::Requirement => 3,
        }
    }

    pub fn default_horizon(self) -> Horizon {
        match self {
            GoalKind::StrategicGoal => Horizon::Strategic,
            GoalKind::OperationalGoal => Horizon::Operational,
            _ => Horizon::None,
        }
    }

    /// Goals the enterprise expects some process to realize.
    pub fn is_enterprise_goal(self) -> bool {
        matches!(
            self,
            GoalKind::StrategicGoal | GoalKind::OperationalGoal | GoalKind::ChangeGoal | GoalKind::Objective
        )
    }
}

impl fmt::Display for GoalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Horizon {
    Strategic,
    Operational,
    None,
}

impl Horizon {
    pub fn as_str(self) -> &'static str {
        match self {
            Horizon::Strategic => "strategic",
            Horizon::Operational => "operational",
            Horizon::None => "none",
        }
    }

    pub fn parse(s: &str) -> Option<Horizon> {
        match s {
            "strategic" => Some(Horizon::Strategic),
            "operational" => Some(Horizon::Operational),
            "none" => Some(Horizon::None),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalNode {
    pub id: String,
    pub label: String,
    pub kind: GoalKind,
    pub horizon: Horizon,
}

impl GoalNode {
    /// Node with the kind's default horizon.
    pub fn new(id: impl Into<String>, kind: GoalKind, label: impl Into<String>) -> Self {
        GoalNode {
            id: id.into(),
            label: label.into(),
            kind,
            horizon: kind.default_horizon(),
        }
    }

    pub fn with_horizon(mut self, horizon: Horizon) -> Self {
        self.horizon = horizon;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stakeholder {
    pub id: String,
    pub name: String,
    pub role: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Derives,
    Supports,
    Determines,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Derives => "derives",
            EdgeKind::Supports => "supports",
            EdgeKind::Determines => "determines",
        }
    }

    pub fn parse(s: &str) -> Option<EdgeKind> {
        match s {
            "derives" => Some(EdgeKind::Derives),
            "supports" => Some(EdgeKind::Supports),
            "determines" => Some(EdgeKind::Determines),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GoalEdge {
    pub from: String,
    pub kind: EdgeKind,
    pub to: String,
}

impl GoalEdge {
    pub fn new(from: impl Into<String>, kind: EdgeKind, to: impl Into<String>) -> Self {
        GoalEdge {
            from: from.into(),
            kind,
            to: to.into(),
        }
    }
}

/// What a goal is realized by: a whole process model or one of its fragments.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Realization {
    Model(String),
    Fragment { model: String, fragment: String },
}

impl Realization {
    pub fn model(&self) -> &str {
        match self {
            Realization::Model(m) | Realization::Fragment { model: m, .. } => m,
        }
    }

    /// Parses `model` or `model:fragment`.
    pub fn parse(s: &str) -> Option<Realization> {
        match s.split_once(':') {
            None if !s.is_empty() => Some(Realization::Model(s.to_string())),
            Some((m, f)) if !m.is_empty() && !f.is_empty() && !f.contains(':') => Some(Realization::Fragment {
                model: m.to_string(),
                fragment: f.to_string(),
            }),
            _ => None,
        }
    }
}

impl fmt::Display for Realization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Realization::Model(m) => f.write_str(m),
            Realization::Fragment { model, fragment } => write!(f, "{model}:{fragment}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GoalGraph {
    pub id: String,
    pub nodes: BTreeMap<String, GoalNode>,
    pub stakeholders: BTreeMap<String, Stakeholder>,
    pub edges: BTreeSet<GoalEdge>,
    /// `(goal id, realization)` links.
    pub realizations: BTreeSet<(String, Realization)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GoalError {
    #[error("unknown goal node `{0}`")]
    UnknownNode(String),
    #[error("unknown realization target `{0}`")]
    UnknownTarget(String),
}

impl GoalGraph {
    pub fn new(id: impl Into<String>) -> Self {
        GoalGraph {
            id: id.into(),
            ..Default::default()
        }
    }

    pub fn with_node(mut self, node: GoalNode) -> Self {
        self.nodes.insert(node.id.clone(), node);
        self
    }

    pub fn with_stakeholder(mut self, s: Stakeholder) -> Self {
        self.stakeholders.insert(s.id.clone(), s);
        self
    }

    pub fn with_edge(mut self, from: &str, kind: EdgeKind, to: &str) -> Self {
        self.edges.insert(GoalEdge::new(from, kind, to));
        self
    }

    pub fn node_by_label(&self, label: &str) -> Option<&GoalNode> {
        let key = normalize_label(label);
        self.nodes.values().find(|n| normalize_label(&n.label) == key)
    }

    pub fn realizations_of<'a>(&'a self, goal: &'a str) -> impl Iterator<Item = &'a Realization> + 'a {
        self.realizations.iter().filter(move |(g, _)| g == goal).map(|(_, r)| r)
    }

    fn successors(&self, kinds: &[EdgeKind]) -> BTreeMap<&str, Vec<&str>> {
        let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for e in &self.edges {
            if kinds.contains(&e.kind) {
                adj.entry(e.from.as_str()).or_default().push(e.to.as_str());
            }
        }
        adj
    }

    /// Adds a realized-by link. Linking twice is a no-op. Only the goal end
    /// is checked here; see `Workspace::link_realization` for the target.
    pub fn link_realization(&self, goal: &str, target: Realization) -> Result<GoalGraph, GoalError> {
        if !self.nodes.contains_key(goal) {
            return Err(GoalError::UnknownNode(goal.to_string()));
        }
        let mut g = self.clone();
        g.realizations.insert((goal.to_string(), target));
        Ok(g)
    }
}

/// Checks acyclicity, derivation layering and edge typing.
pub fn validate_goals(g: &GoalGraph) -> Vec<Violation> {
    let mut out = Vec::new();

    for id in g.stakeholders.keys() {
        if g.nodes.contains_key(id) {
            out.push(Violation::new(
                ViolationCode::DuplicateNodeId,
                id,
                format!("`{id}` is both a goal node and a stakeholder"),
            ));
        }
    }
    for n in g.nodes.values() {
        let ok = match n.kind {
            GoalKind::Need => n.horizon != Horizon::None,
            GoalKind::Requirement => n.horizon == Horizon::None,
            _ => true,
        };
        if !ok {
            out.push(Violation::new(
                ViolationCode::HorizonMismatch,
                &n.id,
                format!("{} `{}` cannot have horizon {}", n.kind, n.id, n.horizon.as_str()),
            ));
        }
    }
    for s in g.stakeholders.values() {
        if s.name.trim().is_empty() {
            out.push(Violation::new(ViolationCode::EmptyStakeholderName, &s.id, "stakeholder name is empty"));
        }
    }

    for e in &g.edges {
        let edge = format!("{} {} {}", e.from, e.kind.as_str(), e.to);
        if !g.nodes.contains_key(&e.to) {
            out.push(Violation::new(
                ViolationCode::UnknownNode,
                &e.to,
                format!("edge `{edge}` targets unknown goal node `{}`", e.to),
            ));
        }
        match e.kind {
            EdgeKind::Determines => {
                if !g.stakeholders.contains_key(&e.from) {
                    out.push(Violation::new(
                        ViolationCode::MisplacedDetermines,
                        &e.from,
                        format!("`{edge}`: determines edges must start at a stakeholder"),
                    ));
                }
            }
            EdgeKind::Derives | EdgeKind::Supports => {
                let Some(from) = g.nodes.get(&e.from) else {
                    out.push(Violation::new(
                        ViolationCode::UnknownNode,
                        &e.from,
                        format!("edge `{edge}` starts at unknown goal node `{}`", e.from),
                    ));
                    continue;
                };
                if e.kind == EdgeKind::Derives {
                    if let Some(to) = g.nodes.get(&e.to) {
                        if from.kind.rank() > to.kind.rank() {
                            out.push(Violation::new(
                                ViolationCode::LayeringViolation,
                                &e.from,
                                format!("`{edge}`: a {} cannot derive a {}", from.kind, to.kind),
                            ));
                        }
                    }
                }
            }
        }
    }
    for (goal, r) in &g.realizations {
        if !g.nodes.contains_key(goal) {
            out.push(Violation::new(
                ViolationCode::UnknownNode,
                goal,
                format!("realization `{goal} -> {r}` from unknown goal node"),
            ));
        }
    }

    for cycle in cycles(g) {
        out.push(Violation::new(
            ViolationCode::CycleDetected,
            &cycle[0],
            format!("cycle over derives/supports edges among {}", cycle.join(", ")),
        ));
    }

    // Every requirement must be derived (transitively) from some objective.
    let derives = g.successors(&[EdgeKind::Derives]);
    let mut from_objectives = BTreeSet::new();
    let mut stack: Vec<&str> = g
        .nodes
        .values()
        .filter(|n| n.kind == GoalKind::Objective)
        .map(|n| n.id.as_str())
        .collect();
    while let Some(n) = stack.pop() {
        for &next in derives.get(n).into_iter().flatten() {
            if from_objectives.insert(next) {
                stack.push(next);
            }
        }
    }
    for n in g.nodes.values() {
        if n.kind == GoalKind::Requirement && !from_objectives.contains(n.id.as_str()) {
            out.push(Violation::new(
                ViolationCode::UnderivedRequirement,
                &n.id,
                format!("requirement `{}` is not derived from any objective", n.id),
            ));
        }
    }
    out
}

/// Strongly connected groups (size > 1, or self-loops) over derives and
/// supports edges, each sorted, in order of their smallest member.
fn cycles(g: &GoalGraph) -> Vec<Vec<String>> {
    let adj = g.successors(&[EdgeKind::Derives, EdgeKind::Supports]);
    let reach = |from: &str| {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(n) = stack.pop() {
            for &next in adj.get(n).into_iter().flatten() {
                if seen.insert(next) {
                    stack.push(next);
                }
            }
        }
        seen
    };
    let reach_sets: BTreeMap<&str, BTreeSet<&str>> = adj.keys().map(|&n| (n, reach(n))).collect();
    let mut assigned = BTreeSet::new();
    let mut out = Vec::new();
    for (&n, r) in &reach_sets {
        if assigned.contains(n) || !r.contains(n) {
            continue;
        }
        let group: Vec<String> = r
            .iter()
            .filter(|m| reach_sets.get(*m).is_some_and(|rm| rm.contains(n)))
            .map(|m| m.to_string())
            .collect();
        assigned.extend(group.iter().cloned());
        out.push(group);
    }
    out
}

/// Every simple derivation path from a need to `node`, ordered
/// lexicographically by node ids. Paths have at least one edge.
pub fn trace(g: &GoalGraph, node: &str) -> Result<Vec<Vec<String>>, GoalError> {
    if !g.nodes.contains_key(node) {
        return Err(GoalError::UnknownNode(node.to_string()));
    }
    let adj = g.successors(&[EdgeKind::Derives]);
    let mut paths = Vec::new();
    for need in g.nodes.values().filter(|n| n.kind == GoalKind::Need) {
        let mut path = vec![need.id.as_str()];
        walk(&adj, node, &mut path, &mut paths);
    }
    paths.sort();
    Ok(paths)
}

fn walk<'a>(adj: &BTreeMap<&'a str, Vec<&'a str>>, target: &str, path: &mut Vec<&'a str>, out: &mut Vec<Vec<String>>) {
    let last = *path.last().unwrap();
    if path.len() > 1 && last == target {
        out.push(path.iter().map(|s| s.to_string()).collect());
        return;
    }
    for &next in adj.get(last).into_iter().flatten() {
        if !path.contains(&next) {
            path.push(next);
            walk(adj, target, path, out);
            path.pop();
        }
    }
}
