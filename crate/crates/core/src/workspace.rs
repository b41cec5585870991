use std::collections::BTreeMap;

use thiserror::Error;

use crate::align::{validate_catalog, AliasMap, ComponentCatalog};
use crate::fragment::{fragments_with_origin, RefinementTree};
use crate::goal::{validate_goals, GoalGraph, Realization};
use crate::model::{validate_model, ProcessModel, Violation, ViolationCode};
use crate::reuse::{Case, SimilarityWeights};

/// Everything one `.roc` file can hold, each category keyed by id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Workspace {
    pub goals: BTreeMap<String, GoalGraph>,
    pub models: BTreeMap<String, ProcessModel>,
    pub catalogs: BTreeMap<String, ComponentCatalog>,
    pub aliases: BTreeMap<String, AliasMap>,
    pub cases: BTreeMap<String, Case>,
    /// Similarity weights for a case repository file.
    pub weights: Option<SimilarityWeights>,
}

/// Where a violation was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scope {
    Goals,
    Net,
    Catalog,
    Aliases,
    Case,
}

impl Scope {
    pub fn keyword(self) -> &'static str {
        match self {
            Scope::Goals => "goals",
            Scope::Net => "net",
            Scope::Catalog => "catalog",
            Scope::Aliases => "aliases",
            Scope::Case => "case",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScopedViolation {
    pub scope: Scope,
    /// Id of the enclosing block.
    pub owner: String,
    pub violation: Violation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorkspaceError {
    #[error("unknown goal graph `{0}`")]
    UnknownGoalGraph(String),
    #[error("unknown goal node `{0}`")]
    UnknownGoal(String),
    #[error("unknown realization target `{0}`")]
    UnknownTarget(String),
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.goals.is_empty()
            && self.models.is_empty()
            && self.catalogs.is_empty()
            && self.aliases.is_empty()
            && self.cases.is_empty()
            && self.weights.is_none()
    }

    /// Model exists, and so does the fragment if one is named.
    pub fn resolves(&self, r: &Realization) -> bool {
        match r {
            Realization::Model(m) => self.models.contains_key(m),
            Realization::Fragment { model, fragment } => self.models.get(model).is_some_and(|m| {
                fragments_with_origin(m).iter().any(|(f, _)| &f.id == fragment)
                    || m.refinements.iter().flat_map(|r| &r.children).any(|c| &c.id == fragment)
            }),
        }
    }

    /// Links a goal to a model or fragment of this workspace.
    pub fn link_realization(&self, graph: &str, goal: &str, target: Realization) -> Result<Workspace, WorkspaceError> {
        let g = self
            .goals
            .get(graph)
            .ok_or_else(|| WorkspaceError::UnknownGoalGraph(graph.to_string()))?;
        if !self.resolves(&target) {
            return Err(WorkspaceError::UnknownTarget(target.to_string()));
        }
        let linked = g
            .link_realization(goal, target)
            .map_err(|_| WorkspaceError::UnknownGoal(goal.to_string()))?;
        let mut ws = self.clone();
        ws.goals.insert(graph.to_string(), linked);
        Ok(ws)
    }

    /// All alias maps merged into one.
    pub fn all_aliases(&self) -> AliasMap {
        AliasMap::merged("all", self.aliases.values())
    }
}

/// Runs every module validator plus cross-reference checks.
pub fn validate_workspace(ws: &Workspace) -> Vec<ScopedViolation> {
    let mut out = Vec::new();
    let mut push = |scope, owner: &str, v| {
        out.push(ScopedViolation {
            scope,
            owner: owner.to_string(),
            violation: v,
        })
    };

    for g in ws.goals.values() {
        for v in validate_goals(g) {
            push(Scope::Goals, &g.id, v);
        }
        for (goal, r) in &g.realizations {
            if !ws.resolves(r) {
                push(
                    Scope::Goals,
                    &g.id,
                    Violation::new(
                        ViolationCode::DanglingReference,
                        goal,
                        format!("goal `{goal}` is realized by unknown target `{r}`"),
                    ),
                );
            }
        }
    }
    for m in ws.models.values() {
        let violations = validate_model(m);
        let valid = violations.is_empty();
        for v in violations {
            push(Scope::Net, &m.id, v);
        }
        if valid {
            for v in check_refinements(m) {
                push(Scope::Net, &m.id, v);
            }
        }
    }
    for c in ws.catalogs.values() {
        for v in validate_catalog(c) {
            push(Scope::Catalog, &c.id, v);
        }
    }
    for c in ws.cases.values() {
        for (fid, comp) in &c.component_map {
            if !c.tobe_fragments.iter().any(|f| &f.id == fid) {
                push(
                    Scope::Case,
                    &c.id,
                    Violation::new(
                        ViolationCode::DanglingReference,
                        fid,
                        format!("component \"{comp}\" mapped to unknown To-Be fragment `{fid}`"),
                    ),
                );
            }
        }
    }
    out
}

/// Recorded refinements must name a fragment of the model and keep its
/// endpoints.
fn check_refinements(m: &ProcessModel) -> Vec<Violation> {
    let frags = fragments_with_origin(m);
    let mut out = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for RefinementTree { parent, children } in &m.refinements {
        if !seen.insert(parent.as_str()) {
            out.push(Violation::new(
                ViolationCode::DanglingReference,
                parent,
                format!("fragment `{parent}` refined twice"),
            ));
            continue;
        }
        let Some((pf, idx)) = frags.iter().find(|(f, _)| &f.id == parent) else {
            out.push(Violation::new(
                ViolationCode::DanglingReference,
                parent,
                format!("refinement of unknown fragment `{parent}`"),
            ));
            continue;
        };
        let t = &m.transitions[*idx];
        if t.inputs.len() * t.outputs.len() != 1 {
            out.push(Violation::new(
                ViolationCode::DanglingReference,
                parent,
                format!("fragment `{parent}` comes from multi-arc transition `{}`", t.id),
            ));
        }
        for c in children {
            if c.source_key() != pf.source_key() || c.target_key() != pf.target_key() {
                out.push(Violation::new(
                    ViolationCode::DanglingReference,
                    &c.id,
                    format!("refinement child `{}` does not share the endpoints of `{parent}`", c.id),
                ));
            }
        }
    }
    out
}
