//! Case-based reuse of implementation cases: create, retrieve, compare,
//! adapt, test and retain, over a file-backed repository.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::align::{align, map_components, AlignmentReport, AliasMap, ComponentCatalog};
use crate::dsl::{self, Diagnostic};
use crate::fragment::{extract_fragments, Fragment, FragmentError, FragmentKey};
use crate::goal::{EdgeKind, GoalGraph};
use crate::label::normalize_label;
use crate::workspace::Workspace;

/// Environment variable naming the default repository file.
pub const REPO_ENV: &str = "ROC_REPO";

/// A stored implementation episode.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Case {
    pub id: String,
    pub enterprise_type: String,
    pub targeted_process: String,
    pub project_type: String,
    /// Normalized labels.
    pub goal_labels: BTreeSet<String>,
    pub asis_fragments: Vec<Fragment>,
    pub tobe_fragments: Vec<Fragment>,
    /// `(To-Be fragment id, component name)`.
    pub component_map: Vec<(String, String)>,
    pub notes: String,
}

impl Case {
    /// Has a solution that can be retained and reused.
    pub fn is_solved(&self) -> bool {
        !self.tobe_fragments.is_empty() && !self.component_map.is_empty()
    }

    pub fn component_names(&self) -> BTreeSet<&str> {
        self.component_map.iter().map(|(_, c)| c.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CaseError {
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("unknown catalog `{0}`")]
    UnknownCatalog(String),
    #[error("unknown goal graph `{0}`")]
    UnknownGoalGraph(String),
    #[error(transparent)]
    Fragment(#[from] FragmentError),
    #[error("case `{0}` has no To-Be fragments to reuse")]
    NoSolution(String),
}

/// Inputs for assembling a case from workspace artifacts.
#[derive(Debug, Clone, Default)]
pub struct CaseRequest<'a> {
    pub id: &'a str,
    pub enterprise_type: &'a str,
    pub targeted_process: &'a str,
    pub project_type: &'a str,
    pub notes: &'a str,
    pub asis_model: &'a str,
    pub tobe_model: Option<&'a str>,
    pub catalog: Option<&'a str>,
    pub goals: Option<&'a str>,
}

/// Assembles a case. Goal labels are those of the goals realized by either
/// model (or their fragments) together with every goal they derive from.
pub fn new_case(ws: &Workspace, req: &CaseRequest<'_>) -> Result<Case, CaseError> {
    let model = |id: &str| ws.models.get(id).ok_or_else(|| CaseError::UnknownModel(id.to_string()));
    let asis_fragments = extract_fragments(model(req.asis_model)?)?;
    let tobe_fragments = match req.tobe_model {
        Some(id) => extract_fragments(model(id)?)?,
        None => Vec::new(),
    };
    let component_map = match req.catalog {
        Some(id) => {
            let cat = ws.catalogs.get(id).ok_or_else(|| CaseError::UnknownCatalog(id.to_string()))?;
            map_components(&tobe_fragments, cat).entries
        }
        None => Vec::new(),
    };
    let goal_labels = match req.goals {
        Some(id) => {
            let g = ws.goals.get(id).ok_or_else(|| CaseError::UnknownGoalGraph(id.to_string()))?;
            let models: Vec<&str> = std::iter::once(req.asis_model).chain(req.tobe_model).collect();
            realized_goal_labels(g, &models)
        }
        None => BTreeSet::new(),
    };
    Ok(Case {
        id: req.id.to_string(),
        enterprise_type: req.enterprise_type.to_string(),
        targeted_process: req.targeted_process.to_string(),
        project_type: req.project_type.to_string(),
        goal_labels,
        asis_fragments,
        tobe_fragments,
        component_map,
        notes: req.notes.to_string(),
    })
}

fn realized_goal_labels(g: &GoalGraph, models: &[&str]) -> BTreeSet<String> {
    let mut frontier: Vec<&str> = g
        .realizations
        .iter()
        .filter(|(_, r)| models.contains(&r.model()))
        .map(|(goal, _)| goal.as_str())
        .collect();
    let mut seen: BTreeSet<&str> = frontier.iter().copied().collect();
    while let Some(n) = frontier.pop() {
        for e in g.edges.iter().filter(|e| e.kind == EdgeKind::Derives && e.to == n) {
            if seen.insert(&e.from) {
                frontier.push(&e.from);
            }
        }
    }
    seen.into_iter()
        .filter_map(|id| g.nodes.get(id))
        .map(|n| normalize_label(&n.label))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityWeights {
    pub fragment: f64,
    pub goal: f64,
    pub component: f64,
}

impl Default for SimilarityWeights {
    fn default() -> Self {
        SimilarityWeights {
            fragment: 0.5,
            goal: 0.3,
            component: 0.2,
        }
    }
}

impl SimilarityWeights {
    /// Non-negative and not all zero.
    pub fn is_valid(&self) -> bool {
        let ws = [self.fragment, self.goal, self.component];
        ws.iter().all(|w| w.is_finite() && *w >= 0.0) && ws.iter().sum::<f64>() > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityScore {
    pub total: f64,
    pub fragment: f64,
    pub goal: f64,
    pub component: f64,
}

/// |A ∩ B| / |A ∪ B|, with two empty sets counting as identical.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

fn asis_keys(c: &Case) -> BTreeSet<FragmentKey> {
    c.asis_fragments.iter().map(Fragment::key).collect()
}

pub fn similarity(a: &Case, b: &Case, weights: &SimilarityWeights) -> SimilarityScore {
    let fragment = jaccard(&asis_keys(a), &asis_keys(b));
    let goal = jaccard(&a.goal_labels, &b.goal_labels);
    let component = jaccard(&a.component_names(), &b.component_names());
    let sum = weights.fragment + weights.goal + weights.component;
    SimilarityScore {
        total: (weights.fragment * fragment + weights.goal * goal + weights.component * component) / sum,
        fragment,
        goal,
        component,
    }
}

/// Side-by-side view of a query and a retrieved case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseComparison {
    pub score: SimilarityScore,
    pub shared_fragments: Vec<FragmentKey>,
    pub only_in_query: Vec<FragmentKey>,
    pub only_in_retrieved: Vec<FragmentKey>,
}

pub fn compare(query: &Case, retrieved: &Case, weights: &SimilarityWeights) -> CaseComparison {
    let q = asis_keys(query);
    let r = asis_keys(retrieved);
    CaseComparison {
        score: similarity(query, retrieved, weights),
        shared_fragments: q.intersection(&r).cloned().collect(),
        only_in_query: q.difference(&r).cloned().collect(),
        only_in_retrieved: r.difference(&q).cloned().collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Adaptation {
    /// Solved To-Be fragments with endpoints renamed to the query's labels.
    pub proposal: Vec<Fragment>,
    /// Solved To-Be fragments whose endpoints the query lacks.
    pub non_transferable: Vec<Fragment>,
}

/// Transfers each solved To-Be fragment whose alias-resolved endpoints
/// occur among the query's As-Is endpoints.
pub fn adapt(solved: &Case, query: &Case, aliases: &AliasMap) -> Result<Adaptation, CaseError> {
    if solved.tobe_fragments.is_empty() {
        return Err(CaseError::NoSolution(solved.id.clone()));
    }
    let mut endpoints: BTreeMap<(String, String), (&str, &str)> = BTreeMap::new();
    for f in &query.asis_fragments {
        endpoints
            .entry((aliases.resolve(&f.source), aliases.resolve(&f.target)))
            .or_insert((&f.source, &f.target));
    }
    let mut out = Adaptation::default();
    for f in &solved.tobe_fragments {
        match endpoints.get(&(aliases.resolve(&f.source), aliases.resolve(&f.target))) {
            Some((src, dst)) => out.proposal.push(Fragment::new(f.id.clone(), *src, *dst, f.strategy.clone())),
            None => out.non_transferable.push(f.clone()),
        }
    }
    Ok(out)
}

/// Aligns a proposal against the query's As-Is fragments and, given a
/// catalog, maps it onto components.
pub fn test_solution(proposal: &[Fragment], query: &Case, catalog: Option<&ComponentCatalog>) -> AlignmentReport {
    let report = align(&query.asis_fragments, proposal, &AliasMap::default());
    match catalog {
        Some(c) => report.with_components(map_components(proposal, c)),
        None => report,
    }
}

#[derive(Debug, Error)]
pub enum RepoError {
    #[error("case `{0}` already in repository")]
    DuplicateId(String),
    #[error("case `{0}` has no solution (To-Be fragments and component map required)")]
    Unsolved(String),
    #[error("invalid similarity weights")]
    InvalidWeights,
    #[error("{}: {} parse error(s)", path.display(), diagnostics.len())]
    Parse { path: PathBuf, diagnostics: Vec<Diagnostic> },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Retained cases, optionally backed by a canonical `.roc` file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Repository {
    path: Option<PathBuf>,
    weights: SimilarityWeights,
    cases: BTreeMap<String, Case>,
}

impl Repository {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Loads `path`; a missing file is an empty repository.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, RepoError> {
        let path = path.as_ref().to_path_buf();
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(source) => return Err(RepoError::Io { path, source }),
        };
        let ws = dsl::parse(&text).map_err(|diagnostics| RepoError::Parse {
            path: path.clone(),
            diagnostics,
        })?;
        Ok(Repository {
            path: Some(path),
            weights: ws.weights.unwrap_or_default(),
            cases: ws.cases,
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn weights(&self) -> &SimilarityWeights {
        &self.weights
    }

    pub fn set_weights(&mut self, weights: SimilarityWeights) -> Result<(), RepoError> {
        if !weights.is_valid() {
            return Err(RepoError::InvalidWeights);
        }
        self.weights = weights;
        Ok(())
    }

    pub fn cases(&self) -> impl Iterator<Item = &Case> {
        self.cases.values()
    }

    pub fn get(&self, id: &str) -> Option<&Case> {
        self.cases.get(id)
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    /// Top `k` cases by total similarity, ties by case id.
    pub fn retrieve(&self, query: &Case, k: usize) -> Vec<(&Case, SimilarityScore)> {
        let mut ranked: Vec<_> = self
            .cases
            .values()
            .map(|c| (c, similarity(query, c, &self.weights)))
            .collect();
        ranked.sort_by(|(a, sa), (b, sb)| sb.total.total_cmp(&sa.total).then_with(|| a.id.cmp(&b.id)));
        ranked.truncate(k);
        ranked
    }

    /// Adds a solved case and, when file-backed, rewrites the file. On any
    /// error the repository is left unchanged.
    pub fn retain(&mut self, case: Case) -> Result<(), RepoError> {
        if self.cases.contains_key(&case.id) {
            return Err(RepoError::DuplicateId(case.id));
        }
        if !case.is_solved() {
            return Err(RepoError::Unsolved(case.id));
        }
        let id = case.id.clone();
        self.cases.insert(id.clone(), case);
        if let Err(e) = self.save() {
            self.cases.remove(&id);
            return Err(e);
        }
        Ok(())
    }

    pub fn to_workspace(&self) -> Workspace {
        Workspace {
            cases: self.cases.clone(),
            weights: (self.weights != SimilarityWeights::default()).then_some(self.weights),
            ..Workspace::default()
        }
    }

    /// Writes the canonical text via a temporary file and rename.
    pub fn save(&self) -> Result<(), RepoError> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let text = dsl::print(&self.to_workspace());
        let tmp = path.with_extension("roc.tmp");
        fs::write(&tmp, text)
            .and_then(|_| fs::rename(&tmp, path))
            .map_err(|source| RepoError::Io {
                path: path.clone(),
                source,
            })
    }
}
