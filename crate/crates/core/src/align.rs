//! Compliance between an As-Is process and a reference (ERP) process:
//! fragments are paired on their endpoints, strategy differences are
//! classified as gaps, and reference fragments are mapped onto the catalog
//! components that provide their strategies.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::fragment::{extract_fragments, Fragment};
use crate::goal::GoalGraph;
use crate::label::normalize_label;
use crate::model::{Violation, ViolationCode};
use crate::strategy::{Polarity, Strategy};
use crate::workspace::Workspace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    /// ERP module the component belongs to, e.g. `PP` or `APO`.
    pub module: String,
    pub provides: Vec<Strategy>,
}

impl Component {
    pub fn provides_strategy(&self, s: &Strategy) -> bool {
        self.provides.iter().any(|p| p.equivalent(s))
    }
}

/// Reference-model components keyed by name.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComponentCatalog {
    pub id: String,
    pub components: BTreeMap<String, Component>,
}

impl ComponentCatalog {
    pub fn new(id: impl Into<String>) -> Self {
        ComponentCatalog {
            id: id.into(),
            components: BTreeMap::new(),
        }
    }

    pub fn with_component(mut self, c: Component) -> Self {
        self.components.insert(c.name.clone(), c);
        self
    }
}

pub fn validate_catalog(c: &ComponentCatalog) -> Vec<Violation> {
    c.components
        .values()
        .filter(|comp| comp.provides.is_empty())
        .map(|comp| {
            Violation::new(
                ViolationCode::EmptyProvides,
                &comp.name,
                format!("component \"{}\" provides no strategy", comp.name),
            )
        })
        .collect()
}

/// Declared equivalences between state labels of different models, e.g.
/// `"stock" = "stock product"`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AliasMap {
    pub id: String,
    pub pairs: Vec<(String, String)>,
}

impl AliasMap {
    pub fn new(id: impl Into<String>) -> Self {
        AliasMap {
            id: id.into(),
            pairs: Vec::new(),
        }
    }

    pub fn with_alias(mut self, a: impl Into<String>, b: impl Into<String>) -> Self {
        self.pairs.push((a.into(), b.into()));
        self
    }

    /// All pairs of several maps under one id.
    pub fn merged<'a>(id: impl Into<String>, maps: impl IntoIterator<Item = &'a AliasMap>) -> AliasMap {
        AliasMap {
            id: id.into(),
            pairs: maps.into_iter().flat_map(|m| m.pairs.iter().cloned()).collect(),
        }
    }

    /// Canonical representative of a label: the smallest normalized label
    /// in its alias class.
    pub fn resolve(&self, label: &str) -> String {
        let start = normalize_label(label);
        let edges: Vec<(String, String)> = self
            .pairs
            .iter()
            .map(|(a, b)| (normalize_label(a), normalize_label(b)))
            .collect();
        let mut class = BTreeSet::from([start.clone()]);
        let mut stack = vec![start];
        while let Some(cur) = stack.pop() {
            for (a, b) in &edges {
                let other = if *a == cur {
                    b
                } else if *b == cur {
                    a
                } else {
                    continue;
                };
                if class.insert(other.clone()) {
                    stack.push(other.clone());
                }
            }
        }
        class.into_iter().next().unwrap()
    }

    fn endpoints(&self, f: &Fragment) -> (String, String) {
        (self.resolve(&f.source), self.resolve(&f.target))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GapClass {
    NoGap,
    NegatedCapability,
    ManualToAutomated,
    StrategyMismatch,
}

impl GapClass {
    pub fn as_str(self) -> &'static str {
        match self {
            GapClass::NoGap => "NoGap",
            GapClass::NegatedCapability => "NegatedCapability",
            GapClass::ManualToAutomated => "ManualToAutomated",
            GapClass::StrategyMismatch => "StrategyMismatch",
        }
    }
}

impl fmt::Display for GapClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_gap(asis: &Strategy, reference: &Strategy) -> GapClass {
    if asis.equivalent(reference) {
        GapClass::NoGap
    } else {
        match asis.polarity() {
            Polarity::Negated => GapClass::NegatedCapability,
            Polarity::Manual => GapClass::ManualToAutomated,
            Polarity::Positive => GapClass::StrategyMismatch,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentPair {
    pub asis: Fragment,
    pub reference: Fragment,
    pub gap: GapClass,
    /// More than one reference fragment shares these endpoints.
    pub alternative: bool,
}

/// Reference fragment → providing components.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComponentMap {
    /// `(reference fragment id, component name)`, fragments in input order,
    /// components by name.
    pub entries: Vec<(String, String)>,
    /// Reference fragments no component provides.
    pub uncovered: Vec<String>,
}

impl ComponentMap {
    pub fn components_for(&self, fragment: &str) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(f, _)| f == fragment)
            .map(|(_, c)| c.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentReport {
    pub pairs: Vec<AlignmentPair>,
    pub unmatched_asis: Vec<Fragment>,
    pub unmatched_reference: Vec<Fragment>,
    pub component_map: ComponentMap,
    /// Share of As-Is fragments with at least one pair; 1.0 when there are
    /// no As-Is fragments.
    pub coverage: f64,
}

impl AlignmentReport {
    pub fn with_components(mut self, map: ComponentMap) -> Self {
        self.component_map = map;
        self
    }

    pub fn pairs_for_asis<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a AlignmentPair> + 'a {
        self.pairs.iter().filter(move |p| p.asis.id == id)
    }

    pub fn pairs_for_reference<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a AlignmentPair> + 'a {
        self.pairs.iter().filter(move |p| p.reference.id == id)
    }

    /// Any gap, unmatched As-Is fragment, or uncovered reference fragment.
    pub fn has_findings(&self) -> bool {
        self.pairs.iter().any(|p| p.gap != GapClass::NoGap)
            || !self.unmatched_asis.is_empty()
            || !self.component_map.uncovered.is_empty()
    }
}

/// Pairs every As-Is fragment with the reference fragments sharing its
/// (alias-resolved) endpoints. Pairs follow As-Is order; candidates for one
/// As-Is fragment are ordered by strategy label, then reference order.
pub fn align(asis: &[Fragment], reference: &[Fragment], aliases: &AliasMap) -> AlignmentReport {
    let ref_ends: Vec<(String, String)> = reference.iter().map(|f| aliases.endpoints(f)).collect();
    let mut used = vec![false; reference.len()];
    let mut pairs = Vec::new();
    let mut unmatched_asis = Vec::new();

    for a in asis {
        let ends = aliases.endpoints(a);
        let mut cands: Vec<usize> = (0..reference.len()).filter(|&i| ref_ends[i] == ends).collect();
        if cands.is_empty() {
            unmatched_asis.push(a.clone());
            continue;
        }
        cands.sort_by(|&i, &j| {
            let (si, sj) = (&reference[i].strategy, &reference[j].strategy);
            (si.normalized(), si.polarity(), si.raw(), i).cmp(&(sj.normalized(), sj.polarity(), sj.raw(), j))
        });
        let alternative = cands.len() > 1;
        for i in cands {
            used[i] = true;
            pairs.push(AlignmentPair {
                asis: a.clone(),
                reference: reference[i].clone(),
                gap: classify_gap(&a.strategy, &reference[i].strategy),
                alternative,
            });
        }
    }

    let coverage = if asis.is_empty() {
        1.0
    } else {
        (asis.len() - unmatched_asis.len()) as f64 / asis.len() as f64
    };
    AlignmentReport {
        pairs,
        unmatched_asis,
        unmatched_reference: reference
            .iter()
            .zip(&used)
            .filter(|(_, u)| !**u)
            .map(|(f, _)| f.clone())
            .collect(),
        component_map: ComponentMap::default(),
        coverage,
    }
}

/// Maps each reference fragment to every component providing its strategy.
pub fn map_components(reference: &[Fragment], catalog: &ComponentCatalog) -> ComponentMap {
    let mut map = ComponentMap::default();
    for f in reference {
        // BTreeMap iteration is already ordered by component name.
        let providers: Vec<&str> = catalog
            .components
            .values()
            .filter(|c| c.provides_strategy(&f.strategy))
            .map(|c| c.name.as_str())
            .collect();
        if providers.is_empty() {
            map.uncovered.push(f.id.clone());
        }
        for c in providers {
            map.entries.push((f.id.clone(), c.to_string()));
        }
    }
    map
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SupportCheck {
    /// Enterprise goals realized by a fragment whose gap no component closes.
    pub unsupported: Vec<String>,
    /// Enterprise goals with no realization link at all (warnings).
    pub unrealized: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SupportError {
    #[error("goal `{goal}` is realized by unknown model `{model}`")]
    UnknownModel { goal: String, model: String },
    #[error("goal `{goal}` is realized by unknown fragment `{model}:{fragment}`")]
    UnknownFragment { goal: String, model: String, fragment: String },
}

/// Flags enterprise goals whose realizing fragments carry a gap that no
/// catalog component resolves. Realizations pointing at models other than
/// the two aligned ones are ignored.
pub fn support_check(
    ws: &Workspace,
    goals: &GoalGraph,
    report: &AlignmentReport,
    asis_model: &str,
    reference_model: &str,
) -> Result<SupportCheck, SupportError> {
    let mut out = SupportCheck::default();
    for node in goals.nodes.values().filter(|n| n.kind.is_enterprise_goal()) {
        let links: Vec<_> = goals.realizations_of(&node.id).collect();
        if links.is_empty() {
            out.unrealized.push(node.id.clone());
            continue;
        }
        let mut flagged = false;
        for r in links {
            let model_id = r.model();
            let model = ws.models.get(model_id).ok_or_else(|| SupportError::UnknownModel {
                goal: node.id.clone(),
                model: model_id.to_string(),
            })?;
            let frags: Vec<String> = extract_fragments(model)
                .map(|fs| fs.into_iter().map(|f| f.id).collect())
                .unwrap_or_default();
            let realized: Vec<String> = match r {
                crate::goal::Realization::Model(_) => frags,
                crate::goal::Realization::Fragment { model, fragment } => {
                    if !frags.contains(fragment) {
                        return Err(SupportError::UnknownFragment {
                            goal: node.id.clone(),
                            model: model.clone(),
                            fragment: fragment.clone(),
                        });
                    }
                    vec![fragment.clone()]
                }
            };
            for fid in &realized {
                let unresolved = if model_id == reference_model {
                    reference_gap_unresolved(report, fid)
                } else if model_id == asis_model {
                    asis_gap_unresolved(report, fid)
                } else {
                    false
                };
                flagged |= unresolved;
            }
        }
        if flagged {
            out.unsupported.push(node.id.clone());
        }
    }
    Ok(out)
}

fn reference_gap_unresolved(report: &AlignmentReport, fid: &str) -> bool {
    let mut pairs = report.pairs_for_reference(fid).peekable();
    let has_gap = pairs.peek().is_none() || pairs.any(|p| p.gap != GapClass::NoGap);
    has_gap && report.component_map.components_for(fid).is_empty()
}

fn asis_gap_unresolved(report: &AlignmentReport, fid: &str) -> bool {
    let pairs: Vec<_> = report.pairs_for_asis(fid).collect();
    if pairs.iter().any(|p| p.gap == GapClass::NoGap) {
        return false;
    }
    !pairs
        .iter()
        .any(|p| !report.component_map.components_for(&p.reference.id).is_empty())
}
