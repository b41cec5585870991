//! Process fragments: the `<source, target, strategy>` view of a net, and
//! hierarchical refinement of fragments into alternative sub-strategies.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::label::normalize_label;
use crate::model::{validate_model, ProcessModel, Transition, Violation};
use crate::strategy::{Polarity, Strategy};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    /// `PF<n>`, or dotted (`PF1.2`) for refinement children.
    pub id: String,
    pub source: String,
    pub target: String,
    pub strategy: Strategy,
}

/// Identity of a fragment irrespective of its id and label casing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FragmentKey {
    pub source: String,
    pub target: String,
    pub strategy: String,
    pub polarity: Polarity,
}

impl Fragment {
    pub fn new(id: impl Into<String>, source: impl Into<String>, target: impl Into<String>, strategy: Strategy) -> Self {
        Fragment {
            id: id.into(),
            source: source.into(),
            target: target.into(),
            strategy,
        }
    }

    pub fn source_key(&self) -> String {
        normalize_label(&self.source)
    }

    pub fn target_key(&self) -> String {
        normalize_label(&self.target)
    }

    pub fn key(&self) -> FragmentKey {
        FragmentKey {
            source: self.source_key(),
            target: self.target_key(),
            strategy: self.strategy.normalized().to_string(),
            polarity: self.strategy.polarity(),
        }
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <({}), ({}), {}>", self.id, self.source, self.target, self.strategy)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementTree {
    pub parent: String,
    pub children: Vec<Fragment>,
}

impl RefinementTree {
    pub fn strategies(&self) -> Vec<Strategy> {
        self.children.iter().map(|c| c.strategy.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FragmentError {
    #[error("model `{model}` is invalid ({} violation(s))", violations.len())]
    InvalidModel { model: String, violations: Vec<Violation> },
    #[error("no fragment `{0}` in model")]
    UnknownFragment(String),
    #[error("fragment `{0}` is already refined")]
    AlreadyRefined(String),
    #[error("refinement of `{0}` needs at least one child strategy")]
    NoChildren(String),
    #[error("duplicate child strategy \"{0}\"")]
    DuplicateChild(String),
    #[error("fragment `{fragment}` comes from multi-arc transition `{transition}` and cannot be refined on its own")]
    CompositeTransition { fragment: String, transition: String },
    #[error("refinement of `{0}` is not recorded on the model")]
    DanglingTree(String),
}

/// One fragment per (input, output) pair of every transition, numbered
/// `PF1..PFn` in transition order. Pairs within a transition are ordered
/// by normalized place label, inputs first.
pub fn extract_fragments(m: &ProcessModel) -> Result<Vec<Fragment>, FragmentError> {
    let violations = validate_model(m);
    if !violations.is_empty() {
        return Err(FragmentError::InvalidModel {
            model: m.id.clone(),
            violations,
        });
    }
    Ok(fragments_with_origin(m).into_iter().map(|(f, _)| f).collect())
}

/// Fragments tagged with the index of the transition they came from.
/// Assumes a structurally valid model; unknown places are skipped.
pub(crate) fn fragments_with_origin(m: &ProcessModel) -> Vec<(Fragment, usize)> {
    let mut out = Vec::new();
    for (idx, t) in m.transitions.iter().enumerate() {
        for (src, dst) in arc_pairs(m, t) {
            let id = format!("PF{}", out.len() + 1);
            out.push((Fragment::new(id, src, dst, t.strategy.clone()), idx));
        }
    }
    out
}

fn arc_pairs(m: &ProcessModel, t: &Transition) -> Vec<(String, String)> {
    let sorted = |ids: &BTreeSet<String>| {
        let mut v: Vec<_> = ids
            .iter()
            .filter_map(|id| m.place(id))
            .map(|p| (p.key(), p.id.clone(), p.label.clone()))
            .collect();
        v.sort();
        v.into_iter().map(|(_, _, label)| label).collect::<Vec<_>>()
    };
    let ins = sorted(&t.inputs);
    let outs = sorted(&t.outputs);
    ins.iter()
        .flat_map(|i| outs.iter().map(move |o| (i.clone(), o.clone())))
        .collect()
}

/// Splits fragment `parent` into alternative children sharing its
/// endpoints. Returns the model with the refinement recorded, and the tree.
pub fn refine(
    m: &ProcessModel,
    parent: &str,
    children: &[Strategy],
) -> Result<(ProcessModel, RefinementTree), FragmentError> {
    let fragments = extract_fragments(m)?;
    let parent_frag = fragments
        .iter()
        .find(|f| f.id == parent)
        .ok_or_else(|| FragmentError::UnknownFragment(parent.to_string()))?;
    if m.refinement(parent).is_some() {
        return Err(FragmentError::AlreadyRefined(parent.to_string()));
    }
    if children.is_empty() {
        return Err(FragmentError::NoChildren(parent.to_string()));
    }
    let mut seen = BTreeSet::new();
    for c in children {
        if !seen.insert(c.normalized()) {
            return Err(FragmentError::DuplicateChild(c.raw().to_string()));
        }
    }
    let t = origin_transition(m, parent).expect("fragment came from a transition");
    if t.inputs.len() * t.outputs.len() != 1 {
        return Err(FragmentError::CompositeTransition {
            fragment: parent.to_string(),
            transition: t.id.clone(),
        });
    }

    let tree = RefinementTree {
        parent: parent.to_string(),
        children: children
            .iter()
            .enumerate()
            .map(|(k, s)| {
                Fragment::new(
                    format!("{parent}.{}", k + 1),
                    parent_frag.source.clone(),
                    parent_frag.target.clone(),
                    s.clone(),
                )
            })
            .collect(),
    };
    let mut refined = m.clone();
    refined.refinements.push(tree.clone());
    Ok((refined, tree))
}

fn origin_transition<'m>(m: &'m ProcessModel, fragment: &str) -> Option<&'m Transition> {
    fragments_with_origin(m)
        .into_iter()
        .find(|(f, _)| f.id == fragment)
        .map(|(_, idx)| &m.transitions[idx])
}

/// Replaces the refined fragment's transition with one alternative
/// transition per child. Other recorded refinements are carried over with
/// their parent ids renumbered to the flattened model.
pub fn flatten(m: &ProcessModel, tree: &RefinementTree) -> Result<ProcessModel, FragmentError> {
    let dangling = || FragmentError::DanglingTree(tree.parent.clone());
    if m.refinement(&tree.parent) != Some(tree) {
        return Err(dangling());
    }
    let origins = fragments_with_origin(m);
    let idx = origins
        .iter()
        .find(|(f, _)| f.id == tree.parent)
        .map(|(_, idx)| *idx)
        .ok_or_else(dangling)?;
    let parent_t = &m.transitions[idx];

    let mut taken: BTreeSet<String> = m.transitions.iter().map(|t| t.id.clone()).collect();
    let mut replacement = Vec::with_capacity(tree.children.len());
    for (k, child) in tree.children.iter().enumerate() {
        let mut id = format!("{}.{}", parent_t.id, k + 1);
        while taken.contains(&id) {
            id.push('_');
        }
        taken.insert(id.clone());
        replacement.push(Transition {
            id,
            strategy: child.strategy.clone(),
            inputs: parent_t.inputs.clone(),
            outputs: parent_t.outputs.clone(),
        });
    }

    let mut out = m.clone();
    out.transitions.splice(idx..=idx, replacement);
    out.refinements.retain(|r| r.parent != tree.parent);

    // Fragments after the replaced one shift by (children - 1).
    let shift = tree.children.len() as isize - 1;
    let parent_pos = origins.iter().position(|(f, _)| f.id == tree.parent).unwrap();
    for r in &mut out.refinements {
        let Some(pos) = origins.iter().position(|(f, _)| f.id == r.parent) else {
            continue;
        };
        if pos > parent_pos {
            let new_parent = format!("PF{}", (pos as isize + 1 + shift) as usize);
            for (k, c) in r.children.iter_mut().enumerate() {
                c.id = format!("{new_parent}.{}", k + 1);
            }
            r.parent = new_parent;
        }
    }
    Ok(out)
}
