//! Strategy-labelled Petri nets and their structural checks.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::fragment::RefinementTree;
use crate::label::normalize_label;
use crate::strategy::Strategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlaceKind {
    Start,
    Intermediate,
    Exit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Place {
    pub id: String,
    /// Label as written in the source; see [`Place::key`] for comparisons.
    pub label: String,
    pub kind: PlaceKind,
}

impl Place {
    pub fn new(id: impl Into<String>, label: impl Into<String>, kind: PlaceKind) -> Self {
        Place {
            id: id.into(),
            label: label.into(),
            kind,
        }
    }

    pub fn key(&self) -> String {
        normalize_label(&self.label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub id: String,
    pub strategy: Strategy,
    pub inputs: BTreeSet<String>,
    pub outputs: BTreeSet<String>,
}

impl Transition {
    pub fn new<I, O>(id: impl Into<String>, strategy: Strategy, inputs: I, outputs: O) -> Self
    where
        I: IntoIterator,
        I::Item: Into<String>,
        O: IntoIterator,
        O::Item: Into<String>,
    {
        Transition {
            id: id.into(),
            strategy,
            inputs: inputs.into_iter().map(Into::into).collect(),
            outputs: outputs.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Intentional,
    Strategy,
    Operational,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Intentional => "intentional",
            Level::Strategy => "strategy",
            Level::Operational => "operational",
        }
    }

    pub fn parse(s: &str) -> Option<Level> {
        match s {
            "intentional" => Some(Level::Intentional),
            "strategy" => Some(Level::Strategy),
            "operational" => Some(Level::Operational),
            _ => None,
        }
    }
}

/// An As-Is or To-Be process. Transition order is significant: it fixes
/// fragment numbering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessModel {
    pub id: String,
    pub level: Level,
    pub places: Vec<Place>,
    pub transitions: Vec<Transition>,
    /// Refinements recorded against this model's fragments.
    pub refinements: Vec<RefinementTree>,
}

impl ProcessModel {
    pub fn new(id: impl Into<String>, level: Level) -> Self {
        ProcessModel {
            id: id.into(),
            level,
            places: Vec::new(),
            transitions: Vec::new(),
            refinements: Vec::new(),
        }
    }

    pub fn with_place(mut self, place: Place) -> Self {
        self.places.push(place);
        self
    }

    pub fn with_transition(mut self, transition: Transition) -> Self {
        self.transitions.push(transition);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty() && self.transitions.is_empty()
    }

    pub fn place(&self, id: &str) -> Option<&Place> {
        self.places.iter().find(|p| p.id == id)
    }

    pub fn transition(&self, id: &str) -> Option<&Transition> {
        self.transitions.iter().find(|t| t.id == id)
    }

    pub fn start(&self) -> Option<&Place> {
        self.places.iter().find(|p| p.kind == PlaceKind::Start)
    }

    pub fn exit(&self) -> Option<&Place> {
        self.places.iter().find(|p| p.kind == PlaceKind::Exit)
    }

    /// Looks a place up by its normalized label.
    pub fn place_by_label(&self, label: &str) -> Option<&Place> {
        let key = normalize_label(label);
        self.places.iter().find(|p| p.key() == key)
    }

    pub fn refinement(&self, parent: &str) -> Option<&RefinementTree> {
        self.refinements.iter().find(|r| r.parent == parent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationCode {
    DuplicatePlaceId,
    DuplicateTransitionId,
    DuplicateLabel,
    MissingStart,
    DuplicateStart,
    MissingExit,
    DuplicateExit,
    EmptyInputs,
    EmptyOutputs,
    UnknownPlace,
    UnreachablePlace,
    // goal graph
    CycleDetected,
    LayeringViolation,
    UnderivedRequirement,
    MisplacedDetermines,
    UnknownNode,
    HorizonMismatch,
    EmptyStakeholderName,
    DuplicateNodeId,
    // catalog
    EmptyProvides,
    // cross references
    DanglingReference,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::DuplicatePlaceId => "DuplicatePlaceId",
            ViolationCode::DuplicateTransitionId => "DuplicateTransitionId",
            ViolationCode::DuplicateLabel => "DuplicateLabel",
            ViolationCode::MissingStart => "MissingStart",
            ViolationCode::DuplicateStart => "DuplicateStart",
            ViolationCode::MissingExit => "MissingExit",
            ViolationCode::DuplicateExit => "DuplicateExit",
            ViolationCode::EmptyInputs => "EmptyInputs",
            ViolationCode::EmptyOutputs => "EmptyOutputs",
            ViolationCode::UnknownPlace => "UnknownPlace",
            ViolationCode::UnreachablePlace => "UnreachablePlace",
            ViolationCode::CycleDetected => "CycleDetected",
            ViolationCode::LayeringViolation => "LayeringViolation",
            ViolationCode::UnderivedRequirement => "UnderivedRequirement",
            ViolationCode::MisplacedDetermines => "MisplacedDetermines",
            ViolationCode::UnknownNode => "UnknownNode",
            ViolationCode::HorizonMismatch => "HorizonMismatch",
            ViolationCode::EmptyStakeholderName => "EmptyStakeholderName",
            ViolationCode::DuplicateNodeId => "DuplicateNodeId",
            ViolationCode::EmptyProvides => "EmptyProvides",
            ViolationCode::DanglingReference => "DanglingReference",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A broken invariant, reported as data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    /// Id of the offending element (place, transition, node or the model itself).
    pub element: String,
    pub message: String,
}

impl Violation {
    pub fn new(code: ViolationCode, element: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            code,
            element: element.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.code, self.element, self.message)
    }
}

/// Checks the structural invariants of a model.
///
/// A model with neither places nor transitions is accepted as empty.
/// Otherwise there must be exactly one start and one exit place, labels
/// must be unique after normalization, every arc must reference a declared
/// place, and every place must lie on some start-to-exit path of the
/// underlying graph.
pub fn validate_model(m: &ProcessModel) -> Vec<Violation> {
    let mut out = Vec::new();
    if m.is_empty() {
        return out;
    }

    let mut ids = BTreeSet::new();
    let mut labels: BTreeMap<String, &str> = BTreeMap::new();
    for p in &m.places {
        if !ids.insert(p.id.as_str()) {
            out.push(Violation::new(
                ViolationCode::DuplicatePlaceId,
                &p.id,
                format!("place id `{}` declared twice", p.id),
            ));
        }
        if let Some(first) = labels.insert(p.key(), &p.id) {
            out.push(Violation::new(
                ViolationCode::DuplicateLabel,
                &p.id,
                format!("label \"{}\" already used by place `{}`", p.label, first),
            ));
        }
    }

    let starts: Vec<&Place> = m.places.iter().filter(|p| p.kind == PlaceKind::Start).collect();
    let exits: Vec<&Place> = m.places.iter().filter(|p| p.kind == PlaceKind::Exit).collect();
    match starts.len() {
        0 => out.push(Violation::new(ViolationCode::MissingStart, &m.id, "no start place")),
        1 => {}
        _ => {
            for p in &starts[1..] {
                out.push(Violation::new(
                    ViolationCode::DuplicateStart,
                    &p.id,
                    format!("second start place `{}` (first is `{}`)", p.id, starts[0].id),
                ));
            }
        }
    }
    match exits.len() {
        0 => out.push(Violation::new(ViolationCode::MissingExit, &m.id, "no exit place")),
        1 => {}
        _ => {
            for p in &exits[1..] {
                out.push(Violation::new(
                    ViolationCode::DuplicateExit,
                    &p.id,
                    format!("second exit place `{}` (first is `{}`)", p.id, exits[0].id),
                ));
            }
        }
    }

    let mut tids = BTreeSet::new();
    for t in &m.transitions {
        if !tids.insert(t.id.as_str()) {
            out.push(Violation::new(
                ViolationCode::DuplicateTransitionId,
                &t.id,
                format!("transition id `{}` declared twice", t.id),
            ));
        }
        if t.inputs.is_empty() {
            out.push(Violation::new(ViolationCode::EmptyInputs, &t.id, "transition has no input place"));
        }
        if t.outputs.is_empty() {
            out.push(Violation::new(ViolationCode::EmptyOutputs, &t.id, "transition has no output place"));
        }
        for pid in t.inputs.iter().chain(&t.outputs) {
            if !ids.contains(pid.as_str()) {
                out.push(Violation::new(
                    ViolationCode::UnknownPlace,
                    &t.id,
                    format!("transition `{}` references undeclared place `{}`", t.id, pid),
                ));
            }
        }
    }

    // Path coverage is only meaningful once start and exit are unambiguous.
    if let ([start], [exit]) = (starts.as_slice(), exits.as_slice()) {
        let forward = graph_reach(m, &start.id, false);
        let backward = graph_reach(m, &exit.id, true);
        for p in &m.places {
            if !(forward.contains(p.id.as_str()) && backward.contains(p.id.as_str())) {
                out.push(Violation::new(
                    ViolationCode::UnreachablePlace,
                    &p.id,
                    format!("place `{}` is not on any path from start to exit", p.id),
                ));
            }
        }
    }
    out
}

/// Places reachable from `from` in the place/transition graph, ignoring
/// token semantics. `reverse` walks arcs backwards.
fn graph_reach<'a>(m: &'a ProcessModel, from: &'a str, reverse: bool) -> BTreeSet<&'a str> {
    let mut seen = BTreeSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(p) = queue.pop_front() {
        for t in &m.transitions {
            let (src, dst) = if reverse { (&t.outputs, &t.inputs) } else { (&t.inputs, &t.outputs) };
            if src.contains(p) {
                for q in dst {
                    if seen.insert(q.as_str()) {
                        queue.push_back(q.as_str());
                    }
                }
            }
        }
    }
    seen
}
