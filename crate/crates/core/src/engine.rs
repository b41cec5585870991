//! 1-safe token game over process models: enabling, firing, bounded
//! breadth-first reachability and a lightweight soundness check.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::model::{ProcessModel, Transition};

/// Exploration bound used when the caller does not pick one.
pub const DEFAULT_BOUND: usize = 1 << 16;

/// Set of marked place ids; each holds exactly one token.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Marking(BTreeSet<String>);

impl Marking {
    pub fn new<I, S>(places: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Marking(places.into_iter().map(Into::into).collect())
    }

    pub fn empty() -> Self {
        Marking::default()
    }

    pub fn contains(&self, place: &str) -> bool {
        self.0.contains(place)
    }

    pub fn places(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Marking is a subset of the model's places.
    pub fn is_valid_for(&self, m: &ProcessModel) -> bool {
        self.0.iter().all(|p| m.place(p).is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FireError {
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("firing `{transition}` would put a second token on `{place}`")]
    SafetyViolation { transition: String, place: String },
}

fn is_enabled(t: &Transition, marking: &Marking) -> bool {
    t.inputs.iter().all(|p| marking.contains(p))
}

/// Transitions whose every input place is marked.
pub fn enabled(m: &ProcessModel, marking: &Marking) -> BTreeSet<String> {
    m.transitions
        .iter()
        .filter(|t| is_enabled(t, marking))
        .map(|t| t.id.clone())
        .collect()
}

fn fire_transition(t: &Transition, marking: &Marking) -> Result<Marking, FireError> {
    if !is_enabled(t, marking) {
        return Err(FireError::NotEnabled(t.id.clone()));
    }
    let mut next = marking.0.clone();
    for p in &t.inputs {
        next.remove(p);
    }
    for p in &t.outputs {
        if !next.insert(p.clone()) {
            return Err(FireError::SafetyViolation {
                transition: t.id.clone(),
                place: p.clone(),
            });
        }
    }
    Ok(Marking(next))
}

/// Fires `transition`: consumes one token from each input, produces one on
/// each output.
pub fn fire(m: &ProcessModel, marking: &Marking, transition: &str) -> Result<Marking, FireError> {
    let t = m
        .transition(transition)
        .ok_or_else(|| FireError::UnknownTransition(transition.to_string()))?;
    fire_transition(t, marking)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reachability {
    /// Minimal-length firing sequence, lexicographically smallest by
    /// transition id among the minimal ones.
    Reachable(Vec<String>),
    Unreachable,
    /// The bound on distinct markings was hit before a verdict.
    Truncated,
}

/// Transitions sorted by id; exploration order.
fn by_id(m: &ProcessModel) -> Vec<&Transition> {
    let mut ts: Vec<&Transition> = m.transitions.iter().collect();
    ts.sort_by(|a, b| a.id.cmp(&b.id));
    ts
}

/// Breadth-first search of the marking graph, storing at most `bound`
/// distinct markings. Firings that would break 1-safety are not edges of
/// the marking graph.
pub fn reachable(m: &ProcessModel, from: &Marking, to: &Marking, bound: usize) -> Reachability {
    assert!(bound >= 1, "exploration bound must be at least 1");
    if from == to {
        return Reachability::Reachable(Vec::new());
    }
    let ts = by_id(m);
    let mut parent: HashMap<Marking, Option<(Marking, usize)>> = HashMap::new();
    parent.insert(from.clone(), None);
    let mut queue = VecDeque::from([from.clone()]);

    while let Some(cur) = queue.pop_front() {
        for (ti, t) in ts.iter().enumerate() {
            let Ok(next) = fire_transition(t, &cur) else {
                continue;
            };
            if parent.contains_key(&next) {
                continue;
            }
            if next == *to {
                let mut path = vec![ti];
                let mut at = cur.clone();
                while let Some(Some((prev, pti))) = parent.get(&at) {
                    path.push(*pti);
                    at = prev.clone();
                }
                path.reverse();
                return Reachability::Reachable(path.into_iter().map(|i| ts[i].id.clone()).collect());
            }
            // A dropped marking could hide a shorter witness, so stop here.
            if parent.len() >= bound {
                return Reachability::Truncated;
            }
            parent.insert(next.clone(), Some((cur.clone(), ti)));
            queue.push_back(next);
        }
    }
    Reachability::Unreachable
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundnessReport {
    pub exit_reachable: bool,
    pub dead_transitions: BTreeSet<String>,
    pub explored_markings: usize,
    pub truncated: bool,
}

impl SoundnessReport {
    pub fn is_sound(&self) -> bool {
        self.exit_reachable && self.dead_transitions.is_empty() && !self.truncated
    }
}

/// Explores from `{start}`: the exit marking `{exit}` must be reachable and
/// every transition must fire (safely) from some explored marking.
pub fn soundness_lite(m: &ProcessModel, bound: usize) -> SoundnessReport {
    assert!(bound >= 1, "exploration bound must be at least 1");
    let (Some(start), Some(exit)) = (m.start(), m.exit()) else {
        return SoundnessReport {
            exit_reachable: false,
            dead_transitions: m.transitions.iter().map(|t| t.id.clone()).collect(),
            explored_markings: 0,
            truncated: false,
        };
    };
    let initial = Marking::new([start.id.clone()]);
    let final_marking = Marking::new([exit.id.clone()]);
    let ts = by_id(m);

    let mut seen: BTreeSet<Marking> = BTreeSet::from([initial.clone()]);
    let mut queue = VecDeque::from([initial]);
    let mut live: BTreeSet<&str> = BTreeSet::new();
    let mut truncated = false;
    while let Some(cur) = queue.pop_front() {
        for t in &ts {
            let Ok(next) = fire_transition(t, &cur) else {
                continue;
            };
            live.insert(&t.id);
            if seen.contains(&next) {
                continue;
            }
            if seen.len() >= bound {
                truncated = true;
                continue;
            }
            seen.insert(next.clone());
            queue.push_back(next);
        }
    }
    SoundnessReport {
        exit_reachable: seen.contains(&final_marking),
        dead_transitions: ts
            .iter()
            .filter(|t| !live.contains(t.id.as_str()))
            .map(|t| t.id.clone())
            .collect(),
        explored_markings: seen.len(),
        truncated,
    }
}
