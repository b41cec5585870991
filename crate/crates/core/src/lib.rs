//! Goal-driven ERP implementation toolkit: strategy-labelled process
//! nets, goal graphs, As-Is / To-Be alignment and case-based reuse.

pub mod align;
pub mod dsl;
pub mod engine;
pub mod export;
pub mod fixtures;
pub mod fragment;
pub mod goal;
pub mod label;
pub mod model;
pub mod reuse;
pub mod strategy;
pub mod workspace;

pub use align::{
    align, classify_gap, map_components, support_check, AlignmentPair, AlignmentReport, AliasMap, Component,
    ComponentCatalog, ComponentMap, GapClass, SupportCheck,
};
pub use dsl::{parse, print, Diagnostic, Severity};
pub use engine::{enabled, fire, reachable, soundness_lite, Marking, Reachability, SoundnessReport};
pub use fragment::{extract_fragments, flatten, refine, Fragment, FragmentError, FragmentKey, RefinementTree};
pub use goal::{trace, validate_goals, EdgeKind, GoalEdge, GoalGraph, GoalKind, GoalNode, Horizon, Realization, Stakeholder};
pub use label::normalize_label;
pub use model::{validate_model, Level, Place, PlaceKind, ProcessModel, Transition, Violation, ViolationCode};
pub use reuse::{Case, Repository, SimilarityWeights};
pub use strategy::{normalize_strategy, Polarity, Strategy};
pub use workspace::{validate_workspace, Workspace};
