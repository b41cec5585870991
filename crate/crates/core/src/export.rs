//! Renderers: DOT graphs, fragment tables and alignment reports as text
//! or TSV. Output is byte-stable for equal input.

use std::fmt::Write;

use crate::align::{AlignmentReport, GapClass};
use crate::fragment::Fragment;
use crate::goal::{GoalGraph, GoalKind};
use crate::model::{PlaceKind, ProcessModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Tsv,
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// TSV cells cannot hold tabs or newlines; empty cells become `-`.
fn cell(s: &str) -> String {
    if s.is_empty() {
        return "-".to_string();
    }
    s.chars().map(|c| if c == '\t' || c == '\n' || c == '\r' { ' ' } else { c }).collect()
}

/// Places as circles (double circle for start and exit), transitions as
/// boxes labelled with their strategy.
pub fn model_to_dot(m: &ProcessModel) -> String {
    let mut out = format!("digraph {} {{\n", quote(&m.id));
    if m.is_empty() {
        out.push_str("}\n");
        return out;
    }
    out.push_str("  rankdir=LR;\n");
    let mut places: Vec<_> = m.places.iter().collect();
    places.sort_by(|a, b| a.id.cmp(&b.id));
    for p in places {
        let shape = match p.kind {
            PlaceKind::Intermediate => "circle",
            PlaceKind::Start | PlaceKind::Exit => "doublecircle",
        };
        let _ = writeln!(out, "  {} [shape={shape}, label={}];", quote(&format!("p:{}", p.id)), quote(&p.label));
    }
    let mut transitions: Vec<_> = m.transitions.iter().collect();
    transitions.sort_by(|a, b| a.id.cmp(&b.id));
    let mut arcs = Vec::new();
    for t in &transitions {
        let tid = format!("t:{}", t.id);
        let _ = writeln!(out, "  {} [shape=box, label={}];", quote(&tid), quote(t.strategy.raw()));
        for i in &t.inputs {
            arcs.push((format!("p:{i}"), tid.clone()));
        }
        for o in &t.outputs {
            arcs.push((tid.clone(), format!("p:{o}")));
        }
    }
    arcs.sort();
    for (a, b) in arcs {
        let _ = writeln!(out, "  {} -> {};", quote(&a), quote(&b));
    }
    out.push_str("}\n");
    out
}

fn goal_shape(k: GoalKind) -> &'static str {
    match k {
        GoalKind::Need => "ellipse",
        GoalKind::StrategicGoal => "hexagon",
        GoalKind::OperationalGoal => "octagon",
        GoalKind::ChangeGoal => "parallelogram",
        GoalKind::Objective => "diamond",
        GoalKind::Requirement => "note",
    }
}

/// One node per goal (shape by kind) and stakeholder, edges labelled by
/// kind, realizations as dashed edges to the realizing model or fragment.
pub fn goals_to_dot(g: &GoalGraph) -> String {
    let mut out = format!("digraph {} {{\n", quote(&g.id));
    if g.nodes.is_empty() && g.stakeholders.is_empty() {
        out.push_str("}\n");
        return out;
    }
    out.push_str("  rankdir=BT;\n");
    for s in g.stakeholders.values() {
        let _ = writeln!(out, "  {} [shape=house, label={}];", quote(&s.id), quote(&s.name));
    }
    for n in g.nodes.values() {
        let _ = writeln!(
            out,
            "  {} [shape={}, label={}];",
            quote(&n.id),
            goal_shape(n.kind),
            quote(&format!("{}\n{}", n.kind.as_str(), n.label))
        );
    }
    let targets: std::collections::BTreeSet<String> = g.realizations.iter().map(|(_, r)| r.to_string()).collect();
    for t in &targets {
        let _ = writeln!(out, "  {} [shape=component, label={}];", quote(&format!("r:{t}")), quote(t));
    }
    for e in &g.edges {
        let _ = writeln!(out, "  {} -> {} [label={}];", quote(&e.from), quote(&e.to), e.kind.as_str());
    }
    for (goal, r) in &g.realizations {
        let _ = writeln!(
            out,
            "  {} -> {} [style=dashed, label=realized_by];",
            quote(goal),
            quote(&format!("r:{r}"))
        );
    }
    out.push_str("}\n");
    out
}

/// One row per fragment: id, source, target, strategy, polarity.
pub fn fragments_table(fragments: &[Fragment], format: Format) -> String {
    let header = ["id", "source", "target", "strategy", "polarity"];
    let rows: Vec<[String; 5]> = fragments
        .iter()
        .map(|f| {
            [
                f.id.clone(),
                f.source.clone(),
                f.target.clone(),
                f.strategy.raw().to_string(),
                f.strategy.polarity().as_str().to_string(),
            ]
        })
        .collect();
    match format {
        Format::Tsv => tsv(&header, &rows),
        Format::Text => columns(&header, &rows),
    }
}

fn tsv<const N: usize>(header: &[&str; N], rows: &[[String; N]]) -> String {
    let mut out = header.join("\t");
    out.push('\n');
    for r in rows {
        let cells: Vec<_> = r.iter().map(|c| cell(c)).collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}

/// Space-padded columns; the last column is never padded.
fn columns<const N: usize>(header: &[&str; N], rows: &[[String; N]]) -> String {
    let mut widths = header.map(|h| h.chars().count());
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            s.push_str(c);
            if i + 1 < N {
                let pad = widths[i] - c.chars().count() + 2;
                s.extend(std::iter::repeat_n(' ', pad));
            }
        }
        s.push('\n');
        s
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

/// Reference fragment id and its providing components, one per line, as
/// `PF1<TAB>name`. Several providers share a cell, separated by spaces.
pub fn component_table(report: &AlignmentReport, reference: &[Fragment]) -> String {
    let mut out = String::new();
    for f in reference {
        let comps = report.component_map.components_for(&f.id);
        if !comps.is_empty() {
            let _ = writeln!(out, "{}\t{}", f.id, comps.join(" "));
        }
    }
    out
}

/// Alignment report. `reference` is the full reference fragment list, used
/// to order the component section.
pub fn alignment_report(report: &AlignmentReport, reference: &[Fragment], format: Format) -> String {
    match format {
        Format::Tsv => alignment_tsv(report),
        Format::Text => alignment_text(report, reference),
    }
}

fn triplet(f: &Fragment) -> String {
    format!("{} <({}), ({}), {}>", f.id, f.source, f.target, f.strategy.raw())
}

fn alignment_text(report: &AlignmentReport, reference: &[Fragment]) -> String {
    let mut out = String::from("pairs:\n");
    if report.pairs.is_empty() {
        out.push_str("  (none)\n");
    }
    for p in &report.pairs {
        let alt = if p.alternative { " (alternative)" } else { "" };
        let _ = writeln!(out, "  {}", triplet(&p.asis));
        let _ = writeln!(out, "    -> {}  {}{alt}", triplet(&p.reference), p.gap);
    }
    for (title, list) in [
        ("unmatched as-is", &report.unmatched_asis),
        ("unmatched reference", &report.unmatched_reference),
    ] {
        let _ = writeln!(out, "{title}:");
        if list.is_empty() {
            out.push_str("  (none)\n");
        }
        for f in list {
            let _ = writeln!(out, "  {}", triplet(f));
        }
    }
    let components = component_table(report, reference);
    if !components.is_empty() || !report.component_map.uncovered.is_empty() {
        out.push_str("components:\n");
        out.push_str(&components);
        if !report.component_map.uncovered.is_empty() {
            let _ = writeln!(out, "uncovered: {}", report.component_map.uncovered.join(", "));
        }
    }
    let matched = report.pairs.iter().map(|p| p.asis.id.as_str()).collect::<std::collections::BTreeSet<_>>();
    let total = matched.len() + report.unmatched_asis.len();
    let _ = writeln!(out, "coverage: {:.2} ({}/{})", report.coverage, matched.len(), total);
    out
}

/// Columns: id, source, target, asis_strategy, ref_strategy, gap,
/// components. The id is `asis/reference`, with `-` for a missing side.
fn alignment_tsv(report: &AlignmentReport) -> String {
    let header = ["id", "source", "target", "asis_strategy", "ref_strategy", "gap", "components"];
    let comps = |id: &str| report.component_map.components_for(id).join("; ");
    let mut rows: Vec<[String; 7]> = Vec::new();
    for p in &report.pairs {
        rows.push([
            format!("{}/{}", p.asis.id, p.reference.id),
            p.reference.source.clone(),
            p.reference.target.clone(),
            p.asis.strategy.raw().to_string(),
            p.reference.strategy.raw().to_string(),
            p.gap.to_string(),
            comps(&p.reference.id),
        ]);
    }
    for f in &report.unmatched_asis {
        rows.push([
            format!("{}/-", f.id),
            f.source.clone(),
            f.target.clone(),
            f.strategy.raw().to_string(),
            String::new(),
            "Unmatched".to_string(),
            String::new(),
        ]);
    }
    for f in &report.unmatched_reference {
        rows.push([
            format!("-/{}", f.id),
            f.source.clone(),
            f.target.clone(),
            String::new(),
            f.strategy.raw().to_string(),
            "Unmatched".to_string(),
            comps(&f.id),
        ]);
    }
    tsv(&header, &rows)
}

/// Count of pairs per gap class, in class order.
pub fn gap_summary(report: &AlignmentReport) -> Vec<(GapClass, usize)> {
    let mut counts = std::collections::BTreeMap::new();
    for p in &report.pairs {
        *counts.entry(p.gap).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}
