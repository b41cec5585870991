use std::fmt::Write;

use super::lexer::escape;
use crate::model::{PlaceKind, ProcessModel};
use crate::workspace::Workspace;

pub(crate) fn print(ws: &Workspace) -> String {
    let mut blocks: Vec<String> = Vec::new();
    if let Some(w) = &ws.weights {
        blocks.push(format!(
            "weights fragment={} goal={} component={}\n",
            w.fragment, w.goal, w.component
        ));
    }
    for g in ws.goals.values() {
        let mut b = format!("goals {}\n", g.id);
        for s in g.stakeholders.values() {
            let _ = write!(b, "  stakeholder {} {}", s.id, escape(&s.name));
            if !s.role.is_empty() {
                let _ = write!(b, " role={}", escape(&s.role));
            }
            b.push('\n');
        }
        for n in g.nodes.values() {
            let _ = write!(b, "  node {} {} {}", n.id, n.kind.as_str(), escape(&n.label));
            if n.horizon != n.kind.default_horizon() {
                let _ = write!(b, " horizon={}", n.horizon.as_str());
            }
            b.push('\n');
        }
        for e in &g.edges {
            let _ = writeln!(b, "  edge {} {} {}", e.from, e.kind.as_str(), e.to);
        }
        for (goal, r) in &g.realizations {
            let _ = writeln!(b, "  edge {goal} realized_by {r}");
        }
        blocks.push(b);
    }
    for m in ws.models.values() {
        blocks.push(net(m));
    }
    for c in ws.catalogs.values() {
        let mut b = format!("catalog {}\n", c.id);
        for comp in c.components.values() {
            let provides: Vec<_> = comp.provides.iter().map(|s| escape(s.raw())).collect();
            let _ = writeln!(
                b,
                "  component {} module={} provides={}",
                escape(&comp.name),
                escape(&comp.module),
                provides.join(", ")
            );
        }
        blocks.push(b);
    }
    for a in ws.aliases.values() {
        let mut b = format!("aliases {}\n", a.id);
        for (x, y) in &a.pairs {
            let _ = writeln!(b, "  alias {} = {}", escape(x), escape(y));
        }
        blocks.push(b);
    }
    for c in ws.cases.values() {
        let mut b = format!("case {}\n", c.id);
        for (name, v) in [
            ("enterprise_type", &c.enterprise_type),
            ("targeted_process", &c.targeted_process),
            ("project_type", &c.project_type),
        ] {
            if !v.is_empty() {
                let _ = writeln!(b, "  {name} {}", escape(v));
            }
        }
        for g in &c.goal_labels {
            let _ = writeln!(b, "  goal {}", escape(g));
        }
        for (kw, list) in [("asis", &c.asis_fragments), ("tobe", &c.tobe_fragments)] {
            for f in list {
                let _ = writeln!(
                    b,
                    "  {kw} {} {} -> {} {}",
                    f.id,
                    escape(&f.source),
                    escape(&f.target),
                    escape(f.strategy.raw())
                );
            }
        }
        for (fid, comp) in &c.component_map {
            let _ = writeln!(b, "  map {fid} {}", escape(comp));
        }
        if !c.notes.is_empty() {
            let _ = writeln!(b, "  notes {}", escape(&c.notes));
        }
        blocks.push(b);
    }
    blocks.join("\n")
}

fn net(m: &ProcessModel) -> String {
    let mut b = format!("net {} level={}\n", m.id, m.level.as_str());
    for p in &m.places {
        let _ = write!(b, "  place {} {}", p.id, escape(&p.label));
        match p.kind {
            PlaceKind::Start => b.push_str(" start"),
            PlaceKind::Exit => b.push_str(" exit"),
            PlaceKind::Intermediate => {}
        }
        b.push('\n');
    }
    for t in &m.transitions {
        let ins: Vec<_> = t.inputs.iter().map(String::as_str).collect();
        let outs: Vec<_> = t.outputs.iter().map(String::as_str).collect();
        let _ = writeln!(
            b,
            "  trans {} {} {} -> {}",
            t.id,
            escape(t.strategy.raw()),
            ins.join(", "),
            outs.join(", ")
        );
    }
    for r in &m.refinements {
        let kids: Vec<_> = r.children.iter().map(|c| escape(c.strategy.raw())).collect();
        let _ = writeln!(b, "  refine {} {}", r.parent, kids.join(", "));
    }
    b
}
