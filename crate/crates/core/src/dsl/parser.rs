use std::collections::{BTreeSet, HashMap};

use super::lexer::{tokenize, Tok, Token};
use super::Diagnostic;
use crate::align::{AliasMap, Component, ComponentCatalog};
use crate::fragment::{refine, Fragment};
use crate::goal::{EdgeKind, GoalEdge, GoalGraph, GoalKind, GoalNode, Horizon, Realization, Stakeholder};
use crate::label::normalize_label;
use crate::model::{validate_model, Level, Place, PlaceKind, ProcessModel, Transition, ViolationCode};
use crate::reuse::{Case, SimilarityWeights};
use crate::strategy::{normalize_strategy, Strategy};
use crate::workspace::{validate_workspace, Scope, Workspace};

type Pos = (usize, usize);

/// Cursor over one line's tokens.
struct Cursor<'a> {
    line: usize,
    toks: &'a [Token],
    at: usize,
    /// Column just past the end of the line, for "expected X" at EOL.
    eol: usize,
}

type Res<T> = Result<T, Diagnostic>;

impl<'a> Cursor<'a> {
    fn err_at(&self, col: usize, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::error(self.line, col, msg)
    }

    fn col(&self) -> usize {
        self.toks.get(self.at).map_or(self.eol, |t| t.col)
    }

    fn pos(&self) -> Pos {
        (self.line, self.col())
    }

    fn unexpected(&self, what: &str) -> Diagnostic {
        match self.toks.get(self.at) {
            Some(t) => self.err_at(t.col, format!("expected {what}, found {}", t.tok.describe())),
            None => self.err_at(self.eol, format!("expected {what} at end of line")),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    fn ident(&mut self, what: &str) -> Res<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn string(&mut self, what: &str) -> Res<String> {
        match self.peek() {
            Some(Tok::Str(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn punct(&mut self, tok: Tok, what: &str) -> Res<()> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    /// `name=` prefix of an attribute.
    fn attr(&mut self, name: &str) -> Res<()> {
        if !self.at_keyword(name) {
            return Err(self.unexpected(&format!("`{name}=`")));
        }
        self.at += 1;
        self.punct(Tok::Eq, "`=`")
    }

    fn done(&self) -> Res<()> {
        match self.toks.get(self.at) {
            None => Ok(()),
            Some(t) => Err(self.err_at(t.col, format!("unexpected {}", t.tok.describe()))),
        }
    }

    /// Comma-separated list of at least one item.
    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Res<T>) -> Res<Vec<T>> {
        let mut v = vec![item(self)?];
        while self.eat(&Tok::Comma) {
            v.push(item(self)?);
        }
        Ok(v)
    }

    fn strategy(&mut self, what: &str) -> Res<Strategy> {
        let col = self.col();
        let raw = self.string(what)?;
        normalize_strategy(&raw).map_err(|e| self.err_at(col, format!("{what}: {e}")))
    }
}

struct NetBuilder {
    model: ProcessModel,
    /// `(place id, pos)` for every arc endpoint.
    refs: Vec<(String, Pos)>,
    refines: Vec<(Pos, String, Vec<Strategy>)>,
}

struct GoalsBuilder {
    graph: GoalGraph,
    edge_refs: Vec<(GoalEdge, Pos, Pos)>,
    realizations: Vec<(String, Realization, Pos, Pos)>,
}

struct CaseBuilder {
    case: Case,
    scalars: BTreeSet<&'static str>,
    maps: Vec<(String, Pos)>,
}

enum Block {
    Net(NetBuilder),
    Goals(GoalsBuilder),
    Catalog(ComponentCatalog),
    Aliases(AliasMap),
    Case(CaseBuilder),
}

#[derive(Default)]
struct Parser {
    diags: Vec<Diagnostic>,
    ws: Workspace,
    block: Option<(Block, Pos)>,
    /// Positions of block headers and their elements.
    spans: HashMap<(Scope, String, String), Pos>,
    pending_nets: Vec<(NetBuilder, Pos)>,
    pending_goals: Vec<GoalsBuilder>,
    pending_cases: Vec<CaseBuilder>,
    weights_seen: bool,
}

pub(crate) fn parse_text(text: &str) -> (Workspace, Vec<Diagnostic>) {
    let mut p = Parser::default();
    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let toks = match tokenize(line) {
            Ok(t) => t,
            Err((col, msg)) => {
                p.diags.push(Diagnostic::error(line_no, col, msg));
                continue;
            }
        };
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor {
            line: line_no,
            toks: &toks,
            at: 0,
            eol: line.chars().count() + 1,
        };
        if let Err(d) = p.statement(&mut cur) {
            p.diags.push(d);
        }
    }
    p.close_block();
    p.resolve();
    p.diags.sort_by_key(|d| (d.line, d.column, d.severity));
    (p.ws, p.diags)
}

impl Parser {
    fn statement(&mut self, c: &mut Cursor<'_>) -> Res<()> {
        let pos = c.pos();
        let kw = c.ident("a keyword")?;
        match kw.as_str() {
            "net" | "goals" | "catalog" | "aliases" | "case" => self.header(c, &kw, pos),
            "weights" => {
                self.close_block();
                self.weights(c, pos)
            }
            _ => {
                let Some((block, _)) = self.block.as_mut() else {
                    return Err(c.err_at(pos.1, format!("`{kw}` outside of any block")));
                };
                match block {
                    Block::Net(b) => net_member(b, &kw, c, pos, &mut self.spans),
                    Block::Goals(b) => goals_member(b, &kw, c, pos, &mut self.spans),
                    Block::Catalog(cat) => catalog_member(cat, &kw, c, pos, &mut self.spans),
                    Block::Aliases(a) => alias_member(a, &kw, c, pos),
                    Block::Case(b) => case_member(b, &kw, c, pos, &mut self.spans),
                }
            }
        }
    }

    fn header(&mut self, c: &mut Cursor<'_>, kw: &str, pos: Pos) -> Res<()> {
        self.close_block();
        let id = c.ident("an id")?;
        let (scope, taken) = match kw {
            "net" => (Scope::Net, self.ws.models.contains_key(&id) || self.pending_nets.iter().any(|(n, _)| n.model.id == id)),
            "goals" => (Scope::Goals, self.ws.goals.contains_key(&id) || self.pending_goals.iter().any(|g| g.graph.id == id)),
            "catalog" => (Scope::Catalog, self.ws.catalogs.contains_key(&id)),
            "aliases" => (Scope::Aliases, self.ws.aliases.contains_key(&id)),
            _ => (Scope::Case, self.ws.cases.contains_key(&id) || self.pending_cases.iter().any(|b| b.case.id == id)),
        };
        if taken {
            return Err(c.err_at(pos.1, format!("duplicate {kw} id `{id}`")));
        }
        let block = match scope {
            Scope::Net => {
                let level = if c.at_keyword("level") {
                    c.attr("level")?;
                    let col = c.col();
                    let l = c.ident("a level")?;
                    Level::parse(&l).ok_or_else(|| {
                        c.err_at(col, format!("unknown level `{l}` (intentional, strategy or operational)"))
                    })?
                } else {
                    Level::Strategy
                };
                Block::Net(NetBuilder {
                    model: ProcessModel::new(id.clone(), level),
                    refs: Vec::new(),
                    refines: Vec::new(),
                })
            }
            Scope::Goals => Block::Goals(GoalsBuilder {
                graph: GoalGraph::new(id.clone()),
                edge_refs: Vec::new(),
                realizations: Vec::new(),
            }),
            Scope::Catalog => Block::Catalog(ComponentCatalog::new(id.clone())),
            Scope::Aliases => Block::Aliases(AliasMap::new(id.clone())),
            Scope::Case => Block::Case(CaseBuilder {
                case: Case {
                    id: id.clone(),
                    ..Case::default()
                },
                scalars: BTreeSet::new(),
                maps: Vec::new(),
            }),
        };
        c.done()?;
        self.spans.insert((scope, id, String::new()), pos);
        self.block = Some((block, pos));
        Ok(())
    }

    fn weights(&mut self, c: &mut Cursor<'_>, pos: Pos) -> Res<()> {
        if self.weights_seen {
            return Err(c.err_at(pos.1, "duplicate `weights` directive"));
        }
        let num = |c: &mut Cursor<'_>, name: &str| -> Res<f64> {
            c.attr(name)?;
            let col = c.col();
            let s = c.ident("a number")?;
            s.parse::<f64>().map_err(|_| c.err_at(col, format!("`{s}` is not a number")))
        };
        let w = SimilarityWeights {
            fragment: num(c, "fragment")?,
            goal: num(c, "goal")?,
            component: num(c, "component")?,
        };
        c.done()?;
        if !w.is_valid() {
            return Err(c.err_at(pos.1, "weights must be non-negative and not all zero"));
        }
        self.weights_seen = true;
        self.ws.weights = Some(w);
        Ok(())
    }

    fn close_block(&mut self) {
        let Some((block, pos)) = self.block.take() else {
            return;
        };
        match block {
            Block::Net(b) => self.pending_nets.push((b, pos)),
            Block::Goals(b) => self.pending_goals.push(b),
            Block::Catalog(cat) => {
                self.ws.catalogs.insert(cat.id.clone(), cat);
            }
            Block::Aliases(a) => {
                self.ws.aliases.insert(a.id.clone(), a);
            }
            Block::Case(b) => self.pending_cases.push(b),
        }
    }

    fn span(&self, scope: Scope, owner: &str, element: &str) -> Pos {
        self.spans
            .get(&(scope, owner.to_string(), element.to_string()))
            .or_else(|| self.spans.get(&(scope, owner.to_string(), String::new())))
            .copied()
            .unwrap_or((1, 1))
    }

    /// Reference resolution and validation once every block is read.
    fn resolve(&mut self) {
        for (mut b, _) in std::mem::take(&mut self.pending_nets) {
            let id = b.model.id.clone();
            let declared: BTreeSet<&str> = b.model.places.iter().map(|p| p.id.as_str()).collect();
            for (pid, (line, col)) in &b.refs {
                if !declared.contains(pid.as_str()) {
                    self.diags
                        .push(Diagnostic::error(*line, *col, format!("undeclared place `{pid}` in net `{id}`")));
                }
            }
            let violations = validate_model(&b.model);
            let valid = violations.is_empty();
            for v in violations {
                if v.code == ViolationCode::UnknownPlace {
                    continue;
                }
                let (line, col) = self.span(Scope::Net, &id, &v.element);
                self.diags
                    .push(Diagnostic::error(line, col, format!("net `{id}`: {}: {}", v.code, v.message)));
            }
            if valid {
                for ((line, col), parent, children) in std::mem::take(&mut b.refines) {
                    match refine(&b.model, &parent, &children) {
                        Ok((m, _)) => b.model = m,
                        Err(e) => self.diags.push(Diagnostic::error(line, col, format!("net `{id}`: {e}"))),
                    }
                }
            } else if let Some(((line, col), _, _)) = b.refines.first() {
                
                self.diags.push(Diagnostic::warning(
                    *line,
                    *col,
                    format!("net `{id}`: refinements skipped because the net is invalid"),
                ));
            }
            self.ws.models.insert(id, b.model);
        }

        for b in std::mem::take(&mut self.pending_goals) {
            let g = &b.graph;
            for (e, from_pos, to_pos) in &b.edge_refs {
                let from_ok = match e.kind {
                    EdgeKind::Determines => g.stakeholders.contains_key(&e.from) || g.nodes.contains_key(&e.from),
                    _ => g.nodes.contains_key(&e.from) || g.stakeholders.contains_key(&e.from),
                };
                if !from_ok {
                    self.diags.push(Diagnostic::error(
                        from_pos.0,
                        from_pos.1,
                        format!("goals `{}`: unknown node `{}`", g.id, e.from),
                    ));
                }
                if !g.nodes.contains_key(&e.to) {
                    self.diags.push(Diagnostic::error(
                        to_pos.0,
                        to_pos.1,
                        format!("goals `{}`: unknown node `{}`", g.id, e.to),
                    ));
                }
            }
            for (goal, r, goal_pos, target_pos) in &b.realizations {
                if !g.nodes.contains_key(goal) {
                    self.diags.push(Diagnostic::error(
                        goal_pos.0,
                        goal_pos.1,
                        format!("goals `{}`: unknown node `{goal}`", g.id),
                    ));
                }
                if !self.ws.resolves(r) {
                    self.diags.push(Diagnostic::error(
                        target_pos.0,
                        target_pos.1,
                        format!("goals `{}`: unknown realization target `{r}`", g.id),
                    ));
                }
            }
            self.ws.goals.insert(b.graph.id.clone(), b.graph);
        }

        for b in std::mem::take(&mut self.pending_cases) {
            for (fid, (line, col)) in &b.maps {
                if !b.case.tobe_fragments.iter().any(|f| &f.id == fid) {
                    self.diags.push(Diagnostic::error(
                        *line,
                        *col,
                        format!("case `{}`: unknown To-Be fragment `{fid}`", b.case.id),
                    ));
                }
            }
            self.ws.cases.insert(b.case.id.clone(), b.case);
        }

        for sv in validate_workspace(&self.ws) {
            let code = sv.violation.code;
            let covered = sv.scope == Scope::Net
                || matches!(code, ViolationCode::UnknownNode | ViolationCode::DanglingReference);
            if covered {
                continue;
            }
            let (line, col) = self.span(sv.scope, &sv.owner, &sv.violation.element);
            self.diags.push(Diagnostic::error(
                line,
                col,
                format!("{} `{}`: {}: {}", sv.scope.keyword(), sv.owner, code, sv.violation.message),
            ));
        }
    }
}

fn net_member(
    b: &mut NetBuilder,
    kw: &str,
    c: &mut Cursor<'_>,
    pos: Pos,
    spans: &mut HashMap<(Scope, String, String), Pos>,
) -> Res<()> {
    let owner = b.model.id.clone();
    match kw {
        "place" => {
            let id_pos = c.pos();
            let id = c.ident("a place id")?;
            let label = c.string("a place label")?;
            let kind = if c.at_keyword("start") {
                c.at += 1;
                PlaceKind::Start
            } else if c.at_keyword("exit") {
                c.at += 1;
                PlaceKind::Exit
            } else {
                PlaceKind::Intermediate
            };
            c.done()?;
            spans.entry((Scope::Net, owner, id.clone())).or_insert(id_pos);
            b.model.places.push(Place { id, label, kind });
        }
        "trans" => {
            let id_pos = c.pos();
            let id = c.ident("a transition id")?;
            let strategy = c.strategy("a strategy")?;
            let mut place_ref = |c: &mut Cursor<'_>| -> Res<(String, Pos)> {
                let p = c.pos();
                Ok((c.ident("a place id")?, p))
            };
            let inputs = c.list(&mut place_ref)?;
            c.punct(Tok::Arrow, "`->`")?;
            let outputs = c.list(&mut place_ref)?;
            c.done()?;
            spans.entry((Scope::Net, owner, id.clone())).or_insert(id_pos);
            b.refs.extend(inputs.iter().chain(&outputs).cloned());
            b.model.transitions.push(Transition {
                id,
                strategy,
                inputs: inputs.into_iter().map(|(p, _)| p).collect(),
                outputs: outputs.into_iter().map(|(p, _)| p).collect(),
            });
        }
        "refine" => {
            let parent = c.ident("a fragment id")?;
            let children = c.list(|c| c.strategy("a child strategy"))?;
            c.done()?;
            b.refines.push((pos, parent, children));
        }
        _ => return Err(c.err_at(pos.1, format!("unknown net statement `{kw}`"))),
    }
    Ok(())
}

fn goals_member(
    b: &mut GoalsBuilder,
    kw: &str,
    c: &mut Cursor<'_>,
    pos: Pos,
    spans: &mut HashMap<(Scope, String, String), Pos>,
) -> Res<()> {
    let owner = b.graph.id.clone();
    let g = &mut b.graph;
    match kw {
        "stakeholder" => {
            let id_pos = c.pos();
            let id = c.ident("a stakeholder id")?;
            let name = c.string("a stakeholder name")?;
            let role = if c.at_keyword("role") {
                c.attr("role")?;
                c.string("a role")?
            } else {
                String::new()
            };
            c.done()?;
            if g.stakeholders.contains_key(&id) || g.nodes.contains_key(&id) {
                return Err(c.err_at(id_pos.1, format!("duplicate id `{id}` in goals `{owner}`")));
            }
            spans.insert((Scope::Goals, owner, id.clone()), id_pos);
            g.stakeholders.insert(id.clone(), Stakeholder { id, name, role });
        }
        "node" => {
            let id_pos = c.pos();
            let id = c.ident("a node id")?;
            let kind_col = c.col();
            let kind_s = c.ident("a node kind")?;
            let kind = GoalKind::parse(&kind_s).ok_or_else(|| {
                let all: Vec<_> = GoalKind::ALL.iter().map(|k| k.as_str()).collect();
                c.err_at(kind_col, format!("unknown node kind `{kind_s}` (one of {})", all.join(", ")))
            })?;
            let label = c.string("a node label")?;
            let horizon = if c.at_keyword("horizon") {
                c.attr("horizon")?;
                let hcol = c.col();
                let h = c.ident("a horizon")?;
                Horizon::parse(&h).ok_or_else(|| c.err_at(hcol, format!("unknown horizon `{h}`")))?
            } else {
                kind.default_horizon()
            };
            c.done()?;
            if g.stakeholders.contains_key(&id) || g.nodes.contains_key(&id) {
                return Err(c.err_at(id_pos.1, format!("duplicate id `{id}` in goals `{owner}`")));
            }
            spans.insert((Scope::Goals, owner, id.clone()), id_pos);
            g.nodes.insert(
                id.clone(),
                GoalNode {
                    id,
                    label,
                    kind,
                    horizon,
                },
            );
        }
        "edge" => {
            let from_pos = c.pos();
            let from = c.ident("a node id")?;
            let kind_col = c.col();
            let kind_s = c.ident("an edge kind")?;
            let to_pos = c.pos();
            if kind_s == "realized_by" {
                let model = c.ident("a model id")?;
                let target = if c.eat(&Tok::Colon) {
                    Realization::Fragment {
                        model,
                        fragment: c.ident("a fragment id")?,
                    }
                } else {
                    Realization::Model(model)
                };
                c.done()?;
                b.realizations.push((from.clone(), target.clone(), from_pos, to_pos));
                g.realizations.insert((from, target));
                return Ok(());
            }
            let kind = EdgeKind::parse(&kind_s).ok_or_else(|| {
                c.err_at(
                    kind_col,
                    format!("unknown edge kind `{kind_s}` (derives, supports, determines or realized_by)"),
                )
            })?;
            let to = c.ident("a node id")?;
            c.done()?;
            let edge = GoalEdge { from, kind, to };
            b.edge_refs.push((edge.clone(), from_pos, to_pos));
            g.edges.insert(edge);
        }
        _ => return Err(c.err_at(pos.1, format!("unknown goals statement `{kw}`"))),
    }
    Ok(())
}

fn catalog_member(
    cat: &mut ComponentCatalog,
    kw: &str,
    c: &mut Cursor<'_>,
    pos: Pos,
    spans: &mut HashMap<(Scope, String, String), Pos>,
) -> Res<()> {
    if kw != "component" {
        return Err(c.err_at(pos.1, format!("unknown catalog statement `{kw}`")));
    }
    let name_col = c.col();
    let name = c.string("a component name")?;
    c.attr("module")?;
    let module = c.string("a module name")?;
    c.attr("provides")?;
    let provides = c.list(|c| c.strategy("a provided strategy"))?;
    c.done()?;
    if cat.components.contains_key(&name) {
        return Err(c.err_at(name_col, format!("duplicate component \"{name}\"")));
    }
    spans.insert((Scope::Catalog, cat.id.clone(), name.clone()), (pos.0, name_col));
    cat.components.insert(name.clone(), Component { name, module, provides });
    Ok(())
}

fn alias_member(a: &mut AliasMap, kw: &str, c: &mut Cursor<'_>, pos: Pos) -> Res<()> {
    if kw != "alias" {
        return Err(c.err_at(pos.1, format!("unknown aliases statement `{kw}`")));
    }
    let left = c.string("a state label")?;
    c.punct(Tok::Eq, "`=`")?;
    let right = c.string("a state label")?;
    c.done()?;
    a.pairs.push((left, right));
    Ok(())
}

fn case_member(
    b: &mut CaseBuilder,
    kw: &str,
    c: &mut Cursor<'_>,
    pos: Pos,
    spans: &mut HashMap<(Scope, String, String), Pos>,
) -> Res<()> {
    let case = &mut b.case;
    let scalar: Option<(&'static str, &mut String)> = match kw {
        "enterprise_type" => Some(("enterprise_type", &mut case.enterprise_type)),
        "targeted_process" => Some(("targeted_process", &mut case.targeted_process)),
        "project_type" => Some(("project_type", &mut case.project_type)),
        "notes" => Some(("notes", &mut case.notes)),
        _ => None,
    };
    if let Some((name, slot)) = scalar {
        let v = c.string("a quoted value")?;
        c.done()?;
        if !b.scalars.insert(name) {
            return Err(c.err_at(pos.1, format!("duplicate `{name}` in case `{}`", case.id)));
        }
        *slot = v;
        return Ok(());
    }
    match kw {
        "goal" => {
            let label = c.string("a goal label")?;
            c.done()?;
            case.goal_labels.insert(normalize_label(&label));
        }
        "asis" | "tobe" => {
            let id_pos = c.pos();
            let id = c.ident("a fragment id")?;
            let source = c.string("a source state")?;
            c.punct(Tok::Arrow, "`->`")?;
            let target = c.string("a target state")?;
            let strategy = c.strategy("a strategy")?;
            c.done()?;
            let list = if kw == "asis" {
                &mut case.asis_fragments
            } else {
                &mut case.tobe_fragments
            };
            if list.iter().any(|f| f.id == id) {
                return Err(c.err_at(id_pos.1, format!("duplicate {kw} fragment `{id}` in case `{}`", case.id)));
            }
            spans.entry((Scope::Case, case.id.clone(), id.clone())).or_insert(id_pos);
            list.push(Fragment::new(id, source, target, strategy));
        }
        "map" => {
            let id_pos = c.pos();
            let fid = c.ident("a fragment id")?;
            let comp = c.string("a component name")?;
            c.done()?;
            b.maps.push((fid.clone(), id_pos));
            case.component_map.push((fid, comp));
        }
        _ => return Err(c.err_at(pos.1, format!("unknown case statement `{kw}`"))),
    }
    Ok(())
}
