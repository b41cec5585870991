//! The `roc` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use roc_core::align::{align, map_components, support_check, AliasMap};
use roc_core::dsl::{self, Diagnostic};
use roc_core::engine::{reachable, soundness_lite, Marking, Reachability, DEFAULT_BOUND};
use roc_core::export::{self, Format};
use roc_core::fragment::{extract_fragments, flatten, refine, RefinementTree};
use roc_core::model::ProcessModel;
use roc_core::reuse::{self, Case, CaseRequest, Repository, REPO_ENV};
use roc_core::strategy::{normalize_strategy, Strategy};
use roc_core::workspace::{validate_workspace, Workspace};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FINDINGS: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "roc", version, about = "Goal-driven ERP implementation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableFormat {
    Text,
    Tsv,
}

impl From<TableFormat> for Format {
    fn from(f: TableFormat) -> Self {
        match f {
            TableFormat::Text => Format::Text,
            TableFormat::Tsv => Format::Tsv,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate `.roc` files.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// List the fragments of a net.
    Fragments {
        file: PathBuf,
        model: String,
        #[arg(long, value_enum, default_value = "text")]
        format: TableFormat,
    },
    /// Align an As-Is net against a reference net.
    Align(AlignArgs),
    /// Search for a firing sequence between two markings.
    Simulate {
        file: PathBuf,
        model: String,
        /// Place labels of the initial marking (default: the start place).
        #[arg(long, value_delimiter = ',')]
        from: Vec<String>,
        /// Place labels of the target marking (default: the exit place).
        #[arg(long, value_delimiter = ',')]
        to: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
        /// Report exit reachability and dead transitions instead.
        #[arg(long)]
        soundness: bool,
    },
    /// Refine a fragment into alternatives, or flatten a refinement.
    Refine {
        file: PathBuf,
        model: String,
        fragment: String,
        /// Child strategies; when omitted, the refinement recorded in the file is used.
        strategies: Vec<String>,
        /// Print the fragments of the flattened net.
        #[arg(long)]
        flatten: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: TableFormat,
    },
    /// Case-based reuse commands.
    #[command(subcommand)]
    Case(CaseCommand),
    /// Export a net or goal graph as a graph description.
    Export {
        file: PathBuf,
        id: String,
        #[arg(long, value_enum, default_value = "dot")]
        format: GraphFormat,
    },
}

#[derive(Args, Debug)]
struct AlignArgs {
    file: PathBuf,
    asis: String,
    reference: String,
    /// Catalog id in FILE used for the component map.
    #[arg(long)]
    catalog: Option<String>,
    /// Alias map id in FILE.
    #[arg(long = "alias-map")]
    alias_map: Option<String>,
    /// A `.roc` file whose alias maps all apply.
    #[arg(long)]
    aliases: Option<PathBuf>,
    /// Goal graph id in FILE; lists enterprise goals the alignment leaves unsupported.
    #[arg(long)]
    goals: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: TableFormat,
}

#[derive(Args, Debug)]
struct RepoArg {
    /// Repository file (overrides the ROC_REPO environment variable).
    #[arg(long)]
    repo: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum CaseCommand {
    /// Assemble a case from nets, a catalog and a goal graph; prints it.
    New {
        file: PathBuf,
        #[arg(long)]
        id: String,
        #[arg(long)]
        asis: String,
        #[arg(long)]
        tobe: Option<String>,
        #[arg(long)]
        catalog: Option<String>,
        #[arg(long)]
        goals: Option<String>,
        #[arg(long, default_value = "")]
        enterprise_type: String,
        #[arg(long, default_value = "")]
        targeted_process: String,
        #[arg(long, default_value = "")]
        project_type: String,
        #[arg(long, default_value = "")]
        notes: String,
    },
    /// Rank repository cases by similarity to a query case.
    Retrieve {
        file: PathBuf,
        case: String,
        #[arg(long, default_value_t = 5)]
        top: usize,
        #[command(flatten)]
        repo: RepoArg,
    },
    /// Similarity breakdown and fragment differences of two cases.
    Compare {
        file: PathBuf,
        case: String,
        retrieved: String,
        #[command(flatten)]
        repo: RepoArg,
    },
    /// Store a solved case in the repository.
    Retain {
        file: PathBuf,
        case: String,
        #[command(flatten)]
        repo: RepoArg,
    },
    /// Transfer a stored solution onto a query case.
    Adapt {
        file: PathBuf,
        case: String,
        solved: String,
        /// A `.roc` file whose alias maps all apply.
        #[arg(long)]
        aliases: Option<PathBuf>,
        #[command(flatten)]
        repo: RepoArg,
    },
    /// Adapt a stored solution and align it against the query's As-Is.
    Test {
        file: PathBuf,
        case: String,
        solved: String,
        /// Catalog id in FILE used for the component map.
        #[arg(long)]
        catalog: Option<String>,
        #[arg(long)]
        aliases: Option<PathBuf>,
        #[command(flatten)]
        repo: RepoArg,
    },
}

/// A failed command: exit status plus message for standard error.
#[derive(Debug)]
struct Failure {
    code: u8,
    lines: Vec<String>,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        lines: vec![msg.into()],
    }
}

fn findings(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_FINDINGS,
        lines: vec![msg.into()],
    }
}

type Out<'a> = &'a mut dyn Write;

/// Runs the command line; returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            for l in f.lines {
                let _ = writeln!(err, "{l}");
            }
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: Out<'_>) -> Result<u8, Failure> {
    match cmd {
        Command::Validate { files } => cmd_validate(&files, out),
        Command::Fragments { file, model, format } => {
            let ws = load(&file)?;
            let m = model_of(&ws, &model)?;
            let frags = extract_fragments(m).map_err(|e| findings(format!("{}: {e}", file.display())))?;
            emit(out, &export::fragments_table(&frags, format.into()))?;
            Ok(EXIT_OK)
        }
        Command::Align(args) => cmd_align(args, out),
        Command::Simulate {
            file,
            model,
            from,
            to,
            bound,
            soundness,
        } => cmd_simulate(&file, &model, &from, &to, bound, soundness, out),
        Command::Refine {
            file,
            model,
            fragment,
            strategies,
            flatten,
            format,
        } => cmd_refine(&file, &model, &fragment, &strategies, flatten, format.into(), out),
        Command::Case(c) => cmd_case(c, out),
        Command::Export { file, id, format } => {
            let GraphFormat::Dot = format;
            let ws = load(&file)?;
            let dot = if let Some(m) = ws.models.get(&id) {
                export::model_to_dot(m)
            } else if let Some(g) = ws.goals.get(&id) {
                export::goals_to_dot(g)
            } else {
                return Err(usage(format!("{}: no net or goal graph `{id}`", file.display())));
            };
            emit(out, &dot)?;
            Ok(EXIT_OK)
        }
    }
}

fn emit(out: Out<'_>, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| usage(format!("write error: {e}")))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn render_all(path: &Path, diags: &[Diagnostic]) -> Vec<String> {
    let name = path.display().to_string();
    diags.iter().map(|d| d.render(&name)).collect()
}

/// Reads and parses a workspace; parse errors are findings.
fn load(path: &Path) -> Result<Workspace, Failure> {
    let text = read(path)?;
    dsl::parse(&text).map_err(|diags| Failure {
        code: EXIT_FINDINGS,
        lines: render_all(path, &diags),
    })
}

fn model_of<'w>(ws: &'w Workspace, id: &str) -> Result<&'w ProcessModel, Failure> {
    ws.models.get(id).ok_or_else(|| usage(format!("no net `{id}`")))
}

fn cmd_validate(files: &[PathBuf], out: Out<'_>) -> Result<u8, Failure> {
    let mut worst = EXIT_OK;
    let mut lines = Vec::new();
    for path in files {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                lines.push(format!("{}: {e}", path.display()));
                worst = EXIT_USAGE;
                continue;
            }
        };
        let (ws, diags) = dsl::parse_with_diagnostics(&text);
        lines.extend(render_all(path, &diags));
        match ws {
            Some(ws) => {
                // Parsing already validates; this catches anything it let through.
                for v in validate_workspace(&ws) {
                    lines.push(format!(
                        "{}: error: {} `{}`: {}",
                        path.display(),
                        v.scope.keyword(),
                        v.owner,
                        v.violation
                    ));
                    worst = worst.max(EXIT_FINDINGS);
                }
            }
            None => worst = worst.max(EXIT_FINDINGS),
        }
    }
    if worst == EXIT_OK {
        for l in &lines {
            emit(out, &format!("{l}\n"))?;
        }
        let n = files.len();
        emit(out, &format!("{n} file{} ok\n", if n == 1 { "" } else { "s" }))?;
        Ok(EXIT_OK)
    } else {
        Err(Failure { code: worst, lines })
    }
}

fn alias_file(path: &Path) -> Result<AliasMap, Failure> {
    let ws = load(path)?;
    Ok(ws.all_aliases())
}

fn cmd_align(a: AlignArgs, out: Out<'_>) -> Result<u8, Failure> {
    let ws = load(&a.file)?;
    let asis = extract_fragments(model_of(&ws, &a.asis)?).map_err(|e| findings(e.to_string()))?;
    let reference = extract_fragments(model_of(&ws, &a.reference)?).map_err(|e| findings(e.to_string()))?;
    let mut maps = Vec::new();
    if let Some(id) = &a.alias_map {
        maps.push(ws.aliases.get(id).cloned().ok_or_else(|| usage(format!("no alias map `{id}`")))?);
    }
    if let Some(path) = &a.aliases {
        maps.push(alias_file(path)?);
    }
    let aliases = AliasMap::merged("cli", &maps);
    if a.goals.is_some() && a.catalog.is_none() {
        return Err(usage("--goals needs a component map; pass --catalog"));
    }
    let mut report = align(&asis, &reference, &aliases);
    if let Some(id) = &a.catalog {
        let cat = ws.catalogs.get(id).ok_or_else(|| usage(format!("no catalog `{id}`")))?;
        report = report.with_components(map_components(&reference, cat));
    }
    emit(out, &export::alignment_report(&report, &reference, a.format.into()))?;
    let mut unsupported = false;
    if let Some(gid) = &a.goals {
        let g = ws.goals.get(gid).ok_or_else(|| usage(format!("no goal graph `{gid}`")))?;
        let check = support_check(&ws, g, &report, &a.asis, &a.reference).map_err(|e| findings(e.to_string()))?;
        if let TableFormat::Text = a.format {
            let list = |v: &[String]| if v.is_empty() { "(none)".to_string() } else { v.join(", ") };
            emit(out, &format!("unsupported goals: {}\n", list(&check.unsupported)))?;
            emit(out, &format!("unrealized goals: {}\n", list(&check.unrealized)))?;
        }
        unsupported = !check.unsupported.is_empty();
    }
    Ok(if report.has_findings() || unsupported { EXIT_FINDINGS } else { EXIT_OK })
}

fn marking(m: &ProcessModel, labels: &[String], default: Option<&str>) -> Result<Marking, Failure> {
    if labels.is_empty() {
        let id = default.ok_or_else(|| usage(format!("net `{}` has no default marking; pass place labels", m.id)))?;
        return Ok(Marking::new([id]));
    }
    let mut ids = Vec::new();
    for l in labels {
        let p = m
            .place_by_label(l)
            .ok_or_else(|| usage(format!("net `{}` has no place labelled \"{l}\"", m.id)))?;
        ids.push(p.id.clone());
    }
    Ok(Marking::new(ids))
}

fn cmd_simulate(
    file: &Path,
    model: &str,
    from: &[String],
    to: &[String],
    bound: usize,
    soundness: bool,
    out: Out<'_>,
) -> Result<u8, Failure> {
    if bound == 0 {
        return Err(usage("--bound must be at least 1"));
    }
    let ws = load(file)?;
    let m = model_of(&ws, model)?;
    if soundness {
        let r = soundness_lite(m, bound);
        let dead: Vec<_> = r.dead_transitions.iter().map(String::as_str).collect();
        emit(
            out,
            &format!(
                "exit reachable: {}\ndead transitions: {}\nexplored markings: {}{}\n",
                if r.exit_reachable { "yes" } else { "no" },
                if dead.is_empty() { "(none)".to_string() } else { dead.join(", ") },
                r.explored_markings,
                if r.truncated { " (truncated)" } else { "" }
            ),
        )?;
        return Ok(if r.is_sound() { EXIT_OK } else { EXIT_FINDINGS });
    }
    let from = marking(m, from, m.start().map(|p| p.id.as_str()))?;
    let to = marking(m, to, m.exit().map(|p| p.id.as_str()))?;
    match reachable(m, &from, &to, bound) {
        Reachability::Reachable(path) => {
            let mut s = format!("reachable in {} step{}\n", path.len(), if path.len() == 1 { "" } else { "s" });
            for t in &path {
                let strat = m.transition(t).map(|t| t.strategy.raw()).unwrap_or_default();
                s.push_str(&format!("  {t}  {strat}\n"));
            }
            emit(out, &s)?;
            Ok(EXIT_OK)
        }
        Reachability::Unreachable => {
            emit(out, "unreachable\n")?;
            Ok(EXIT_FINDINGS)
        }
        Reachability::Truncated => {
            emit(out, &format!("truncated after {bound} markings\n"))?;
            Ok(EXIT_FINDINGS)
        }
    }
}

fn cmd_refine(
    file: &Path,
    model: &str,
    fragment: &str,
    strategies: &[String],
    do_flatten: bool,
    format: Format,
    out: Out<'_>,
) -> Result<u8, Failure> {
    let ws = load(file)?;
    let m = model_of(&ws, model)?;
    let (refined, tree): (ProcessModel, RefinementTree) = if strategies.is_empty() {
        let tree = m
            .refinement(fragment)
            .cloned()
            .ok_or_else(|| usage(format!("net `{model}` records no refinement of `{fragment}`")))?;
        (m.clone(), tree)
    } else {
        let children: Vec<Strategy> = strategies
            .iter()
            .map(|s| normalize_strategy(s).map_err(|e| usage(format!("\"{s}\": {e}"))))
            .collect::<Result<_, _>>()?;
        refine(m, fragment, &children).map_err(|e| findings(e.to_string()))?
    };
    if do_flatten {
        let flat = flatten(&refined, &tree).map_err(|e| findings(e.to_string()))?;
        let frags = extract_fragments(&flat).map_err(|e| findings(e.to_string()))?;
        emit(out, &export::fragments_table(&frags, format))?;
    } else {
        emit(out, &export::fragments_table(&tree.children, format))?;
    }
    Ok(EXIT_OK)
}

fn open_repo(arg: &RepoArg) -> Result<Repository, Failure> {
    let path = match &arg.repo {
        Some(p) => p.clone(),
        None => std::env::var_os(REPO_ENV)
            .map(PathBuf::from)
            .ok_or_else(|| usage(format!("no repository: pass --repo or set {REPO_ENV}")))?,
    };
    Repository::load(&path).map_err(|e| match e {
        reuse::RepoError::Parse { path, diagnostics } => Failure {
            code: EXIT_FINDINGS,
            lines: render_all(&path, &diagnostics),
        },
        other => usage(other.to_string()),
    })
}

fn case_of<'w>(ws: &'w Workspace, file: &Path, id: &str) -> Result<&'w Case, Failure> {
    ws.cases
        .get(id)
        .ok_or_else(|| usage(format!("{}: no case `{id}`", file.display())))
}

fn score_cells(s: &reuse::SimilarityScore) -> String {
    format!("{:.4}\t{:.4}\t{:.4}\t{:.4}", s.total, s.fragment, s.goal, s.component)
}

fn cmd_case(cmd: CaseCommand, out: Out<'_>) -> Result<u8, Failure> {
    match cmd {
        CaseCommand::New {
            file,
            id,
            asis,
            tobe,
            catalog,
            goals,
            enterprise_type,
            targeted_process,
            project_type,
            notes,
        } => {
            let ws = load(&file)?;
            let req = CaseRequest {
                id: &id,
                enterprise_type: &enterprise_type,
                targeted_process: &targeted_process,
                project_type: &project_type,
                notes: &notes,
                asis_model: &asis,
                tobe_model: tobe.as_deref(),
                catalog: catalog.as_deref(),
                goals: goals.as_deref(),
            };
            if !dsl::is_ident(&id) {
                return Err(usage(format!("case id `{id}` is not an identifier")));
            }
            let case = reuse::new_case(&ws, &req).map_err(|e| usage(e.to_string()))?;
            let mut doc = Workspace::default();
            doc.cases.insert(case.id.clone(), case);
            emit(out, &dsl::print(&doc))?;
            Ok(EXIT_OK)
        }
        CaseCommand::Retrieve { file, case, top, repo } => {
            let ws = load(&file)?;
            let query = case_of(&ws, &file, &case)?;
            let repo = open_repo(&repo)?;
            let mut s = String::from("rank\tcase\ttotal\tfragment\tgoal\tcomponent\n");
            for (i, (c, score)) in repo.retrieve(query, top).into_iter().enumerate() {
                s.push_str(&format!("{}\t{}\t{}\n", i + 1, c.id, score_cells(&score)));
            }
            emit(out, &s)?;
            Ok(EXIT_OK)
        }
        CaseCommand::Compare {
            file,
            case,
            retrieved,
            repo,
        } => {
            let ws = load(&file)?;
            let query = case_of(&ws, &file, &case)?;
            let repo = open_repo(&repo)?;
            let other = repo
                .get(&retrieved)
                .ok_or_else(|| usage(format!("no case `{retrieved}` in repository")))?;
            let cmp = reuse::compare(query, other, repo.weights());
            let mut s = format!("total\tfragment\tgoal\tcomponent\n{}\n", score_cells(&cmp.score));
            for (title, keys) in [
                ("shared", &cmp.shared_fragments),
                ("only in query", &cmp.only_in_query),
                ("only in retrieved", &cmp.only_in_retrieved),
            ] {
                s.push_str(&format!("{title}:\n"));
                for k in keys {
                    s.push_str(&format!("  <({}), ({}), {}>\n", k.source, k.target, k.strategy));
                }
            }
            emit(out, &s)?;
            Ok(EXIT_OK)
        }
        CaseCommand::Retain { file, case, repo } => {
            let ws = load(&file)?;
            let c = case_of(&ws, &file, &case)?.clone();
            let mut repo = open_repo(&repo)?;
            match repo.retain(c) {
                Ok(()) => {
                    emit(out, &format!("retained `{case}` ({} case(s))\n", repo.len()))?;
                    Ok(EXIT_OK)
                }
                Err(e @ (reuse::RepoError::DuplicateId(_) | reuse::RepoError::Unsolved(_))) => {
                    Err(findings(e.to_string()))
                }
                Err(e) => Err(usage(e.to_string())),
            }
        }
        CaseCommand::Adapt {
            file,
            case,
            solved,
            aliases,
            repo,
        } => {
            let (adaptation, _) = adapt_from(&file, &case, &solved, aliases.as_deref(), &repo)?;
            let mut s = String::from("proposal:\n");
            s.push_str(&export::fragments_table(&adaptation.proposal, Format::Text));
            s.push_str("non-transferable:\n");
            if adaptation.non_transferable.is_empty() {
                s.push_str("(none)\n");
            } else {
                s.push_str(&export::fragments_table(&adaptation.non_transferable, Format::Text));
            }
            emit(out, &s)?;
            Ok(if adaptation.non_transferable.is_empty() { EXIT_OK } else { EXIT_FINDINGS })
        }
        CaseCommand::Test {
            file,
            case,
            solved,
            catalog,
            aliases,
            repo,
        } => {
            let (adaptation, ws) = adapt_from(&file, &case, &solved, aliases.as_deref(), &repo)?;
            let cat = match &catalog {
                Some(id) => Some(ws.catalogs.get(id).ok_or_else(|| usage(format!("no catalog `{id}`")))?),
                None => None,
            };
            let query = case_of(&ws, &file, &case)?;
            let report = reuse::test_solution(&adaptation.proposal, query, cat);
            emit(out, &export::alignment_report(&report, &adaptation.proposal, Format::Text))?;
            Ok(if report.coverage < 1.0 { EXIT_FINDINGS } else { EXIT_OK })
        }
    }
}

fn adapt_from(
    file: &Path,
    case: &str,
    solved: &str,
    aliases: Option<&Path>,
    repo: &RepoArg,
) -> Result<(reuse::Adaptation, Workspace), Failure> {
    let ws = load(file)?;
    let query = case_of(&ws, file, case)?;
    let repo = open_repo(repo)?;
    let solved_case = repo
        .get(solved)
        .ok_or_else(|| usage(format!("no case `{solved}` in repository")))?;
    let mut maps = vec![ws.all_aliases()];
    if let Some(p) = aliases {
        maps.push(alias_file(p)?);
    }
    let aliases = AliasMap::merged("cli", &maps);
    let adaptation = reuse::adapt(solved_case, query, &aliases).map_err(|e| findings(e.to_string()))?;
    Ok((adaptation, ws))
}
