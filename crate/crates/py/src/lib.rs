//! Python bindings for `roc_core`.

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

use roc_core::align::{align, map_components, AliasMap};
use roc_core::engine::{self, Marking, Reachability};
use roc_core::export::{self, Format};
use roc_core::fragment::{self, extract_fragments, Fragment};
use roc_core::goal;
use roc_core::model::ProcessModel;
use roc_core::reuse::{self, SimilarityWeights};
use roc_core::{dsl, fixtures, workspace};

type FragmentRow = (String, String, String, String, String);

fn row(f: &Fragment) -> FragmentRow {
    (
        f.id.clone(),
        f.source.clone(),
        f.target.clone(),
        f.strategy.raw().to_string(),
        f.strategy.polarity().to_string(),
    )
}

fn format(tsv: bool) -> Format {
    if tsv {
        Format::Tsv
    } else {
        Format::Text
    }
}

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A parsed `.roc` document.
#[pyclass(name = "Workspace", module = "roc", frozen)]
struct PyWorkspace {
    inner: workspace::Workspace,
}

impl PyWorkspace {
    fn model(&self, id: &str) -> PyResult<&ProcessModel> {
        self.inner.models.get(id).ok_or_else(|| PyKeyError::new_err(format!("no net `{id}`")))
    }

    fn goals(&self, id: &str) -> PyResult<&goal::GoalGraph> {
        self.inner.goals.get(id).ok_or_else(|| PyKeyError::new_err(format!("no goal graph `{id}`")))
    }

    fn case(&self, id: &str) -> PyResult<&reuse::Case> {
        self.inner.cases.get(id).ok_or_else(|| PyKeyError::new_err(format!("no case `{id}`")))
    }

    fn fragments_of(&self, id: &str) -> PyResult<Vec<Fragment>> {
        extract_fragments(self.model(id)?).map_err(value_err)
    }
}

#[pymethods]
impl PyWorkspace {
    /// Canonical text form.
    fn print(&self) -> String {
        dsl::print(&self.inner)
    }

    fn models(&self) -> Vec<String> {
        self.inner.models.keys().cloned().collect()
    }

    fn goal_graphs(&self) -> Vec<String> {
        self.inner.goals.keys().cloned().collect()
    }

    fn catalogs(&self) -> Vec<String> {
        self.inner.catalogs.keys().cloned().collect()
    }

    fn cases(&self) -> Vec<String> {
        self.inner.cases.keys().cloned().collect()
    }

    /// Semantic violations as `(scope, owner, code, element, message)`.
    fn validate(&self) -> Vec<(String, String, String, String, String)> {
        workspace::validate_workspace(&self.inner)
            .into_iter()
            .map(|v| {
                (
                    v.scope.keyword().to_string(),
                    v.owner,
                    v.violation.code.to_string(),
                    v.violation.element,
                    v.violation.message,
                )
            })
            .collect()
    }

    /// Fragments as `(id, source, target, strategy, polarity)`.
    fn fragments(&self, model: &str) -> PyResult<Vec<FragmentRow>> {
        Ok(self.fragments_of(model)?.iter().map(row).collect())
    }

    #[pyo3(signature = (model, tsv = false))]
    fn fragments_table(&self, model: &str, tsv: bool) -> PyResult<String> {
        Ok(export::fragments_table(&self.fragments_of(model)?, format(tsv)))
    }

    /// Align `asis` against `reference`, optionally mapping components and
    /// resolving place labels through alias maps of this workspace.
    #[pyo3(signature = (asis, reference, catalog = None, aliases = Vec::new()))]
    fn align(
        &self,
        asis: &str,
        reference: &str,
        catalog: Option<&str>,
        aliases: Vec<String>,
    ) -> PyResult<PyAlignment> {
        let a = self.fragments_of(asis)?;
        let r = self.fragments_of(reference)?;
        let mut maps = Vec::new();
        for id in &aliases {
            maps.push(
                self.inner
                    .aliases
                    .get(id)
                    .ok_or_else(|| PyKeyError::new_err(format!("no alias map `{id}`")))?,
            );
        }
        let alias = AliasMap::merged("aliases", maps);
        let mut report = align(&a, &r, &alias);
        if let Some(c) = catalog {
            let cat = self
                .inner
                .catalogs
                .get(c)
                .ok_or_else(|| PyKeyError::new_err(format!("no catalog `{c}`")))?;
            report = report.with_components(map_components(&r, cat));
        }
        Ok(PyAlignment { report, reference: r })
    }

    /// Shortest firing sequence between two markings given as place ids, or
    /// `None` when unreachable. Raises when the bound is hit.
    #[pyo3(signature = (model, start, to, bound = engine::DEFAULT_BOUND))]
    fn reachable(&self, model: &str, start: Vec<String>, to: Vec<String>, bound: usize) -> PyResult<Option<Vec<String>>> {
        if bound == 0 {
            return Err(PyValueError::new_err("bound must be at least 1"));
        }
        let m = self.model(model)?;
        match engine::reachable(m, &Marking::new(start), &Marking::new(to), bound) {
            Reachability::Reachable(path) => Ok(Some(path)),
            Reachability::Unreachable => Ok(None),
            Reachability::Truncated => Err(PyValueError::new_err(format!("search truncated after {bound} markings"))),
        }
    }

    /// `(exit_reachable, dead_transitions, truncated)`.
    #[pyo3(signature = (model, bound = engine::DEFAULT_BOUND))]
    fn soundness(&self, model: &str, bound: usize) -> PyResult<(bool, Vec<String>, bool)> {
        if bound == 0 {
            return Err(PyValueError::new_err("bound must be at least 1"));
        }
        let r = engine::soundness_lite(self.model(model)?, bound);
        Ok((r.exit_reachable, r.dead_transitions.into_iter().collect(), r.truncated))
    }

    /// Refine a fragment into alternatives and return the children.
    #[pyo3(signature = (model, fragment, strategies, flatten = false))]
    fn refine(&self, model: &str, fragment: &str, strategies: Vec<String>, flatten: bool) -> PyResult<Vec<FragmentRow>> {
        let children = strategies
            .iter()
            .map(|s| roc_core::normalize_strategy(s).map_err(value_err))
            .collect::<PyResult<Vec<_>>>()?;
        let (refined, tree) = fragment::refine(self.model(model)?, fragment, &children).map_err(value_err)?;
        if flatten {
            let flat = fragment::flatten(&refined, &tree).map_err(value_err)?;
            return Ok(extract_fragments(&flat).map_err(value_err)?.iter().map(row).collect());
        }
        Ok(tree.children.iter().map(row).collect())
    }

    /// Derivation paths (node ids) from needs down to `node`.
    fn trace(&self, goals: &str, node: &str) -> PyResult<Vec<Vec<String>>> {
        goal::trace(self.goals(goals)?, node).map_err(value_err)
    }

    /// Node id for a goal label, if any.
    fn node_by_label(&self, goals: &str, label: &str) -> PyResult<Option<String>> {
        Ok(self.goals(goals)?.node_by_label(label).map(|n| n.id.clone()))
    }

    /// Weighted similarity of two cases: `(total, fragment, goal, component)`.
    fn similarity(&self, a: &str, b: &str) -> PyResult<(f64, f64, f64, f64)> {
        let s = reuse::similarity(self.case(a)?, self.case(b)?, &SimilarityWeights::default());
        Ok((s.total, s.fragment, s.goal, s.component))
    }

    /// DOT rendering of a net or goal graph.
    fn to_dot(&self, id: &str) -> PyResult<String> {
        if let Some(m) = self.inner.models.get(id) {
            return Ok(export::model_to_dot(m));
        }
        Ok(export::goals_to_dot(self.goals(id)?))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Workspace(models={}, goal_graphs={}, catalogs={}, cases={})",
            self.inner.models.len(),
            self.inner.goals.len(),
            self.inner.catalogs.len(),
            self.inner.cases.len()
        )
    }
}

#[pyclass(name = "Alignment", module = "roc", frozen)]
struct PyAlignment {
    report: roc_core::AlignmentReport,
    reference: Vec<Fragment>,
}

#[pymethods]
impl PyAlignment {
    /// `(asis_id, reference_id, gap, alternative)` per pair.
    #[getter]
    fn pairs(&self) -> Vec<(String, String, String, bool)> {
        self.report
            .pairs
            .iter()
            .map(|p| (p.asis.id.clone(), p.reference.id.clone(), p.gap.to_string(), p.alternative))
            .collect()
    }

    #[getter]
    fn unmatched_asis(&self) -> Vec<String> {
        self.report.unmatched_asis.iter().map(|f| f.id.clone()).collect()
    }

    #[getter]
    fn unmatched_reference(&self) -> Vec<String> {
        self.report.unmatched_reference.iter().map(|f| f.id.clone()).collect()
    }

    #[getter]
    fn coverage(&self) -> f64 {
        self.report.coverage
    }

    /// `(reference fragment id, component name)` entries.
    #[getter]
    fn components(&self) -> Vec<(String, String)> {
        self.report.component_map.entries.clone()
    }

    fn has_findings(&self) -> bool {
        self.report.has_findings()
    }

    #[pyo3(signature = (tsv = false))]
    fn report(&self, tsv: bool) -> String {
        export::alignment_report(&self.report, &self.reference, format(tsv))
    }
}

/// Parse `.roc` text. Raises `ValueError` listing every diagnostic.
#[pyfunction]
fn parse(text: &str) -> PyResult<PyWorkspace> {
    dsl::parse(text).map(|inner| PyWorkspace { inner }).map_err(|diags| {
        let lines: Vec<String> = diags.iter().map(ToString::to_string).collect();
        PyValueError::new_err(lines.join("\n"))
    })
}

#[pyfunction]
fn load(path: &str) -> PyResult<PyWorkspace> {
    let text = std::fs::read_to_string(path).map_err(|e| pyo3::exceptions::PyOSError::new_err(format!("{path}: {e}")))?;
    parse(&text)
}

/// Bundled example workspace: `electro_tech`, `geneva` or `cases`.
#[pyfunction]
fn fixture(name: &str) -> PyResult<PyWorkspace> {
    let inner = match name {
        "electro_tech" => fixtures::electro_tech(),
        "geneva" => fixtures::geneva(),
        "cases" => fixtures::cases(),
        _ => return Err(PyKeyError::new_err(format!("no fixture `{name}`"))),
    };
    Ok(PyWorkspace { inner })
}

#[pyfunction]
fn normalize_label(label: &str) -> String {
    roc_core::normalize_label(label)
}

#[pymodule]
fn roc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWorkspace>()?;
    m.add_class::<PyAlignment>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(load, m)?)?;
    m.add_function(wrap_pyfunction!(fixture, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_label, m)?)?;
    Ok(())
}
