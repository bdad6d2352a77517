//! Python bindings: the round engine, graph classes, adversary search, and
//! the lower-bound construction, exposed as a `dissemnet` extension module.
//!
//! The module links against libpython rather than building as a pure
//! abi3 extension, which keeps `cargo test --workspace` linkable; see
//! `python/smoke_test.py` for how the shared library is loaded.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use dissemnet_core::adversary::{self, Heuristic, SearchOptions, SearchResult};
use dissemnet_core::constructions;
use dissemnet_core::dissemination::{run, RoundCount};
use dissemnet_core::graphs::{GraphClassDescriptor, GraphSequence, LabeledDigraph};
use dissemnet_core::io;
use dissemnet_core::nodeset::NodeId;

fn value_error<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// One round's communication graph on nodes `1..=n`.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Graph {
    inner: LabeledDigraph,
}

#[pymethods]
impl Graph {
    /// Build a validated graph; `undirected` symmetrizes the edge set.
    #[new]
    #[pyo3(signature = (n, edges, undirected = false))]
    fn new(n: u32, edges: Vec<(u32, u32)>, undirected: bool) -> PyResult<Self> {
        Ok(Graph { inner: LabeledDigraph::new(n, &edges, undirected).map_err(value_error)? })
    }

    /// Parse the `{"n": ..., "undirected": ..., "edges": ...}` JSON form.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Graph { inner: io::graph_from_json(text).map_err(value_error)? })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    #[getter]
    fn undirected(&self) -> bool {
        self.inner.is_undirected()
    }

    /// Directed edge list (both orientations for undirected graphs).
    fn edges(&self) -> Vec<(u32, u32)> {
        self.inner.edges().iter().map(|&(u, v)| (u.get(), v.get())).collect()
    }

    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let report = self.inner.classify();
        let dict = PyDict::new(py);
        dict.set_item("is_rooted_tree", report.is_rooted_tree)?;
        dict.set_item("root", report.root.map(NodeId::get))?;
        dict.set_item("leaf_count", report.leaf_count)?;
        dict.set_item("is_directed_chain", report.is_directed_chain)?;
        dict.set_item("is_undirected_chain", report.is_undirected_chain)?;
        dict.set_item("is_undirected_connected", report.is_undirected_connected)?;
        Ok(dict)
    }

    fn to_json(&self) -> String {
        io::graph_to_json(&self.inner)
    }

    fn dot(&self) -> String {
        io::graph_to_dot(&self.inner)
    }

    fn reverse(&self) -> Graph {
        Graph { inner: self.inner.reverse() }
    }

    fn __eq__(&self, other: &Graph) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

fn make_descriptor(kind: &str, n: u32, leaves: Option<u32>) -> PyResult<GraphClassDescriptor> {
    let desc = match kind {
        "rooted-trees" => GraphClassDescriptor::rooted_trees(n),
        "rooted-trees-with-leaves" => {
            let m = leaves
                .ok_or_else(|| PyValueError::new_err("leaves is required for this class"))?;
            GraphClassDescriptor::rooted_trees_with_leaves(n, m)
        }
        "directed-chains" => GraphClassDescriptor::directed_chains(n),
        "undirected-chains" => GraphClassDescriptor::undirected_chains(n),
        "star" => GraphClassDescriptor::star(n),
        other => return Err(PyValueError::new_err(format!("unknown class {other}"))),
    };
    desc.map_err(value_error)
}

fn round_count_items(dict: &Bound<'_, PyDict>, value: RoundCount) -> PyResult<()> {
    match value {
        RoundCount::Finite(v) => {
            dict.set_item("b", v)?;
            dict.set_item("at_least", Option::<u32>::None)?;
        }
        RoundCount::AtLeast(v) => {
            dict.set_item("b", Option::<u32>::None)?;
            dict.set_item("at_least", v)?;
        }
    }
    Ok(())
}

/// Run the round engine over an explicit sequence; `horizon` defaults to the
/// number of supplied graphs.
#[pyfunction]
#[pyo3(signature = (graphs, horizon = None))]
fn simulate<'py>(
    py: Python<'py>,
    graphs: Vec<Graph>,
    horizon: Option<u32>,
) -> PyResult<Bound<'py, PyDict>> {
    if graphs.is_empty() {
        return Err(PyValueError::new_err("sequence must contain at least one graph"));
    }
    let n = graphs[0].inner.n();
    let rounds: Vec<LabeledDigraph> = graphs.into_iter().map(|g| g.inner).collect();
    let horizon = horizon.unwrap_or(rounds.len() as u32);
    let sequence = GraphSequence::new(n, rounds, None).map_err(value_error)?;
    let trace = run(sequence, horizon).map_err(value_error)?;

    let dict = PyDict::new(py);
    dict.set_item("n", n)?;
    round_count_items(&dict, trace.dissemination_time())?;
    dict.set_item("termination_round", trace.termination_round())?;
    dict.set_item("winners", trace.winners().to_vec())?;
    let node_times = PyDict::new(py);
    for i in 0..n as usize {
        let p = NodeId::from_index(i);
        let value: Py<PyAny> = match trace.node_dissemination_time(p) {
            RoundCount::Finite(v) => v.into_pyobject(py)?.into_any().unbind(),
            RoundCount::AtLeast(_) => py.None(),
        };
        node_times.set_item(p.get(), value)?;
    }
    dict.set_item("node_times", node_times)?;
    let states = PyList::empty(py);
    for state in trace.states() {
        let sets: Vec<Vec<u32>> = state.influence_sets().iter().map(|s| s.to_vec()).collect();
        states.append(sets)?;
    }
    dict.set_item("influence", states)?;
    Ok(dict)
}

#[pyfunction]
#[pyo3(signature = (kind, n, leaves = None))]
fn enumerate_class(kind: &str, n: u32, leaves: Option<u32>) -> PyResult<Vec<Graph>> {
    let desc = make_descriptor(kind, n, leaves)?;
    let iter = desc.enumerate().map_err(value_error)?;
    Ok(iter.map(|inner| Graph { inner }).collect())
}

#[pyfunction]
#[pyo3(signature = (kind, n, leaves = None))]
fn count_class(kind: &str, n: u32, leaves: Option<u32>) -> PyResult<u64> {
    make_descriptor(kind, n, leaves)?.count().map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (kind, n, seed, leaves = None))]
fn sample_class(kind: &str, n: u32, seed: u64, leaves: Option<u32>) -> PyResult<Graph> {
    let desc = make_descriptor(kind, n, leaves)?;
    Ok(Graph { inner: desc.sample(seed).map_err(value_error)? })
}

fn search_result_dict<'py>(py: Python<'py>, result: SearchResult) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    dict.set_item("class", result.class)?;
    dict.set_item("n", result.n)?;
    dict.set_item("leaves", result.leaves)?;
    round_count_items(&dict, result.worst_case)?;
    dict.set_item("exact", result.exact)?;
    dict.set_item("explored_states", result.explored_states)?;
    dict.set_item("canonicalization", result.canonicalized)?;
    let certificate: Vec<Graph> =
        result.certificate.listed_rounds().iter().map(|g| Graph { inner: g.clone() }).collect();
    dict.set_item("certificate", certificate.into_pyobject(py)?)?;
    Ok(dict)
}

/// Exact worst-case dissemination time of a class, with certificate.
#[pyfunction]
#[pyo3(signature = (kind, n, leaves = None, cap = None, canonicalize = false))]
fn worst_case_time<'py>(
    py: Python<'py>,
    kind: &str,
    n: u32,
    leaves: Option<u32>,
    cap: Option<u32>,
    canonicalize: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let desc = make_descriptor(kind, n, leaves)?;
    let result =
        adversary::worst_case_time(&desc, &SearchOptions { cap, canonicalize }).map_err(value_error)?;
    search_result_dict(py, result)
}

/// Greedy adversary probe; a valid lower bound, never a claim of optimality.
#[pyfunction]
#[pyo3(signature = (kind, n, heuristic, seed = 0, leaves = None, cap = None))]
fn greedy_adversary<'py>(
    py: Python<'py>,
    kind: &str,
    n: u32,
    heuristic: &str,
    seed: u64,
    leaves: Option<u32>,
    cap: Option<u32>,
) -> PyResult<Bound<'py, PyDict>> {
    let desc = make_descriptor(kind, n, leaves)?;
    let heuristic = Heuristic::parse(heuristic)
        .ok_or_else(|| PyValueError::new_err(format!("unknown heuristic {heuristic}")))?;
    let result = adversary::greedy_adversary(&desc, heuristic, cap, seed).map_err(value_error)?;
    search_result_dict(py, result)
}

/// The three-graph lower-bound construction and its schedule.
#[pyfunction]
fn lower_bound_sequence<'py>(py: Python<'py>, n: u32) -> PyResult<Bound<'py, PyDict>> {
    let c = constructions::lower_bound_sequence(n).map_err(value_error)?;
    let dict = PyDict::new(py);
    dict.set_item("n", n)?;
    dict.set_item("total_rounds", c.total_rounds())?;
    dict.set_item("g1", Graph { inner: c.g1.clone() })?;
    dict.set_item("g2", Graph { inner: c.g2.clone() })?;
    dict.set_item("g3", Graph { inner: c.g3.clone() })?;
    dict.set_item("g1_rounds", c.phase1)?;
    dict.set_item("g2_rounds", c.phase2)?;
    dict.set_item("g3_rounds", c.phase3)?;
    let rounds: Vec<Graph> =
        c.to_sequence().listed_rounds().iter().map(|g| Graph { inner: g.clone() }).collect();
    dict.set_item("rounds", rounds)?;
    Ok(dict)
}

/// Check the construction at one `n`: exact dissemination time, no premature
/// full set, and the closed-form influence formulas.
#[pyfunction]
fn verify_lower_bound<'py>(py: Python<'py>, n: u32) -> PyResult<Bound<'py, PyDict>> {
    let report = constructions::verify_lower_bound(n).map_err(value_error)?;
    let dict = PyDict::new(py);
    dict.set_item("n", report.n)?;
    dict.set_item("expected_rounds", report.expected_rounds)?;
    round_count_items(&dict, report.simulated)?;
    dict.set_item("dissemination_exact", report.dissemination_exact)?;
    dict.set_item("no_premature_full", report.no_premature_full)?;
    dict.set_item("identified_reading", report.identified_reading)?;
    dict.set_item("pass", report.pass)?;
    Ok(dict)
}

/// The proof's closed-form `S_i(r)` for the constructed execution.
#[pyfunction]
fn closed_form_influence(n: u32, i: u32, r: u32) -> PyResult<Vec<u32>> {
    let i = NodeId::new(i).ok_or_else(|| PyValueError::new_err("node id out of range"))?;
    Ok(constructions::closed_form_influence(n, i, r).map_err(value_error)?.to_vec())
}

#[pyfunction]
fn expected_lower_bound(n: u32) -> u32 {
    constructions::expected_lower_bound(n)
}

#[pyfunction]
fn pigeonhole_cap(n: u32) -> u32 {
    adversary::pigeonhole_cap(n)
}

#[pyfunction]
fn nlogn_bound(n: u32) -> u64 {
    adversary::nlogn_bound(n)
}

#[pymodule]
fn dissemnet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_class, m)?)?;
    m.add_function(wrap_pyfunction!(count_class, m)?)?;
    m.add_function(wrap_pyfunction!(sample_class, m)?)?;
    m.add_function(wrap_pyfunction!(worst_case_time, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_adversary, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(verify_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_influence, m)?)?;
    m.add_function(wrap_pyfunction!(expected_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(pigeonhole_cap, m)?)?;
    m.add_function(wrap_pyfunction!(nlogn_bound, m)?)?;
    Ok(())
}
