//! Python bindings for `mec-core`.

use mec_core::count::{mec_size, BigCount};
use mec_core::error::MecError;
use mec_core::graph::{MixedGraph, Vertex};
use mec_core::intervention::{expected_resolved_exact, expected_resolved_mc, greedy_select};
use mec_core::io::{parse_graph, to_edge_list, to_json};
use mec_core::oracle::enumerate_mec;
use mec_core::prior::{parent_set_counts, size_with_prior, HypothesisGraph};
use mec_core::sample::{sample_many, sample_many_with_prior};
use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyTuple};

create_exception!(mecpy, UnrealizableError, PyValueError);

fn to_py(e: MecError) -> PyErr {
    match e {
        MecError::Unrealizable => UnrealizableError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Mixed graph with named vertices; `u -- v` edges are undirected and
/// `u -> v` edges directed.
#[pyclass(name = "Graph", module = "mecpy", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: MixedGraph,
}

impl PyGraph {
    fn vertex(&self, name: &str) -> PyResult<Vertex> {
        self.inner.vertex(name).map_err(to_py)
    }

    fn names(&self, vs: &[Vertex]) -> Vec<String> {
        vs.iter().map(|&v| self.inner.name(v).to_string()).collect()
    }

    fn pairs(&self, pairs: &[(String, String)]) -> PyResult<Vec<(Vertex, Vertex)>> {
        pairs.iter().map(|(a, b)| Ok((self.vertex(a)?, self.vertex(b)?))).collect()
    }
}

#[pymethods]
impl PyGraph {
    /// Parses the edge-list or JSON format.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse_graph(text).map(|inner| Self { inner }).map_err(to_py)
    }

    #[getter]
    fn vertices(&self) -> Vec<String> {
        self.inner.names().to_vec()
    }

    fn directed_edges(&self) -> Vec<(String, String)> {
        let g = &self.inner;
        g.directed_edges().map(|(a, b)| (g.name(a).into(), g.name(b).into())).collect()
    }

    fn undirected_edges(&self) -> Vec<(String, String)> {
        let g = &self.inner;
        g.undirected_edges().map(|(a, b)| (g.name(a).into(), g.name(b).into())).collect()
    }

    fn is_dag(&self) -> bool {
        self.inner.is_dag()
    }

    fn is_chordal(&self) -> PyResult<bool> {
        mec_core::is_chordal(&self.inner).map_err(to_py)
    }

    fn to_text(&self) -> String {
        to_edge_list(&self.inner)
    }

    fn to_json(&self) -> String {
        to_json(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.vertex_count()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(vertices={}, directed={}, undirected={})",
            self.inner.vertex_count(),
            self.inner.directed_count(),
            self.inner.undirected_count()
        )
    }
}

/// Number of DAGs in the class of an essential graph.
#[pyfunction]
fn size(g: &PyGraph) -> PyResult<BigCount> {
    mec_size(&g.inner).map_err(to_py)
}

/// Number of members containing every `(u, v)` edge of `required`.
#[pyfunction]
fn size_with_required(g: &PyGraph, required: Vec<(String, String)>) -> PyResult<BigCount> {
    let h = HypothesisGraph::from_required(&g.inner, &g.pairs(&required)?).map_err(to_py)?;
    size_with_prior(&g.inner, &h).map_err(to_py)
}

/// `n` uniform draws, optionally restricted to members containing `required`.
#[pyfunction]
#[pyo3(signature = (g, n, seed=0, required=None))]
fn sample(g: &PyGraph, n: usize, seed: u64, required: Option<Vec<(String, String)>>) -> PyResult<Vec<PyGraph>> {
    let dags = match required {
        Some(req) => {
            let h = HypothesisGraph::from_required(&g.inner, &g.pairs(&req)?).map_err(to_py)?;
            sample_many_with_prior(&g.inner, &h, n, seed)
        }
        None => sample_many(&g.inner, n, seed),
    }
    .map_err(to_py)?;
    Ok(dags.into_iter().map(|inner| PyGraph { inner }).collect())
}

/// Every member, by brute force.
#[pyfunction]
#[pyo3(signature = (g, limit=mec_core::oracle::DEFAULT_LIMIT))]
fn enumerate(g: &PyGraph, limit: usize) -> PyResult<Vec<PyGraph>> {
    let mec = enumerate_mec(&g.inner, limit).map_err(to_py)?;
    Ok(mec.members.into_iter().map(|inner| PyGraph { inner }).collect())
}

/// Member counts keyed by the tuple of sorted parent names of `target`.
#[pyfunction]
fn parent_sets<'py>(py: Python<'py>, g: &PyGraph, target: &str) -> PyResult<Bound<'py, PyDict>> {
    let counts = parent_set_counts(&g.inner, g.vertex(target)?).map_err(to_py)?;
    let out = PyDict::new(py);
    for (ps, c) in counts {
        out.set_item(PyTuple::new(py, g.names(&ps))?, c)?;
    }
    Ok(out)
}

/// Exact expected number of resolved edges, as `(numerator, denominator)`.
#[pyfunction]
fn expected_resolved(g: &PyGraph, targets: Vec<String>) -> PyResult<(BigInt, BigInt)> {
    let ts: Vec<Vertex> = targets.iter().map(|t| g.vertex(t)).collect::<PyResult<_>>()?;
    let q = expected_resolved_exact(&g.inner, &ts).map_err(to_py)?;
    Ok((q.numer().clone(), q.denom().clone()))
}

/// Monte-Carlo estimate `(mean, standard error)` from `n` samples.
#[pyfunction]
#[pyo3(signature = (g, targets, n, seed=0))]
fn expected_resolved_estimate(g: &PyGraph, targets: Vec<String>, n: usize, seed: u64) -> PyResult<(f64, f64)> {
    let ts: Vec<Vertex> = targets.iter().map(|t| g.vertex(t)).collect::<PyResult<_>>()?;
    let est = expected_resolved_mc(&g.inner, &ts, n, seed).map_err(to_py)?;
    Ok((est.mean, est.std_error))
}

#[pyfunction]
fn greedy_targets(g: &PyGraph, budget: usize) -> PyResult<Vec<String>> {
    Ok(g.names(&greedy_select(&g.inner, budget).map_err(to_py)?))
}

#[pyfunction]
#[pyo3(signature = (p, r, seed=0))]
fn random_uccg(p: usize, r: f64, seed: u64) -> PyResult<PyGraph> {
    mec_core::random_uccg(p, r, seed).map(|inner| PyGraph { inner }).map_err(to_py)
}

/// The rooted essential graph of a connected chordal graph.
#[pyfunction]
fn rooted_orient(g: &PyGraph, root: &str) -> PyResult<PyGraph> {
    mec_core::rooted_orient(&g.inner, g.vertex(root)?).map(|inner| PyGraph { inner }).map_err(to_py)
}

#[pymodule]
fn mecpy(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add("UnrealizableError", m.py().get_type::<UnrealizableError>())?;
    m.add_function(wrap_pyfunction!(size, m)?)?;
    m.add_function(wrap_pyfunction!(size_with_required, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(parent_sets, m)?)?;
    m.add_function(wrap_pyfunction!(expected_resolved, m)?)?;
    m.add_function(wrap_pyfunction!(expected_resolved_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_targets, m)?)?;
    m.add_function(wrap_pyfunction!(random_uccg, m)?)?;
    m.add_function(wrap_pyfunction!(rooted_orient, m)?)?;
    Ok(())
}
