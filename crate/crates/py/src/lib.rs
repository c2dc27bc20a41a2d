//! Python bindings. Graphs cross the boundary as edge-list text; structured
//! results come back as plain dicts via their JSON form.

use oddwalk::complex::{build_ncomplex, h1_homology};
use oddwalk::homotopy::{default_length_cap, DEFAULT_STATE_CAP};
use oddwalk::homsearch::DEFAULT_NODE_BUDGET;
use oddwalk::sphere::{cap_measure as cap, min_degree_ratio, sample_approximation};
use oddwalk::traversal;
use oddwalk::{parse_graph, Graph, Walk};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn graph(text: &str) -> PyResult<Graph> {
    parse_graph(text).map_err(err)
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// `(vertex count, sorted edge list)` of an edge-list document.
#[pyfunction]
fn parse(text: &str) -> PyResult<(usize, Vec<(usize, usize)>)> {
    let g = graph(text)?;
    Ok((g.n(), g.edges().iter().map(|e| e.endpoints()).collect()))
}

#[pyfunction]
fn odd_girth(text: &str) -> PyResult<Option<usize>> {
    Ok(traversal::odd_girth(&graph(text)?))
}

/// Verdict dict with a `status` key; HOMOTOPIC carries the move list.
#[pyfunction]
#[pyo3(signature = (text, p, q, length_cap=None))]
fn are_homotopic<'py>(
    py: Python<'py>,
    text: &str,
    p: Vec<usize>,
    q: Vec<usize>,
    length_cap: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let g = graph(text)?;
    let p = Walk::new(&g, p).map_err(err)?;
    let q = Walk::new(&g, q).map_err(err)?;
    let cap = length_cap.unwrap_or_else(|| default_length_cap(&p, &q));
    let verdict = oddwalk::are_homotopic(&g, &p, &q, cap, DEFAULT_STATE_CAP);
    to_py(py, &verdict)
}

#[pyfunction]
#[pyo3(signature = (g, h, budget=DEFAULT_NODE_BUDGET))]
fn hom_exists<'py>(py: Python<'py>, g: &str, h: &str, budget: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &oddwalk::hom_exists(&graph(g)?, &graph(h)?, budget))
}

/// First homology of the neighborhood complex, e.g. `"Z"` or `"0"`.
#[pyfunction]
fn h1(text: &str) -> PyResult<String> {
    Ok(h1_homology(&build_ncomplex(&graph(text)?)).map_err(err)?.to_string())
}

#[pyfunction]
fn cap_measure(n: usize, epsilon: f64) -> PyResult<f64> {
    cap(n, epsilon).map_err(err)
}

/// Edge-list text and min-degree ratio of a seeded Borsuk sample on `2 * count` points.
#[pyfunction]
fn gen_borsuk(n: usize, epsilon: f64, count: usize, seed: u64) -> (String, f64) {
    let s = sample_approximation(n, epsilon, count, seed);
    (s.graph().to_edge_list(), min_degree_ratio(s.graph()))
}

/// Runs the command-line tool in process: `(exit code, stdout, stderr)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    let out = oddwalk::cli::run_cli(std::iter::once("oddwalk".to_string()).chain(args));
    (out.code, out.stdout, out.stderr)
}

#[pymodule]
#[pyo3(name = "oddwalk")]
fn oddwalk_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(odd_girth, m)?)?;
    m.add_function(wrap_pyfunction!(are_homotopic, m)?)?;
    m.add_function(wrap_pyfunction!(hom_exists, m)?)?;
    m.add_function(wrap_pyfunction!(h1, m)?)?;
    m.add_function(wrap_pyfunction!(cap_measure, m)?)?;
    m.add_function(wrap_pyfunction!(gen_borsuk, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
