//! Python bindings for the `keep_regrow` crate.
//!
//! Build with `cargo build --release -p keep-regrow-py` and copy
//! `libkeep_regrow_py.so` to `keep_regrow.so` somewhere on `sys.path`.

use keep_regrow::data::{self, Delimiter, LabelColumn, LoadOptions};
use keep_regrow::eval::accuracy_ci_half_width;
use keep_regrow::grow::GrowthConfig;
use keep_regrow::{diff, keep_regrow as kr, loss, prune, Dataset, LossParams, Tree};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: keep_regrow::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn params(alpha: f64, beta: f64) -> PyResult<LossParams> {
    LossParams::new(alpha, beta).map_err(py_err)
}

fn growth(max_depth: Option<usize>, min_samples_split: usize) -> PyResult<GrowthConfig> {
    let g = GrowthConfig {
        max_depth,
        min_samples_split,
        ..GrowthConfig::default()
    };
    g.validate().map_err(py_err)?;
    Ok(g)
}

/// A binary classification tree. Immutable from Python.
#[pyclass(name = "Tree", module = "keep_regrow", frozen)]
struct PyTree(Tree);

#[pymethods]
impl PyTree {
    #[staticmethod]
    fn leaf(class_: usize) -> Self {
        PyTree(Tree::leaf(class_))
    }

    #[staticmethod]
    fn split(feature: usize, threshold: f64, left: &PyTree, right: &PyTree) -> PyResult<Self> {
        Tree::try_split(feature, threshold, left.0.clone(), right.0.clone())
            .map(PyTree)
            .map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Tree::from_json(text).map(PyTree).map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    /// Graphviz source. With `prev`, changed nodes are highlighted.
    #[pyo3(signature = (prev=None))]
    fn to_dot(&self, prev: Option<&PyTree>) -> String {
        let report = prev.map(|p| diff::structural_diff(&p.0, &self.0));
        self.0.to_dot(report.as_ref())
    }

    fn node_count(&self) -> usize {
        self.0.node_count()
    }

    fn depth(&self) -> usize {
        self.0.depth()
    }

    fn is_leaf(&self) -> bool {
        self.0.is_leaf()
    }

    fn classify(&self, row: Vec<f64>) -> PyResult<usize> {
        self.0.classify(&row).map_err(py_err)
    }

    fn predict(&self, rows: Vec<Vec<f64>>) -> PyResult<Vec<usize>> {
        rows.iter()
            .map(|r| self.0.classify(r).map_err(py_err))
            .collect()
    }

    fn __eq__(&self, other: &PyTree) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "Tree(nodes={}, depth={})",
            self.0.node_count(),
            self.0.depth()
        )
    }
}

/// Labelled rows of numeric features.
#[pyclass(name = "Dataset", module = "keep_regrow", frozen)]
struct PyDataset(Dataset);

#[pymethods]
impl PyDataset {
    /// `n_classes` defaults to one more than the largest label.
    #[new]
    #[pyo3(signature = (rows, labels, n_classes=None))]
    fn new(rows: Vec<Vec<f64>>, labels: Vec<usize>, n_classes: Option<usize>) -> PyResult<Self> {
        let k = n_classes.unwrap_or_else(|| labels.iter().max().map_or(1, |m| m + 1));
        Dataset::from_rows(&rows, labels, k)
            .map(PyDataset)
            .map_err(py_err)
    }

    #[staticmethod]
    fn iris() -> Self {
        PyDataset(Dataset::iris())
    }

    /// `label` is a column index, a header name, or `"last"`.
    #[staticmethod]
    #[pyo3(signature = (path, label="last", has_header=false, delimiter="comma"))]
    fn load_csv(path: &str, label: &str, has_header: bool, delimiter: &str) -> PyResult<Self> {
        let delimiter = match delimiter {
            "comma" => Delimiter::Comma,
            "tab" => Delimiter::Tab,
            "whitespace" => Delimiter::Whitespace,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown delimiter {other:?}, expected comma, tab or whitespace"
                )))
            }
        };
        let options = LoadOptions {
            label: label.parse::<LabelColumn>().unwrap_or_default(),
            has_header,
            delimiter,
        };
        data::load_csv(path, &options)
            .map(PyDataset)
            .map_err(py_err)
    }

    /// The rows at `indices`, in that order.
    fn subset(&self, indices: Vec<usize>) -> PyResult<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.0.n_rows()) {
            return Err(PyValueError::new_err(format!("row {bad} out of range")));
        }
        Ok(PyDataset(self.0.subset(&indices)))
    }

    fn row(&self, i: usize) -> PyResult<Vec<f64>> {
        if i >= self.0.n_rows() {
            return Err(PyValueError::new_err(format!("row {i} out of range")));
        }
        Ok(self.0.row(i).to_vec())
    }

    #[getter]
    fn labels(&self) -> Vec<usize> {
        self.0.labels().to_vec()
    }

    #[getter]
    fn n_rows(&self) -> usize {
        self.0.n_rows()
    }

    #[getter]
    fn n_features(&self) -> usize {
        self.0.n_features()
    }

    #[getter]
    fn n_classes(&self) -> usize {
        self.0.n_classes()
    }

    #[getter]
    fn class_names(&self) -> Vec<String> {
        self.0.class_names().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.n_rows()
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset(rows={}, features={}, classes={})",
            self.0.n_rows(),
            self.0.n_features(),
            self.0.n_classes()
        )
    }
}

/// Unpruned CART tree.
#[pyfunction]
#[pyo3(signature = (data, max_depth=Some(20), min_samples_split=2))]
fn grow(data: &PyDataset, max_depth: Option<usize>, min_samples_split: usize) -> PyResult<PyTree> {
    let g = growth(max_depth, min_samples_split)?;
    keep_regrow::grow::grow(&data.0, &g)
        .map(PyTree)
        .map_err(py_err)
}

/// Optimal pruning of `tree` with every retained node charged `alpha + beta`.
#[pyfunction]
#[pyo3(name = "prune", signature = (tree, data, alpha, beta=0.0))]
fn prune_tree(tree: &PyTree, data: &PyDataset, alpha: f64, beta: f64) -> PyResult<PyTree> {
    prune::prune(&tree.0, &data.0, &params(alpha, beta)?)
        .map(PyTree)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (data, alpha, max_depth=Some(20), min_samples_split=2))]
fn retrain(
    data: &PyDataset,
    alpha: f64,
    max_depth: Option<usize>,
    min_samples_split: usize,
) -> PyResult<PyTree> {
    kr::retrain(
        &data.0,
        &params(alpha, 0.0)?,
        &growth(max_depth, min_samples_split)?,
    )
    .map(PyTree)
    .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (prev, data, alpha, beta, max_depth=Some(20), min_samples_split=2))]
fn update(
    prev: &PyTree,
    data: &PyDataset,
    alpha: f64,
    beta: f64,
    max_depth: Option<usize>,
    min_samples_split: usize,
) -> PyResult<PyTree> {
    kr::update(
        &prev.0,
        &data.0,
        &params(alpha, beta)?,
        &growth(max_depth, min_samples_split)?,
    )
    .map(PyTree)
    .map_err(py_err)
}

/// Number of nodes of `new` that differ from `prev` (all of them if `prev` is None).
#[pyfunction]
#[pyo3(signature = (prev, new))]
fn change_count(prev: Option<&PyTree>, new: &PyTree) -> usize {
    loss::change_count(prev.map(|p| &p.0), &new.0)
}

#[pyfunction]
fn similarity(prev: &PyTree, new: &PyTree) -> f64 {
    diff::similarity(&prev.0, &new.0)
}

/// `{"misclassifications", "nodes", "changed", "total"}`.
#[pyfunction]
#[pyo3(name = "loss", signature = (prev, new, data, alpha, beta))]
fn penalised_loss<'py>(
    py: Python<'py>,
    prev: Option<&PyTree>,
    new: &PyTree,
    data: &PyDataset,
    alpha: f64,
    beta: f64,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    let b =
        loss::loss(prev.map(|p| &p.0), &new.0, &data.0, &params(alpha, beta)?).map_err(py_err)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("misclassifications", b.misclassifications)?;
    d.set_item("nodes", b.nodes)?;
    d.set_item("changed", b.changed)?;
    d.set_item("total", b.total)?;
    Ok(d)
}

/// `(delta, similarity, [(node, status, score), ...])`.
#[pyfunction]
fn structural_diff(prev: &PyTree, new: &PyTree) -> (usize, f64, Vec<(String, &'static str, f64)>) {
    let r = diff::structural_diff(&prev.0, &new.0);
    let rows = r
        .entries
        .iter()
        .map(|e| (e.node.to_string(), e.status.as_str(), e.score))
        .collect();
    (r.delta, r.similarity, rows)
}

/// 95% normal-approximation half-width for an accuracy `p` on `n` test rows.
#[pyfunction]
fn ci_half_width(p: f64, n: usize) -> f64 {
    accuracy_ci_half_width(p, n)
}

#[pymodule]
#[pyo3(name = "keep_regrow")]
fn keep_regrow_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTree>()?;
    m.add_class::<PyDataset>()?;
    m.add_function(wrap_pyfunction!(grow, m)?)?;
    m.add_function(wrap_pyfunction!(prune_tree, m)?)?;
    m.add_function(wrap_pyfunction!(retrain, m)?)?;
    m.add_function(wrap_pyfunction!(update, m)?)?;
    m.add_function(wrap_pyfunction!(change_count, m)?)?;
    m.add_function(wrap_pyfunction!(similarity, m)?)?;
    m.add_function(wrap_pyfunction!(penalised_loss, m)?)?;
    m.add_function(wrap_pyfunction!(structural_diff, m)?)?;
    m.add_function(wrap_pyfunction!(ci_half_width, m)?)?;
    Ok(())
}
