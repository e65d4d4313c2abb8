//! Python bindings. Vectors cross the boundary as lists of floats.

use nalgebra::{DMatrix, DVector};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use quadproj::bench::{emit_report, run_trials, BenchConfig};
use quadproj::{ProjectionKind, Select, SolverConfig, Variant};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vector(xs: Vec<f64>) -> DVector<f64> {
    DVector::from_vec(xs)
}

#[pyclass(name = "Quadric", frozen)]
struct PyQuadric {
    inner: quadproj::Quadric,
}

#[pymethods]
impl PyQuadric {
    /// `B` is a list of rows.
    #[new]
    #[pyo3(signature = (B, b, c))]
    #[allow(non_snake_case)]
    fn new(B: Vec<Vec<f64>>, b: Vec<f64>, c: f64) -> PyResult<Self> {
        let inner = quadproj::Quadric::from_rows(&B, &b, c).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    #[allow(non_snake_case)]
    fn B(&self) -> Vec<Vec<f64>> {
        let m: &DMatrix<f64> = self.inner.matrix();
        m.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    #[getter]
    fn b(&self) -> Vec<f64> {
        self.inner.linear().as_slice().to_vec()
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.constant()
    }

    fn evaluate(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.evaluate(&vector(x)).map_err(err)
    }

    fn gradient(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.gradient(&vector(x)).map_err(err)?.as_slice().to_vec())
    }

    fn center(&self) -> PyResult<Vec<f64>> {
        Ok(self.inner.center().map_err(err)?.as_slice().to_vec())
    }

    /// Raises `ValueError` when the quadric is degenerate, empty or cylindrical.
    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map(|_| ()).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Quadric(dim={})", self.inner.dim())
    }
}

#[pyclass(name = "AxisBox", frozen)]
struct PyAxisBox {
    inner: quadproj::AxisBox,
}

#[pymethods]
impl PyAxisBox {
    #[new]
    fn new(lower: Vec<f64>, upper: Vec<f64>) -> PyResult<Self> {
        let inner = quadproj::AxisBox::from_slices(&lower, &upper).map_err(err)?;
        Ok(Self { inner })
    }

    fn project(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(quadproj::project_box(&self.inner, &vector(x)).map_err(err)?.as_slice().to_vec())
    }

    fn contains(&self, x: Vec<f64>) -> bool {
        x.len() == self.inner.dim() && self.inner.contains(&vector(x), 0.0)
    }
}

/// Returns a dict with `point`, `objective`, `kind`, `mu` and `newton_iters`.
#[pyfunction]
fn project_exact<'py>(py: Python<'py>, q: &PyQuadric, x: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let out = quadproj::project_exact(&q.inner, &vector(x)).map_err(err)?;
    let kind = match out.kind {
        ProjectionKind::Root => "root".to_string(),
        ProjectionKind::Degenerate(k) => format!("degenerate:{k}"),
        ProjectionKind::AlreadyFeasible => "already_feasible".to_string(),
    };
    let d = PyDict::new(py);
    d.set_item("point", out.point.as_slice().to_vec())?;
    d.set_item("objective", out.objective)?;
    d.set_item("kind", kind)?;
    d.set_item("mu", out.mu)?;
    d.set_item("newton_iters", out.newton_iters)?;
    Ok(d)
}

/// `variant` is `"center"` or `"gradient"`, `select` is `"closest"` or
/// `"farthest"`. Returns `None` when the line misses the quadric.
#[pyfunction]
#[pyo3(signature = (q, x, variant = "center", select = "closest"))]
fn quasi_project(q: &PyQuadric, x: Vec<f64>, variant: &str, select: &str) -> PyResult<Option<Vec<f64>>> {
    let variant = match variant {
        "center" => Variant::Center,
        "gradient" => Variant::Gradient,
        other => return Err(err(format!("unknown variant '{other}'"))),
    };
    let select = match select {
        "closest" => Select::Closest,
        "farthest" => Select::Farthest,
        other => return Err(err(format!("unknown select '{other}'"))),
    };
    let p = quadproj::quasi_project(&q.inner, &vector(x), &variant, select).map_err(err)?;
    Ok(p.map(|p| p.as_slice().to_vec()))
}

/// Solves `min |x - x0|` over `box ∩ quadric`. `config` is a JSON object of
/// solver settings; `method` overrides its method.
#[pyfunction]
#[pyo3(signature = (q, bx, x0, method = "ape", config = None))]
fn solve<'py>(
    py: Python<'py>,
    q: &PyQuadric,
    bx: &PyAxisBox,
    x0: Vec<f64>,
    method: &str,
    config: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg: SolverConfig = match config {
        Some(text) => serde_json::from_str(text).map_err(err)?,
        None => SolverConfig::default(),
    };
    cfg.method = method.parse().map_err(err)?;
    let out = quadproj::solve(&q.inner, &bx.inner, &vector(x0), &cfg).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("point", out.point.as_slice().to_vec())?;
    d.set_item("deviation", out.deviation)?;
    d.set_item("objective", out.objective)?;
    d.set_item("termination", out.trace.termination.name())?;
    d.set_item("iterations", out.trace.iterations())?;
    d.set_item("restarts", out.trace.restarts)?;
    Ok(d)
}

/// Runs the benchmark described by a JSON config, writes the CSV to `out`
/// and returns the printed summary.
#[pyfunction]
fn run_bench(config: &str, out: &str) -> PyResult<String> {
    let cfg: BenchConfig = serde_json::from_str(config).map_err(err)?;
    let records = run_trials(&cfg).map_err(err)?;
    let summary = emit_report(&records, std::path::Path::new(out)).map_err(err)?;
    Ok(summary.to_string())
}

#[pymodule]
fn quadproj_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyQuadric>()?;
    m.add_class::<PyAxisBox>()?;
    m.add_function(wrap_pyfunction!(project_exact, m)?)?;
    m.add_function(wrap_pyfunction!(quasi_project, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(run_bench, m)?)?;
    Ok(())
}
