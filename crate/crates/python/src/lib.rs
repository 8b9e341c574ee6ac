//! Python module `teirp`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use teirp_core::generate::{generate_micro, MicroConfig};
use teirp_core::model::io::{parse_instance, read_instance, write_instance};
use teirp_core::search::{self, SearchStrategy, SolveConfig};
use teirp_core::solution::Solution;

fn err(e: teirp_core::Error) -> PyErr {
    match e {
        teirp_core::Error::Io(e) => PyErr::from(e),
        e => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(frozen, module = "teirp")]
struct Instance {
    inner: teirp_core::Instance,
}

#[pymethods]
impl Instance {
    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        Ok(Instance { inner: read_instance(path).map_err(err)? })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let data = parse_instance(text).map_err(err)?;
        Ok(Instance { inner: teirp_core::Instance::new(data).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (customers, horizon, k2 = 2, seed = 0))]
    fn micro(customers: usize, horizon: usize, k2: usize, seed: u64) -> PyResult<Self> {
        let data = generate_micro(&MicroConfig { customers, horizon, k2, seed }).map_err(err)?;
        Ok(Instance { inner: teirp_core::Instance::new(data).map_err(err)? })
    }

    fn to_text(&self) -> String {
        write_instance(self.inner.data())
    }

    #[getter]
    fn horizon(&self) -> usize {
        self.inner.horizon()
    }

    #[getter]
    fn n_suppliers(&self) -> usize {
        self.inner.n_suppliers()
    }

    #[getter]
    fn n_satellites(&self) -> usize {
        self.inner.n_satellites()
    }

    #[getter]
    fn n_customers(&self) -> usize {
        self.inner.n_customers()
    }

    fn demand(&self, customer: usize, period: usize) -> PyResult<i64> {
        if customer >= self.inner.n_customers() || period == 0 || period > self.inner.horizon() {
            return Err(PyValueError::new_err("customer or period out of range"));
        }
        Ok(self.inner.demand(customer, period))
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(suppliers={}, satellites={}, customers={}, horizon={})",
            self.inner.n_suppliers(),
            self.inner.n_satellites(),
            self.inner.n_customers(),
            self.inner.horizon()
        )
    }
}

#[pyclass(frozen, module = "teirp")]
struct SolveReport {
    inner: search::SolveReport,
}

#[pymethods]
impl SolveReport {
    #[getter]
    fn status(&self) -> String {
        serde_json::to_value(self.inner.status).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
    }

    #[getter]
    fn objective(&self) -> Option<f64> {
        self.inner.objective
    }

    #[getter]
    fn lb(&self) -> Option<f64> {
        self.inner.lb
    }

    #[getter]
    fn root_lb(&self) -> Option<f64> {
        self.inner.root_lb
    }

    /// Final gap in percent.
    #[getter]
    fn gap(&self) -> Option<f64> {
        self.inner.gap_f
    }

    #[getter]
    fn nodes(&self) -> usize {
        self.inner.nodes
    }

    #[getter]
    fn columns(&self) -> usize {
        self.inner.columns
    }

    #[getter]
    fn time(&self) -> f64 {
        self.inner.time_total_sec
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    /// Solution as JSON, or `None` without one.
    fn solution_json(&self) -> PyResult<Option<String>> {
        self.inner
            .solution
            .as_ref()
            .map(|s| serde_json::to_string(s).map_err(|e| PyRuntimeError::new_err(e.to_string())))
            .transpose()
    }

    fn __repr__(&self) -> String {
        let obj = self.inner.objective.map_or("None".to_owned(), |v| v.to_string());
        format!("SolveReport(status={}, objective={obj}, nodes={})", self.status(), self.inner.nodes)
    }
}

/// Branch-and-price; runs with the GIL released.
#[pyfunction]
#[pyo3(signature = (
    instance, *, time_limit = None, node_limit = None, kappa = 5, half_point = 0.5,
    search = "best-first", threads = None, max_columns = 50, seed = 0, record_times = true
))]
#[allow(clippy::too_many_arguments)]
fn solve(
    py: Python<'_>,
    instance: &Instance,
    time_limit: Option<f64>,
    node_limit: Option<usize>,
    kappa: usize,
    half_point: f64,
    search: &str,
    threads: Option<usize>,
    max_columns: usize,
    seed: u64,
    record_times: bool,
) -> PyResult<SolveReport> {
    let search = match search {
        "best-first" => SearchStrategy::BestFirst,
        "local-depth-first" => SearchStrategy::LocalDepthFirst,
        other => return Err(PyValueError::new_err(format!("unknown search strategy {other:?}"))),
    };
    let mut cfg = SolveConfig { search, time_limit, node_limit, threads, record_times, ..SolveConfig::default() };
    cfg.colgen.pricing.kappa = kappa;
    cfg.colgen.pricing.half_point = half_point;
    cfg.colgen.pricing.max_columns = max_columns;
    cfg.colgen.pricing.seed = seed;
    let inst = &instance.inner;
    let inner = py.allow_threads(|| search::solve(inst, &cfg)).map_err(err)?;
    Ok(SolveReport { inner })
}

/// Exhaustive optimum of a micro instance: `(objective, solution_json)`.
#[pyfunction]
fn oracle(py: Python<'_>, instance: &Instance) -> PyResult<(f64, String)> {
    let inst = &instance.inner;
    let res = py.allow_threads(|| teirp_core::oracle::oracle_solve(inst)).map_err(err)?;
    let json = serde_json::to_string(&res.solution).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((res.objective, json))
}

/// Violations of a JSON solution; empty when feasible with the stated cost.
#[pyfunction]
fn validate(instance: &Instance, solution_json: &str) -> PyResult<Vec<String>> {
    let sol: Solution = serde_json::from_str(solution_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(teirp_core::solution::validate(&instance.inner, &sol))
}

#[pymodule]
fn teirp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Instance>()?;
    m.add_class::<SolveReport>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
