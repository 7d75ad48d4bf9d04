//! Python bindings: `import zeno_sdc`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sdc_core::analyzers::{self, AnalyzerKind, OutputPath};
use sdc_core::protocol::{self, Message, MessageSource};
use sdc_core::{metrics, BellState, DetectorPair};

fn err(e: sdc_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn kind(name: &str) -> PyResult<AnalyzerKind> {
    name.parse().map_err(err)
}

fn bell(name: &str) -> PyResult<BellState> {
    name.parse().map_err(err)
}

/// Monte-Carlo throughput estimate.
#[pyclass(frozen, name = "Estimate")]
struct PyEstimate {
    #[pyo3(get)]
    analyzer: String,
    #[pyo3(get)]
    n: u32,
    #[pyo3(get)]
    seed: u64,
    #[pyo3(get)]
    r_hat: f64,
    #[pyo3(get)]
    shots: u64,
    #[pyo3(get)]
    ci95: (f64, f64),
    #[pyo3(get)]
    survivors: u64,
    #[pyo3(get)]
    decode_errors: u64,
    #[pyo3(get)]
    lost_fraction: f64,
}

#[pymethods]
impl PyEstimate {
    fn __repr__(&self) -> String {
        format!(
            "Estimate(analyzer={:?}, n={}, r_hat={}, shots={}, ci95=({}, {}))",
            self.analyzer, self.n, self.r_hat, self.shots, self.ci95.0, self.ci95.1
        )
    }
}

#[pyfunction]
fn r_analytic(analyzer: &str, n: u32) -> PyResult<f64> {
    metrics::r_analytic(kind(analyzer)?, n).map_err(err)
}

#[pyfunction]
fn p_survival(analyzer: &str, n: u32) -> PyResult<f64> {
    metrics::p_survival(kind(analyzer)?, n).map_err(err)
}

#[pyfunction]
fn min_n_for_target(analyzer: &str, target_r: f64) -> PyResult<u32> {
    metrics::min_n_for_target(kind(analyzer)?, target_r).map_err(err)
}

/// `[(N, R), ...]` for every N in `[n_min, n_max]`.
#[pyfunction]
fn efficiency_curve(analyzer: &str, n_min: u32, n_max: u32) -> PyResult<Vec<(u32, f64)>> {
    Ok(metrics::efficiency_curve(kind(analyzer)?, n_min, n_max)
        .map_err(err)?
        .points)
}

/// `(beamsplitters, needs_ancilla)`.
#[pyfunction]
fn resource_counts(analyzer: &str, n: u32) -> PyResult<(u64, bool)> {
    let r = metrics::resource_counts(kind(analyzer)?, n).map_err(err)?;
    Ok((r.beamsplitters, r.needs_ancilla))
}

#[pyfunction]
#[pyo3(signature = (analyzer, n, shots, seed=42, message="uniform"))]
fn simulate(py: Python<'_>, analyzer: &str, n: u32, shots: u64, seed: u64, message: &str) -> PyResult<PyEstimate> {
    let k = kind(analyzer)?;
    let source: MessageSource = message.parse().map_err(err)?;
    let est = py
        .detach(|| protocol::simulate_with(k, n, shots, seed, source))
        .map_err(err)?;
    Ok(PyEstimate {
        analyzer: k.to_string(),
        n,
        seed,
        r_hat: est.r_hat,
        shots: est.shots,
        ci95: est.ci95,
        survivors: est.survivors,
        decode_errors: est.decode_errors,
        lost_fraction: est.lost_fraction(),
    })
}

/// Outcome probabilities keyed by click pair (e.g. `"D2·D3"`) or
/// `"photon_lost"`.
#[pyfunction]
#[pyo3(signature = (analyzer, bell_state, n, path="x"))]
fn analyze<'py>(py: Python<'py>, analyzer: &str, bell_state: &str, n: u32, path: &str) -> PyResult<Bound<'py, PyDict>> {
    let k = kind(analyzer)?;
    let b = bell(bell_state)?;
    let dist = match (k, path) {
        (AnalyzerKind::Dqz, "x") => analyzers::dqz_analyze(b, n, OutputPath::X),
        (AnalyzerKind::Dqz, "y") => analyzers::dqz_analyze(b, n, OutputPath::Y),
        (_, "x") => analyzers::analyze(k, b, n),
        _ => return Err(PyValueError::new_err(format!("path {path:?} is not available for {k}"))),
    }
    .map_err(err)?;
    let out = PyDict::new(py);
    for (o, p) in dist.iter() {
        let key = o.result.to_string();
        let prev: f64 = match out.get_item(&key)? {
            Some(v) => v.extract()?,
            None => 0.0,
        };
        out.set_item(key, prev + p)?;
    }
    Ok(out)
}

/// Bell state name (`"phi+"`, ...) for a two-bit message string.
#[pyfunction]
fn encode(message: &str) -> PyResult<String> {
    let m: Message = message.parse().map_err(err)?;
    Ok(protocol::encode(m).to_string())
}

/// `(bell_state, message)` for a click pair such as `"D1·D3"`.
#[pyfunction]
#[pyo3(signature = (clicks, analyzer="dqz"))]
fn decode(clicks: &str, analyzer: &str) -> PyResult<(String, String)> {
    let pair: DetectorPair = clicks.parse().map_err(err)?;
    let (b, m) = protocol::decode_for(kind(analyzer)?, pair).map_err(err)?;
    Ok((b.to_string(), m.to_string()))
}

/// Real amplitudes over `|C T⟩ = 00, 01, 10, 11`.
#[pyfunction]
fn qz_collapsed_state(bell_state: &str) -> PyResult<Vec<f64>> {
    Ok(analyzers::qz_collapsed_state(bell(bell_state)?)
        .amps()
        .iter()
        .map(|a| a.re)
        .collect())
}

/// Names of the checks that failed; empty when everything passes.
#[pyfunction]
fn selftest(py: Python<'_>) -> Vec<String> {
    py.detach(|| sdc_core::selftest::run_selftest(None))
        .into_iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.to_string())
        .collect()
}

#[pymodule]
fn zeno_sdc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEstimate>()?;
    m.add_function(wrap_pyfunction!(r_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(p_survival, m)?)?;
    m.add_function(wrap_pyfunction!(min_n_for_target, m)?)?;
    m.add_function(wrap_pyfunction!(efficiency_curve, m)?)?;
    m.add_function(wrap_pyfunction!(resource_counts, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(decode, m)?)?;
    m.add_function(wrap_pyfunction!(qz_collapsed_state, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    m.add(
        "ANALYZERS",
        AnalyzerKind::ALL.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
    )?;
    m.add("EXPERIMENTAL_BENCHMARK_R", metrics::EXPERIMENTAL_BENCHMARK_R)?;
    Ok(())
}
