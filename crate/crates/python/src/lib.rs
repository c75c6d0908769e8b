//! Python bindings for the forecasting toolkit.
//!
//! Scalar series travel as plain lists of floats; structured results
//! (decompositions, fitted models, pipeline reports) come back as nested
//! dicts mirroring the JSON the CLI writes. Fitted models round-trip
//! through those dicts, so a model produced by `fit_trend` can be handed
//! straight back to `predict_trend`.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyFloat, PyInt, PyList, PyString};
use pyo3::IntoPyObjectExt;
use serde_json::Value;

use vsxc_core::clusterlstm::{clusterlstm_predict, clusterlstm_train, make_windows, ClusterLstmConfig, ClusterLstmModel};
use vsxc_core::ga::{ga_optimize, GaConfig};
use vsxc_core::kalman::{kalman_smooth, KalmanConfig};
use vsxc_core::pipeline::{run_ablation, run_pipeline, PipelineConfig};
use vsxc_core::series::TimeSeries;
use vsxc_core::synth::{generate_synthetic, RegimeSpec, SynthSpec};
use vsxc_core::trend::{detect_changepoints, fit_segsigmoid, SegSigmoidModel, TrendConfig};
use vsxc_core::vmd::{vmd_decompose, VmdParams};

fn core_err(e: vsxc_core::Error) -> PyErr {
    match e {
        vsxc_core::Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py(py: Python<'_>, value: &Value) -> PyResult<Py<PyAny>> {
    match value {
        Value::Null => Ok(py.None()),
        Value::Bool(b) => b.into_py_any(py),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py_any(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py_any(py)
            }
        }
        Value::String(s) => s.into_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_py_any(py)
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.into_py_any(py)
        }
    }
}

fn py_to_json(obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    if obj.is_none() {
        return Ok(Value::Null);
    }
    if let Ok(b) = obj.cast::<PyBool>() {
        return Ok(Value::Bool(b.is_true()));
    }
    if let Ok(i) = obj.cast::<PyInt>() {
        return Ok(Value::from(i.extract::<i64>()?));
    }
    if let Ok(f) = obj.cast::<PyFloat>() {
        return Ok(Value::from(f.extract::<f64>()?));
    }
    if let Ok(s) = obj.cast::<PyString>() {
        return Ok(Value::from(s.to_str()?.to_owned()));
    }
    if let Ok(list) = obj.cast::<PyList>() {
        let mut items = Vec::with_capacity(list.len());
        for item in list.iter() {
            items.push(py_to_json(&item)?);
        }
        return Ok(Value::Array(items));
    }
    if let Ok(dict) = obj.cast::<PyDict>() {
        let mut map = serde_json::Map::new();
        for (k, v) in dict.iter() {
            map.insert(k.extract::<String>()?, py_to_json(&v)?);
        }
        return Ok(Value::Object(map));
    }
    Err(PyValueError::new_err(format!(
        "cannot convert {} to a JSON value",
        obj.get_type().name()?
    )))
}

fn to_py_report<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    json_to_py(py, &serde_json::to_value(value).map_err(json_err)?)
}

fn series_from(values: Vec<f64>, timestamps: Option<Vec<i64>>) -> PyResult<TimeSeries> {
    match timestamps {
        Some(ts) => TimeSeries::new(ts, values).map_err(core_err),
        None => TimeSeries::from_values(values).map_err(core_err),
    }
}

/// Seeded synthetic displacement-like series with its true components.
#[pyfunction]
#[pyo3(signature = (length=2426, seed=42, amplitude=1.0, period=24.0, ar_phi=0.8, ar_sigma=0.15, noise_sigma=0.05, regime_high=None, regime_block=200, regime_phi=None, regime_smooth=false))]
#[allow(clippy::too_many_arguments)]
fn synth(
    py: Python<'_>,
    length: usize,
    seed: u64,
    amplitude: f64,
    period: f64,
    ar_phi: f64,
    ar_sigma: f64,
    noise_sigma: f64,
    regime_high: Option<f64>,
    regime_block: usize,
    regime_phi: Option<f64>,
    regime_smooth: bool,
) -> PyResult<Py<PyAny>> {
    let spec = SynthSpec {
        length,
        seed,
        amplitude,
        period,
        ar_phi,
        ar_sigma,
        noise_sigma,
        regime: regime_high.map(|high_sigma| RegimeSpec {
            high_sigma,
            block_len: regime_block,
            high_phi: regime_phi,
            smooth: regime_smooth,
        }),
        ..Default::default()
    };
    let data = generate_synthetic(&spec).map_err(core_err)?;
    let dict = PyDict::new(py);
    dict.set_item("timestamps", data.series.timestamps().to_vec())?;
    dict.set_item("values", data.series.values().to_vec())?;
    dict.set_item("trend", data.trend)?;
    dict.set_item("periodic", data.periodic)?;
    dict.set_item("residual", data.residual)?;
    dict.set_item("noise", data.noise)?;
    dict.into_py_any(py)
}

/// Scalar Kalman smoothing; returns the filtered values.
#[pyfunction]
#[pyo3(signature = (values, q=1.0, r=16.0, x0=None, p0=None))]
fn kalman(values: Vec<f64>, q: f64, r: f64, x0: Option<f64>, p0: Option<f64>) -> PyResult<Vec<f64>> {
    let series = series_from(values, None)?;
    let cfg = KalmanConfig { q, r, x0, p0 };
    Ok(kalman_smooth(&series, &cfg).map_err(core_err)?.values().to_vec())
}

/// Variational mode decomposition into trend/periodic/residual.
#[pyfunction]
#[pyo3(signature = (values, alpha=2000.0, tau=0.0, k=3, tol=1e-7, max_iter=500, dc_mode=true))]
fn vmd(
    py: Python<'_>,
    values: Vec<f64>,
    alpha: f64,
    tau: f64,
    k: usize,
    tol: f64,
    max_iter: usize,
    dc_mode: bool,
) -> PyResult<Py<PyAny>> {
    let series = series_from(values, None)?;
    let params = VmdParams {
        k_modes: k,
        alpha,
        tau,
        tol,
        max_iter,
        dc_mode,
    };
    let d = vmd_decompose(&series, &params).map_err(core_err)?;
    let dict = PyDict::new(py);
    dict.set_item("trend", d.trend.values().to_vec())?;
    dict.set_item("periodic", d.periodic.values().to_vec())?;
    dict.set_item("residual", d.residual.values().to_vec())?;
    dict.set_item("center_freqs", d.center_freqs)?;
    dict.set_item("recon_mse", d.recon_mse)?;
    dict.set_item("iterations", d.iterations)?;
    dict.set_item("converged", d.converged)?;
    dict.into_py_any(py)
}

/// Genetic-algorithm search of the VMD hyperparameters (alpha, tau).
#[pyfunction]
#[pyo3(signature = (values, pop=50, generations=100, seed=0, alpha_bounds=(1.0, 5000.0), tau_bounds=(0.0, 1.0), max_iter=500))]
fn ga_tune(
    py: Python<'_>,
    values: Vec<f64>,
    pop: usize,
    generations: usize,
    seed: u64,
    alpha_bounds: (f64, f64),
    tau_bounds: (f64, f64),
    max_iter: usize,
) -> PyResult<Py<PyAny>> {
    let series = series_from(values, None)?;
    let cfg = GaConfig {
        pop_size: pop,
        generations,
        seed,
        alpha_bounds,
        tau_bounds,
        ..Default::default()
    };
    let base = VmdParams {
        max_iter,
        ..Default::default()
    };
    let result = ga_optimize(&series, &cfg, &base).map_err(core_err)?;
    to_py_report(py, &result)
}

#[pyfunction]
fn rmse(pred: Vec<f64>, target: Vec<f64>) -> PyResult<f64> {
    vsxc_core::rmse(&pred, &target).map_err(core_err)
}

#[pyfunction]
fn mape(pred: Vec<f64>, target: Vec<f64>) -> PyResult<f64> {
    vsxc_core::mape(&pred, &target).map_err(core_err)
}

#[pyfunction]
fn mann_kendall(py: Python<'_>, values: Vec<f64>) -> PyResult<Py<PyAny>> {
    to_py_report(py, &vsxc_core::stats::mann_kendall(&values).map_err(core_err)?)
}

#[pyfunction]
#[pyo3(signature = (values, lag=1))]
fn ljung_box(py: Python<'_>, values: Vec<f64>, lag: usize) -> PyResult<Py<PyAny>> {
    to_py_report(py, &vsxc_core::stats::ljung_box(&values, lag).map_err(core_err)?)
}

#[pyfunction]
fn granger(py: Python<'_>, target: Vec<f64>, cause: Vec<f64>, lag: usize) -> PyResult<Py<PyAny>> {
    to_py_report(py, &vsxc_core::stats::granger_test(&target, &cause, lag).map_err(core_err)?)
}

#[pyfunction]
fn acf(values: Vec<f64>, max_lag: usize) -> PyResult<Vec<f64>> {
    vsxc_core::stats::acf(&values, max_lag).map_err(core_err)
}

/// Fits the piecewise-logistic trend; returns the fit report with the
/// serialized model under "model".
#[pyfunction]
#[pyo3(signature = (values, timestamps=None, alpha=0.05, beta=1.0/6.0, cp_range=0.95, tau_cp=0.5, capacity=None, max_epochs=20_000))]
#[allow(clippy::too_many_arguments)]
fn fit_trend(
    py: Python<'_>,
    values: Vec<f64>,
    timestamps: Option<Vec<i64>>,
    alpha: f64,
    beta: f64,
    cp_range: f64,
    tau_cp: f64,
    capacity: Option<f64>,
    max_epochs: usize,
) -> PyResult<Py<PyAny>> {
    let series = series_from(values, timestamps)?;
    let cfg = TrendConfig {
        alpha,
        beta,
        cp_range,
        tau_cp,
        capacity,
        max_epochs,
        ..Default::default()
    };
    let cps = detect_changepoints(&series, alpha, beta, cp_range).map_err(core_err)?;
    let report = fit_segsigmoid(&series, &cps, &cfg).map_err(core_err)?;
    to_py_report(py, &report)
}

/// Evaluates a trend model (as returned inside `fit_trend`'s report) at
/// epoch-second timestamps.
#[pyfunction]
fn predict_trend(model: &Bound<'_, PyAny>, timestamps: Vec<i64>) -> PyResult<Vec<f64>> {
    let value = py_to_json(model)?;
    let model: SegSigmoidModel = serde_json::from_value(value).map_err(json_err)?;
    Ok(vsxc_core::trend::predict_trend(&model, &timestamps))
}

/// Trains the clustered-LSTM residual model and returns it as a dict.
#[pyfunction]
#[pyo3(signature = (values, k=4, window=24, epochs=200, learning_rate=0.01, seed=0))]
fn fit_residual(
    py: Python<'_>,
    values: Vec<f64>,
    k: usize,
    window: usize,
    epochs: usize,
    learning_rate: f64,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let series = series_from(values, None)?;
    let windows = make_windows(&series, window).map_err(core_err)?;
    let cfg = ClusterLstmConfig {
        k,
        window,
        epochs,
        learning_rate,
        ..Default::default()
    };
    let (model, _info) = clusterlstm_train(&windows, &cfg, seed).map_err(core_err)?;
    to_py_report(py, &model)
}

/// Recursive multi-step prediction with a residual model dict.
#[pyfunction]
fn predict_residual(model: &Bound<'_, PyAny>, recent: Vec<f64>, horizon: usize) -> PyResult<Vec<f64>> {
    let value = py_to_json(model)?;
    let model: ClusterLstmModel = serde_json::from_value(value).map_err(json_err)?;
    clusterlstm_predict(&model, &recent, horizon).map_err(core_err)
}

fn config_from(config: Option<&Bound<'_, PyAny>>, seed: Option<u64>) -> PyResult<PipelineConfig> {
    let mut cfg: PipelineConfig = match config {
        Some(obj) => serde_json::from_value(py_to_json(obj)?).map_err(json_err)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Full pipeline run; `config` mirrors the CLI's JSON configuration.
#[pyfunction]
#[pyo3(signature = (values, timestamps=None, config=None, seed=None))]
fn pipeline(
    py: Python<'_>,
    values: Vec<f64>,
    timestamps: Option<Vec<i64>>,
    config: Option<&Bound<'_, PyAny>>,
    seed: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let series = series_from(values, timestamps)?;
    let cfg = config_from(config, seed)?;
    let report = run_pipeline(&series, &cfg).map_err(core_err)?;
    to_py_report(py, &report)
}

/// The 2x2 ablation grid over periodic and residual models.
#[pyfunction]
#[pyo3(signature = (values, timestamps=None, config=None, seed=None))]
fn ablate(
    py: Python<'_>,
    values: Vec<f64>,
    timestamps: Option<Vec<i64>>,
    config: Option<&Bound<'_, PyAny>>,
    seed: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let series = series_from(values, timestamps)?;
    let cfg = config_from(config, seed)?;
    let report = run_ablation(&series, &cfg).map_err(core_err)?;
    to_py_report(py, &report)
}

#[pymodule]
fn vsxc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(synth, m)?)?;
    m.add_function(wrap_pyfunction!(kalman, m)?)?;
    m.add_function(wrap_pyfunction!(vmd, m)?)?;
    m.add_function(wrap_pyfunction!(ga_tune, m)?)?;
    m.add_function(wrap_pyfunction!(rmse, m)?)?;
    m.add_function(wrap_pyfunction!(mape, m)?)?;
    m.add_function(wrap_pyfunction!(mann_kendall, m)?)?;
    m.add_function(wrap_pyfunction!(ljung_box, m)?)?;
    m.add_function(wrap_pyfunction!(granger, m)?)?;
    m.add_function(wrap_pyfunction!(acf, m)?)?;
    m.add_function(wrap_pyfunction!(fit_trend, m)?)?;
    m.add_function(wrap_pyfunction!(predict_trend, m)?)?;
    m.add_function(wrap_pyfunction!(fit_residual, m)?)?;
    m.add_function(wrap_pyfunction!(predict_residual, m)?)?;
    m.add_function(wrap_pyfunction!(pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(ablate, m)?)?;
    Ok(())
}
