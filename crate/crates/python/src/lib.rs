//! Python bindings for running experiments and single inner solves.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use twostage::bench::{self, ExperimentConfig, RunOptions, Suite, SuiteSettings, TracePolicy};
use twostage::problem::{ConstraintDirection, ResourceAllocation, TypeRealization};
use twostage::solvers::inner_solve as core_inner_solve;
use twostage::Error;

fn to_py(e: Error) -> PyErr {
    if e.is_config() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn options(jobs: usize) -> RunOptions {
    RunOptions {
        jobs,
        traces: TracePolicy::None,
    }
}

/// Runs a JSON experiment config and returns the report CSV.
#[pyfunction]
#[pyo3(signature = (config_json, seeds=None, jobs=0))]
fn run_config(py: Python<'_>, config_json: &str, seeds: Option<Vec<u64>>, jobs: usize) -> PyResult<String> {
    let mut config = ExperimentConfig::from_json(config_json).map_err(to_py)?;
    if let Some(s) = seeds {
        config.seeds = s;
        config.validate().map_err(to_py)?;
    }
    let out = py.detach(|| bench::run_experiment(&config, options(jobs))).map_err(to_py)?;
    Ok(out.report.to_csv())
}

/// Runs `exp1` or `exp2`; returns `(report_csv, table_csv)`.
#[pyfunction]
#[pyo3(signature = (name, horizon=10_000, seeds=None, jobs=0))]
fn run_suite(py: Python<'_>, name: &str, horizon: usize, seeds: Option<Vec<u64>>, jobs: usize) -> PyResult<(String, String)> {
    let suite: Suite = name.parse().map_err(to_py)?;
    let mut settings = SuiteSettings {
        horizon,
        options: options(jobs),
        ..SuiteSettings::default()
    };
    if let Some(s) = seeds {
        settings.seeds = s;
    }
    let out = py.detach(|| bench::run_suite(suite, &settings)).map_err(to_py)?;
    Ok((out.report.to_csv(), bench::emit_table(&out.report)))
}

/// Inner solve of the resource-allocation family for one demand vector.
/// Returns `(x, normalized_value)`.
#[pyfunction]
#[pyo3(signature = (beta, budget_cap, capacity_scale, demand, c, lam, horizon, covering=false))]
#[allow(clippy::too_many_arguments)]
fn inner_solve(
    beta: Vec<f64>,
    budget_cap: f64,
    capacity_scale: f64,
    demand: Vec<f64>,
    c: f64,
    lam: Vec<f64>,
    horizon: usize,
    covering: bool,
) -> PyResult<(Vec<f64>, f64)> {
    let direction = if covering {
        ConstraintDirection::Covering
    } else {
        ConstraintDirection::Packing
    };
    let family = ResourceAllocation::new(beta, budget_cap, capacity_scale, direction).map_err(to_py)?;
    let sol = core_inner_solve(&family, &TypeRealization::new(demand), &[c], &lam, horizon).map_err(to_py)?;
    Ok((sol.x, sol.value))
}

/// Adds the module's functions to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(inner_solve, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

#[pymodule]
fn twostage_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
