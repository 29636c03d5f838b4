//! Python bindings. Reports are returned as plain dicts with the same shape
//! as the CLI's JSON output.

use cat_teleport::protocols::parity::{parity_oracle, ParityModel};
use cat_teleport::protocols::{self, ChannelSpec, EcsSpec, Engine, TeleportOptions};
use cat_teleport::report::to_json;
use cat_teleport::{
    Bipartition, ChannelSign, CoherentSuperposition, Complex64, Error, FockState, PartitionKind,
};
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        e if e.is_numerical() => PyArithmeticError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(py_err)
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = to_json(value, false).map_err(py_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Finite superposition of multimode coherent states.
#[pyclass(name = "CoherentState", module = "cat_teleport", frozen)]
struct PyCoherentState {
    inner: CoherentSuperposition,
}

#[pymethods]
impl PyCoherentState {
    /// `terms` is a list of `(coefficient, [label per mode])`.
    #[new]
    fn new(modes: usize, terms: Vec<(Complex64, Vec<Complex64>)>) -> PyResult<Self> {
        Ok(Self { inner: CoherentSuperposition::new(modes, terms).map_err(py_err)? })
    }

    #[staticmethod]
    fn product(labels: Vec<Complex64>) -> PyResult<Self> {
        Ok(Self { inner: CoherentSuperposition::product(&labels).map_err(py_err)? })
    }

    #[getter]
    fn modes(&self) -> usize {
        self.inner.modes()
    }

    #[getter]
    fn terms(&self) -> Vec<(Complex64, Vec<Complex64>)> {
        self.inner.terms().iter().map(|t| (t.coeff, t.labels.clone())).collect()
    }

    fn norm_sqr(&self) -> f64 {
        self.inner.norm_sqr()
    }

    fn normalize(&self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.normalize().map_err(py_err)? })
    }

    fn overlap(&self, other: &Self) -> PyResult<Complex64> {
        self.inner.overlap(&other.inner).map_err(py_err)
    }

    fn tensor(&self, other: &Self) -> Self {
        Self { inner: self.inner.tensor(&other.inner) }
    }

    fn phase_shift(&self, mode: usize, phi: f64) -> PyResult<Self> {
        Ok(Self { inner: self.inner.phase_shift(mode, phi).map_err(py_err)? })
    }

    fn balanced_bs(&self, i: usize, j: usize) -> PyResult<Self> {
        Ok(Self { inner: self.inner.balanced_bs(i, j).map_err(py_err)? })
    }

    fn raw_bs(&self, i: usize, j: usize) -> PyResult<Self> {
        Ok(Self { inner: self.inner.raw_bs(i, j).map_err(py_err)? })
    }

    /// Concurrence of the cut `side` against the remaining modes.
    fn concurrence(&self, side: Vec<usize>) -> PyResult<f64> {
        let partition = Bipartition::new(&side, self.inner.modes()).map_err(py_err)?;
        cat_teleport::concurrence_pure(&self.inner, &partition).map_err(py_err)
    }

    fn to_fock(&self, cutoffs: Vec<usize>) -> PyResult<PyFockState> {
        let (inner, _) = self.inner.to_fock(&cutoffs).map_err(py_err)?;
        Ok(PyFockState { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner, false).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("CoherentState(modes={}, terms={})", self.inner.modes(), self.inner.terms().len())
    }
}

/// Dense truncated photon-number state, last mode fastest.
#[pyclass(name = "FockState", module = "cat_teleport", frozen)]
struct PyFockState {
    inner: FockState,
}

#[pymethods]
impl PyFockState {
    #[staticmethod]
    fn basis(cutoffs: Vec<usize>, occupation: Vec<usize>) -> PyResult<Self> {
        Ok(Self { inner: FockState::basis(&cutoffs, &occupation).map_err(py_err)? })
    }

    #[getter]
    fn cutoffs(&self) -> Vec<usize> {
        self.inner.cutoffs().to_vec()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    fn norm_sqr(&self) -> f64 {
        self.inner.norm_sqr()
    }

    fn fidelity(&self, other: &Self) -> PyResult<f64> {
        cat_teleport::fidelity(&self.inner, &other.inner).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("FockState(cutoffs={:?})", self.inner.cutoffs())
    }
}

#[pyfunction]
#[pyo3(signature = (eps_plus, eps_minus, alpha, parties = 2))]
fn build_ecs(eps_plus: Complex64, eps_minus: Complex64, alpha: Complex64, parties: usize) -> PyResult<PyCoherentState> {
    let spec = EcsSpec::new(eps_plus, eps_minus, alpha, parties).map_err(py_err)?;
    Ok(PyCoherentState { inner: protocols::build_ecs(&spec).map_err(py_err)? })
}

#[pyfunction]
#[pyo3(signature = (sign, alpha, modes = 3))]
fn build_channel(sign: &str, alpha: Complex64, modes: usize) -> PyResult<PyCoherentState> {
    let spec = ChannelSpec::new(parse(sign)?, alpha, modes).map_err(py_err)?;
    Ok(PyCoherentState { inner: protocols::build_channel(&spec).map_err(py_err)? })
}

#[pyfunction]
#[pyo3(signature = (alpha, modes = 3))]
fn prepare_channel_via_bs(alpha: Complex64, modes: usize) -> PyResult<PyCoherentState> {
    Ok(PyCoherentState { inner: protocols::prepare_channel_via_bs(alpha, modes).map_err(py_err)? })
}

/// Runs the teleportation protocol and returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (alpha, eps_plus = Complex64::new(1.0, 0.0), eps_minus = Complex64::new(1.0, 0.0), sign = "minus", parties = 2, engine = "analytic", mass_tolerance = 1e-10, cutoff = None))]
#[allow(clippy::too_many_arguments)]
fn teleport<'py>(
    py: Python<'py>,
    alpha: Complex64,
    eps_plus: Complex64,
    eps_minus: Complex64,
    sign: &str,
    parties: usize,
    engine: &str,
    mass_tolerance: f64,
    cutoff: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let input = EcsSpec::new(eps_plus, eps_minus, alpha, parties).map_err(py_err)?;
    let channel = ChannelSpec::for_input(parse::<ChannelSign>(sign)?, &input).map_err(py_err)?;
    let opts = TeleportOptions { mass_tolerance, cutoff_override: cutoff, ..TeleportOptions::default() };
    let engine: Engine = parse(engine)?;
    let report = py.detach(|| protocols::teleport_ecs(&input, &channel, engine, &opts)).map_err(py_err)?;
    to_dict(py, &report)
}

#[pyfunction]
fn small_alpha_teleport<'py>(py: Python<'py>, a: Complex64, b: Complex64) -> PyResult<Bound<'py, PyAny>> {
    let report = protocols::small_alpha_teleport(a, b).map_err(py_err)?;
    to_dict(py, &report)
}

#[pyfunction]
fn channel_limit_fidelity(alpha: f64) -> PyResult<f64> {
    protocols::channel_limit_fidelity(alpha).map_err(py_err)
}

#[pyfunction]
fn success_prob_closed_form(sign: &str, alpha: f64) -> PyResult<f64> {
    Ok(cat_teleport::success_prob_closed_form(parse(sign)?, alpha))
}

#[pyfunction]
fn concurrence_closed_form(sign: &str, partition: &str, alpha: f64) -> PyResult<f64> {
    let kind: PartitionKind = parse(partition)?;
    Ok(cat_teleport::concurrence_closed_form(parse(sign)?, kind, alpha))
}

/// Reads `field` (single mode) with the atom; returns `(even_probability, odd_probability)`.
#[pyfunction]
fn parity_probabilities(field: &PyFockState) -> PyResult<(f64, f64)> {
    let model = ParityModel::canonical(1.0).map_err(py_err)?;
    let m = parity_oracle(&field.inner, &model).map_err(py_err)?;
    Ok((m.even.probability, m.odd.probability))
}

#[pymodule]
#[pyo3(name = "cat_teleport")]
fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCoherentState>()?;
    m.add_class::<PyFockState>()?;
    m.add_function(wrap_pyfunction!(build_ecs, m)?)?;
    m.add_function(wrap_pyfunction!(build_channel, m)?)?;
    m.add_function(wrap_pyfunction!(prepare_channel_via_bs, m)?)?;
    m.add_function(wrap_pyfunction!(teleport, m)?)?;
    m.add_function(wrap_pyfunction!(small_alpha_teleport, m)?)?;
    m.add_function(wrap_pyfunction!(channel_limit_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(success_prob_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(parity_probabilities, m)?)?;
    Ok(())
}
