//! Python bindings for the `permutent` library.
//!
//! Structured results (reports, headers) are returned as plain dicts built
//! from their JSON form, so Python sees the same field names as the CLI.

use permutent::entropy::DEFAULT_ZERO_TOL;
use permutent::oracle::MATCH_TOL;
use permutent::{Error, SectorConfig, Spectrum};
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyException, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(
    permutent_py,
    ResourceGuardError,
    PyException,
    "A computation would exceed a size limit."
);

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(m) => PyValueError::new_err(m),
        Error::ResourceGuard(m) => ResourceGuardError::new_err(m),
        Error::NonConvergence { .. } => PyArithmeticError::new_err(e.to_string()),
        Error::Io(m) => PyException::new_err(m),
    }
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyException::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A symmetric sector, finite (`occupations`) or infinite (`densities`).
#[pyclass(name = "SectorConfig", frozen)]
pub struct PySectorConfig {
    inner: SectorConfig,
}

#[pymethods]
impl PySectorConfig {
    #[staticmethod]
    fn finite(occupations: Vec<usize>) -> PyResult<Self> {
        SectorConfig::finite(occupations)
            .map(|inner| Self { inner })
            .map_err(to_py_err)
    }

    #[staticmethod]
    fn infinite(densities: Vec<f64>) -> PyResult<Self> {
        SectorConfig::infinite(densities)
            .map(|inner| Self { inner })
            .map_err(to_py_err)
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma()
    }

    /// Number of sites, or `None` in the thermodynamic limit.
    #[getter(L)]
    fn size(&self) -> Option<usize> {
        self.inner.size()
    }

    #[getter]
    fn densities(&self) -> Vec<f64> {
        self.inner.densities()
    }

    fn __repr__(&self) -> String {
        match &self.inner {
            SectorConfig::Finite { occupations } => format!("SectorConfig.finite({occupations:?})"),
            SectorConfig::Infinite { densities } => format!("SectorConfig.infinite({densities:?})"),
        }
    }
}

#[pyclass(name = "Spectrum", frozen)]
pub struct PySpectrum {
    inner: Spectrum,
}

#[pymethods]
impl PySpectrum {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.block_size()
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn dropped_mass(&self) -> f64 {
        self.inner.dropped_mass()
    }

    fn weights(&self) -> Vec<f64> {
        self.inner.weights()
    }

    fn log2_weights(&self) -> Vec<f64> {
        self.inner.entries().iter().map(|e| e.weight.log2()).collect()
    }

    fn compositions(&self) -> Vec<Vec<usize>> {
        self.inner
            .entries()
            .iter()
            .map(|e| e.composition.parts().to_vec())
            .collect()
    }

    /// Exact weights as `"p/q"` strings, when available.
    fn exact_weights(&self) -> Option<Vec<String>> {
        (0..self.inner.len())
            .map(|i| self.inner.exact_weight(i).map(|w| w.to_string()))
            .collect()
    }

    /// True when exact weights are attached and sum to exactly one.
    fn is_exactly_normalized(&self) -> Option<bool> {
        self.inner.exact_total().map(|t| t == num_one())
    }

    fn total_weight(&self) -> f64 {
        self.inner.total_weight()
    }

    fn entropy(&self) -> PyResult<f64> {
        permutent::entropy_of_spectrum(&self.inner).map_err(to_py_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "Spectrum(n={}, d={}, entries={})",
            self.inner.block_size(),
            self.inner.d(),
            self.inner.len()
        )
    }
}

fn num_one() -> num_rational::BigRational {
    num_rational::BigRational::from_integer(1.into())
}

#[pyclass(name = "GaussianModel", frozen)]
pub struct PyGaussianModel {
    inner: permutent::GaussianModel,
}

#[pymethods]
impl PyGaussianModel {
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn det_a(&self) -> f64 {
        self.inner.det_a()
    }

    fn entropy(&self) -> f64 {
        permutent::gaussian_entropy(&self.inner)
    }

    fn density_at(&self, occupations: Vec<usize>) -> f64 {
        self.inner.density_at(&occupations)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &self.inner)
    }
}

#[pyfunction]
#[pyo3(signature = (config, n, exact_rational = false))]
fn exact_spectrum(config: &PySectorConfig, n: usize, exact_rational: bool) -> PyResult<PySpectrum> {
    let s = if exact_rational {
        permutent::exact_spectrum_rational(&config.inner, n)
    } else {
        permutent::exact_spectrum(&config.inner, n)
    };
    s.map(|inner| PySpectrum { inner }).map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (densities, n, cutoff = 0.0))]
fn thermo_spectrum(densities: Vec<f64>, n: usize, cutoff: f64) -> PyResult<PySpectrum> {
    permutent::thermo_spectrum(&densities, n, cutoff)
        .map(|inner| PySpectrum { inner })
        .map_err(to_py_err)
}

#[pyfunction]
fn uniform_mixed_spectrum(n: usize, d: usize) -> PyResult<PySpectrum> {
    permutent::uniform_mixed_spectrum(n, d)
        .map(|inner| PySpectrum { inner })
        .map_err(to_py_err)
}

#[pyfunction]
fn block_entropy(config: &PySectorConfig, n: usize) -> PyResult<f64> {
    permutent::block_entropy(&config.inner, n).map_err(to_py_err)
}

#[pyfunction]
fn asymptotic_entropy(config: &PySectorConfig, n: usize) -> PyResult<f64> {
    permutent::asymptotic_entropy(&config.inner, n).map_err(to_py_err)
}

#[pyfunction]
fn max_entropy_bound(n: usize, d: usize) -> f64 {
    permutent::max_entropy_bound(n, d)
}

#[pyfunction]
fn entropy_report<'py>(py: Python<'py>, config: &PySectorConfig, n: usize) -> PyResult<Bound<'py, PyAny>> {
    let report = permutent::entropy_report(&config.inner, n).map_err(to_py_err)?;
    to_dict(py, &report)
}

#[pyfunction]
#[pyo3(signature = (densities, zero_tol = DEFAULT_ZERO_TOL))]
fn effective_spin<'py>(py: Python<'py>, densities: Vec<f64>, zero_tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let e = permutent::effective_spin(&densities, zero_tol).map_err(to_py_err)?;
    to_dict(py, &e)
}

#[pyfunction]
#[pyo3(signature = (config, n, central_charge = 1.0))]
fn finite_size_corrections<'py>(
    py: Python<'py>,
    config: &PySectorConfig,
    n: usize,
    central_charge: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let r = permutent::finite_size_corrections(&config.inner, n, central_charge).map_err(to_py_err)?;
    to_dict(py, &r)
}

#[pyfunction]
fn fit_prefactor(points: Vec<(usize, f64)>) -> PyResult<f64> {
    permutent::fit_prefactor(&points).map_err(to_py_err)
}

#[pyfunction]
fn build_gaussian(densities: Vec<f64>, n: usize) -> PyResult<PyGaussianModel> {
    permutent::build_gaussian(&densities, n)
        .map(|inner| PyGaussianModel { inner })
        .map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (config, n, tol = MATCH_TOL))]
fn verify_theorem<'py>(
    py: Python<'py>,
    config: &PySectorConfig,
    n: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let r = py
        .detach(|| permutent::verify_theorem(&config.inner, n, tol))
        .map_err(to_py_err)?;
    to_dict(py, &r)
}

#[pyfunction]
#[pyo3(signature = (sites, d, n, tol = MATCH_TOL))]
fn verify_uniform_mixture<'py>(
    py: Python<'py>,
    sites: usize,
    d: usize,
    n: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let r = py
        .detach(|| permutent::verify_uniform_mixture(sites, d, n, tol))
        .map_err(to_py_err)?;
    to_dict(py, &r)
}

#[pymodule]
pub fn permutent_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("ResourceGuardError", m.py().get_type::<ResourceGuardError>())?;
    m.add_class::<PySectorConfig>()?;
    m.add_class::<PySpectrum>()?;
    m.add_class::<PyGaussianModel>()?;
    m.add_function(wrap_pyfunction!(exact_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(thermo_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(uniform_mixed_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(block_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(max_entropy_bound, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_report, m)?)?;
    m.add_function(wrap_pyfunction!(effective_spin, m)?)?;
    m.add_function(wrap_pyfunction!(finite_size_corrections, m)?)?;
    m.add_function(wrap_pyfunction!(fit_prefactor, m)?)?;
    m.add_function(wrap_pyfunction!(build_gaussian, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorem, m)?)?;
    m.add_function(wrap_pyfunction!(verify_uniform_mixture, m)?)?;
    Ok(())
}
