//! Python bindings. Certificates cross the boundary as plain dicts and lists.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;
use structrand::cube::{self, F2Polynomial};
use structrand::factor::{self, Factor, FactorFamily, MeasurableFunction, ProbabilitySpace};
use structrand::graph::{self, EdgeFunction, PairCheckMode, SzemerediConfig};
use structrand::hilbert::{self, GrowthFunction, StrongConfig};
use structrand::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_)
        | Error::Precondition(_)
        | Error::DimensionMismatch { .. }
        | Error::NormTooLarge { .. }
        | Error::GrowthViolation { .. }
        | Error::Parse(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Converts any serializable value to Python objects through JSON.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn growth(spec: &str) -> PyResult<GrowthFunction> {
    spec.parse().map_err(err)
}

/// A real function on F₂ⁿ, stored as its 2ⁿ values.
#[pyclass(name = "CubeFunction", module = "structrand_py", skip_from_py_object)]
#[derive(Clone)]
pub struct PyCubeFunction {
    inner: cube::CubeFunction,
}

#[pymethods]
impl PyCubeFunction {
    #[new]
    fn new(n: u32, values: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: cube::CubeFunction::new(n, values).map_err(err)?,
        })
    }

    #[staticmethod]
    fn character(n: u32, xi: u32) -> PyResult<Self> {
        Ok(Self {
            inner: cube::CubeFunction::character(n, xi).map_err(err)?,
        })
    }

    #[staticmethod]
    fn code(p: &PyF2Polynomial) -> Self {
        Self {
            inner: cube::CubeFunction::code(&p.inner),
        }
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn mean(&self) -> f64 {
        self.inner.mean()
    }

    fn mul(&self, other: &PyCubeFunction) -> Self {
        Self {
            inner: self.inner.mul(&other.inner),
        }
    }

    /// `‖f‖_{U^d}`.
    fn gowers_norm(&self, d: u32) -> PyResult<f64> {
        cube::gowers_norm(&self.inner, d).map_err(err)
    }

    fn gowers_norm_u2_fft(&self) -> PyResult<f64> {
        cube::gowers_norm_u2_fft(&self.inner).map_err(err)
    }

    fn dual_function(&self, d: u32) -> PyResult<Self> {
        Ok(Self {
            inner: cube::dual_function(&self.inner, d).map_err(err)?,
        })
    }

    /// Normalized Walsh–Hadamard coefficients `f̂(ξ)`.
    fn walsh_hadamard(&self) -> PyResult<Vec<f64>> {
        Ok(cube::walsh_hadamard(&self.inner).map_err(err)?.coefficients)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("CubeFunction(n={})", self.inner.n())
    }
}

/// A polynomial over F₂ in reduced form.
#[pyclass(name = "F2Polynomial", module = "structrand_py", skip_from_py_object)]
#[derive(Clone)]
pub struct PyF2Polynomial {
    inner: F2Polynomial,
}

#[pymethods]
impl PyF2Polynomial {
    /// `monomials` lists each monomial as its variable indices; `[]` is 1.
    #[new]
    fn new(n: u32, monomials: Vec<Vec<u32>>) -> PyResult<Self> {
        Ok(Self {
            inner: F2Polynomial::from_monomials(n, &monomials).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    #[getter]
    fn degree(&self) -> u32 {
        self.inner.degree()
    }

    #[getter]
    fn monomials(&self) -> Vec<Vec<u32>> {
        self.inner
            .monomials()
            .iter()
            .map(|&m| (0..32).filter(|i| m >> i & 1 == 1).collect())
            .collect()
    }

    fn eval(&self, x: u32) -> bool {
        self.inner.eval(x)
    }

    fn truth_table(&self) -> Vec<bool> {
        self.inner.truth_table()
    }

    fn __eq__(&self, other: &PyF2Polynomial) -> bool {
        self.inner == other.inner
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("F2Polynomial({})", self.inner)
    }
}

/// Recovers `P` with `f = (-1)^P` when `‖f‖_{U^d} = 1`, else `None`.
#[pyfunction]
fn inverse_100(f: &PyCubeFunction, d: u32) -> PyResult<Option<PyF2Polynomial>> {
    Ok(cube::inverse_100(&f.inner, d)
        .map_err(err)?
        .map(|inner| PyF2Polynomial { inner }))
}

/// The 99% inverse theorem; returns the outcome as a dict.
#[pyfunction]
#[pyo3(signature = (f, d, delta = None))]
fn inverse_99<'py>(
    py: Python<'py>,
    f: &PyCubeFunction,
    d: u32,
    delta: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let delta = match delta {
        Some(x) => x,
        None => (1.0 - cube::gowers_norm(&f.inner, d).map_err(err)?).max(0.0),
    };
    let out =
        cube::inverse_99(&f.inner, d, delta, &cube::Inverse99Config::default()).map_err(err)?;
    to_py(py, &out)
}

/// Decomposes `f` against the characters of F₂ⁿ.
///
/// `mode` is `weak`, `orthogonal` or `strong`; `growth` is used by `strong`.
#[pyfunction]
#[pyo3(signature = (f, eps, mode = "weak", growth_spec = "exp"))]
fn decompose<'py>(
    py: Python<'py>,
    f: &PyCubeFunction,
    eps: f64,
    mode: &str,
    growth_spec: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let v = f.inner.to_vector();
    let atoms = cube::character_atoms(f.inner.n()).map_err(err)?;
    let dec = match mode {
        "weak" => hilbert::weak_decompose(&v, &atoms, eps),
        "orthogonal" => hilbert::orthogonal_weak_decompose(&v, &atoms, eps),
        "strong" => hilbert::strong_decompose(
            &v,
            &atoms,
            eps,
            &growth(growth_spec)?,
            &StrongConfig::default(),
        ),
        other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    }
    .map_err(err)?;
    dec.verify(&v, &atoms).map_err(err)?;
    to_py(py, &dec)
}

/// Arithmetic regularity of the subset `points` of F₂ⁿ.
#[pyfunction]
fn arithmetic_regularize<'py>(
    py: Python<'py>,
    n: u32,
    points: Vec<u32>,
    eps: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let a = cube::CubeFunction::indicator(n, &points).map_err(err)?;
    to_py(
        py,
        &cube::arithmetic_regularize(&a, eps, &StrongConfig::default()).map_err(err)?,
    )
}

/// Edges of a `G(n, p)` sample.
#[pyfunction]
fn gnp(n: usize, p: f64, seed: u64) -> PyResult<Vec<(usize, usize)>> {
    let mut r = structrand::rng::stream(seed, "gnp");
    Ok(EdgeFunction::gnp(n, p, &mut r).map_err(err)?.edges())
}

/// Szemerédi regularity partition; `mode` is `exact`, `sampled` or
/// `alternating`. A partition missing the guarantee raises `RuntimeError`.
#[pyfunction]
#[pyo3(signature = (n, edges, eps, m, mode = "sampled", seed = 0))]
fn szemeredi_regularize<'py>(
    py: Python<'py>,
    n: usize,
    edges: Vec<(usize, usize)>,
    eps: f64,
    m: usize,
    mode: &str,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let g = EdgeFunction::from_edges(n, &edges).map_err(err)?;
    let pair_mode = match mode {
        "exact" => PairCheckMode::Exact,
        "sampled" => PairCheckMode::sampled(seed),
        "alternating" => PairCheckMode::Alternating { restarts: 16, seed },
        other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    };
    let config = SzemerediConfig {
        pair_mode,
        seed,
        ..SzemerediConfig::default()
    };
    to_py(
        py,
        &graph::szemeredi_regularize(&g, eps, m, &config).map_err(err)?,
    )
}

/// Weak regularity with cut atoms.
#[pyfunction]
#[pyo3(signature = (n, edges, eps, restarts = 16, seed = 0))]
fn weak_regularize<'py>(
    py: Python<'py>,
    n: usize,
    edges: Vec<(usize, usize)>,
    eps: f64,
    restarts: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let g = EdgeFunction::from_edges(n, &edges).map_err(err)?;
    let atoms = graph::cut_atoms(n, restarts, seed).map_err(err)?;
    to_py(py, &graph::weak_regularize(&g, eps, &atoms).map_err(err)?)
}

fn space_and_function(
    weights: Option<Vec<f64>>,
    values: Vec<f64>,
) -> PyResult<(ProbabilitySpace, MeasurableFunction)> {
    let space = match weights {
        Some(w) => ProbabilitySpace::new(w),
        None => ProbabilitySpace::uniform(values.len()),
    }
    .map_err(err)?;
    Ok((space, MeasurableFunction::new(values).map_err(err)?))
}

/// `E(f|Y)` for the factor given by `labels`; uniform weights by default.
#[pyfunction]
#[pyo3(signature = (values, labels, weights = None))]
fn conditional_expectation(
    values: Vec<f64>,
    labels: Vec<u32>,
    weights: Option<Vec<f64>>,
) -> PyResult<Vec<f64>> {
    let (space, f) = space_and_function(weights, values)?;
    let y = Factor::from_labels(&labels).map_err(err)?;
    Ok(factor::conditional_expectation(&space, &f, &y)
        .map_err(err)?
        .function
        .into_values())
}

/// Strong structure theorem relative to an explicit family of factors, each
/// given by its labels.
#[pyfunction]
#[pyo3(signature = (values, family, eps, growth_spec = "affine:2,1", weights = None))]
fn strong_factor_decompose<'py>(
    py: Python<'py>,
    values: Vec<f64>,
    family: Vec<Vec<u32>>,
    eps: f64,
    growth_spec: &str,
    weights: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyAny>> {
    let (space, f) = space_and_function(weights, values)?;
    let factors = family
        .iter()
        .map(|l| Factor::from_labels(l))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let fam = FactorFamily::new(factors).map_err(err)?;
    let dec = factor::strong_factor_decompose(
        &space,
        &f,
        &fam,
        eps,
        &growth(growth_spec)?,
        &StrongConfig::default(),
    )
    .map_err(err)?;
    dec.verify(&space, &f, &fam).map_err(err)?;
    to_py(py, &dec)
}

/// Labels `⌊g(x)/eps - alpha⌋` of the level-set factor.
#[pyfunction]
fn level_set_factor(values: Vec<f64>, eps: f64, alpha: f64) -> PyResult<Vec<u32>> {
    let g = MeasurableFunction::new(values).map_err(err)?;
    Ok(factor::level_set_factor(&g, eps, alpha)
        .map_err(err)?
        .labels()
        .to_vec())
}

/// The sparse model on `{0..n}` with interval factors; returns the report.
#[pyfunction]
#[pyo3(signature = (n = 4096, seed = 0, eta = 0.2, eps = 0.5, b_density = 0.5))]
fn sparse_demo<'py>(
    py: Python<'py>,
    n: usize,
    seed: u64,
    eta: f64,
    eps: f64,
    b_density: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let config = factor::SparseDemoConfig {
        n,
        seed,
        eta,
        eps,
        b_density,
        ..factor::SparseDemoConfig::default()
    };
    let (report, _) = factor::sparse_demo(&config).map_err(err)?;
    to_py(py, &report)
}

#[pymodule]
fn structrand_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCubeFunction>()?;
    m.add_class::<PyF2Polynomial>()?;
    m.add_function(wrap_pyfunction!(inverse_100, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_99, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(arithmetic_regularize, m)?)?;
    m.add_function(wrap_pyfunction!(gnp, m)?)?;
    m.add_function(wrap_pyfunction!(szemeredi_regularize, m)?)?;
    m.add_function(wrap_pyfunction!(weak_regularize, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_expectation, m)?)?;
    m.add_function(wrap_pyfunction!(strong_factor_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(level_set_factor, m)?)?;
    m.add_function(wrap_pyfunction!(sparse_demo, m)?)?;
    Ok(())
}
