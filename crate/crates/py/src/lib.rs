//! Python bindings. Results cross the boundary as plain dicts and lists, built
//! from the same JSON the command-line tool prints.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyString;
use serde::Serialize;

use tits_core::certifier::{
    certify_free_framed, default_oracle_depth, oracle_free_up_to, verify_certificate as verify, CertifyOptions,
};
use tits_core::constants::{ConstantsConfig, ConstantsTable, PaperConstants};
use tits_core::geometry::SpacePoint;
use tits_core::isometry::Isometry;
use tits_core::pingpong::Framed;
use tits_core::propcheck::{run_suite, suite_names};
use tits_core::tubes::TubeDescriptor;
use tits_core::Error;

create_exception!(tits_py, TitsError, PyException, "Typed failure reported by the certifier.");
create_exception!(tits_py, OracleRefuted, TitsError, "The relation oracle contradicted a certificate.");

/// `"Variant: message"`, with the variant name of the core error.
pub fn describe(e: &Error) -> String {
    let kind: String = format!("{e:?}").chars().take_while(|c| c.is_alphanumeric()).collect();
    format!("{kind}: {e}")
}

fn to_py(e: Error) -> PyErr {
    match e {
        Error::OracleRefuted { relation, certificate } => OracleRefuted::new_err((relation, certificate)),
        other => TitsError::new_err(describe(&other)),
    }
}

fn to_object<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

/// Accepts a JSON string or any object `json.dumps` can serialize.
fn to_json_text(obj: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(s) = obj.cast::<PyString>() {
        return Ok(s.to_str()?.to_owned());
    }
    obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()
}

fn from_json<T: serde::de::DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    serde_json::from_str(&to_json_text(obj)?).map_err(|e| to_py(Error::Parse(e.to_string())))
}

/// An isometry of hyperbolic space, optionally stored as `home` seen through a
/// conjugator (kept apart so far-away conjugates stay well conditioned).
#[pyclass(name = "Isometry", module = "tits_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyIsometry {
    inner: Framed,
}

impl PyIsometry {
    fn plain(g: Isometry) -> Self {
        Self { inner: Framed::trivial(&g) }
    }

    fn generator(&self) -> PyResult<Isometry> {
        self.inner.generator().map_err(to_py)
    }
}

#[pymethods]
impl PyIsometry {
    /// From the JSON form (string or dict), plain or `{"home", "conjugator"}`.
    #[new]
    fn new(spec: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Self { inner: from_json(spec)? })
    }

    #[staticmethod]
    fn sl2_real(rows: [[f64; 2]; 2]) -> PyResult<Self> {
        Isometry::sl2_real([rows[0][0], rows[0][1], rows[1][0], rows[1][1]]).map(Self::plain).map_err(to_py)
    }

    /// `conjugator * home * conjugator^-1`.
    #[staticmethod]
    fn framed(home: &PyIsometry, conjugator: &PyIsometry) -> PyResult<Self> {
        Ok(Self { inner: Framed { home: home.generator()?, conj: conjugator.generator()? } })
    }

    #[getter]
    fn model(&self) -> String {
        self.inner.home.model().to_string()
    }

    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_object(py, &self.generator()?.classify().map_err(to_py)?)
    }

    fn translation_length(&self) -> PyResult<f64> {
        self.inner.home.translation_length().map_err(to_py)
    }

    /// `self * other`.
    fn compose(&self, other: &PyIsometry) -> PyResult<Self> {
        self.generator()?.compose(&other.generator()?).map(Self::plain).map_err(to_py)
    }

    fn inverse(&self) -> Self {
        Self { inner: Framed { home: self.inner.home.inverse(), conj: self.inner.conj.clone() } }
    }

    fn pow(&self, m: i64) -> Self {
        Self { inner: Framed { home: self.inner.home.pow(m), conj: self.inner.conj.clone() } }
    }

    /// `d(x, g x)` for a hyperboloid point given by its coordinates (time last).
    fn displacement(&self, point: Vec<f64>) -> PyResult<f64> {
        let x = SpacePoint::new(point).map_err(to_py)?;
        Ok(self.generator()?.displacement(&x))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> PyResult<String> {
        Ok(format!("Isometry({})", self.to_json()?))
    }
}

fn load_constants(config: Option<&Bound<'_, PyAny>>, eps: Option<f64>, n: Option<u32>) -> PyResult<PaperConstants> {
    let mut cfg: ConstantsConfig = match config {
        Some(c) => from_json(c)?,
        None => ConstantsConfig::default(),
    };
    cfg.eps = eps.or(cfg.eps);
    cfg.n = n.or(cfg.n);
    PaperConstants::from_config(&cfg).map_err(to_py)
}

/// Table of derived constants.
#[pyfunction]
#[pyo3(signature = (eps=None, n=None, config=None))]
fn constants<'py>(
    py: Python<'py>,
    eps: Option<f64>,
    n: Option<u32>,
    config: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let c = load_constants(config, eps, n)?;
    to_object(py, &ConstantsTable::compute(&c).map_err(to_py)?)
}

/// Thin-part descriptor of a non-elliptic isometry.
#[pyfunction]
#[pyo3(signature = (g, eps=0.1))]
fn tube<'py>(py: Python<'py>, g: &PyIsometry, eps: f64) -> PyResult<Bound<'py, PyAny>> {
    to_object(py, &TubeDescriptor::new(&g.generator()?, eps).map_err(to_py)?)
}

/// Free-subgroup certificate for `<f, g>`; raises `OracleRefuted` if the oracle
/// contradicts it.
#[pyfunction]
#[pyo3(signature = (f, g, eps=None, n=None, config=None, oracle_depth=None, orbit_depth=None))]
#[allow(clippy::too_many_arguments)]
fn certify<'py>(
    py: Python<'py>,
    f: &PyIsometry,
    g: &PyIsometry,
    eps: Option<f64>,
    n: Option<u32>,
    config: Option<&Bound<'py, PyAny>>,
    oracle_depth: Option<usize>,
    orbit_depth: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let c = load_constants(config, eps, n)?;
    let (f, g) = (f.inner.clone(), g.inner.clone());
    let opts = CertifyOptions { oracle_depth, orbit_depth };
    let cert = py.detach(|| certify_free_framed(&f, &g, &c, &opts)).map_err(to_py)?;
    to_object(py, &cert)
}

/// Shortest relation between `a` and `b` up to `depth`, if any.
#[pyfunction]
#[pyo3(signature = (a, b, depth=None))]
fn oracle<'py>(py: Python<'py>, a: &PyIsometry, b: &PyIsometry, depth: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let (a, b) = (a.generator()?, b.generator()?);
    let depth = depth.unwrap_or_else(|| default_oracle_depth(&a, &b));
    let report = py.detach(|| oracle_free_up_to(&a, &b, depth)).map_err(to_py)?;
    to_object(py, &report)
}

/// Recomputes a certificate (dict or JSON string) and lists mismatching fields.
#[pyfunction]
fn verify_certificate<'py>(py: Python<'py>, certificate: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let value: serde_json::Value = from_json(certificate)?;
    let report = py.detach(|| verify(&value)).map_err(to_py)?;
    to_object(py, &report)
}

#[pyfunction]
#[pyo3(signature = (suite, samples=1000, seed=0))]
fn propcheck<'py>(py: Python<'py>, suite: String, samples: u64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let report = py.detach(|| run_suite(&suite, samples, seed)).map_err(to_py)?;
    to_object(py, &report)
}

#[pyfunction]
fn suites() -> Vec<&'static str> {
    suite_names()
}

#[pymodule]
fn tits_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyIsometry>()?;
    m.add("TitsError", m.py().get_type::<TitsError>())?;
    m.add("OracleRefuted", m.py().get_type::<OracleRefuted>())?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    m.add_function(wrap_pyfunction!(tube, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(propcheck, m)?)?;
    m.add_function(wrap_pyfunction!(suites, m)?)?;
    Ok(())
}
