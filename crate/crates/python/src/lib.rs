//! Python bindings: `import tracepoisson`.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

use trace_poisson::catalog::{resolve_catalog, verify_catalog};
use trace_poisson::flows::{apply_family, certify_symplectic, Certified, FamilyId, FlowFamily, FlowTolerances};
use trace_poisson::generation::closure::{build_closure, default_depth, standard_generators, ClosureConfig};
use trace_poisson::generation::model::{standard_model_generators, ExponentBox, ModelSpace};
use trace_poisson::generation::{model_generation, replay_lemma_chain, MembershipContext};
use trace_poisson::numeric::cm::{sample_cm, CMPoint};
use trace_poisson::numeric::eval::{evaluate, numeric_bracket};
use trace_poisson::poisson::{bracket, bracket_traceless_unreduced};
use trace_poisson::reduce::cayley_hamilton_reduce;
use trace_poisson::text::parse_polynomial_in;
use trace_poisson::{Mode, TraceError};

fn err(e: TraceError) -> PyErr {
    match e {
        TraceError::Numeric(_) | TraceError::Sampler(_) | TraceError::PoolTooSmall { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn mode_of(name: &str) -> PyResult<Mode> {
    match name {
        "plain" => Ok(Mode::Plain),
        "traceless" => Ok(Mode::Traceless),
        _ => Err(PyValueError::new_err(format!("mode must be 'plain' or 'traceless', got {name:?}"))),
    }
}

/// Converts a serializable report into Python dicts and lists.
fn to_py<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A trace polynomial in `A, B` (traceless mode) or `X, Y` (plain mode).
#[pyclass(name = "TracePolynomial", module = "tracepoisson", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPoly(trace_poisson::TracePolynomial);

#[pymethods]
impl PyPoly {
    #[new]
    #[pyo3(signature = (text, mode = "traceless"))]
    fn new(text: &str, mode: &str) -> PyResult<Self> {
        Ok(Self(parse_polynomial_in(text, mode_of(mode)?).map_err(err)?))
    }

    #[getter]
    fn mode(&self) -> String {
        self.0.mode().to_string()
    }

    fn degree(&self) -> Option<u32> {
        self.0.degree()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn bracket(&self, other: &PyPoly) -> PyResult<PyPoly> {
        Ok(PyPoly(bracket(&self.0, &other.0).map_err(err)?))
    }

    /// Cayley–Hamilton reduction at matrix size `n`.
    fn reduce(&self, n: u32) -> PyResult<PyPoly> {
        Ok(PyPoly(cayley_hamilton_reduce(&self.0, n).map_err(err)?))
    }

    fn to_traceless(&self) -> PyResult<PyPoly> {
        Ok(PyPoly(self.0.to_traceless().map_err(err)?))
    }

    fn to_plain(&self) -> PyResult<PyPoly> {
        Ok(PyPoly(self.0.to_plain().map_err(err)?))
    }

    fn evaluate(&self, point: &PyPoint) -> PyResult<Complex64> {
        evaluate(&self.0, &point.0, point.0.n()).map_err(err)
    }

    fn __add__(&self, other: &PyPoly) -> PyResult<PyPoly> {
        Ok(PyPoly(self.0.checked_add(&other.0).map_err(err)?))
    }

    fn __sub__(&self, other: &PyPoly) -> PyResult<PyPoly> {
        Ok(PyPoly(self.0.checked_sub(&other.0).map_err(err)?))
    }

    fn __mul__(&self, other: &PyPoly) -> PyResult<PyPoly> {
        Ok(PyPoly(self.0.checked_mul(&other.0).map_err(err)?))
    }

    fn __eq__(&self, other: &PyPoly) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("TracePolynomial({:?}, mode={:?})", self.0.to_string(), self.0.mode().to_string())
    }
}

/// A point of the Calogero–Moser space.
#[pyclass(name = "CMPoint", module = "tracepoisson", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPoint(CMPoint);

fn rows(m: &trace_poisson::numeric::linalg::CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

#[pymethods]
impl PyPoint {
    #[staticmethod]
    #[pyo3(signature = (n, seed = 0, traceless = true))]
    fn sample(n: usize, seed: u64, traceless: bool) -> PyResult<Self> {
        Ok(Self(sample_cm(n, traceless, seed).map_err(err)?))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self(CMPoint::from_json(text).map_err(err)?))
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn traceless(&self) -> bool {
        self.0.traceless
    }

    #[getter]
    fn rank_residual(&self) -> f64 {
        self.0.rank_residual
    }

    #[getter]
    fn x(&self) -> Vec<Vec<Complex64>> {
        rows(&self.0.pair.x)
    }

    #[getter]
    fn y(&self) -> Vec<Vec<Complex64>> {
        rows(&self.0.pair.y)
    }

    /// Image under a flow family (`shearA`, `shearB`, `cubicShear`, `scaling`).
    fn flow(&self, family: &str, t: Complex64) -> PyResult<PyPoint> {
        let id: FamilyId = family.parse().map_err(err)?;
        Ok(PyPoint(apply_family(FlowFamily::new(id, t), &self.0).map_err(err)?))
    }
}

/// Nested brackets of `tr A², tr B², tr A³, (tr AB)²` at one matrix size.
#[pyclass(name = "LieClosureBasis", module = "tracepoisson", frozen, skip_from_py_object)]
struct PyClosure(trace_poisson::generation::LieClosureBasis);

#[pymethods]
impl PyClosure {
    #[new]
    #[pyo3(signature = (n, depth = None, degree = 8, seed = 0))]
    fn new(n: usize, depth: Option<usize>, degree: u32, seed: u64) -> PyResult<Self> {
        let cfg = ClosureConfig {
            depth_cap: depth.unwrap_or(default_depth(n)),
            degree_cap: degree,
            seed,
            ..ClosureConfig::new(n)
        };
        Ok(Self(build_closure(&standard_generators(), &cfg).map_err(err)?))
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// `(polynomial, bracket tree)` pairs.
    fn elements(&self) -> Vec<(String, String)> {
        self.0.elements.iter().map(|e| (e.poly.to_string(), e.tree.render(&self.0.generators))).collect()
    }

    #[getter]
    fn levels(&self) -> Vec<usize> {
        self.0.levels.clone()
    }

    /// One certificate dict per target.
    #[pyo3(signature = (targets, sample_count = None, seed = 0))]
    fn check_membership<'py>(
        &self,
        py: Python<'py>,
        targets: Vec<PyRef<'py, PyPoly>>,
        sample_count: Option<usize>,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let ctx = MembershipContext::new(&self.0, sample_count, seed).map_err(err)?;
        let certs = targets.iter().map(|t| ctx.check(&t.0)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        to_py(py, &certs)
    }
}

#[pyfunction]
fn parse(text: &str) -> PyResult<PyPoly> {
    PyPoly::new(text, "traceless")
}

#[pyfunction(name = "bracket")]
fn py_bracket(f: &PyPoly, g: &PyPoly) -> PyResult<PyPoly> {
    f.bracket(g)
}

/// The traceless bracket before `tr A`, `tr B` are set to zero, as text.
#[pyfunction]
fn bracket_unreduced(f: &PyPoly, g: &PyPoly) -> PyResult<String> {
    Ok(bracket_traceless_unreduced(&f.0, &g.0).map_err(err)?.to_string())
}

#[pyfunction(name = "numeric_bracket")]
fn py_numeric_bracket(f: &PyPoly, g: &PyPoly, point: &PyPoint) -> PyResult<Complex64> {
    numeric_bracket(&f.0, &g.0, &point.0).map_err(err)
}

#[pyfunction(name = "verify_catalog")]
#[pyo3(signature = (n = 3, samples = 100, seed = 0, catalog = "default"))]
fn py_verify_catalog<'py>(
    py: Python<'py>,
    n: usize,
    samples: usize,
    seed: u64,
    catalog: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let entries = resolve_catalog(catalog).map_err(err)?;
    to_py(py, &verify_catalog(&entries, n, samples, seed).map_err(err)?)
}

#[pyfunction(name = "replay_lemma_chain")]
fn py_replay<'py>(py: Python<'py>, lemma_id: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &replay_lemma_chain(lemma_id).map_err(err)?)
}

/// Symplectic, rank and trace residuals of a flow family on sampled points.
#[pyfunction]
#[pyo3(signature = (family, t, n, samples = 5, seed = 0))]
fn certify_flow<'py>(
    py: Python<'py>,
    family: &str,
    t: Complex64,
    n: usize,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    use trace_poisson::numeric::cm::{sample_many, SamplerConfig};
    let id: FamilyId = family.parse().map_err(err)?;
    let pts = sample_many(n, true, seed, samples, &SamplerConfig::flow()).map_err(err)?;
    let records = certify_symplectic(&Certified::Family(FlowFamily::new(id, t)), &pts, FlowTolerances::default());
    to_py(py, &records)
}

/// Exact bracket closure on `plane`, `cylinder` or `torus` up to exponent `size`.
#[pyfunction(name = "model_generation")]
#[pyo3(signature = (space, size, depth = 8))]
fn py_model_generation<'py>(py: Python<'py>, space: &str, size: i32, depth: usize) -> PyResult<Bound<'py, PyAny>> {
    let space: ModelSpace = space.parse().map_err(err)?;
    let target = match space {
        ModelSpace::Plane => ExponentBox::degree(size),
        ModelSpace::Cylinder => ExponentBox::rect((0, size), (-size, size)),
        ModelSpace::Torus => ExponentBox::rect((-size, size), (-size, size)),
    };
    let gens = standard_model_generators(space, &target);
    to_py(py, &model_generation(space, &gens, &target, depth).map_err(err)?)
}

#[pymodule]
fn tracepoisson(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPoly>()?;
    m.add_class::<PyPoint>()?;
    m.add_class::<PyClosure>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(py_bracket, m)?)?;
    m.add_function(wrap_pyfunction!(bracket_unreduced, m)?)?;
    m.add_function(wrap_pyfunction!(py_numeric_bracket, m)?)?;
    m.add_function(wrap_pyfunction!(py_verify_catalog, m)?)?;
    m.add_function(wrap_pyfunction!(py_replay, m)?)?;
    m.add_function(wrap_pyfunction!(certify_flow, m)?)?;
    m.add_function(wrap_pyfunction!(py_model_generation, m)?)?;
    Ok(())
}
