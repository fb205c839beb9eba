//! Python bindings. Structured results come back as plain dicts and lists.

use pyo3::basic::CompareOp;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use modtwist_core::arith;
use modtwist_core::curves;
use modtwist_core::extgroup;
use modtwist_core::galmodel::{self, ParsedModel};
use modtwist_core::projgroup::{self, Mat2};
use modtwist_core::selftest::{self as st, Options};
use modtwist_core::twists;
use modtwist_core::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::SingularMatrix { .. } | Error::MixedCharacteristic(..) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

fn level(n: u64, p: u64) -> PyResult<arith::Level> {
    arith::Level::new(n, p).map_err(err)
}

fn model(text: &str) -> PyResult<ParsedModel> {
    let parsed = galmodel::parse_model(text).map_err(err)?;
    let violations = galmodel::validate_model(&parsed.model);
    if !violations.is_empty() {
        return Err(err(Error::InvalidModel(violations)));
    }
    Ok(parsed)
}

/// An admissible level (N, p).
#[pyclass(name = "Level", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyLevel(arith::Level);

#[pymethods]
impl PyLevel {
    #[new]
    fn new(n: u64, p: u64) -> PyResult<Self> {
        level(n, p).map(PyLevel)
    }

    #[getter]
    fn n(&self) -> u64 {
        self.0.n()
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.p()
    }

    fn is_cyclotomic(&self) -> bool {
        self.0.is_cyclotomic()
    }

    fn __repr__(&self) -> String {
        format!("Level({}, {})", self.0.n(), self.0.p())
    }
}

/// An element of PGL2(F_p), kept in canonical form.
#[pyclass(name = "ProjMat", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyProjMat(projgroup::ProjMat);

#[pymethods]
impl PyProjMat {
    #[new]
    fn new(p: u64, a: i64, b: i64, c: i64, d: i64) -> PyResult<Self> {
        projgroup::ProjMat::new(Mat2::new(p, a, b, c, d)).map(PyProjMat).map_err(err)
    }

    #[staticmethod]
    fn identity(p: u64) -> Self {
        PyProjMat(projgroup::ProjMat::identity(p))
    }

    #[staticmethod]
    fn t(p: u64) -> Self {
        PyProjMat(projgroup::mat_t(p))
    }

    #[staticmethod]
    fn u(p: u64) -> Self {
        PyProjMat(projgroup::mat_u(p))
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.p()
    }

    fn entries(&self) -> [u64; 4] {
        self.0.rep().entries()
    }

    /// +1 on PSL2, -1 off it.
    fn det_class(&self) -> i8 {
        self.0.det_class()
    }

    fn in_psl2(&self) -> bool {
        projgroup::in_psl2(&self.0)
    }

    fn inverse(&self) -> Self {
        PyProjMat(self.0.inverse())
    }

    fn hat(&self) -> Self {
        PyProjMat(self.0.hat())
    }

    fn transpose(&self) -> Self {
        PyProjMat(self.0.transpose())
    }

    fn __pow__(&self, k: i64, _modulo: Option<i64>) -> Self {
        PyProjMat(self.0.pow(k))
    }

    fn __mul__(&self, o: &PyProjMat) -> PyResult<Self> {
        self.0.checked_mul(&o.0).map(PyProjMat).map_err(err)
    }

    fn __richcmp__(&self, o: &PyProjMat, op: CompareOp) -> bool {
        op.matches(self.0.cmp(&o.0))
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.0.hash(&mut h);
        h.finish()
    }

    fn __repr__(&self) -> String {
        let [a, b, c, d] = self.entries();
        format!("ProjMat(p={}, [[{a}, {b}], [{c}, {d}]])", self.0.p())
    }
}

#[pyfunction]
fn class_number(d: i64) -> PyResult<u64> {
    Ok(arith::class_number(arith::Discriminant::new(d).map_err(err)?))
}

#[pyfunction]
fn kronecker(a: i64, m: u64) -> i8 {
    arith::kronecker(a, m)
}

/// Genus of X(N,p), or of X+(N,p) with `plus=True`.
#[pyfunction]
#[pyo3(signature = (n, p, plus = false))]
fn genus<'py>(py: Python<'py>, n: u64, p: u64, plus: bool) -> PyResult<Bound<'py, PyAny>> {
    let l = level(n, p)?;
    if plus {
        to_py(py, &curves::xplus_verdict(&l).map_err(err)?.report)
    } else {
        to_py(py, &curves::genus_xnp(&l))
    }
}

#[pyfunction]
fn xplus<'py>(py: Python<'py>, n: u64, p: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &curves::xplus_verdict(&level(n, p)?).map_err(err)?)
}

#[pyfunction]
fn cusps<'py>(py: Python<'py>, n: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &curves::cusps_x0(n))
}

#[pyfunction]
fn wgroup<'py>(py: Python<'py>, n: u64, p: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &extgroup::wgroup(&level(n, p)?).map_err(err)?)
}

#[pyfunction]
fn lemma_pairs(bound: u64) -> PyResult<Vec<(u64, u64)>> {
    curves::lemma_pairs(bound).map_err(err)
}

#[pyfunction]
fn low_genus(max_n: u64, max_p: u64) -> Vec<(u64, u64, u64)> {
    curves::low_genus_xnp(max_n, max_p).into_iter().map(|(l, g)| (l.n(), l.p(), g)).collect()
}

#[pyfunction]
fn al_fixed_points(m: u64, q: u64) -> PyResult<u64> {
    curves::al_fixed_points(m, q).map_err(err)
}

#[pyfunction]
fn classify(n: u64, p: u64) -> PyResult<String> {
    Ok(galmodel::classify(&level(n, p)?).to_string())
}

/// Plan the twists for a model given as TOML text.
#[pyfunction]
#[pyo3(signature = (n, p, model_toml, k = Vec::new()))]
fn twist_plan<'py>(py: Python<'py>, n: u64, p: u64, model_toml: &str, k: Vec<i64>) -> PyResult<Bound<'py, PyAny>> {
    let parsed = model(model_toml)?;
    let plan = twists::twist_plan(&level(n, p)?, &parsed.model, parsed.degrees.as_ref(), &k).map_err(err)?;
    to_py(py, &plan)
}

#[pyfunction]
fn centralizer_verdict(model_toml: &str) -> PyResult<String> {
    let parsed = model(model_toml)?;
    Ok(format!("{:?}", twists::centralizer_verdict(&parsed.model).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (quick = true, seed = 0))]
fn selftest<'py>(py: Python<'py>, quick: bool, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let report = py.detach(|| st::run(&Options { quick, seed, fault: None }));
    to_py(py, &report)
}

#[pymodule]
fn modtwist(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLevel>()?;
    m.add_class::<PyProjMat>()?;
    m.add_function(wrap_pyfunction!(class_number, m)?)?;
    m.add_function(wrap_pyfunction!(kronecker, m)?)?;
    m.add_function(wrap_pyfunction!(genus, m)?)?;
    m.add_function(wrap_pyfunction!(xplus, m)?)?;
    m.add_function(wrap_pyfunction!(cusps, m)?)?;
    m.add_function(wrap_pyfunction!(wgroup, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(low_genus, m)?)?;
    m.add_function(wrap_pyfunction!(al_fixed_points, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(twist_plan, m)?)?;
    m.add_function(wrap_pyfunction!(centralizer_verdict, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
