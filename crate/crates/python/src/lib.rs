//! Python module `kgred`: metrics, harmonic states, Gram forms and the
//! reduction algebra. Indices are 1-based on the Python side.

use kgred::io::{
    gram_to_json, metric_from_json, metric_to_json, poly_from_json, poly_to_json, rfn_to_json,
    zelement_to_json,
};
use kgred::poly::apply_box;
use kgred::projector::project_word;
use kgred::rmatrix::{gram_table, gram_via_s};
use kgred::scalars::{format_rational, parse_rational};
use kgred::states::{harmonic_basis, lift_and_apply, state_explicit, Word};
use kgred::zalgebra::{verify_presentation, ZAlgebra, ZElement};
use kgred::{Metric, Poly, RationalFn};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn err(e: kgred::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn word(indices: &[i64], m: &Metric) -> PyResult<Vec<usize>> {
    let w = Word::from_one_based(indices).map_err(err)?;
    w.check(m).map_err(err)?;
    Ok(w.indices().to_vec())
}

#[pyclass(name = "Metric", module = "kgred", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyMetric(pub Metric);

#[pymethods]
impl PyMetric {
    /// `"euclidean"` or `"minkowski"`.
    #[staticmethod]
    fn preset(name: &str, n: usize) -> PyResult<Self> {
        Metric::preset(name, n).map(PyMetric).map_err(err)
    }

    #[staticmethod]
    fn random(n: usize, seed: u64) -> PyResult<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Metric::random(n, &mut rng).map(PyMetric).map_err(err)
    }

    /// Rows of `"p/q"` strings.
    #[new]
    fn new(eta: Vec<Vec<String>>) -> PyResult<Self> {
        let rows = eta
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        Metric::new(rows).map(PyMetric).map_err(err)
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        let j = serde_json::from_str(s).map_err(json_err)?;
        metric_from_json(&j).map(PyMetric).map_err(err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&metric_to_json(&self.0)).unwrap()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn is_diagonal(&self) -> bool {
        self.0.is_diagonal()
    }

    fn inverse(&self) -> Self {
        PyMetric(self.0.inverse())
    }

    fn __eq__(&self, o: PyRef<'_, Self>) -> bool {
        self.0 == o.0
    }

    fn __repr__(&self) -> String {
        format!("Metric({})", self.to_json())
    }
}

#[pyclass(name = "Poly", module = "kgred", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyPoly(pub Poly);

#[pymethods]
impl PyPoly {
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        let j = serde_json::from_str(s).map_err(json_err)?;
        poly_from_json(&j).map(PyPoly).map_err(err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&poly_to_json(&self.0)).unwrap()
    }

    fn latex(&self) -> String {
        self.0.to_latex()
    }

    /// Coefficient of the monomial with exponent vector `exp`, as `"p/q"`.
    fn coeff(&self, exp: Vec<u32>) -> String {
        format_rational(&self.0.coeff(&kgred::MultiIndex(exp)))
    }

    fn degree(&self) -> Option<u32> {
        self.0.degree()
    }

    fn is_harmonic(&self, m: PyRef<'_, PyMetric>) -> PyResult<bool> {
        Ok(apply_box(&m.0, &self.0).map_err(err)?.is_zero())
    }

    fn __add__(&self, o: PyRef<'_, Self>) -> PyResult<Self> {
        self.0.try_add(&o.0).map(PyPoly).map_err(err)
    }

    fn __sub__(&self, o: PyRef<'_, Self>) -> PyResult<Self> {
        self.0.try_sub(&o.0).map(PyPoly).map_err(err)
    }

    fn __mul__(&self, o: PyRef<'_, Self>) -> PyResult<Self> {
        self.0.try_mul(&o.0).map(PyPoly).map_err(err)
    }

    fn __eq__(&self, o: PyRef<'_, Self>) -> bool {
        self.0 == o.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Poly({})", self.0)
    }
}

#[pyclass(name = "RationalFn", module = "kgred", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyRationalFn(pub RationalFn);

#[pymethods]
impl PyRationalFn {
    /// Value at `H = h` for a rational string `h`.
    fn eval(&self, h: &str) -> PyResult<String> {
        let h = parse_rational(h).map_err(err)?;
        self.0.eval(&h).map(|v| format_rational(&v)).map_err(err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&rfn_to_json(&self.0)).unwrap()
    }

    fn __eq__(&self, o: PyRef<'_, Self>) -> bool {
        self.0 == o.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("RationalFn({})", self.0)
    }
}

#[pyclass(name = "ZElement", module = "kgred", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyZElement(pub ZElement);

#[pymethods]
impl PyZElement {
    fn to_json(&self) -> String {
        serde_json::to_string(&zelement_to_json(&self.0)).unwrap()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn __add__(&self, o: PyRef<'_, Self>) -> PyResult<Self> {
        self.0.add(&o.0).map(PyZElement).map_err(err)
    }

    fn __sub__(&self, o: PyRef<'_, Self>) -> PyResult<Self> {
        self.0.sub(&o.0).map(PyZElement).map_err(err)
    }

    fn __eq__(&self, o: PyRef<'_, Self>) -> bool {
        self.0 == o.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

/// The reduction algebra of a diagonal metric.
#[pyclass(name = "ZAlgebra", module = "kgred", frozen, skip_from_py_object)]
pub struct PyZAlgebra(pub ZAlgebra);

#[pymethods]
impl PyZAlgebra {
    #[new]
    fn new(m: PyRef<'_, PyMetric>) -> PyResult<Self> {
        ZAlgebra::new(&m.0).map(PyZAlgebra).map_err(err)
    }

    fn x(&self, a: i64) -> PyResult<PyZElement> {
        let w = word(&[a], self.0.metric())?;
        Ok(PyZElement(self.0.x(w[0])))
    }

    fn d(&self, a: i64) -> PyResult<PyZElement> {
        let w = word(&[a], self.0.metric())?;
        Ok(PyZElement(self.0.d(w[0])))
    }

    fn h(&self) -> PyZElement {
        PyZElement(self.0.h())
    }

    fn mul(&self, u: PyRef<'_, PyZElement>, v: PyRef<'_, PyZElement>) -> PyResult<PyZElement> {
        self.0.mul(&u.0, &v.0).map(PyZElement).map_err(err)
    }

    /// The anti-involution; the result lives in the algebra of the inverse
    /// metric.
    fn star(&self, u: PyRef<'_, PyZElement>) -> PyResult<PyZElement> {
        self.0.star(&u.0).map(PyZElement).map_err(err)
    }

    fn act(&self, u: PyRef<'_, PyZElement>, phi: PyRef<'_, PyPoly>) -> PyResult<PyPoly> {
        self.0.act(&u.0, &phi.0).map(PyPoly).map_err(err)
    }
}

/// The harmonic state of a word of 1-based indices.
#[pyfunction]
fn state(m: PyRef<'_, PyMetric>, indices: Vec<i64>) -> PyResult<PyPoly> {
    let w = word(&indices, &m.0)?;
    state_explicit(&m.0, &w).map(PyPoly).map_err(err)
}

/// The same state through the extremal projector.
#[pyfunction]
fn project(m: PyRef<'_, PyMetric>, indices: Vec<i64>) -> PyResult<PyPoly> {
    let w = word(&indices, &m.0)?;
    project_word(&m.0, &w).map(PyPoly).map_err(err)
}

#[pyfunction]
fn harmonic(m: PyRef<'_, PyMetric>, d: usize) -> PyResult<Vec<PyPoly>> {
    Ok(harmonic_basis(&m.0, d).map_err(err)?.into_iter().map(PyPoly).collect())
}

#[pyfunction]
fn lift(m: PyRef<'_, PyMetric>, phi: PyRef<'_, PyPoly>) -> PyResult<PyPoly> {
    lift_and_apply(&m.0, &phi.0).map(PyPoly).map_err(err)
}

/// `⟨x^{a₁}⋯x^{a_r} | x^{b₁}⋯x^{b_r}⟩` as a rational function of `H`.
#[pyfunction]
fn gram(m: PyRef<'_, PyMetric>, a: Vec<i64>, b: Vec<i64>) -> PyResult<PyRationalFn> {
    let (a, b) = (word(&a, &m.0)?, word(&b, &m.0)?);
    gram_via_s(&m.0, &a, &b).map(PyRationalFn).map_err(err)
}

/// Gram table on sorted words of length `r`, as JSON.
#[pyfunction]
fn gram_table_json(m: PyRef<'_, PyMetric>, r: usize) -> PyResult<String> {
    let g = gram_table(&m.0, r).map_err(err)?;
    Ok(serde_json::to_string(&gram_to_json(&g)).unwrap())
}

/// Relation report as JSON; every entry has `status` `"pass"` or `"fail"`.
#[pyfunction]
#[pyo3(signature = (m, max_deg = 3))]
fn verify_relations(m: PyRef<'_, PyMetric>, max_deg: usize) -> PyResult<String> {
    let rep = verify_presentation(&m.0, max_deg).map_err(err)?;
    Ok(serde_json::to_string(&rep).unwrap())
}

#[pymodule]
#[pyo3(name = "kgred")]
pub fn kgred_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMetric>()?;
    m.add_class::<PyPoly>()?;
    m.add_class::<PyRationalFn>()?;
    m.add_class::<PyZElement>()?;
    m.add_class::<PyZAlgebra>()?;
    m.add_function(wrap_pyfunction!(state, m)?)?;
    m.add_function(wrap_pyfunction!(project, m)?)?;
    m.add_function(wrap_pyfunction!(harmonic, m)?)?;
    m.add_function(wrap_pyfunction!(lift, m)?)?;
    m.add_function(wrap_pyfunction!(gram, m)?)?;
    m.add_function(wrap_pyfunction!(gram_table_json, m)?)?;
    m.add_function(wrap_pyfunction!(verify_relations, m)?)?;
    Ok(())
}
