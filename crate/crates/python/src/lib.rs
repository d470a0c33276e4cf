//! Python bindings: parameter sets, evaluation, tables and the
//! verification suites.
//!
//! Scalars go in as anything whose `str()` parses as a rational (`int`,
//! `str` such as `"1/4"`, `fractions.Fraction`, decimal `float` literals)
//! and come out as lowest-terms strings, or as `complex` in approximate
//! mode.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyList};

use kraw_core::bispec::{operator_m, operator_mtilde, operator_universal};
use kraw_core::format;
use kraw_core::hyperg::{self, DegreePoint};
use kraw_core::kappa::{self, RawParameters};
use kraw_core::liemod;
use kraw_core::numeric::DEFAULT_EPS;
use kraw_core::{suite, Approx, Exact, Scalar};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn exact_of(obj: &Bound<'_, PyAny>) -> PyResult<Exact> {
    let text = obj.str()?.to_string();
    Exact::parse_scalar(text.trim()).map_err(value_error)
}

fn exacts_of(objs: &[Bound<'_, PyAny>]) -> PyResult<Vec<Exact>> {
    objs.iter().map(exact_of).collect()
}

fn strings(xs: &[Exact]) -> Vec<String> {
    xs.iter().map(Scalar::to_canonical).collect()
}

fn complex<'py>(py: Python<'py>, z: &Approx) -> Bound<'py, PyComplex> {
    PyComplex::from_doubles(py, z.re, z.im)
}

fn json_loads<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn is_approx(mode: &str) -> PyResult<bool> {
    match mode {
        "exact" => Ok(false),
        "approx" => Ok(true),
        other => Err(PyValueError::new_err(format!("mode must be 'exact' or 'approx', not {other:?}"))),
    }
}

fn point(m: Vec<u32>, n: u32) -> PyResult<DegreePoint> {
    DegreePoint::new(m, n).map_err(value_error)
}

/// A validated parameter set `(nu, P, P~, U)` held in exact arithmetic.
#[pyclass(name = "ParameterSet", module = "kraw", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyParameterSet {
    inner: kraw_core::ParameterSet<Exact>,
}

impl PyParameterSet {
    fn wrap(r: Result<kraw_core::ParameterSet<Exact>, impl std::fmt::Display>) -> PyResult<Self> {
        r.map(|inner| Self { inner }).map_err(value_error)
    }
}

#[pymethods]
impl PyParameterSet {
    #[new]
    fn new(
        nu: Bound<'_, PyAny>,
        p: Vec<Bound<'_, PyAny>>,
        pt: Vec<Bound<'_, PyAny>>,
        u: Vec<Vec<Bound<'_, PyAny>>>,
    ) -> PyResult<Self> {
        let raw = RawParameters {
            d: p.len().saturating_sub(1),
            nu: exact_of(&nu)?,
            p: exacts_of(&p)?,
            pt: exacts_of(&pt)?,
            u: u.iter().map(|r| exacts_of(r)).collect::<PyResult<_>>()?,
        };
        Self::wrap(raw.validate_with(0.0))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Self::wrap(format::parse_params::<Exact>(text, 0.0))
    }

    /// Gram-Schmidt construction from `p` alone.
    #[staticmethod]
    fn griffiths(p: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        Self::wrap(kappa::griffiths_from_p(&exacts_of(&p)?))
    }

    #[staticmethod]
    fn ds(q: Bound<'_, PyAny>, d: usize) -> PyResult<Self> {
        Self::wrap(kappa::family_ds(exact_of(&q)?, d))
    }

    #[staticmethod]
    fn milch(p: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        Self::wrap(kappa::family_milch(&exacts_of(&p)?))
    }

    #[staticmethod]
    fn hoare_rahman(
        a: Bound<'_, PyAny>,
        b: Bound<'_, PyAny>,
        c: Bound<'_, PyAny>,
        e: Bound<'_, PyAny>,
    ) -> PyResult<Self> {
        Self::wrap(kappa::family_hoare_rahman([exact_of(&a)?, exact_of(&b)?, exact_of(&c)?, exact_of(&e)?]))
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn nu(&self) -> String {
        self.inner.nu().to_canonical()
    }

    #[getter]
    fn p(&self) -> Vec<String> {
        strings(self.inner.p())
    }

    #[getter]
    fn pt(&self) -> Vec<String> {
        strings(self.inner.pt())
    }

    #[getter]
    fn u(&self) -> Vec<Vec<String>> {
        self.inner.u().to_rows().iter().map(|r| strings(r)).collect()
    }

    fn to_json(&self) -> String {
        format::write_params(&self.inner)
    }

    /// The bispectral involution `(nu, P~, P, U^t)`.
    fn involute(&self) -> Self {
        Self { inner: self.inner.involute() }
    }

    /// `P(m, mt)` at degree `n` by the chosen route.
    #[pyo3(signature = (m, mt, n, method = "hypergeometric", mode = "exact"))]
    fn eval<'py>(
        &self,
        py: Python<'py>,
        m: Vec<u32>,
        mt: Vec<u32>,
        n: u32,
        method: &str,
        mode: &str,
    ) -> PyResult<Bound<'py, PyAny>> {
        let (dm, dmt) = (point(m, n)?, point(mt, n)?);
        if is_approx(mode)? {
            let k = self.inner.to_approx();
            let v = eval_with(&k, &dm, &dmt, method)?;
            Ok(complex(py, &v).into_any())
        } else {
            let v = eval_with(&self.inner, &dm, &dmt, method)?;
            Ok(v.to_canonical().into_pyobject(py)?.into_any())
        }
    }

    /// Rows indexed by `m`, columns by `mt`, both in graded-lex order.
    #[pyo3(signature = (n, mode = "exact"))]
    fn table<'py>(&self, py: Python<'py>, n: u32, mode: &str) -> PyResult<Bound<'py, PyList>> {
        let rows = PyList::empty(py);
        if is_approx(mode)? {
            for row in hyperg::table(&self.inner.to_approx(), n).values() {
                let cells: Vec<Bound<'py, PyComplex>> = row.iter().map(|z| complex(py, z)).collect();
                rows.append(PyList::new(py, cells)?)?;
            }
        } else {
            for row in hyperg::table(&self.inner, n).values() {
                rows.append(PyList::new(py, strings(row))?)?;
            }
        }
        Ok(rows)
    }

    /// Lattice points `(m_0, m_1, ..., m_d)` in table order.
    fn lattice(&self, n: u32) -> Vec<Vec<u32>> {
        kraw_core::numeric::enumerate_lattice(self.inner.d(), n)
            .into_iter()
            .map(|l| l.parts().to_vec())
            .collect()
    }

    fn table_json(&self, n: u32) -> String {
        format::write_table(&hyperg::table(&self.inner, n))
    }

    /// Runs the named suites (all by default) and returns the report dict.
    #[pyo3(signature = (n, suites = None, mode = "exact", eps = DEFAULT_EPS))]
    fn check<'py>(
        &self,
        py: Python<'py>,
        n: u32,
        suites: Option<Vec<String>>,
        mode: &str,
        eps: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let names: Vec<String> = suites.unwrap_or_else(|| suite::SUITES.iter().map(|s| s.to_string()).collect());
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let value = if is_approx(mode)? {
            let k = self.inner.to_approx();
            let t = py.detach(|| hyperg::table(&k, n));
            let (all, parts) = py.detach(|| suite::run_all(&names, &t, eps)).map_err(PyValueError::new_err)?;
            report_json(&all, &parts, &k)
        } else {
            let t = py.detach(|| hyperg::table(&self.inner, n));
            let (all, parts) = py.detach(|| suite::run_all(&names, &t, eps)).map_err(PyValueError::new_err)?;
            report_json(&all, &parts, &self.inner)
        };
        json_loads(py, &value)
    }

    /// Stencil of `L_i`, `M_i` or the universal operator as a dict.
    #[pyo3(signature = (n, operator = "L", i = 1))]
    fn stencil<'py>(&self, py: Python<'py>, n: u32, operator: &str, i: usize) -> PyResult<Bound<'py, PyAny>> {
        let op = match operator {
            "L" | "l" => operator_mtilde(&self.inner, n, i).map_err(value_error)?,
            "M" | "m" => operator_m(&self.inner, n, i).map_err(value_error)?,
            "universal" => operator_universal(&self.inner, n),
            other => return Err(PyValueError::new_err(format!("unknown operator {other:?}"))),
        };
        json_loads(py, &format::stencil_to_value(&op).to_string())
    }

    fn __repr__(&self) -> String {
        format!("ParameterSet(d={}, nu={}, p={:?})", self.inner.d(), self.nu(), self.p())
    }
}

fn eval_with<S: Scalar>(k: &kraw_core::ParameterSet<S>, m: &DegreePoint, mt: &DegreePoint, method: &str) -> PyResult<S> {
    match method {
        "hypergeometric" => hyperg::eval_hypergeometric(k, m, mt).map_err(value_error),
        "generating" => hyperg::eval_generating(k, m, mt).map_err(value_error),
        "pairing" => liemod::pairing_eval(k, &m.to_index(), &mt.to_index()).map_err(value_error),
        other => Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    }
}

fn report_json<S: Scalar>(
    all: &kraw_core::CheckReport,
    parts: &[kraw_core::CheckReport],
    k: &kraw_core::ParameterSet<S>,
) -> String {
    let mut value = format::report_to_value(all, k);
    value["reports"] = serde_json::to_value(parts).expect("plain data");
    value.to_string()
}

/// Checks raw parameter JSON; returns `{"valid": bool, "violations": [...]}`.
#[pyfunction]
fn validate<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    let raw = format::parse_raw_params::<Exact>(text).map_err(value_error)?;
    let violations: Vec<serde_json::Value> = raw
        .violations(0.0)
        .iter()
        .map(|v| serde_json::json!({ "condition": v.condition(), "detail": v.to_string() }))
        .collect();
    let out = serde_json::json!({ "valid": violations.is_empty(), "violations": violations });
    json_loads(py, &out.to_string())
}

/// Names accepted by `ParameterSet.check`.
#[pyfunction]
fn suites() -> Vec<&'static str> {
    suite::SUITES.to_vec()
}

#[pymodule]
fn kraw(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParameterSet>()?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(suites, m)?)?;
    Ok(())
}
