//! Python bindings: `import lagsum`.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use lagsum_core::{
    specfun, CaseKind, Error, GridSpec, HyperParams, IdentityCase, Method, TruncationPolicy,
};

create_exception!(lagsum, SingularError, PyValueError, "The formula is undefined at these parameters.");
create_exception!(lagsum, ConvergenceError, PyRuntimeError, "A series ran out of its term budget.");

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Singular(_) | Error::Pole(_) => SingularError::new_err(err.to_string()),
        Error::NoConvergence { .. } => ConvergenceError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn policy(tol: Option<f64>, n_max: Option<usize>) -> PyResult<TruncationPolicy> {
    let mut p = TruncationPolicy::default();
    if let Some(t) = tol {
        p.tol = t;
    }
    if let Some(n) = n_max {
        p.n_max = n;
    }
    p.validate().map_err(to_py)?;
    Ok(p)
}

fn case(kind: &str, nu: f64, j: u32, x: f64) -> PyResult<IdentityCase> {
    let kind: CaseKind = kind.parse().map_err(to_py)?;
    Ok(IdentityCase::new(kind, nu, j, x))
}

/// Value of a truncated or terminating series.
#[pyclass(name = "SeriesEval", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PySeriesEval {
    value: f64,
    abs_err_est: f64,
    terms_used: usize,
    terminated: bool,
}

impl From<lagsum_core::SeriesEval> for PySeriesEval {
    fn from(s: lagsum_core::SeriesEval) -> Self {
        Self {
            value: s.value,
            abs_err_est: s.abs_err_est,
            terms_used: s.terms_used,
            terminated: s.terminated,
        }
    }
}

#[pymethods]
impl PySeriesEval {
    fn __repr__(&self) -> String {
        format!(
            "SeriesEval(value={:e}, abs_err_est={:e}, terms_used={}, terminated={})",
            self.value,
            self.abs_err_est,
            self.terms_used,
            if self.terminated { "True" } else { "False" }
        )
    }

    fn __float__(&self) -> f64 {
        self.value
    }
}

/// One grid point of a verification run.
#[pyclass(name = "VerifyRecord", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyVerifyRecord(lagsum_core::VerifyRecord);

#[pymethods]
impl PyVerifyRecord {
    #[getter]
    fn case(&self) -> &'static str {
        self.0.case.kind().label()
    }
    #[getter]
    fn nu(&self) -> f64 {
        self.0.case.nu
    }
    #[getter]
    fn j(&self) -> u32 {
        self.0.case.j
    }
    #[getter]
    fn x(&self) -> f64 {
        self.0.case.x
    }
    #[getter]
    fn lhs(&self) -> f64 {
        self.0.lhs
    }
    #[getter]
    fn rhs(&self) -> f64 {
        self.0.rhs
    }
    #[getter]
    fn abs_err(&self) -> f64 {
        self.0.abs_err
    }
    #[getter]
    fn rel_err(&self) -> f64 {
        self.0.rel_err
    }
    #[getter]
    fn status(&self) -> &'static str {
        self.0.status.label()
    }
    #[getter]
    fn skip_reason(&self) -> Option<String> {
        self.0.skip_reason.clone()
    }
    #[getter]
    fn error(&self) -> Option<String> {
        self.0.error.clone()
    }
    #[getter]
    fn terms_lhs(&self) -> usize {
        self.0.terms_lhs
    }
    #[getter]
    fn terms_rhs(&self) -> usize {
        self.0.terms_rhs
    }

    fn __repr__(&self) -> String {
        format!(
            "VerifyRecord(case='{}', nu={}, j={}, x={}, status='{}', rel_err={:e})",
            self.case(),
            self.0.case.nu,
            self.0.case.j,
            self.0.case.x,
            self.status(),
            self.0.rel_err
        )
    }
}

#[pyclass(name = "Summary", frozen, get_all)]
pub struct PySummary {
    total: usize,
    passed: usize,
    failed: usize,
    skipped: usize,
    max_rel_err: f64,
}

#[pymethods]
impl PySummary {
    fn __repr__(&self) -> String {
        format!(
            "Summary(total={}, passed={}, failed={}, skipped={}, max_rel_err={:e})",
            self.total, self.passed, self.failed, self.skipped, self.max_rel_err
        )
    }
}

/// `(ln|Γ(x)|, sign Γ(x))`
#[pyfunction]
fn log_gamma(x: f64) -> PyResult<(f64, f64)> {
    let lg = specfun::log_gamma(x).map_err(to_py)?;
    Ok((lg.ln_abs, lg.sign))
}

#[pyfunction]
fn gamma(x: f64) -> PyResult<f64> {
    specfun::gamma(x).map_err(to_py)
}

#[pyfunction]
fn rgamma(x: f64) -> f64 {
    specfun::rgamma(x)
}

#[pyfunction]
fn pochhammer(a: f64, n: u32) -> f64 {
    specfun::pochhammer(a, n)
}

#[pyfunction]
fn binomial(j: u32, r: u32) -> PyResult<f64> {
    specfun::binomial(j, r).map_err(to_py)
}

#[pyfunction]
fn laguerre(n: u32, nu: f64, x: f64) -> f64 {
    specfun::laguerre(n, nu, x)
}

/// pFq(num; den; z)
#[pyfunction]
#[pyo3(signature = (num, den, z, tol=None, n_max=None))]
fn hyp_pfq(num: Vec<f64>, den: Vec<f64>, z: f64, tol: Option<f64>, n_max: Option<usize>) -> PyResult<PySeriesEval> {
    let p = policy(tol, n_max)?;
    lagsum_core::eval_pfq(&HyperParams::new(&num, &den, z), &p)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
fn kummer_plus(a: f64, b: f64, j: u32) -> PyResult<f64> {
    lagsum_core::kummer_plus(a, b, j).map_err(to_py)
}

#[pyfunction]
fn kummer_minus(a: f64, b: f64, j: u32) -> PyResult<f64> {
    lagsum_core::kummer_minus(a, b, j).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (case, nu, j, x, tol=None, n_max=None))]
fn s_direct(case: &str, nu: f64, j: u32, x: f64, tol: Option<f64>, n_max: Option<usize>) -> PyResult<PySeriesEval> {
    let c = self::case(case, nu, j, x)?;
    lagsum_core::s_direct(&c, &policy(tol, n_max)?)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (case, nu, j, x, tol=None, n_max=None))]
fn s_middle(case: &str, nu: f64, j: u32, x: f64, tol: Option<f64>, n_max: Option<usize>) -> PyResult<PySeriesEval> {
    let c = self::case(case, nu, j, x)?;
    lagsum_core::s_middle(&c, &policy(tol, n_max)?)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (case, nu, j, x, tol=None, n_max=None))]
fn s_closed(case: &str, nu: f64, j: u32, x: f64, tol: Option<f64>, n_max: Option<usize>) -> PyResult<f64> {
    let c = self::case(case, nu, j, x)?;
    lagsum_core::s_closed(&c, &policy(tol, n_max)?).map_err(to_py)
}

/// Any of the three methods, "closed", "direct" or "middle".
#[pyfunction]
#[pyo3(signature = (case, nu, j, x, method="closed", tol=None, n_max=None))]
fn evaluate(
    case: &str,
    nu: f64,
    j: u32,
    x: f64,
    method: &str,
    tol: Option<f64>,
    n_max: Option<usize>,
) -> PyResult<PySeriesEval> {
    let c = self::case(case, nu, j, x)?;
    let m: Method = method.parse().map_err(to_py)?;
    lagsum_core::evaluate(&c, m, &policy(tol, n_max)?)
        .map(Into::into)
        .map_err(to_py)
}

/// Both sides of the pFq transformation, `(lhs, rhs)`.
#[pyfunction]
#[pyo3(signature = (a, b, y, nu, x, tol=None, n_max=None))]
fn transform_sides(
    a: Vec<f64>,
    b: Vec<f64>,
    y: f64,
    nu: f64,
    x: f64,
    tol: Option<f64>,
    n_max: Option<usize>,
) -> PyResult<(PySeriesEval, PySeriesEval)> {
    let (l, r) = lagsum_core::transform_sides(&a, &b, y, nu, x, &policy(tol, n_max)?).map_err(to_py)?;
    Ok((l.into(), r.into()))
}

#[pyfunction]
#[pyo3(signature = (nu_values, j_values, x_values, cases=None, rel_tol=1e-9, method="closed", tol=None, n_max=None))]
#[allow(clippy::too_many_arguments)]
fn run_grid(
    py: Python<'_>,
    nu_values: Vec<f64>,
    j_values: Vec<u32>,
    x_values: Vec<f64>,
    cases: Option<Vec<String>>,
    rel_tol: f64,
    method: &str,
    tol: Option<f64>,
    n_max: Option<usize>,
) -> PyResult<Vec<PyVerifyRecord>> {
    let mut spec = GridSpec::new(nu_values, j_values, x_values);
    if let Some(cases) = cases {
        spec.cases = cases
            .iter()
            .map(|c| c.parse::<CaseKind>())
            .collect::<Result<_, _>>()
            .map_err(to_py)?;
    }
    spec.rel_tol = rel_tol;
    spec.method = method.parse().map_err(to_py)?;
    spec.policy = policy(tol, n_max)?;
    let records = py
        .detach(|| lagsum_core::run_grid(&spec))
        .map_err(to_py)?;
    Ok(records.into_iter().map(PyVerifyRecord).collect())
}

#[pyfunction]
fn summarize(records: Vec<PyVerifyRecord>) -> PySummary {
    let inner: Vec<_> = records.into_iter().map(|r| r.0).collect();
    let s = lagsum_core::summarize(&inner);
    PySummary {
        total: s.total,
        passed: s.passed,
        failed: s.failed,
        skipped: s.skipped,
        max_rel_err: s.max_rel_err,
    }
}

#[pymodule]
pub fn lagsum(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SingularError", m.py().get_type::<SingularError>())?;
    m.add("ConvergenceError", m.py().get_type::<ConvergenceError>())?;
    m.add_class::<PySeriesEval>()?;
    m.add_class::<PyVerifyRecord>()?;
    m.add_class::<PySummary>()?;
    m.add_function(wrap_pyfunction!(log_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(rgamma, m)?)?;
    m.add_function(wrap_pyfunction!(pochhammer, m)?)?;
    m.add_function(wrap_pyfunction!(binomial, m)?)?;
    m.add_function(wrap_pyfunction!(laguerre, m)?)?;
    m.add_function(wrap_pyfunction!(hyp_pfq, m)?)?;
    m.add_function(wrap_pyfunction!(kummer_plus, m)?)?;
    m.add_function(wrap_pyfunction!(kummer_minus, m)?)?;
    m.add_function(wrap_pyfunction!(s_direct, m)?)?;
    m.add_function(wrap_pyfunction!(s_middle, m)?)?;
    m.add_function(wrap_pyfunction!(s_closed, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(transform_sides, m)?)?;
    m.add_function(wrap_pyfunction!(run_grid, m)?)?;
    m.add_function(wrap_pyfunction!(summarize, m)?)?;
    Ok(())
}
