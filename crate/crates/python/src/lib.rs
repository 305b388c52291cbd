//! Python bindings. Results come back as plain dicts and lists.

use pbw_core::certify::{self, check_poisson, check_quadratic_condition, CertifyError, D2Choice};
use pbw_core::io::{self, Source};
use pbw_core::rewrite::{self, Membership, RewriteError};
use pbw_core::{HPoly, Mode, Rational};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyString;
use serde_json::{json, Value};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Accepts a JSON string or any object `json.dumps` understands.
fn doc_text(obj: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(s) = obj.cast::<PyString>() {
        return Ok(s.to_str()?.to_owned());
    }
    let json = obj.py().import("json")?;
    json.call_method1("dumps", (obj,))?.extract()
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn mode(at: Option<&Bound<'_, PyAny>>) -> PyResult<Mode> {
    match at {
        None => Ok(Mode::Generic),
        Some(a) => {
            let s = a.str()?.to_str()?.to_owned();
            let r: Rational = s.parse().map_err(|e| err(format!("at = {s}: {e}")))?;
            Ok(Mode::At(r))
        }
    }
}

fn source_name(s: &Source) -> &'static str {
    match s {
        Source::Explicit => "explicit",
        Source::Lie(_) => "lie",
        Source::Quadratic(_) => "quadratic",
        Source::Potential(_) => "potential",
    }
}

/// A filtered deformation of the polynomial algebra.
#[pyclass(name = "Presentation", module = "pbw_workbench", frozen)]
struct PyPresentation {
    inner: pbw_core::Presentation,
    source: Source,
}

impl PyPresentation {
    fn choice(&self, d2: &str, custom: Option<&Bound<'_, PyAny>>) -> PyResult<D2Choice> {
        Ok(match d2 {
            "auto" => certify::suggested_choice(&self.inner),
            "default" => D2Choice::Default,
            "lie" => D2Choice::Lie,
            "quadratic" => D2Choice::Quadratic,
            "custom" => {
                let c = custom.ok_or_else(|| err("d2 = 'custom' needs a custom table"))?;
                D2Choice::Custom(io::parse_custom_d2(&doc_text(c)?, self.inner.n()).map_err(err)?)
            }
            other => return Err(err(format!("unknown d2 choice {other:?}"))),
        })
    }

    fn poly(&self, obj: &Bound<'_, PyAny>) -> PyResult<pbw_core::NCPoly<HPoly>> {
        io::parse_poly(&doc_text(obj)?, self.inner.n()).map_err(err)
    }
}

#[pymethods]
impl PyPresentation {
    /// Parses a presentation document (`phi`, `lie`, `quadratic` or `potential`).
    #[new]
    fn new(doc: &Bound<'_, PyAny>) -> PyResult<Self> {
        let (inner, source) = io::parse_presentation(&doc_text(doc)?).map_err(err)?;
        Ok(Self { inner, source })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn source(&self) -> &'static str {
        source_name(&self.source)
    }

    fn is_linear(&self) -> bool {
        self.inner.is_linear()
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &io::presentation_json(&self.inner))
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Presentation(n={}, source={})", self.inner.n(), source_name(&self.source))
    }

    fn validate(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let r = pbw_core::validate(&self.inner);
        let v = json!({
            "valid": r.valid,
            "filtration_ok": r.filtration_ok,
            "linear": self.inner.is_linear(),
            "paths": r.paths.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "issues": r.issues.iter().map(|i| format!("{i:?}")).collect::<Vec<_>>(),
        });
        to_py(py, &v)
    }

    #[pyo3(signature = (d2 = "auto", custom = None))]
    fn certify(&self, py: Python<'_>, d2: &str, custom: Option<&Bound<'_, PyAny>>) -> PyResult<Py<PyAny>> {
        let rep = certify::certify(&self.inner, &self.choice(d2, custom)?).map_err(err)?;
        let mut v = io::certificate_json(&rep);
        if let Source::Quadratic(q) = &self.source {
            v["quadratic_condition"] = io::tensor_check_json(&check_quadratic_condition(q));
            v["poisson_condition"] = io::tensor_check_json(&check_poisson(q));
        }
        to_py(py, &v)
    }

    /// Lowest-order obstruction, or None when the certificate passes.
    #[pyo3(signature = (d2 = "auto", custom = None))]
    fn obstruction(&self, py: Python<'_>, d2: &str, custom: Option<&Bound<'_, PyAny>>) -> PyResult<Option<Py<PyAny>>> {
        let rep = certify::certify(&self.inner, &self.choice(d2, custom)?).map_err(err)?;
        match certify::obstruction_from(&rep) {
            Ok(ob) => Ok(Some(to_py(py, &io::obstruction_json(&ob))?)),
            Err(CertifyError::NoObstruction) => Ok(None),
            Err(e) => Err(err(e)),
        }
    }

    /// Graded dimensions through `degree`, at `h = at` or over Q(h) when `at` is None.
    #[pyo3(signature = (degree, at = None))]
    fn hilbert(&self, py: Python<'_>, degree: usize, at: Option<&Bound<'_, PyAny>>) -> PyResult<Py<PyAny>> {
        let rep = pbw_core::hilbert(&self.inner, &mode(at)?, degree).map_err(err)?;
        to_py(py, &io::hilbert_json(&rep))
    }

    #[pyo3(signature = (degree, at = None))]
    fn pbw(&self, py: Python<'_>, degree: usize, at: Option<&Bound<'_, PyAny>>) -> PyResult<Py<PyAny>> {
        self.hilbert(py, degree, at)
    }

    /// True, False, or None when `degree` does not certify the element.
    #[pyo3(signature = (poly, degree, at = None))]
    fn member(&self, poly: &Bound<'_, PyAny>, degree: usize, at: Option<&Bound<'_, PyAny>>) -> PyResult<Option<bool>> {
        let f = self.poly(poly)?;
        let out = match mode(at)? {
            Mode::At(a) => {
                let mut sys = rewrite::build_rules_at(&self.inner, &a).map_err(err)?;
                sys.complete(degree).map_err(err)?;
                sys.member(&f.specialize(&a))
            }
            Mode::Generic => {
                let mut sys = rewrite::build_rules_generic(&self.inner).map_err(err)?;
                sys.complete(degree).map_err(err)?;
                sys.member(&sys.embed(&f))
            }
        };
        match out {
            Ok(m) => Ok(Some(m == Membership::Yes)),
            Err(RewriteError::OutOfRange { .. }) => Ok(None),
            Err(e) => Err(err(e)),
        }
    }

    /// Looks for `factor·element` in the ideal with `element` outside it.
    fn torsion(&self, py: Python<'_>, element: &Bound<'_, PyAny>, factor: &str, degree: usize) -> PyResult<Py<PyAny>> {
        let t = self.poly(element)?;
        let fac: HPoly = factor.parse().map_err(|e| err(format!("factor {factor}: {e}")))?;
        let out = rewrite::torsion_check(&self.inner, &t, &fac, degree).map_err(err)?;
        to_py(py, &io::torsion_json(&out))
    }
}

/// A cyclic potential in three variables.
#[pyclass(name = "Potential", module = "pbw_workbench", frozen)]
struct PyPotential {
    inner: pbw_core::Potential,
}

#[pymethods]
impl PyPotential {
    #[new]
    fn new(doc: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Self { inner: io::parse_potential(&doc_text(doc)?).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn is_deformation(&self) -> bool {
        self.inner.is_deformation()
    }

    /// Cyclic derivative with respect to `x_var`, as a term list.
    fn derivative(&self, py: Python<'_>, var: usize) -> PyResult<Py<PyAny>> {
        let d = self.inner.derivative(var).map_err(err)?;
        to_py(py, &json!({"terms": io::poly_json(&d), "display": d.to_string()}))
    }

    fn to_presentation(&self) -> PyResult<PyPresentation> {
        let inner = self.inner.to_presentation().map_err(err)?;
        Ok(PyPresentation { inner, source: Source::Potential(self.inner.clone()) })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Potential({})", self.inner)
    }
}

#[pymodule]
fn pbw_workbench(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPresentation>()?;
    m.add_class::<PyPotential>()?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
