//! Python bindings: signal construction, seminorm scans, classification,
//! and the mild-solution solvers.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use weylap::aptest::{self, ClassifyPolicy, Convention, TranslationQuery};
use weylap::evolution::{self, SemigroupSpec, SolveGrid};
use weylap::seminorm::{self, ScanSpec, WindowSchedule};
use weylap::signal::{Anchor, LipschitzBound, ParametricSignal, Signal, TrigTerm};

fn err(e: weylap::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// serde_json::Value as plain Python objects.
fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => b.into_pyobject(py)?.to_owned().unbind().into(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.unbind().into()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.unbind().into()
            }
        }
        serde_json::Value::String(s) => s.into_pyobject(py)?.unbind().into(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.unbind().into()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.unbind().into()
        }
    })
}

fn to_py_report<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

fn scan_spec(scan: (f64, f64, f64), density: u32) -> ScanSpec {
    ScanSpec::new(scan.0, scan.1, scan.2).with_density(density)
}

/// An evaluable signal `R -> R^n`.
#[pyclass(name = "Signal", from_py_object)]
#[derive(Clone)]
struct PySignal {
    inner: Signal,
}

#[pymethods]
impl PySignal {
    #[staticmethod]
    fn constant(values: Vec<f64>) -> PyResult<PySignal> {
        if values.is_empty() {
            return Err(PyValueError::new_err("constant needs at least one component"));
        }
        Ok(PySignal {
            inner: Signal::constant(values),
        })
    }

    /// The unit pulse on [0, 1/2).
    #[staticmethod]
    fn paper_step() -> PySignal {
        PySignal {
            inner: Signal::paper_step(),
        }
    }

    /// The bounded primitive F of the unit pulse.
    #[staticmethod]
    fn paper_primitive() -> PySignal {
        PySignal {
            inner: weylap::signal::paper_primitive(),
        }
    }

    #[staticmethod]
    fn sine() -> PySignal {
        PySignal {
            inner: Signal::sine(),
        }
    }

    /// Sum of amplitude * sin(omega t + phase) terms.
    #[staticmethod]
    fn trig_sum(terms: Vec<(f64, f64, f64)>) -> PySignal {
        PySignal {
            inner: Signal::trig_sum(
                terms
                    .into_iter()
                    .map(|(amplitude, omega, phase)| TrigTerm {
                        amplitude,
                        omega,
                        phase,
                    })
                    .collect(),
            ),
        }
    }

    #[staticmethod]
    fn pulse_train(period: f64, width: f64) -> PyResult<PySignal> {
        Ok(PySignal {
            inner: Signal::pulse_train(period, width).map_err(err)?,
        })
    }

    #[staticmethod]
    fn exp_decay(amplitude: f64, rate: f64) -> PyResult<PySignal> {
        Ok(PySignal {
            inner: Signal::exp_decay(amplitude, rate).map_err(err)?,
        })
    }

    /// Running integral from -inf (requires an integrable tail) or from a
    /// finite anchor time.
    #[staticmethod]
    #[pyo3(signature = (inner, anchor=None))]
    fn primitive(inner: &PySignal, anchor: Option<f64>) -> PyResult<PySignal> {
        let anchor = match anchor {
            None => Anchor::MinusInfinity,
            Some(t) => Anchor::Time(t),
        };
        Ok(PySignal {
            inner: Signal::primitive(inner.inner.clone(), anchor).map_err(err)?,
        })
    }

    #[staticmethod]
    fn sampled(t0: f64, dt: f64, values: Vec<Vec<f64>>) -> PyResult<PySignal> {
        Ok(PySignal {
            inner: Signal::sampled(t0, dt, values).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(path: &str) -> PyResult<PySignal> {
        Ok(PySignal {
            inner: weylap::io::load_signal(std::path::Path::new(path)).map_err(err)?,
        })
    }

    fn shift(&self, tau: f64) -> PySignal {
        PySignal {
            inner: Signal::shift(self.inner.clone(), tau),
        }
    }

    fn scale(&self, factor: f64) -> PySignal {
        PySignal {
            inner: Signal::scale(factor, self.inner.clone()),
        }
    }

    fn plus(&self, other: &PySignal) -> PyResult<PySignal> {
        Ok(PySignal {
            inner: Signal::sum(vec![self.inner.clone(), other.inner.clone()]).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, t: f64) -> Vec<f64> {
        self.inner.eval(t)
    }

    fn norm_at(&self, t: f64) -> f64 {
        self.inner.norm_at(t)
    }

    fn __repr__(&self) -> String {
        format!("Signal(dim={}, label={:?})", self.inner.dim(), self.inner.label())
    }
}

/// Stepanov seminorm estimate as a dict.
#[pyfunction]
#[pyo3(signature = (signal, p, l, scan=(-10.0, 10.0, 0.5), density=256))]
fn stepanov_norm(
    py: Python<'_>,
    signal: &PySignal,
    p: f64,
    l: f64,
    scan: (f64, f64, f64),
    density: u32,
) -> PyResult<Py<PyAny>> {
    let est = seminorm::stepanov_norm(&signal.inner, p, l, &scan_spec(scan, density)).map_err(err)?;
    to_py_report(py, &est)
}

#[pyfunction]
#[pyo3(signature = (f, g, p, l, scan=(-10.0, 10.0, 0.5), density=256))]
fn stepanov_distance(
    py: Python<'_>,
    f: &PySignal,
    g: &PySignal,
    p: f64,
    l: f64,
    scan: (f64, f64, f64),
    density: u32,
) -> PyResult<Py<PyAny>> {
    let est = seminorm::stepanov_distance(&f.inner, &g.inner, p, l, &scan_spec(scan, density)).map_err(err)?;
    to_py_report(py, &est)
}

/// Weyl seminorm along a geometric window schedule.
#[pyfunction]
#[pyo3(signature = (signal, p, tol=1e-4, l0=1.0, factor=2.0, max_windows=16, scan=(-10.0, 10.0, 0.5), density=256))]
#[allow(clippy::too_many_arguments)]
fn weyl_norm(
    py: Python<'_>,
    signal: &PySignal,
    p: f64,
    tol: f64,
    l0: f64,
    factor: f64,
    max_windows: usize,
    scan: (f64, f64, f64),
    density: u32,
) -> PyResult<Py<PyAny>> {
    let schedule = WindowSchedule {
        l0,
        factor,
        max_windows,
    };
    let est = seminorm::weyl_norm(&signal.inner, p, &schedule, tol, &scan_spec(scan, density)).map_err(err)?;
    to_py_report(py, &est)
}

/// eps-translation-number scan over a tau grid.
#[pyfunction]
#[pyo3(signature = (signal, eps, p, l, tau=(0.0, 10.0, 0.1), convention="classical", scan=(-10.0, 10.0, 0.5), density=256))]
#[allow(clippy::too_many_arguments)]
fn scan_translations(
    py: Python<'_>,
    signal: &PySignal,
    eps: f64,
    p: f64,
    l: f64,
    tau: (f64, f64, f64),
    convention: &str,
    scan: (f64, f64, f64),
    density: u32,
) -> PyResult<Py<PyAny>> {
    let convention = match convention {
        "classical" => Convention::Classical,
        "ursell" => Convention::Ursell,
        "bohr" => Convention::Bohr,
        other => return Err(PyValueError::new_err(format!("unknown convention '{other}'"))),
    };
    let q = TranslationQuery {
        eps,
        p,
        l,
        convention,
        tau_min: tau.0,
        tau_max: tau.1,
        tau_step: tau.2,
        scan: scan_spec(scan, density),
    };
    let set = aptest::scan_translations(&signal.inner, &q).map_err(err)?;
    to_py_report(py, &set)
}

/// Bohr / Stepanov / Weyl classification ladder.
#[pyfunction]
#[pyo3(signature = (signal, eps, p, tau_max=10.0, scan=(-10.0, 10.0, 0.5), density=256))]
fn classify(
    py: Python<'_>,
    signal: &PySignal,
    eps: f64,
    p: f64,
    tau_max: f64,
    scan: (f64, f64, f64),
    density: u32,
) -> PyResult<Py<PyAny>> {
    let policy = ClassifyPolicy::new(tau_max, scan_spec(scan, density));
    let class = aptest::classify(&signal.inner, eps, p, &policy).map_err(err)?;
    to_py_report(py, &class)
}

/// Danilov tail functional at one (delta_fraction, window) pair.
#[pyfunction]
#[pyo3(signature = (signal, p, delta_fraction, l, scan=(-10.0, 10.0, 0.5), density=256))]
fn danilov_tail(
    signal: &PySignal,
    p: f64,
    delta_fraction: f64,
    l: f64,
    scan: (f64, f64, f64),
    density: u32,
) -> PyResult<f64> {
    seminorm::danilov_tail(&signal.inner, p, delta_fraction, l, &scan_spec(scan, density)).map_err(err)
}

fn build_semigroup(a: Option<f64>, diag: Option<Vec<f64>>) -> PyResult<SemigroupSpec> {
    match (a, diag) {
        (Some(a), None) => SemigroupSpec::scalar(a).map_err(err),
        (None, Some(d)) => SemigroupSpec::diagonal(d).map_err(err),
        _ => Err(PyValueError::new_err("give exactly one of a= or diag=")),
    }
}

/// Bounded mild solution of u' = A u + f(t) at one time.
#[pyfunction]
#[pyo3(signature = (forcing, t, a=None, diag=None, tail_tol=1e-6, density=256))]
fn solve_linear(
    py: Python<'_>,
    forcing: &PySignal,
    t: f64,
    a: Option<f64>,
    diag: Option<Vec<f64>>,
    tail_tol: f64,
    density: u32,
) -> PyResult<Py<PyAny>> {
    let s = build_semigroup(a, diag)?;
    let sol = evolution::linear_mild_solution(&s, &forcing.inner, t, tail_tol, density).map_err(err)?;
    to_py_report(py, &sol)
}

/// Picard iteration for u' = A u + g(t) + coupling * sin(u).
#[pyfunction]
#[pyo3(signature = (forcing, t_start, t_end, a=None, diag=None, coupling=0.0, p=2.0, dt=0.015625, tail_tol=1e-6, max_iter=50, res_tol=1e-10, density=256))]
#[allow(clippy::too_many_arguments)]
fn solve_semilinear(
    py: Python<'_>,
    forcing: &PySignal,
    t_start: f64,
    t_end: f64,
    a: Option<f64>,
    diag: Option<Vec<f64>>,
    coupling: f64,
    p: f64,
    dt: f64,
    tail_tol: f64,
    max_iter: usize,
    res_tol: f64,
    density: u32,
) -> PyResult<Py<PyAny>> {
    let s = build_semigroup(a, diag)?;
    let g = forcing.inner.clone();
    let dim = g.dim();
    let pf = ParametricSignal::new(dim, LipschitzBound::Constant(coupling.abs()), move |t, u, out| {
        g.eval_into(t, out);
        for (o, ui) in out.iter_mut().zip(u) {
            *o += coupling * ui.sin();
        }
    });
    let grid = SolveGrid { t_start, t_end, dt };
    let sol = evolution::picard_solve(&s, &pf, p, &grid, tail_tol, max_iter, res_tol, density).map_err(err)?;
    to_py_report(py, &sol)
}

/// Full reproduction suite; returns the aggregate report.
#[pyfunction]
#[pyo3(signature = (seed=7))]
fn verify_paper(py: Python<'_>, seed: u64) -> PyResult<Py<PyAny>> {
    let report = weylap::verify::verify_paper(seed).map_err(err)?;
    to_py_report(py, &report)
}

#[pymodule]
fn weylap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySignal>()?;
    m.add_function(wrap_pyfunction!(stepanov_norm, m)?)?;
    m.add_function(wrap_pyfunction!(stepanov_distance, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_norm, m)?)?;
    m.add_function(wrap_pyfunction!(scan_translations, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(danilov_tail, m)?)?;
    m.add_function(wrap_pyfunction!(solve_linear, m)?)?;
    m.add_function(wrap_pyfunction!(solve_semilinear, m)?)?;
    m.add_function(wrap_pyfunction!(verify_paper, m)?)?;
    Ok(())
}
