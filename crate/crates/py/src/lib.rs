//! Python bindings: `import steiner`.
//!
//! Reports come back as plain dicts. Errors map to `ValueError` (bad input or
//! failed validation), `HypothesisError` (non-even or divergent input) and
//! `OSError`.

use std::cell::RefCell;
use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use steiner_core::convex1d::inf_convolve;
use steiner_core::funcbank::{self, Body};
use steiner_core::gridnd::{steiner_symmetrize, Interp};
use steiner_core::{santalo, Direction, Error, GridSpec, Tail};

create_exception!(steiner, HypothesisError, PyValueError, "An experiment's hypothesis (evenness, integrability) fails.");

fn err(e: Error) -> PyErr {
    match e {
        Error::NotEven(_) | Error::Divergent(_) => HypothesisError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Serializes through JSON into Python objects.
fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

fn tail(v: Option<f64>) -> Tail {
    v.map_or(Tail::Wall, Tail::Slope)
}

fn tail_value(t: Tail) -> Option<f64> {
    match t {
        Tail::Wall => None,
        Tail::Slope(m) => Some(m),
    }
}

fn tail_repr(t: Tail) -> String {
    tail_value(t).map_or("None".into(), |m| format!("{m:?}"))
}

/// Piecewise-linear convex function on the line. A tail of `None` is a wall.
#[pyclass(name = "PlConvex1D", module = "steiner", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPl(steiner_core::PlConvex1D);

#[pymethods]
impl PyPl {
    #[new]
    #[pyo3(signature = (breakpoints, values, left=None, right=None))]
    fn new(breakpoints: Vec<f64>, values: Vec<f64>, left: Option<f64>, right: Option<f64>) -> PyResult<Self> {
        let f = steiner_core::PlConvex1D::new(breakpoints, values, tail(left), tail(right)).map_err(err)?;
        let v = f.validate();
        if !v.is_empty() {
            return Err(err(Error::Invalid(v)));
        }
        Ok(PyPl(f))
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        steiner_core::PlConvex1D::from_json(s).map(PyPl).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(err)
    }

    #[getter]
    fn breakpoints(&self) -> Vec<f64> {
        self.0.breakpoints().to_vec()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    #[getter]
    fn left(&self) -> Option<f64> {
        tail_value(self.0.left())
    }

    #[getter]
    fn right(&self) -> Option<f64> {
        tail_value(self.0.right())
    }

    fn domain(&self) -> (f64, f64) {
        self.0.domain()
    }

    fn __call__(&self, x: f64) -> f64 {
        self.0.eval(x)
    }

    fn eval_many(&self, xs: Vec<f64>) -> Vec<f64> {
        xs.into_iter().map(|x| self.0.eval(x)).collect()
    }

    /// `(mu, nu, level)`: the argmin interval and the minimum value.
    fn argmin(&self) -> PyResult<(f64, f64, f64)> {
        let a = self.0.argmin_interval().map_err(err)?;
        Ok((a.mu, a.nu, a.level))
    }

    fn width_at(&self, s: f64) -> f64 {
        self.0.width_at(s)
    }

    fn sublevel_interval(&self, s: f64) -> Option<(f64, f64)> {
        self.0.sublevel_interval(s)
    }

    /// Width-preserving Steiner symmetral.
    fn symmetrize(&self) -> PyResult<Self> {
        self.0.symmetrize().map(PyPl).map_err(err)
    }

    /// `x -> (f □ f(-·))(2x) / 2`.
    fn symmetrize_amk(&self) -> PyResult<Self> {
        self.0.symmetrize_amk().map(PyPl).map_err(err)
    }

    fn legendre(&self) -> Self {
        PyPl(self.0.legendre())
    }

    fn exp_integral(&self) -> f64 {
        self.0.exp_integral()
    }

    fn validate(&self) -> Vec<String> {
        self.0.validate().iter().map(|v| format!("{v:?}")).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "PlConvex1D(breakpoints={:?}, values={:?}, left={}, right={})",
            self.0.breakpoints(),
            self.0.values(),
            tail_repr(self.0.left()),
            tail_repr(self.0.right())
        )
    }
}

/// Function sampled on a 1-D or 2-D tensor grid; `inf` marks the outside of the domain.
#[pyclass(name = "GridFn", module = "steiner", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGrid(steiner_core::GridFn);

#[pymethods]
impl PyGrid {
    /// Row-major values (last axis fastest).
    #[new]
    fn new(origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>, values: Vec<f64>) -> PyResult<Self> {
        let spec = GridSpec::new(origin, spacing, shape).map_err(err)?;
        steiner_core::GridFn::from_values(spec, values).map(PyGrid).map_err(err)
    }

    /// Samples a Python callable `f(x)` (1-D) or `f(x, y)` (2-D) on `[-half, half]^dim`.
    #[staticmethod]
    fn from_callable(f: &Bound<'_, PyAny>, dim: usize, half: f64, points: usize) -> PyResult<Self> {
        let spec = GridSpec::square(dim, half, points).map_err(err)?;
        let mut values = Vec::with_capacity(spec.len());
        for k in 0..spec.len() {
            let p = spec.point(k);
            let v = if dim == 1 { f.call1((p[0],))? } else { f.call1((p[0], p[1]))? };
            values.push(v.extract::<f64>()?);
        }
        steiner_core::GridFn::from_values(spec, values).map(PyGrid).map_err(err)
    }

    #[staticmethod]
    fn load(stem: PathBuf) -> PyResult<Self> {
        steiner_core::GridFn::load(&stem).map(PyGrid).map_err(err)
    }

    fn save(&self, stem: PathBuf) -> PyResult<()> {
        self.0.save(&stem).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn shape(&self) -> Vec<usize> {
        self.0.spec().shape.clone()
    }

    #[getter]
    fn origin(&self) -> Vec<f64> {
        self.0.spec().origin.clone()
    }

    #[getter]
    fn spacing(&self) -> Vec<f64> {
        self.0.spec().spacing.clone()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    /// Bilinear (or cubic with `cubic=True`) interpolation at a point.
    #[pyo3(signature = (point, cubic=false))]
    fn eval(&self, point: Vec<f64>, cubic: bool) -> f64 {
        self.0.eval(&point, if cubic { Interp::Cubic } else { Interp::Linear })
    }

    fn min_value(&self) -> f64 {
        self.0.min_value()
    }

    /// Steiner symmetrization about the hyperplane orthogonal to `u`.
    fn symmetrize(&self, u: Vec<f64>) -> PyResult<Self> {
        let u = Direction::normalized(&u).map_err(err)?;
        steiner_symmetrize(&self.0, &u).map(PyGrid).map_err(err)
    }

    fn exp_integral(&self) -> PyResult<f64> {
        self.0.exp_integral().map_err(err)
    }

    fn radial_deviation(&self) -> f64 {
        self.0.radial_deviation()
    }

    fn asymmetry(&self) -> PyResult<f64> {
        self.0.asymmetry().map(|a| a.0).map_err(err)
    }

    /// `∫ exp(-f*)` over the dual grid.
    fn dual_integral(&self) -> PyResult<f64> {
        santalo::dual_integral(&self.0).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("GridFn(shape={:?}, origin={:?}, spacing={:?})", self.0.spec().shape, self.0.spec().origin, self.0.spec().spacing)
    }
}

/// Ids of the named functions.
#[pyfunction]
fn catalog() -> Vec<&'static str> {
    funcbank::catalog().iter().map(|e| e.id).collect()
}

/// Catalog entry as a dict (`verify=True` adds the outcome of every attached fact).
#[pyfunction]
#[pyo3(signature = (id, verify=false))]
fn describe<'py>(py: Python<'py>, id: &str, verify: bool) -> PyResult<Bound<'py, PyAny>> {
    let e = funcbank::lookup(id).map_err(err)?;
    let mut v = e.to_json().map_err(err)?;
    if verify {
        let outcomes = e.verify().map_err(err)?;
        v["facts"] = outcomes
            .iter()
            .map(|o| serde_json::json!({"claim": o.claim, "error": o.error, "tolerance": o.tolerance, "passed": o.passed}))
            .collect();
    }
    to_py(py, &v)
}

/// A named function: `PlConvex1D` in 1-D, `GridFn` in 2-D (`points` per axis).
#[pyfunction]
#[pyo3(signature = (id, points=None))]
fn lookup<'py>(py: Python<'py>, id: &str, points: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let e = funcbank::lookup(id).map_err(err)?;
    match e.body {
        Body::Analytic2D { .. } => Ok(Bound::new(py, PyGrid(e.grid(points).map_err(err)?))?.into_any()),
        _ => Ok(Bound::new(py, PyPl(e.pl().map_err(err)?))?.into_any()),
    }
}

#[pyfunction]
fn inf_convolution(f: &PyPl, g: &PyPl) -> PyResult<PyPl> {
    inf_convolve(&f.0, &g.0).map(PyPl).map_err(err)
}

/// Santaló product report for an even `PlConvex1D` or `GridFn`.
#[pyfunction]
#[pyo3(signature = (f, id="input"))]
fn santalo_product<'py>(py: Python<'py>, f: &Bound<'py, PyAny>, id: &str) -> PyResult<Bound<'py, PyAny>> {
    let report = if let Ok(p) = f.cast::<PyPl>() {
        santalo::santalo_product_pl(&p.get().0, id)
    } else if let Ok(g) = f.cast::<PyGrid>() {
        santalo::santalo_product_grid(&g.get().0, id)
    } else {
        return Err(PyValueError::new_err("expected PlConvex1D or GridFn"));
    }
    .map_err(err)?;
    to_py(py, &report)
}

/// Compares `∫ exp(-f*)` before and after symmetrizing along `u`.
#[pyfunction]
fn dual_monotonicity<'py>(py: Python<'py>, f: &PyGrid, u: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    let u = Direction::normalized(&u).map_err(err)?;
    let r = santalo::dual_monotonicity_check(&f.0, &u).map_err(err)?;
    to_py(py, &r)
}

/// Santaló check for `f(x) = h(|x|)` in dimension `n`.
#[pyfunction]
fn radial_bound<'py>(py: Python<'py>, h: &Bound<'py, PyAny>, n: usize) -> PyResult<Bound<'py, PyAny>> {
    let failure = RefCell::new(None);
    let r = santalo::radial_bound_check(
        |t| match h.call1((t,)).and_then(|v| v.extract::<f64>()) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        n,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    to_py(py, &r.map_err(err)?)
}

/// Seeded random symmetrizations: returns `(trace, final_grid)`.
#[pyfunction]
#[pyo3(signature = (f, steps=50, seed=7))]
fn converge<'py>(py: Python<'py>, f: &PyGrid, steps: usize, seed: u64) -> PyResult<(Bound<'py, PyAny>, PyGrid)> {
    let (trace, last) = santalo::convergence_experiment(&f.0, steps, seed).map_err(err)?;
    Ok((to_py(py, &trace)?, PyGrid(last)))
}

/// Surface area of the unit sphere in `R^n`.
#[pyfunction]
fn omega(n: usize) -> f64 {
    santalo::omega(n)
}

#[pymodule]
fn steiner(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPl>()?;
    m.add_class::<PyGrid>()?;
    m.add("HypothesisError", m.py().get_type::<HypothesisError>())?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add_function(wrap_pyfunction!(describe, m)?)?;
    m.add_function(wrap_pyfunction!(lookup, m)?)?;
    m.add_function(wrap_pyfunction!(inf_convolution, m)?)?;
    m.add_function(wrap_pyfunction!(santalo_product, m)?)?;
    m.add_function(wrap_pyfunction!(dual_monotonicity, m)?)?;
    m.add_function(wrap_pyfunction!(radial_bound, m)?)?;
    m.add_function(wrap_pyfunction!(converge, m)?)?;
    m.add_function(wrap_pyfunction!(omega, m)?)?;
    Ok(())
}
