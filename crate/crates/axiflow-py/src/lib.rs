//! Python bindings: a thin object layer over the solver core. Profiles
//! are immutable once built; flow runs return the scalar history plus
//! the final profile. Input mistakes raise ValueError, numerical
//! breakdown raises RuntimeError.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyDict};

use axiflow::error::Error;
use axiflow::grid::{observed_order, Grid};
use axiflow::io as fio;
use axiflow::linearize::{self, SpectrumReport};
use axiflow::profile::{
    axis_regularity_check, h_from_physical, physical_from_h, validate_initial, HProfile,
    PhysicalProfile, ValidationReport,
};
use axiflow::rhs;
use axiflow::scenario::Scenario;
use axiflow::stepper::{self, FlowParams, StepScalars};
use num_complex::Complex;

fn pyerr(e: Error) -> PyErr {
    match e {
        Error::BadGridSize { .. }
        | Error::LengthMismatch { .. }
        | Error::InvalidProfile(_)
        | Error::InvalidInput(_)
        | Error::Io { .. }
        | Error::Json(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn report_dict<'py>(py: Python<'py>, rep: &ValidationReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for c in &rep.checks {
        d.set_item(&c.name, (c.passed, c.value, &c.detail))?;
    }
    Ok(d)
}

fn scalars_dict<'py>(py: Python<'py>, s: &StepScalars) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("t", s.t)?;
    d.set_item("a", s.a)?;
    d.set_item("b", s.b)?;
    d.set_item("c", s.c)?;
    d.set_item("d", s.d)?;
    d.set_item("area", s.area)?;
    d.set_item("min_h", s.min_h)?;
    d.set_item("h2_0", s.h2_0)?;
    d.set_item("h2_pi", s.h2_pi)?;
    Ok(d)
}

fn spectrum_dict<'py>(py: Python<'py>, rep: &SpectrumReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let eigs: Vec<Bound<PyComplex>> = rep
        .eigenvalues
        .iter()
        .map(|z| PyComplex::from_doubles(py, z.re, z.im))
        .collect();
    d.set_item("eigenvalues", eigs)?;
    d.set_item("max_real_part", rep.max_real_part)?;
    d.set_item("kernel_residual", rep.kernel_residual)?;
    let probes: Vec<(Bound<PyComplex>, f64)> = rep
        .resolvent
        .iter()
        .map(|s| (PyComplex::from_doubles(py, s.lambda.re, s.lambda.im), s.kappa))
        .collect();
    d.set_item("resolvent", probes)?;
    Ok(d)
}

/// Transplanted profile h(θ) on [0, π] with interval center c and axial
/// half-width d; h vanishes quadratically at both endpoints.
#[pyclass(frozen)]
#[derive(Clone)]
struct Profile {
    inner: HProfile,
}

impl Profile {
    fn grid(&self) -> PyResult<Grid> {
        Grid::new(self.inner.n()).map_err(pyerr)
    }
}

#[pymethods]
impl Profile {
    /// Build from raw node values (length n+1, n even) and the interval.
    #[new]
    fn new(values: Vec<f64>, c: f64, d: f64) -> PyResult<Self> {
        Grid::new(values.len().saturating_sub(1)).map_err(pyerr)?;
        let inner = HProfile::new(values, c, d).map_err(pyerr)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (n, d0=1.0))]
    fn sphere(n: usize, d0: f64) -> PyResult<Self> {
        Self::scenario(Scenario::Sphere { d0 }, n)
    }

    #[staticmethod]
    #[pyo3(signature = (n, d0=1.0, beta=1.0))]
    fn ellipsoid(n: usize, d0: f64, beta: f64) -> PyResult<Self> {
        Self::scenario(Scenario::Ellipsoid { d0, beta }, n)
    }

    #[staticmethod]
    #[pyo3(signature = (n, d0=1.0, mu=0.5))]
    fn dumbbell(n: usize, d0: f64, mu: f64) -> PyResult<Self> {
        Self::scenario(Scenario::Dumbbell { d0, mu }, n)
    }

    #[staticmethod]
    fn remark213(n: usize) -> PyResult<Self> {
        Self::scenario(Scenario::Sin2PlusSin3, n)
    }

    /// Transplant physical samples (x, v = u²/2) onto an n-point grid.
    #[staticmethod]
    fn from_physical(xs: Vec<f64>, v: Vec<f64>, n: usize) -> PyResult<Self> {
        let p = PhysicalProfile::from_v(xs, v).map_err(pyerr)?;
        let inner = h_from_physical(&p, n).map_err(pyerr)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        let inner = fio::read_h_profile_json(&path).map_err(pyerr)?;
        Ok(Self { inner })
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        fio::write_h_profile_json(&path, &self.inner).map_err(pyerr)
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c()
    }

    #[getter]
    fn d(&self) -> f64 {
        self.inner.d()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Left physical endpoint a = c − d.
    #[getter]
    fn a(&self) -> f64 {
        self.inner.a()
    }

    /// Right physical endpoint b = c + d.
    #[getter]
    fn b(&self) -> f64 {
        self.inner.b()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn theta(&self) -> PyResult<Vec<f64>> {
        Ok(self.grid()?.theta().to_vec())
    }

    /// Admissibility checks on the transplanted representation:
    /// dict of name -> (passed, value, detail).
    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let grid = self.grid()?;
        report_dict(py, &validate_initial(&grid, self.inner.values()))
    }

    /// Axis-regularity proxies on the physical samples (x, v, u).
    fn axis_checks<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let grid = self.grid()?;
        let p = physical_from_h(&grid, &self.inner).map_err(pyerr)?;
        report_dict(py, &axis_regularity_check(&p))
    }

    /// Physical samples as (x, v, u) lists, x = c − d·cos θ.
    fn physical(&self) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let grid = self.grid()?;
        let p = physical_from_h(&grid, &self.inner).map_err(pyerr)?;
        Ok((p.xs().to_vec(), p.v().to_vec(), p.u().to_vec()))
    }

    /// One evaluation of the flow system: (h_t values, c', d').
    fn rhs(&self) -> PyResult<(Vec<f64>, f64, f64)> {
        let grid = self.grid()?;
        let eval = rhs::full_rhs(&grid, &self.inner).map_err(pyerr)?;
        Ok((eval.h_t, eval.c_dot, eval.d_dot))
    }

    /// Surface area of revolution of the current profile.
    fn area(&self) -> PyResult<f64> {
        let grid = self.grid()?;
        Ok(stepper::surface_area(&grid, self.inner.values(), self.inner.d()))
    }

    fn __repr__(&self) -> String {
        format!(
            "Profile(n={}, c={}, d={})",
            self.inner.n(),
            self.inner.c(),
            self.inner.d()
        )
    }
}

impl Profile {
    fn scenario(sc: Scenario, n: usize) -> PyResult<Self> {
        let grid = Grid::new(n).map_err(pyerr)?;
        let inner = sc.build(&grid).map_err(pyerr)?;
        Ok(Self { inner })
    }
}

/// Outcome of a flow run: the detected event, per-step scalar series,
/// and the final profile.
#[pyclass(frozen)]
struct FlowResult {
    #[pyo3(get)]
    kind: String,
    #[pyo3(get)]
    t_event: f64,
    #[pyo3(get)]
    theta_star: Option<f64>,
    #[pyo3(get)]
    t: Vec<f64>,
    #[pyo3(get)]
    d: Vec<f64>,
    #[pyo3(get)]
    c: Vec<f64>,
    #[pyo3(get)]
    area: Vec<f64>,
    #[pyo3(get)]
    min_h: Vec<f64>,
    final_h: HProfile,
    snapshots: Vec<(usize, HProfile)>,
    last: StepScalars,
}

#[pymethods]
impl FlowResult {
    #[getter]
    fn steps(&self) -> usize {
        self.t.len().saturating_sub(1)
    }

    #[getter]
    fn final_profile(&self) -> Profile {
        Profile {
            inner: self.final_h.clone(),
        }
    }

    /// Profiles kept along the run as (step index, Profile) pairs.
    fn snapshots(&self) -> Vec<(usize, Profile)> {
        self.snapshots
            .iter()
            .map(|(i, h)| (*i, Profile { inner: h.clone() }))
            .collect()
    }

    /// Scalar state at the event time.
    fn diagnostics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        scalars_dict(py, &self.last)
    }

    fn __repr__(&self) -> String {
        format!(
            "FlowResult(kind='{}', t_event={}, steps={})",
            self.kind,
            self.t_event,
            self.steps()
        )
    }
}

/// Run the flow from `profile` until an event fires or t_max is reached.
#[pyfunction]
#[pyo3(signature = (profile, *, t_max=1.0, dt_init=1e-6, safety=0.9, atol=1e-8,
                    rtol=1e-6, d_min=None, h_min=1e-4, h2_min=None, snapshot_stride=0))]
#[allow(clippy::too_many_arguments)]
fn flow(
    profile: &Profile,
    t_max: f64,
    dt_init: f64,
    safety: f64,
    atol: f64,
    rtol: f64,
    d_min: Option<f64>,
    h_min: f64,
    h2_min: Option<f64>,
    snapshot_stride: usize,
) -> PyResult<FlowResult> {
    let params = FlowParams {
        n: profile.inner.n(),
        dt_init,
        safety,
        atol,
        rtol,
        t_max,
        d_min,
        h_min,
        h2_min,
        snapshot_stride,
    };
    let (traj, report) = stepper::run(&profile.inner, &params).map_err(pyerr)?;
    let col = |f: fn(&StepScalars) -> f64| traj.scalars.iter().map(f).collect::<Vec<_>>();
    Ok(FlowResult {
        kind: report.kind.to_string(),
        t_event: report.t_event,
        theta_star: report.theta_star,
        t: col(|s| s.t),
        d: col(|s| s.d),
        c: col(|s| s.c),
        area: col(|s| s.area),
        min_h: col(|s| s.min_h),
        final_h: traj.final_state().clone(),
        snapshots: traj.snapshots.clone(),
        last: *traj.last(),
    })
}

/// Physical-variable flow rate v_t = (2v·v_xx − v_x²)/(2v + v_x²) − 1.
#[pyfunction]
fn oracle_vt(v: f64, v_x: f64, v_xx: f64) -> PyResult<f64> {
    rhs::oracle_vt(v, v_x, v_xx).map_err(pyerr)
}

/// Transport-free rhs vs the physical oracle on each grid size: returns
/// ([(n, max_err, rel_err)], observed_order or None).
#[pyfunction]
fn oracle_consistency(ns: Vec<usize>) -> PyResult<(Vec<(usize, f64, f64)>, Option<f64>)> {
    let mut rows = Vec::new();
    let mut errs = Vec::new();
    for &n in &ns {
        let (err, scale) = rhs::canonical_consistency(n).map_err(pyerr)?;
        rows.push((n, err, err / scale));
        errs.push(err);
    }
    let order = if ns.len() >= 2 {
        observed_order(&ns, &errs)
    } else {
        None
    };
    Ok((rows, order))
}

fn default_lambdas() -> Vec<Complex<f64>> {
    (0..5)
        .map(|k| Complex::new(2.0 * 10f64.powf(k as f64 / 4.0), 0.0))
        .collect()
}

/// Spectrum of the model operator with constant coefficient a1.
#[pyfunction]
#[pyo3(signature = (n, a1=1.0, lambdas=None, seed=0))]
fn model_spectrum<'py>(
    py: Python<'py>,
    n: usize,
    a1: f64,
    lambdas: Option<Vec<f64>>,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    if a1 <= 0.0 {
        return Err(PyValueError::new_err("a1 must be positive"));
    }
    let grid = Grid::new(n).map_err(pyerr)?;
    let m = linearize::assemble_a(&grid, &vec![a1; n + 1]).map_err(pyerr)?;
    let probes: Vec<Complex<f64>> = match lambdas {
        Some(res) => res.into_iter().map(|re| Complex::new(re, 0.0)).collect(),
        None => default_lambdas(),
    };
    let rep = linearize::spectrum(&grid, &m, &probes, seed).map_err(pyerr)?;
    spectrum_dict(py, &rep)
}

/// Spectrum of the model operator frozen at `profile`, plus the spectral
/// abscissa of the full linearized rhs under key "frechet_max_real_part".
#[pyfunction]
#[pyo3(signature = (profile, lambdas=None, seed=0))]
fn linearized_spectrum<'py>(
    py: Python<'py>,
    profile: &Profile,
    lambdas: Option<Vec<f64>>,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let grid = profile.grid()?;
    let bundle = linearize::bundle(&grid, &profile.inner).map_err(pyerr)?;
    let probes: Vec<Complex<f64>> = match lambdas {
        Some(res) => res.into_iter().map(|re| Complex::new(re, 0.0)).collect(),
        None => default_lambdas(),
    };
    let rep = linearize::spectrum(&grid, &bundle.m_a, &probes, seed).map_err(pyerr)?;
    let interior = linearize::interior_block(&bundle.m_frechet);
    let frechet = linearize::spectrum(&grid, &interior, &[], seed).map_err(pyerr)?;
    let d = spectrum_dict(py, &rep)?;
    d.set_item("frechet_max_real_part", frechet.max_real_part)?;
    Ok(d)
}

#[pymodule]
fn axiflow_py(m: &Bound<PyModule>) -> PyResult<()> {
    m.add_class::<Profile>()?;
    m.add_class::<FlowResult>()?;
    m.add_function(wrap_pyfunction!(flow, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_vt, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_consistency, m)?)?;
    m.add_function(wrap_pyfunction!(model_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(linearized_spectrum, m)?)?;
    Ok(())
}
