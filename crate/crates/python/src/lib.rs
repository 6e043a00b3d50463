//! Python bindings for `scatter_entangle_core`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use scatter_entangle_core as core;
use scatter_entangle_core::{Complex64, EngineSettings, Error, PairMomentum, PotentialKind};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter { .. }
        | Error::NonPositiveMomentum(_)
        | Error::MomentumMismatch(..)
        | Error::WrongPotential(_)
        | Error::Config { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[pyclass(name = "MassPartition", module = "scatter_entangle", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyMassPartition(core::MassPartition);

#[pymethods]
impl PyMassPartition {
    #[new]
    fn new(m1: f64, m2: f64) -> PyResult<Self> {
        core::MassPartition::from_masses(m1, m2).map(Self).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (mu1, total = 1.0))]
    fn from_fraction(mu1: f64, total: f64) -> PyResult<Self> {
        core::MassPartition::from_fraction(mu1, total).map(Self).map_err(to_py)
    }

    #[getter]
    fn m1(&self) -> f64 {
        self.0.m1()
    }

    #[getter]
    fn m2(&self) -> f64 {
        self.0.m2()
    }

    #[getter]
    fn mu1(&self) -> f64 {
        self.0.mu1()
    }

    #[getter]
    fn mu2(&self) -> f64 {
        self.0.mu2()
    }

    #[getter]
    fn total(&self) -> f64 {
        self.0.total()
    }

    #[getter]
    fn reduced(&self) -> f64 {
        self.0.reduced()
    }

    /// `(p, q)` for the pair momenta `(p1, p2)`.
    fn jacobi(&self, p1: f64, p2: f64) -> (f64, f64) {
        let j = core::kinematics::pair_to_jacobi(PairMomentum::new(p1, p2), &self.0);
        (j.p, j.q)
    }

    /// Momenta after reflection at a fixed potential.
    fn reflect(&self, p1: f64, p2: f64) -> (f64, f64) {
        let r = core::kinematics::reflect_momenta(PairMomentum::new(p1, p2), &self.0);
        (r.p1, r.p2)
    }

    fn __repr__(&self) -> String {
        format!("MassPartition(m1={}, m2={})", self.0.m1(), self.0.m2())
    }
}

#[pyclass(name = "AmplitudeModel", module = "scatter_entangle", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyAmplitudeModel(core::AmplitudeModel);

#[pymethods]
impl PyAmplitudeModel {
    #[staticmethod]
    fn free(masses: &PyMassPartition) -> Self {
        Self(core::AmplitudeModel::free(masses.0))
    }

    #[staticmethod]
    fn hard_core(masses: &PyMassPartition) -> Self {
        Self(core::AmplitudeModel::hard_core(masses.0))
    }

    #[staticmethod]
    fn delta(alpha: f64, masses: &PyMassPartition) -> PyResult<Self> {
        core::AmplitudeModel::delta(alpha, masses.0).map(Self).map_err(to_py)
    }

    /// Two deltas of strength `alpha` at `-a` and `+a`.
    #[staticmethod]
    fn double_delta(alpha: f64, a: f64, masses: &PyMassPartition) -> PyResult<Self> {
        core::AmplitudeModel::double_delta(alpha, a, masses.0).map(Self).map_err(to_py)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.0.kind() {
            PotentialKind::Free => "free",
            PotentialKind::HardCore => "hard_core",
            PotentialKind::DiracDelta => "delta",
            PotentialKind::DoubleDiracDelta => "double_delta",
            PotentialKind::Composite => "composite",
        }
    }

    /// `(t, r)` at relative momentum `q > 0`.
    fn evaluate(&self, q: f64) -> PyResult<(Complex64, Complex64)> {
        let a = self.0.evaluate(q).map_err(to_py)?;
        Ok((a.t, a.r))
    }

    #[pyo3(signature = (q_lo, q_hi, count = 1))]
    fn find_resonances(&self, q_lo: f64, q_hi: f64, count: usize) -> PyResult<Vec<f64>> {
        core::amplitudes::find_resonances(&self.0, q_lo, q_hi, count).map_err(to_py)
    }
}

#[pyclass(name = "GaussianInState", module = "scatter_entangle", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyGaussianInState(core::GaussianInState);

#[pymethods]
impl PyGaussianInState {
    #[new]
    #[pyo3(signature = (k, sigma1, sigma2, masses, a1 = 0.0, a2 = 0.0))]
    fn new(k: f64, sigma1: f64, sigma2: f64, masses: &PyMassPartition, a1: f64, a2: f64) -> PyResult<Self> {
        core::GaussianInState::with_positions(k, sigma1, sigma2, a1, a2, masses.0).map(Self).map_err(to_py)
    }

    #[getter]
    fn k(&self) -> f64 {
        self.0.k()
    }

    #[getter]
    fn sigma1(&self) -> f64 {
        self.0.sigma1()
    }

    #[getter]
    fn sigma2(&self) -> f64 {
        self.0.sigma2()
    }

    #[getter]
    fn masses(&self) -> PyMassPartition {
        PyMassPartition(*self.0.masses())
    }

    fn __call__(&self, p1: f64, p2: f64) -> Complex64 {
        self.0.eval_in(PairMomentum::new(p1, p2))
    }

    fn incoming_warning(&self) -> Option<String> {
        self.0.incoming_warning()
    }
}

#[pyfunction]
fn reflected_gaussian_purity(masses: &PyMassPartition, sigma1: f64, sigma2: f64) -> PyResult<f64> {
    core::reflected_gaussian_purity(&masses.0, sigma1, sigma2).map_err(to_py)
}

#[pyfunction]
fn approx_c(transmission: f64, reflection: f64) -> PyResult<f64> {
    core::approx_c(transmission, reflection).map_err(to_py)
}

#[pyfunction]
fn approx_cr(t: Complex64, r: Complex64, reflected_purity: f64) -> PyResult<f64> {
    core::approx_cr(t, r, reflected_purity).map_err(to_py)
}

/// Purity of the scattered state as a dict.
#[pyfunction]
#[pyo3(signature = (state, model, rel_tol = 1e-6, n_cap = 1024, spectrum = true))]
fn purity_out<'py>(
    py: Python<'py>,
    state: &PyGaussianInState,
    model: &PyAmplitudeModel,
    rel_tol: f64,
    n_cap: usize,
    spectrum: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let settings = EngineSettings { rel_tol, n_cap, spectrum, ..Default::default() };
    let (s, m) = (state.0, model.0.clone());
    let rep = py.detach(move || core::purity::purity_out(&s, &m, &settings)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("purity", rep.purity)?;
    d.set_item("purity_tra", rep.purity_tra)?;
    d.set_item("purity_ref", rep.purity_ref)?;
    d.set_item("schmidt_spectrum", rep.schmidt_spectrum)?;
    d.set_item("grid_n", rep.grid_n)?;
    d.set_item("refinement_error", rep.refinement_error)?;
    d.set_item("overlap_diagnostic", rep.overlap_diagnostic)?;
    d.set_item("converged", rep.converged)?;
    d.set_item("n_trace", rep.n_trace)?;
    d.set_item("norm", rep.norm)?;
    d.set_item("out_of_convention_weight", rep.out_of_convention_weight)?;
    Ok(d)
}

#[pymodule]
fn scatter_entangle(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMassPartition>()?;
    m.add_class::<PyAmplitudeModel>()?;
    m.add_class::<PyGaussianInState>()?;
    m.add_function(wrap_pyfunction!(reflected_gaussian_purity, m)?)?;
    m.add_function(wrap_pyfunction!(approx_c, m)?)?;
    m.add_function(wrap_pyfunction!(approx_cr, m)?)?;
    m.add_function(wrap_pyfunction!(purity_out, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
