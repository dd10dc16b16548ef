//! Python bindings: model parameters, analytic phases, gauge maps, the spin
//! minimiser, exact diagonalization points and the report drivers.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qrs_core::fock::ed::{ed_point as core_ed_point, EdConfig};
use qrs_core::runs::{run_named, RunConfig};
use qrs_core::{gauge, meanfield, model, spin, ModelParams as CoreParams, MomentumBranch, QrsError};

create_exception!(qrs, QrsException, PyException);
create_exception!(qrs, NoConvergence, QrsException);

fn to_py(e: QrsError) -> PyErr {
    match e {
        QrsError::InvalidParams(m) => PyValueError::new_err(m),
        QrsError::NoConvergence { .. } => NoConvergence::new_err(e.to_string()),
        _ => QrsException::new_err(e.to_string()),
    }
}

fn branch(q: u8) -> PyResult<MomentumBranch> {
    MomentumBranch::new(q).map_err(to_py)
}

/// Model constants. Branches are given by `l` in `q = l·π/2`.
#[pyclass(name = "ModelParams", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyModelParams {
    inner: CoreParams,
}

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (omega=1.0, qubit_gap=50.0, lam=0.0, j1=0.0, j2=0.0))]
    fn new(omega: f64, qubit_gap: f64, lam: f64, j1: f64, j2: f64) -> PyResult<Self> {
        Ok(Self {
            inner: CoreParams::new(omega, qubit_gap, lam, j1, j2).map_err(to_py)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (g, j1=0.0, j2=0.0, omega=1.0, qubit_gap=50.0))]
    fn with_g(g: f64, j1: f64, j2: f64, omega: f64, qubit_gap: f64) -> PyResult<Self> {
        Ok(Self {
            inner: CoreParams::with_g(omega, qubit_gap, g, j1, j2).map_err(to_py)?,
        })
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega
    }

    #[getter]
    fn qubit_gap(&self) -> f64 {
        self.inner.qubit_gap
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.inner.lambda
    }

    #[getter]
    fn j1(&self) -> f64 {
        self.inner.j1
    }

    #[getter]
    fn j2(&self) -> f64 {
        self.inner.j2
    }

    #[getter]
    fn g(&self) -> f64 {
        self.inner.g()
    }

    fn critical_coupling(&self, q: u8) -> PyResult<f64> {
        model::critical_coupling(&self.inner, branch(q)?).map_err(to_py)
    }

    /// `(l, g_c, tied_l or None)` of the branch that condenses first.
    fn dominant_branch(&self) -> PyResult<(u8, f64, Option<u8>)> {
        let d = model::dominant_branch(&self.inner).map_err(to_py)?;
        Ok((d.branch.index(), d.g_c, d.tie_with.map(MomentumBranch::index)))
    }

    fn excitation_energy(&self, g: f64, q: u8) -> PyResult<f64> {
        model::np_excitation_energy(&self.inner, g, branch(q)?).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "ModelParams(omega={}, qubit_gap={}, lam={}, j1={}, j2={})",
            p.omega, p.qubit_gap, p.lambda, p.j1, p.j2
        )
    }
}

/// Phase label, branch, `|α|`, `corr`, `g_c` and energy at coupling `g`.
#[pyfunction]
fn classify_phase<'py>(py: Python<'py>, p: &PyModelParams, g: f64) -> PyResult<Bound<'py, PyDict>> {
    let pt = meanfield::classify_phase(&p.inner, g).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("label", pt.label.as_str())?;
    d.set_item("branch", pt.branch.map(MomentumBranch::index))?;
    d.set_item("abs_alpha", pt.abs_alpha)?;
    d.set_item("corr", pt.corr)?;
    d.set_item("g_c", pt.g_c)?;
    d.set_item("energy", pt.energy)?;
    Ok(d)
}

/// Degenerate displacement configurations of branch `q`, each as a list of
/// four complex amplitudes.
#[pyfunction]
fn srp_displacements(p: &PyModelParams, g: f64, q: u8) -> PyResult<Vec<Vec<(f64, f64)>>> {
    let sols = meanfield::srp_displacements(&p.inner, g, branch(q)?).map_err(to_py)?;
    Ok(sols
        .iter()
        .map(|d| (0..model::SITES).map(|n| (d.re[n], d.im[n])).collect())
        .collect())
}

/// Superradiant ground energy of branch `q`, zero-point term included.
#[pyfunction]
fn srp_energy(p: &PyModelParams, g: f64, q: u8) -> PyResult<f64> {
    meanfield::srp_ground_energy(&p.inner, g, branch(q)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (j1, j1_0, theta))]
fn map_afrp(j1: f64, j1_0: f64, theta: f64) -> PyResult<f64> {
    Ok(gauge::map_afrp(j1, &gauge::GaugeParams::new(j1_0, theta).map_err(to_py)?))
}

/// `J2(g)` matching the paired branch in the normal phase.
#[pyfunction]
fn map_frustrated(p: &PyModelParams, g: f64, j1_0: f64, theta: f64) -> PyResult<f64> {
    let gp = gauge::GaugeParams::new(j1_0, theta).map_err(to_py)?;
    gauge::map_frustrated(&gp, &p.inner, g, gauge::Regime::Normal).map_err(to_py)
}

/// `(θ_c, J1)` of the ring's triple point.
#[pyfunction]
fn triple_point(j1_0: f64) -> PyResult<(f64, f64)> {
    let t = gauge::triple_point(j1_0).map_err(to_py)?;
    Ok((t.theta_c, t.j1))
}

/// `(energy, X, Y)` of the multistart spin minimiser.
#[pyfunction]
#[pyo3(signature = (p, g, seed=1))]
fn minimize_spin_energy(p: &PyModelParams, g: f64, seed: u64) -> PyResult<(f64, [f64; 4], [f64; 4])> {
    let m = spin::minimize_spin_energy(&p.inner, g, seed).map_err(to_py)?;
    Ok((m.energy, m.config.x, m.config.y))
}

/// Displaced-frame ED at `g` with photon cutoff `n_c`.
#[pyfunction]
#[pyo3(signature = (p, g, n_c=3))]
fn ed_point<'py>(py: Python<'py>, p: &PyModelParams, g: f64, n_c: usize) -> PyResult<Bound<'py, PyDict>> {
    let inner = p.inner.at_g(g);
    let pt = py
        .detach(|| core_ed_point(&inner, g, &EdConfig::new(n_c)))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("label", pt.label.as_str())?;
    d.set_item("energy_ed", pt.energy_ed)?;
    d.set_item("energy_analytic", pt.energy_analytic)?;
    d.set_item("energy_variational", pt.energy_variational)?;
    d.set_item("abs_alpha_analytic", pt.abs_alpha_analytic)?;
    d.set_item("abs_alpha_ed", pt.abs_alpha_ed)?;
    d.set_item("infidelity", pt.infidelity)?;
    d.set_item("residual", pt.residual)?;
    Ok(d)
}

/// Runs a CLI subcommand with a JSON config (missing keys take the CLI
/// defaults) and returns the report as a JSON string.
#[pyfunction]
#[pyo3(signature = (command, config="{}"))]
fn run(py: Python<'_>, command: &str, config: &str) -> PyResult<String> {
    let cfg: RunConfig = serde_json::from_str(config).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let report = py.detach(|| run_named(command, &cfg)).map_err(to_py)?;
    Ok(report.to_json().to_string())
}

#[pymodule]
fn qrs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("QrsError", m.py().get_type::<QrsException>())?;
    m.add("NoConvergence", m.py().get_type::<NoConvergence>())?;
    m.add_class::<PyModelParams>()?;
    m.add_function(wrap_pyfunction!(classify_phase, m)?)?;
    m.add_function(wrap_pyfunction!(srp_displacements, m)?)?;
    m.add_function(wrap_pyfunction!(srp_energy, m)?)?;
    m.add_function(wrap_pyfunction!(map_afrp, m)?)?;
    m.add_function(wrap_pyfunction!(map_frustrated, m)?)?;
    m.add_function(wrap_pyfunction!(triple_point, m)?)?;
    m.add_function(wrap_pyfunction!(minimize_spin_energy, m)?)?;
    m.add_function(wrap_pyfunction!(ed_point, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
