//! Python bindings: probes, QFI reports, optimizers, region maps and
//! simulated experiments.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use lossqfi_core as core;
use lossqfi_core::degauss::RegionRoute;
use lossqfi_core::{CutoffPolicy, LossCoordinate, LossParameter, ProbeSpec};
use num_complex::Complex64;

create_exception!(lossqfi, LossQfiError, PyValueError);

fn err(e: core::Error) -> PyErr {
    LossQfiError::new_err(e.to_string())
}

fn policy(tail_tol: f64, cap: usize) -> CutoffPolicy {
    CutoffPolicy::default().with_tail_tol(tail_tol).with_cap(cap)
}

fn loss(phi: f64, phi_min: f64) -> PyResult<LossParameter> {
    LossParameter::with_guard(phi, phi_min).map_err(err)
}

/// Probe state given by its text form, e.g. `Probe("qutrit:nbar=0.5,beta=1")`.
#[pyclass(name = "Probe", frozen, skip_from_py_object, module = "lossqfi")]
#[derive(Clone)]
struct PyProbe {
    spec: ProbeSpec,
}

#[pymethods]
impl PyProbe {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyProbe {
            spec: text.parse().map_err(err)?,
        })
    }

    #[staticmethod]
    fn qubit(nbar: f64) -> PyResult<Self> {
        Ok(PyProbe {
            spec: ProbeSpec::qubit(nbar).map_err(err)?,
        })
    }

    #[staticmethod]
    fn qutrit(nbar: f64, beta: f64) -> Self {
        PyProbe {
            spec: ProbeSpec::qutrit(nbar, beta),
        }
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.spec.family()
    }

    #[getter]
    fn nominal_nbar(&self) -> Option<f64> {
        self.spec.nominal_nbar()
    }

    /// Fock amplitudes of the normalized state.
    #[pyo3(signature = (tail_tol = 1e-10, cap = 200))]
    fn amplitudes(&self, tail_tol: f64, cap: usize) -> PyResult<Vec<Complex64>> {
        let psi = core::build_probe(&self.spec, &policy(tail_tol, cap)).map_err(err)?;
        Ok(psi.amplitudes().to_vec())
    }

    fn __str__(&self) -> String {
        self.spec.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Probe({:?})", self.spec.to_string())
    }

    fn __eq__(&self, other: &PyProbe) -> bool {
        self.spec == other.spec
    }
}

#[pyclass(frozen, get_all, module = "lossqfi")]
struct EstimationReport {
    probe: String,
    phi: f64,
    nbar: f64,
    qfi: f64,
    qfi_trace_route: f64,
    ultimate_bound: f64,
    runs: u64,
    crlb_variance: f64,
    ultimate_variance: f64,
    cutoff: usize,
    method: String,
}

#[pymethods]
impl EstimationReport {
    fn __repr__(&self) -> String {
        format!(
            "EstimationReport(probe={:?}, phi={}, nbar={}, qfi={})",
            self.probe, self.phi, self.nbar, self.qfi
        )
    }
}

#[pyclass(frozen, get_all, module = "lossqfi")]
struct OptimizationResult {
    family: String,
    param_names: Vec<String>,
    best_params: Vec<f64>,
    best_qfi: f64,
    nbar: f64,
    phi: f64,
    starts: usize,
    converged: bool,
    seed: Option<u64>,
    skipped: usize,
    probe: PyProbe,
}

impl OptimizationResult {
    fn from_core(r: core::OptimizationResult) -> PyResult<Self> {
        let probe = PyProbe {
            spec: r.probe().map_err(err)?,
        };
        Ok(OptimizationResult {
            family: r.family,
            param_names: r.param_names,
            best_params: r.best_params,
            best_qfi: r.best_qfi,
            nbar: r.nbar,
            phi: r.phi,
            starts: r.starts,
            converged: r.converged,
            seed: r.seed,
            skipped: r.skipped,
            probe,
        })
    }
}

#[pymethods]
impl OptimizationResult {
    fn __repr__(&self) -> String {
        format!(
            "OptimizationResult(family={:?}, nbar={}, phi={}, best_qfi={})",
            self.family, self.nbar, self.phi, self.best_qfi
        )
    }
}

#[pyclass(frozen, get_all, module = "lossqfi")]
struct ExperimentReport {
    n: u64,
    phi_true: f64,
    runs: u64,
    repetitions: usize,
    seed: u64,
    phi_hat_mean: f64,
    empirical_variance: f64,
    crlb: f64,
    normalized_variance: f64,
    clipped: usize,
}

fn probe_arg(probe: &Bound<'_, PyAny>) -> PyResult<ProbeSpec> {
    if let Ok(p) = probe.cast::<PyProbe>() {
        return Ok(p.get().spec.clone());
    }
    let text: String = probe.extract()?;
    text.parse().map_err(err)
}

/// QFI of a probe after the loss channel, with Cramér–Rao bounds for
/// `runs` channel uses.
#[pyfunction]
#[pyo3(signature = (probe, phi, runs = 1, tail_tol = 1e-10, cap = 200, phi_min = 1e-3))]
fn qfi(
    probe: &Bound<'_, PyAny>,
    phi: f64,
    runs: u64,
    tail_tol: f64,
    cap: usize,
    phi_min: f64,
) -> PyResult<EstimationReport> {
    let spec = probe_arg(probe)?;
    let r = core::estimation::qfi_with_runs(&spec, &loss(phi, phi_min)?, &policy(tail_tol, cap), runs).map_err(err)?;
    Ok(EstimationReport {
        probe: r.probe,
        phi: r.phi,
        nbar: r.nbar,
        qfi: r.qfi,
        qfi_trace_route: r.qfi_trace_route,
        ultimate_bound: r.ultimate_bound,
        runs: r.runs,
        crlb_variance: r.crlb_variance,
        ultimate_variance: r.ultimate_variance,
        cutoff: r.cutoff,
        method: r.method.to_string(),
    })
}

/// Closed-form QFI, e.g. `closed_form_qfi("qubit:nbar=0.5", 0.3)`.
#[pyfunction]
#[pyo3(signature = (form, phi, phi_min = 1e-3))]
fn closed_form_qfi(form: &str, phi: f64, phi_min: f64) -> PyResult<f64> {
    let form: core::ClosedForm = form.parse().map_err(err)?;
    core::closed_form_qfi(&form, &loss(phi, phi_min)?).map_err(err)
}

/// Eigenvalues and eigenvectors of the SLD: the optimal measurement.
#[pyfunction]
#[pyo3(signature = (probe, phi, tail_tol = 1e-10, cap = 200, phi_min = 1e-3))]
fn optimal_measurement(
    probe: &Bound<'_, PyAny>,
    phi: f64,
    tail_tol: f64,
    cap: usize,
    phi_min: f64,
) -> PyResult<Vec<(f64, Vec<Complex64>)>> {
    let spec = probe_arg(probe)?;
    let lp = loss(phi, phi_min)?;
    let psi = core::build_probe(&spec, &policy(tail_tol, cap)).map_err(err)?;
    let rho = core::evolve_pure(&psi, &lp);
    let l = core::sld(&rho, &core::drho_dphi(&rho, &lp), &lp).map_err(err)?;
    Ok(core::optimal_measurement(&l)
        .into_iter()
        .map(|p| (p.eigenvalue, p.vector))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (nbar, phi, phi_min = 1e-3))]
fn optimize_qutrit(nbar: f64, phi: f64, phi_min: f64) -> PyResult<OptimizationResult> {
    OptimizationResult::from_core(core::optimize_qutrit(nbar, &loss(phi, phi_min)?).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (nbar, phi, tail_tol = 1e-10, cap = 200, phi_min = 1e-3))]
fn optimize_gaussian(nbar: f64, phi: f64, tail_tol: f64, cap: usize, phi_min: f64) -> PyResult<OptimizationResult> {
    let r = core::optimize_gaussian(nbar, &loss(phi, phi_min)?, &policy(tail_tol, cap)).map_err(err)?;
    OptimizationResult::from_core(r)
}

#[pyfunction]
#[pyo3(signature = (kmax, nbar, phi, seed = 0, phi_min = 1e-3))]
fn optimize_superposition(kmax: usize, nbar: f64, phi: f64, seed: u64, phi_min: f64) -> PyResult<OptimizationResult> {
    let r = core::optimize_superposition(kmax, nbar, &loss(phi, phi_min)?, seed).map_err(err)?;
    OptimizationResult::from_core(r)
}

/// `(eta, r, nbar, beta)` samples of the truncated photon-subtracted region.
#[pyfunction]
#[pyo3(signature = (eta_grid, r_grid, route = "analytic"))]
fn region_map(eta_grid: Vec<f64>, r_grid: Vec<f64>, route: &str) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let route = match route {
        "analytic" => RegionRoute::Analytic,
        "numeric" => RegionRoute::Numeric,
        other => return Err(LossQfiError::new_err(format!("unknown route `{other}`"))),
    };
    let map = core::degauss::region_map(&eta_grid, &r_grid, route, &CutoffPolicy::default()).map_err(err)?;
    Ok(map.points.iter().map(|p| (p.eta, p.r, p.nbar, p.beta)).collect())
}

#[pyfunction]
#[pyo3(signature = (n, phi, runs = 10_000, repetitions = 200, seed = 0, phi_min = 1e-3))]
fn simulate_fock_estimation(
    n: u64,
    phi: f64,
    runs: u64,
    repetitions: usize,
    seed: u64,
    phi_min: f64,
) -> PyResult<ExperimentReport> {
    let r = core::montecarlo::simulate_fock_estimation(n, &loss(phi, phi_min)?, runs, repetitions, seed)
        .map_err(err)?;
    Ok(ExperimentReport {
        n: r.n,
        phi_true: r.phi_true,
        runs: r.runs,
        repetitions: r.repetitions,
        seed: r.seed,
        phi_hat_mean: r.phi_hat_mean,
        empirical_variance: r.empirical_variance,
        crlb: r.crlb,
        normalized_variance: r.normalized_variance,
        clipped: r.clipped,
    })
}

/// Converts between `phi`, `gamma_t`, `z` and `transmissivity`.
#[pyfunction]
fn loss_reparametrize(value: f64, from_: &str, to: &str) -> PyResult<f64> {
    let from: LossCoordinate = from_.parse().map_err(err)?;
    let to: LossCoordinate = to.parse().map_err(err)?;
    core::loss_reparametrize(value, from, to).map_err(err)
}

#[pymodule]
fn lossqfi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LossQfiError", m.py().get_type::<LossQfiError>())?;
    m.add_class::<PyProbe>()?;
    m.add_class::<EstimationReport>()?;
    m.add_class::<OptimizationResult>()?;
    m.add_class::<ExperimentReport>()?;
    m.add_function(wrap_pyfunction!(qfi, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_qfi, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_measurement, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_qutrit, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_gaussian, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_superposition, m)?)?;
    m.add_function(wrap_pyfunction!(region_map, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_fock_estimation, m)?)?;
    m.add_function(wrap_pyfunction!(loss_reparametrize, m)?)?;
    Ok(())
}
