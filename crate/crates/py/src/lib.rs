//! Python bindings for graph analysis, power iteration, separation checks,
//! variational evolution and the error scan.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qipa_core::error_model;
use qipa_core::graph::{BasisState, WeightedGraph};
use qipa_core::harness::parse_oracle;
use qipa_core::ising::{IsingHamiltonian, SpectrumSummary};
use qipa_core::power::{self, OracleFunction};
use qipa_core::separation::{self, SeparationConstants};
use qipa_core::statevector::{AnsatzSpec, DiagonalObservable};
use qipa_core::variational::{run_evolution_from, EvolutionConfig, EvolutionMode};

fn py_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn oracle(text: &str) -> PyResult<OracleFunction> {
    parse_oracle(text).map_err(py_err)
}

fn consts(c: f64, d: f64, k: f64) -> PyResult<SeparationConstants> {
    SeparationConstants::new(c, d, k).map_err(py_err)
}

fn basis(bits: &str) -> PyResult<BasisState> {
    bits.parse().map_err(py_err)
}

#[pyclass(name = "Graph", module = "qipa", frozen)]
struct PyGraph {
    inner: WeightedGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(num_nodes: usize, edges: Vec<(usize, usize, f64)>) -> PyResult<Self> {
        Ok(Self {
            inner: WeightedGraph::new(num_nodes, edges).map_err(py_err)?,
        })
    }

    /// Edge list (`u v w` per line) or JSON `{"n", "edges"}`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: WeightedGraph::parse(text).map_err(py_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (num_nodes, max_weight=11, density=0.5, seed=0))]
    fn random(num_nodes: usize, max_weight: u32, density: f64, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: WeightedGraph::random(num_nodes, max_weight, density, seed).map_err(py_err)?,
        })
    }

    #[getter]
    fn num_nodes(&self) -> usize {
        self.inner.num_nodes()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.inner.edges().iter().map(|e| (e.u, e.v, e.weight)).collect()
    }

    fn total_weight(&self) -> f64 {
        self.inner.total_weight()
    }

    /// Cut value of a partition given as a bit string, node 0 first.
    fn cut_value(&self, bits: &str) -> PyResult<f64> {
        self.inner.cut_value(&basis(bits)?).map_err(py_err)
    }

    /// `(best value, optimal partitions)` by enumeration.
    fn brute_force_maxcut(&self) -> PyResult<(f64, Vec<String>)> {
        let s = self.inner.brute_force_maxcut().map_err(py_err)?;
        Ok((s.value, s.optimal.iter().map(ToString::to_string).collect()))
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(num_nodes={}, edges={})",
            self.inner.num_nodes(),
            self.inner.edges().len()
        )
    }
}

#[pyclass(name = "Spectrum", module = "qipa", frozen, get_all)]
struct PySpectrum {
    num_qubits: usize,
    ground_energy: f64,
    ground_degeneracy: usize,
    ground_states: Vec<String>,
    runner_up_energy: f64,
    absolute_gap: f64,
    shift: f64,
    lambda1: f64,
    lambda2: f64,
    ratio: f64,
}

impl From<SpectrumSummary> for PySpectrum {
    fn from(s: SpectrumSummary) -> Self {
        Self {
            num_qubits: s.num_qubits,
            ground_energy: s.ground_energy,
            ground_degeneracy: s.ground_degeneracy,
            ground_states: s.ground_states.iter().map(ToString::to_string).collect(),
            runner_up_energy: s.runner_up_energy,
            absolute_gap: s.absolute_gap,
            shift: s.shift,
            lambda1: s.lambda1,
            lambda2: s.lambda2,
            ratio: s.ratio,
        }
    }
}

#[pymethods]
impl PySpectrum {
    fn __repr__(&self) -> String {
        format!(
            "Spectrum(ground_energy={}, absolute_gap={}, lambda1={}, lambda2={})",
            self.ground_energy, self.absolute_gap, self.lambda1, self.lambda2
        )
    }
}

#[pyclass(name = "Hamiltonian", module = "qipa", frozen)]
struct PyHamiltonian {
    inner: IsingHamiltonian,
}

#[pymethods]
impl PyHamiltonian {
    #[staticmethod]
    fn from_maxcut(graph: &PyGraph) -> PyResult<Self> {
        Ok(Self {
            inner: IsingHamiltonian::from_maxcut(&graph.inner).map_err(py_err)?,
        })
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    fn upscale(&self, alpha: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.upscale(alpha).map_err(py_err)?,
        })
    }

    fn energy(&self, bits: &str) -> PyResult<f64> {
        self.inner.diagonal_energy(&basis(bits)?).map_err(py_err)
    }

    fn diagonal(&self) -> PyResult<Vec<f64>> {
        self.inner.diagonal().map_err(py_err)
    }

    /// Maximization eigenvalues with multiplicities, largest first.
    fn maximization_spectrum(&self) -> PyResult<Vec<(f64, u64)>> {
        self.inner.maximization_spectrum().map_err(py_err)
    }

    fn spectrum(&self) -> PyResult<PySpectrum> {
        Ok(self.inner.brute_force_spectrum().map_err(py_err)?.into())
    }
}

/// Oracle steps until the top level exceeds probability 1/2, or `None`.
#[pyfunction]
#[pyo3(signature = (spectrum, oracle="exp:1", max_iter=100_000))]
fn iterations_to_majority(spectrum: Vec<(f64, u64)>, oracle: &str, max_iter: u64) -> PyResult<Option<u64>> {
    let outcome = power::iterations_to_majority(&spectrum, &self::oracle(oracle)?, max_iter).map_err(py_err)?;
    Ok(outcome.iterations())
}

#[pyfunction]
#[pyo3(signature = (n, lambda1, lambda2, oracle="exp:1"))]
fn closed_form_majority_count(n: u32, lambda1: f64, lambda2: f64, oracle: &str) -> PyResult<u64> {
    power::closed_form_majority_count(n, lambda1, lambda2, &self::oracle(oracle)?).map_err(py_err)
}

#[pyfunction]
fn degenerate_rest_spectrum(n: u32, lambda1: f64, lambda2: f64) -> PyResult<Vec<(f64, u64)>> {
    power::degenerate_rest_spectrum(n, lambda1, lambda2).map_err(py_err)
}

/// `(kappa_varqite, kappa_qipa2)`.
#[pyfunction]
fn kappa_bounds(n: u32, lambda1: f64, lambda2: f64) -> PyResult<(f64, f64)> {
    let k = power::kappa_bounds(n, lambda1, lambda2).map_err(py_err)?;
    Ok((k.kappa_varqite, k.kappa_qipa2))
}

#[pyfunction]
#[pyo3(signature = (n, lambda1, lambda2, c=1.0, d=1.0, k=1.0))]
fn check_inequality_system(
    n: u32,
    lambda1: f64,
    lambda2: f64,
    c: f64,
    d: f64,
    k: f64,
) -> PyResult<BTreeMap<&'static str, bool>> {
    let r = separation::check_inequality_system(n, lambda1, lambda2, &consts(c, d, k)?).map_err(py_err)?;
    Ok(BTreeMap::from([
        ("ineq_varqite_exponential", r.ineq_varqite_exponential),
        ("ineq_qipa_polynomial", r.ineq_qipa_polynomial),
        ("ordering", r.ordering),
        ("cond_i", r.cond_i),
        ("cond_ii", r.cond_ii),
        ("cond_iii", r.cond_iii),
        ("separated", r.separated),
    ]))
}

#[pyfunction]
#[pyo3(signature = (n, c=1.0, d=1.0, k=1.0))]
fn lambda2_lower_bound(n: u32, c: f64, d: f64, k: f64) -> PyResult<f64> {
    separation::lambda2_lower_bound(n, &consts(c, d, k)?).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (n, c=1.0, d=1.0, k=1.0))]
fn lambda1_lower_bound(n: u32, c: f64, d: f64, k: f64) -> PyResult<f64> {
    separation::lambda1_lower_bound(n, &consts(c, d, k)?).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (gap, n, c=1.0, d=1.0, k=1.0))]
fn minimal_upscale_alpha(gap: f64, n: u32, c: f64, d: f64, k: f64) -> PyResult<f64> {
    separation::minimal_upscale_alpha(gap, n, &consts(c, d, k)?).map_err(py_err)
}

fn setup(h: &IsingHamiltonian, layers: usize, seed: u64) -> PyResult<(AnsatzSpec, DiagonalObservable, Vec<f64>)> {
    let problem = DiagonalObservable::from_hamiltonian(h).map_err(py_err)?;
    let spec = AnsatzSpec::new(h.num_qubits(), layers).map_err(py_err)?;
    let theta0 = spec.initial_parameters(seed);
    Ok((spec, problem, theta0))
}

/// Runs varQITE or QIPA2 and returns the trajectory as columns.
#[pyfunction]
#[pyo3(signature = (hamiltonian, mode="varqite", steps=100, dtau=0.01, dt=0.01, layers=2, seed=0, regularization=1e-8))]
#[allow(clippy::too_many_arguments)]
fn run_evolution(
    hamiltonian: &PyHamiltonian,
    mode: &str,
    steps: usize,
    dtau: f64,
    dt: f64,
    layers: usize,
    seed: u64,
    regularization: f64,
) -> PyResult<BTreeMap<&'static str, Vec<f64>>> {
    let mode = match mode {
        "varqite" => EvolutionMode::VarQite,
        "qipa2" => EvolutionMode::Qipa2,
        other => return Err(py_err(format!("unknown mode {other:?}"))),
    };
    let (spec, problem, theta0) = setup(&hamiltonian.inner, layers, seed)?;
    let config = EvolutionConfig {
        delta_tau: dtau,
        delta_t: dt,
        num_steps: steps,
        regularization,
        mode,
        seed,
    };
    let t = run_evolution_from(&problem, &spec, &theta0, &config).map_err(py_err)?;
    let column = |f: fn(&qipa_core::TrajectoryRecord) -> f64| t.records.iter().map(f).collect::<Vec<f64>>();
    Ok(BTreeMap::from([
        ("step", column(|r| r.step as f64)),
        ("time", column(|r| r.time)),
        ("energy", column(|r| r.energy)),
        ("solution_prob", column(|r| r.solution_prob)),
        ("step_error", column(|r| r.step_error)),
        ("bures_cum", column(|r| r.bures_cum)),
        ("bures_exact", column(|r| r.bures_exact)),
    ]))
}

/// Variance, Δ and error floor of αH on the seeded initial ansatz state,
/// one dict per α.
#[pyfunction]
#[pyo3(signature = (hamiltonian, alphas, dt=1e-6, dtau=0.01, layers=2, seed=0))]
fn alpha_blowup_scan(
    hamiltonian: &PyHamiltonian,
    alphas: Vec<f64>,
    dt: f64,
    dtau: f64,
    layers: usize,
    seed: u64,
) -> PyResult<Vec<BTreeMap<&'static str, f64>>> {
    let (spec, problem, theta0) = setup(&hamiltonian.inner, layers, seed)?;
    let state = spec.prepare(&theta0).map_err(py_err)?;
    let rows = error_model::alpha_blowup_scan(&problem, &state, &alphas, dt, dtau).map_err(py_err)?;
    Ok(rows
        .into_iter()
        .map(|r| {
            BTreeMap::from([
                ("alpha", r.alpha),
                ("var", r.variance),
                ("delta", r.delta),
                ("varqite_error", r.varqite_error),
                ("qipa_floor", r.qipa_floor),
                ("dt_used", r.dt_used),
            ])
        })
        .collect())
}

#[pymodule]
fn qipa(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyHamiltonian>()?;
    m.add_class::<PySpectrum>()?;
    m.add_function(wrap_pyfunction!(iterations_to_majority, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_majority_count, m)?)?;
    m.add_function(wrap_pyfunction!(degenerate_rest_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(kappa_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(check_inequality_system, m)?)?;
    m.add_function(wrap_pyfunction!(lambda2_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(lambda1_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_upscale_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(run_evolution, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_blowup_scan, m)?)?;
    Ok(())
}
