//! McLachlan variational imaginary-time evolution for varQITE and QIPA₂.
//!
//! Each step builds the metric `F` and force `C` at the current parameters,
//! solves `F θ̇ = -Re(C)` with Tikhonov regularization and takes an explicit
//! Euler step of length `delta_tau`. The two modes differ only in the diagonal
//! generator that drives the flow.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::error_model::bures_accumulate;
use crate::statevector::{inner_product, AnsatzSpec, DiagonalObservable, StateVector};

#[derive(Debug, Clone, PartialEq)]
pub struct McLachlanSystem {
    /// `F_ij = Re(<d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>)`
    pub metric: DMatrix<f64>,
    /// `C_i = <d_i psi| G |psi>`
    pub force: Vec<Complex64>,
}

impl McLachlanSystem {
    pub fn num_parameters(&self) -> usize {
        self.force.len()
    }

    pub fn real_force(&self) -> DVector<f64> {
        DVector::from_iterator(self.force.len(), self.force.iter().map(|c| c.re))
    }
}

pub fn compute_mclachlan_system(
    spec: &AnsatzSpec,
    theta: &[f64],
    generator: &DiagonalObservable,
) -> Result<McLachlanSystem> {
    let psi = spec.prepare(theta)?;
    let derivs = spec.derivative_states(theta)?;
    system_from_states(&psi, &derivs, generator)
}

fn system_from_states(
    psi: &StateVector,
    derivs: &[Vec<Complex64>],
    generator: &DiagonalObservable,
) -> Result<McLachlanSystem> {
    if generator.values().len() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim(),
            found: generator.values().len(),
        });
    }
    let p = derivs.len();
    let amps = psi.amplitudes();
    let g_psi: Vec<Complex64> = amps.iter().zip(generator.values()).map(|(a, g)| a * g).collect();
    let berry: Vec<Complex64> = derivs.iter().map(|d| inner_product(d, amps)).collect();

    let mut metric = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let value = (inner_product(&derivs[i], &derivs[j]) - berry[i] * berry[j].conj()).re;
            metric[(i, j)] = value;
            metric[(j, i)] = value;
        }
    }
    let force = derivs.iter().map(|d| inner_product(d, &g_psi)).collect();
    Ok(McLachlanSystem { metric, force })
}

/// Tikhonov solution of `F θ̇ = -Re(C)`:
/// `θ̇ = (FᵀF + regularization·I)⁻¹ Fᵀ (-Re C)`.
///
/// `F` is symmetric, so this is evaluated in its eigenbasis as
/// `Σ σ/(σ² + r) (vᵀb) v`, which never forms `FᵀF` explicitly.
pub fn solve_parameter_velocities(sys: &McLachlanSystem, regularization: f64) -> Result<Vec<f64>> {
    let p = sys.num_parameters();
    if sys.metric.nrows() != p || sys.metric.ncols() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: sys.metric.nrows(),
        });
    }
    if !(regularization >= 0.0 && regularization.is_finite()) {
        return Err(Error::invalid(format!(
            "regularization must be non-negative, got {regularization}"
        )));
    }
    if sys.metric.iter().any(|v| !v.is_finite()) || sys.force.iter().any(|c| !c.re.is_finite()) {
        return Err(Error::invalid("non-finite entry in McLachlan system"));
    }
    let rhs = -sys.real_force();
    let symmetric = (&sys.metric + sys.metric.transpose()) * 0.5;
    let eig = SymmetricEigen::new(symmetric);
    let mut out = DVector::zeros(p);
    for (k, &sigma) in eig.eigenvalues.iter().enumerate() {
        let denom = sigma * sigma + regularization;
        if denom == 0.0 {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        out += v * (sigma / denom * v.dot(&rhs));
    }
    Ok(out.iter().copied().collect())
}

/// `sqrt(Var(G) + θ̇ᵀFθ̇ + 2 θ̇·Re(C))`, the norm of the residual between the
/// variational and the exact imaginary-time tangent.
pub fn step_error_norm(
    state: &StateVector,
    generator: &DiagonalObservable,
    sys: &McLachlanSystem,
    velocities: &[f64],
) -> Result<f64> {
    let p = sys.num_parameters();
    if velocities.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: velocities.len(),
        });
    }
    let var = state.variance(generator)?;
    let v = DVector::from_column_slice(velocities);
    let quad = v.dot(&(&sys.metric * &v));
    let lin = 2.0 * v.dot(&sys.real_force());
    let squared = var + quad + lin;
    let scale = var.abs().max(quad.abs()).max(lin.abs()).max(1.0);
    if squared < -1e-6 * scale {
        return Err(Error::InconsistentSystem(squared));
    }
    Ok(squared.max(0.0).sqrt())
}

/// Norm of the residual `Σ θ̇_i P|∂_i ψ⟩ + (G - ⟨G⟩)|ψ⟩`, with `P` the
/// projector orthogonal to `|ψ⟩`.
///
/// Its square equals the expression of [`step_error_norm`], but summing the
/// vector first avoids the cancellation that leaves `sqrt(ε)` behind when the
/// ansatz follows the flow exactly.
pub fn residual_norm(
    state: &StateVector,
    derivatives: &[Vec<Complex64>],
    generator: &DiagonalObservable,
    velocities: &[f64],
) -> Result<f64> {
    if velocities.len() != derivatives.len() {
        return Err(Error::DimensionMismatch {
            expected: derivatives.len(),
            found: velocities.len(),
        });
    }
    let amps = state.amplitudes();
    if generator.values().len() != amps.len() {
        return Err(Error::DimensionMismatch {
            expected: amps.len(),
            found: generator.values().len(),
        });
    }
    if let Some(d) = derivatives.iter().find(|d| d.len() != amps.len()) {
        return Err(Error::DimensionMismatch {
            expected: amps.len(),
            found: d.len(),
        });
    }
    let mean = state.expectation(generator)?;
    let mut residual: Vec<Complex64> = amps
        .iter()
        .zip(generator.values())
        .map(|(a, g)| a * (g - mean))
        .collect();
    for (d, &v) in derivatives.iter().zip(velocities) {
        let overlap = inner_product(amps, d);
        for ((r, di), a) in residual.iter_mut().zip(d).zip(amps) {
            *r += v * (di - overlap * a);
        }
    }
    Ok(residual.iter().map(|r| r.norm_sqr()).sum::<f64>().sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvolutionMode {
    #[serde(rename = "varqite")]
    VarQite,
    #[serde(rename = "qipa2")]
    Qipa2,
}

impl EvolutionMode {
    pub fn name(&self) -> &'static str {
        match self {
            EvolutionMode::VarQite => "varqite",
            EvolutionMode::Qipa2 => "qipa2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub delta_tau: f64,
    /// Oracle step, only used by QIPA₂.
    pub delta_t: f64,
    pub num_steps: usize,
    /// Relative Tikhonov strength; the normal equations are shifted by
    /// `(regularization * max(1, max_i F_ii))^2`.
    pub regularization: f64,
    pub mode: EvolutionMode,
    pub seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            delta_tau: 0.01,
            delta_t: 0.01,
            num_steps: 100,
            regularization: 1e-8,
            mode: EvolutionMode::VarQite,
            seed: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta_tau > 0.0 && self.delta_tau.is_finite()) {
            return Err(Error::invalid(format!(
                "delta_tau must be positive, got {}",
                self.delta_tau
            )));
        }
        if !(self.delta_t > 0.0 && self.delta_t.is_finite()) {
            return Err(Error::invalid(format!(
                "delta_t must be positive, got {}",
                self.delta_t
            )));
        }
        if !(self.regularization >= 0.0 && self.regularization.is_finite()) {
            return Err(Error::invalid("regularization must be non-negative"));
        }
        Ok(())
    }

    pub fn with_mode(self, mode: EvolutionMode) -> Self {
        Self { mode, ..self }
    }
}

/// Diagonal generator of the imaginary-time flow.
///
/// varQITE uses `H` itself. QIPA₂ uses `(1 - e^{-h δt}) / δt`: iterating
/// `e^{-G τ}` multiplies each amplitude by `exp(τ (e^{λ δt} - 1)/δt)` with
/// `λ = -h`, the double-exponential oracle on the maximization spectrum, and
/// `G → H` as `δt → 0`.
pub fn evolution_generator(problem: &DiagonalObservable, config: &EvolutionConfig) -> Result<DiagonalObservable> {
    config.validate()?;
    match config.mode {
        EvolutionMode::VarQite => Ok(problem.clone()),
        EvolutionMode::Qipa2 => {
            let dt = config.delta_t;
            let values: Vec<f64> = problem.values().iter().map(|&h| -(-h * dt).exp_m1() / dt).collect();
            if let Some(index) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::Overflow { index });
            }
            DiagonalObservable::new(values)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub step: usize,
    pub time: f64,
    pub theta: Vec<f64>,
    pub energy: f64,
    pub solution_prob: f64,
    /// Residual norm of the step that produced this record.
    pub step_error: f64,
    /// `δτ Σ ||e_k||` over steps so far.
    pub bures_cum: f64,
    /// Bures distance to `e^{-G τ}|ψ₀⟩`.
    pub bures_exact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TrajectoryStatus {
    Completed,
    Aborted { step: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub mode: EvolutionMode,
    pub initial_energy: f64,
    pub initial_solution_prob: f64,
    pub records: Vec<TrajectoryRecord>,
    pub status: TrajectoryStatus,
}

impl Trajectory {
    pub fn final_energy(&self) -> f64 {
        self.records.last().map_or(self.initial_energy, |r| r.energy)
    }

    /// First step whose energy lies within `rel` of `ground` (relative to |ground|).
    pub fn steps_to_within(&self, ground: f64, rel: f64) -> Option<usize> {
        let tol = rel * ground.abs();
        if (self.initial_energy - ground).abs() <= tol {
            return Some(0);
        }
        self.records
            .iter()
            .find(|r| (r.energy - ground).abs() <= tol)
            .map(|r| r.step)
    }
}

/// Runs `config.num_steps` Euler steps from the seeded initial parameters.
pub fn run_evolution(problem: &DiagonalObservable, spec: &AnsatzSpec, config: &EvolutionConfig) -> Result<Trajectory> {
    let theta0 = spec.initial_parameters(config.seed);
    run_evolution_from(problem, spec, &theta0, config)
}

/// Runs the evolution from explicit initial parameters. Energies are always
/// measured against `problem`, whatever the generator.
pub fn run_evolution_from(
    problem: &DiagonalObservable,
    spec: &AnsatzSpec,
    theta0: &[f64],
    config: &EvolutionConfig,
) -> Result<Trajectory> {
    config.validate()?;
    if problem.num_qubits() != spec.num_qubits {
        return Err(Error::DimensionMismatch {
            expected: spec.num_qubits,
            found: problem.num_qubits(),
        });
    }
    let generator = evolution_generator(problem, config)?;
    let ground = problem.ground_set();
    let psi0 = spec.prepare(theta0)?;

    let mut theta = theta0.to_vec();
    let mut psi = psi0.clone();
    let mut step_errors = Vec::with_capacity(config.num_steps);
    let mut records = Vec::with_capacity(config.num_steps);
    let mut status = TrajectoryStatus::Completed;

    for step in 1..=config.num_steps {
        let derivs = spec.derivative_states(&theta)?;
        let sys = system_from_states(&psi, &derivs, &generator)?;
        let scale = sys.metric.diagonal().max().max(1.0);
        let shift = (config.regularization * scale).powi(2);
        let velocities = solve_parameter_velocities(&sys, shift)?;
        let err = residual_norm(&psi, &derivs, &generator, &velocities)?;

        let next: Vec<f64> = theta
            .iter()
            .zip(&velocities)
            .map(|(t, v)| t + config.delta_tau * v)
            .collect();
        if next.iter().any(|t| !t.is_finite()) {
            status = TrajectoryStatus::Aborted {
                step,
                reason: "non-finite parameters".into(),
            };
            break;
        }
        theta = next;
        psi = spec.prepare(&theta)?;
        step_errors.push(err);

        let time = step as f64 * config.delta_tau;
        let reference = psi0.exact_imaginary_evolution(&generator, time)?;
        records.push(TrajectoryRecord {
            step,
            time,
            theta: theta.clone(),
            energy: psi.expectation(problem)?,
            solution_prob: psi.solution_probability(&ground)?,
            step_error: err,
            bures_cum: bures_accumulate(&step_errors, config.delta_tau)?,
            bures_exact: psi.bures_distance(&reference)?,
        });
    }

    Ok(Trajectory {
        mode: config.mode,
        initial_energy: psi0.expectation(problem)?,
        initial_solution_prob: psi0.solution_probability(&ground)?,
        records,
        status,
    })
}
