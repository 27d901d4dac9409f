//! Dense statevector simulation of a layered RY + ring-CX ansatz.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BasisState;
use crate::ising::{group_levels, level_tolerance, IsingHamiltonian};

const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

impl StateVector {
    /// Wraps amplitudes, checking the length is a power of two and the norm is one.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::invalid(format!("{len} amplitudes is not a power of two")));
        }
        let norm = amplitudes.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid(format!("state has norm {norm}")));
        }
        Ok(Self {
            num_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::invalid(format!("cannot normalize a vector of norm {norm}")));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(amplitudes)
    }

    pub fn basis(state: &BasisState) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << state.num_qubits()];
        amplitudes[state.index()] = Complex64::new(1.0, 0.0);
        Self {
            num_qubits: state.num_qubits(),
            amplitudes,
        }
    }

    /// `|+>^n`
    pub fn uniform(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            num_qubits,
            amplitudes: vec![a; dim],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Complex64::norm_sqr).collect()
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    pub fn l2_distance(&self, other: &StateVector) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn with_global_phase(&self, phi: f64) -> Self {
        let phase = Complex64::from_polar(1.0, phi);
        Self {
            num_qubits: self.num_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * phase).collect(),
        }
    }

    /// `<psi| O |psi>`
    pub fn expectation(&self, obs: &DiagonalObservable) -> Result<f64> {
        check_dim(self.dim(), obs.values.len())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&obs.values)
            .map(|(a, h)| a.norm_sqr() * h)
            .sum())
    }

    /// `<O^2> - <O>^2`, with rounding below zero clamped away.
    pub fn variance(&self, obs: &DiagonalObservable) -> Result<f64> {
        let mean = self.expectation(obs)?;
        let second: f64 = self
            .amplitudes
            .iter()
            .zip(&obs.values)
            .map(|(a, h)| a.norm_sqr() * h * h)
            .sum();
        Ok((second - mean * mean).max(0.0))
    }

    pub fn solution_probability(&self, targets: &[BasisState]) -> Result<f64> {
        if targets.is_empty() {
            return Err(Error::invalid("solution set is empty"));
        }
        let mut total = 0.0;
        for t in targets {
            t.expect_len(self.num_qubits)?;
            total += self.amplitudes[t.index()].norm_sqr();
        }
        Ok(total)
    }

    /// `exp(-H tau) |psi>` renormalized. Exponents are taken relative to the
    /// smallest diagonal entry so no factor exceeds one.
    pub fn exact_imaginary_evolution(&self, obs: &DiagonalObservable, tau: f64) -> Result<Self> {
        check_dim(self.dim(), obs.values.len())?;
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::invalid(format!(
                "imaginary time must be non-negative, got {tau}"
            )));
        }
        if tau == 0.0 {
            return Ok(self.clone());
        }
        let floor = obs.values.iter().copied().fold(f64::INFINITY, f64::min);
        let amplitudes = self
            .amplitudes
            .iter()
            .zip(&obs.values)
            .map(|(a, h)| a * (-(h - floor) * tau).exp())
            .collect();
        Self::normalized(amplitudes)
    }

    /// `sqrt(2 (1 - |<a|b>|))`, blind to global phase.
    ///
    /// Evaluated as `|| e^{i arg<a|b>} a - b ||`, which equals the closed form
    /// for normalized states without cancelling `1 - |<a|b>|` near zero.
    pub fn bures_distance(&self, other: &StateVector) -> Result<f64> {
        let overlap = self.inner(other)?;
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a * phase - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

/// A diagonal operator given by its `2^n` computational-basis entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalObservable {
    num_qubits: usize,
    values: Vec<f64>,
}

impl DiagonalObservable {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if !values.len().is_power_of_two() {
            return Err(Error::invalid(format!(
                "{} entries is not a power of two",
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            num_qubits: values.len().trailing_zeros() as usize,
            values,
        })
    }

    pub fn from_hamiltonian(h: &IsingHamiltonian) -> Result<Self> {
        Self::new(h.diagonal()?)
    }

    /// `Z` on a single qubit.
    pub fn pauli_z() -> Self {
        Self {
            num_qubits: 1,
            values: vec![1.0, -1.0],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Entrywise `g(h_x)`; a non-finite result names the basis index.
    pub fn map(&self, g: impl Fn(f64) -> f64) -> Result<Self> {
        let values = self.values.iter().map(|&h| g(h)).collect();
        Self::new(values)
    }

    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        self.map(|h| alpha * h)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Basis states sitting on the lowest level.
    pub fn ground_set(&self) -> Vec<BasisState> {
        let mut sorted = self.values.clone();
        sorted.sort_by(f64::total_cmp);
        let tol = level_tolerance(&sorted);
        let ground = group_levels(&sorted, tol)[0].0;
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &h)| (h - ground).abs() <= tol)
            .map(|(x, _)| BasisState::new(x, self.num_qubits).expect("index below 2^n"))
            .collect()
    }
}

/// `values[x] = g(diagonal_energy(H, x))`.
pub fn diagonal_function_observable(h: &IsingHamiltonian, g: impl Fn(f64) -> f64) -> Result<DiagonalObservable> {
    DiagonalObservable::from_hamiltonian(h)?.map(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `|+>^n`
    #[default]
    Plus,
    /// `|0>^n`
    Zero,
}

/// Hardware-efficient ansatz: an RY layer on the initial state, then `layers`
/// repetitions of (ring of CX, RY layer). Parameter `l * n + q` drives the RY
/// on qubit `q` in layer `l`.
///
/// The ring is `CX(q, q+1)` for consecutive qubits plus the closing
/// `CX(n-1, 0)` when `n > 2`; a single qubit has no entangler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub num_qubits: usize,
    pub layers: usize,
    #[serde(default)]
    pub initial: InitialState,
}

#[derive(Debug, Clone, Copy)]
enum Gate {
    Ry { qubit: usize, param: usize },
    Cx { control: usize, target: usize },
}

fn apply_ry(amps: &mut [Complex64], qubit: usize, theta: f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    let bit = 1usize << qubit;
    for i in 0..amps.len() {
        if i & bit == 0 {
            let (a0, a1) = (amps[i], amps[i | bit]);
            amps[i] = a0 * c - a1 * s;
            amps[i | bit] = a0 * s + a1 * c;
        }
    }
}

/// Multiplies qubit `qubit` by the RY generator `-iY/2`.
fn apply_ry_generator(amps: &mut [Complex64], qubit: usize) {
    let bit = 1usize << qubit;
    for i in 0..amps.len() {
        if i & bit == 0 {
            let (a0, a1) = (amps[i], amps[i | bit]);
            amps[i] = -0.5 * a1;
            amps[i | bit] = 0.5 * a0;
        }
    }
}

fn apply_cx(amps: &mut [Complex64], control: usize, target: usize) {
    let (cbit, tbit) = (1usize << control, 1usize << target);
    for i in 0..amps.len() {
        if i & cbit != 0 && i & tbit == 0 {
            amps.swap(i, i | tbit);
        }
    }
}

impl AnsatzSpec {
    pub fn new(num_qubits: usize, layers: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > crate::graph::ENUMERATION_GUARD {
            return Err(Error::invalid(format!("unsupported qubit count {num_qubits}")));
        }
        Ok(Self {
            num_qubits,
            layers,
            initial: InitialState::Plus,
        })
    }

    pub fn with_initial(self, initial: InitialState) -> Self {
        Self { initial, ..self }
    }

    pub fn num_parameters(&self) -> usize {
        self.num_qubits * (self.layers + 1)
    }

    fn ring(&self) -> Vec<(usize, usize)> {
        let n = self.num_qubits;
        match n {
            1 => vec![],
            2 => vec![(0, 1)],
            _ => (0..n).map(|q| (q, (q + 1) % n)).collect(),
        }
    }

    fn gates(&self) -> Vec<Gate> {
        let n = self.num_qubits;
        let ring = self.ring();
        let mut gates = Vec::with_capacity(self.num_parameters() + self.layers * ring.len());
        for layer in 0..=self.layers {
            if layer > 0 {
                gates.extend(ring.iter().map(|&(control, target)| Gate::Cx { control, target }));
            }
            gates.extend((0..n).map(|qubit| Gate::Ry {
                qubit,
                param: layer * n + qubit,
            }));
        }
        gates
    }

    fn check_params(&self, theta: &[f64]) -> Result<()> {
        check_dim(self.num_parameters(), theta.len())?;
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("non-finite parameter"));
        }
        Ok(())
    }

    fn initial_amplitudes(&self) -> Vec<Complex64> {
        match self.initial {
            InitialState::Plus => StateVector::uniform(self.num_qubits).amplitudes,
            InitialState::Zero => {
                let mut a = vec![Complex64::new(0.0, 0.0); 1 << self.num_qubits];
                a[0] = Complex64::new(1.0, 0.0);
                a
            }
        }
    }

    /// Runs the circuit, optionally inserting the generator after the RY
    /// driven by parameter `insert_at`.
    fn run(&self, theta: &[f64], insert_at: Option<usize>) -> Vec<Complex64> {
        let mut amps = self.initial_amplitudes();
        for gate in self.gates() {
            match gate {
                Gate::Ry { qubit, param } => {
                    apply_ry(&mut amps, qubit, theta[param]);
                    if insert_at == Some(param) {
                        apply_ry_generator(&mut amps, qubit);
                    }
                }
                Gate::Cx { control, target } => apply_cx(&mut amps, control, target),
            }
        }
        amps
    }

    pub fn prepare(&self, theta: &[f64]) -> Result<StateVector> {
        self.check_params(theta)?;
        Ok(StateVector {
            num_qubits: self.num_qubits,
            amplitudes: self.run(theta, None),
        })
    }

    /// `d|psi(theta)> / d theta_i`, unnormalized.
    pub fn derivative_state(&self, theta: &[f64], i: usize) -> Result<Vec<Complex64>> {
        self.check_params(theta)?;
        if i >= self.num_parameters() {
            return Err(Error::invalid(format!(
                "parameter index {i} out of range for {} parameters",
                self.num_parameters()
            )));
        }
        Ok(self.run(theta, Some(i)))
    }

    pub fn derivative_states(&self, theta: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        self.check_params(theta)?;
        Ok((0..self.num_parameters()).map(|i| self.run(theta, Some(i))).collect())
    }

    /// Zeros plus seeded uniform noise in `[-0.01, 0.01]`.
    pub fn initial_parameters(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..self.num_parameters())
            .map(|_| rng.gen_range(-0.01..=0.01))
            .collect()
    }
}

pub(crate) fn inner_product(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    inner(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    use crate::graph::WeightedGraph;

    fn triangle() -> IsingHamiltonian {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        IsingHamiltonian::from_maxcut(&g).unwrap()
    }

    fn single_edge() -> IsingHamiltonian {
        let g = WeightedGraph::new(2, [(0, 1, 5.0)]).unwrap();
        IsingHamiltonian::from_maxcut(&g).unwrap()
    }

    fn bits(s: &str) -> BasisState {
        s.parse().unwrap()
    }

    fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_parameters_give_plus_states() {
        let spec = AnsatzSpec::new(1, 1).unwrap();
        let psi = spec.prepare(&[0.0, 0.0]).unwrap();
        assert!(max_abs_diff(psi.amplitudes(), StateVector::uniform(1).amplitudes()) < 1e-15);

        let spec = AnsatzSpec::new(2, 2).unwrap();
        let psi = spec.prepare(&[0.0; 6]).unwrap();
        assert!(max_abs_diff(psi.amplitudes(), StateVector::uniform(2).amplitudes()) < 1e-15);
    }

    #[test]
    fn single_rotation_on_zero() {
        let spec = AnsatzSpec::new(1, 0).unwrap().with_initial(InitialState::Zero);
        let theta = 0.73;
        let psi = spec.prepare(&[theta]).unwrap();
        assert_relative_eq!(psi.amplitudes()[0].re, (theta / 2.0).cos(), max_relative = 1e-15);
        assert_relative_eq!(psi.amplitudes()[1].re, (theta / 2.0).sin(), max_relative = 1e-15);
    }

    #[test]
    fn prepare_rejects_wrong_length() {
        let spec = AnsatzSpec::new(2, 1).unwrap();
        assert_eq!(
            spec.prepare(&[0.0; 3]).unwrap_err(),
            Error::DimensionMismatch { expected: 4, found: 3 }
        );
    }

    #[test]
    fn expectation_examples() {
        let h = DiagonalObservable::from_hamiltonian(&triangle()).unwrap();
        assert!(StateVector::uniform(3).expectation(&h).unwrap().abs() <= 1e-15);
        assert_eq!(StateVector::basis(&bits("000")).expectation(&h).unwrap(), 3.0);
        let zero = DiagonalObservable::new(vec![0.0; 8]).unwrap();
        assert_eq!(StateVector::uniform(3).expectation(&zero).unwrap(), 0.0);
        assert!(StateVector::uniform(2).expectation(&h).is_err());
    }

    #[test]
    fn variance_examples() {
        let h = DiagonalObservable::from_hamiltonian(&triangle()).unwrap();
        let uniform = StateVector::uniform(3);
        assert_relative_eq!(uniform.variance(&h).unwrap(), 3.0, max_relative = 1e-14);
        assert_eq!(StateVector::basis(&bits("010")).variance(&h).unwrap(), 0.0);
        let scaled = DiagonalObservable::from_hamiltonian(&triangle().upscale(1.2).unwrap()).unwrap();
        assert_relative_eq!(uniform.variance(&scaled).unwrap(), 4.32, max_relative = 1e-12);
    }

    #[test]
    fn derivative_of_single_rotation() {
        let spec = AnsatzSpec::new(1, 0).unwrap().with_initial(InitialState::Zero);
        let theta = 1.1;
        let d = spec.derivative_state(&[theta], 0).unwrap();
        assert_relative_eq!(d[0].re, -0.5 * (theta / 2.0).sin(), max_relative = 1e-14);
        assert_relative_eq!(d[1].re, 0.5 * (theta / 2.0).cos(), max_relative = 1e-14);
        let norm: f64 = d.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        assert!(norm <= 0.5 + 1e-15);
        assert!(spec.derivative_state(&[theta], 1).is_err());
    }

    #[test]
    fn derivative_matches_central_differences() {
        let spec = AnsatzSpec::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let theta: Vec<f64> = (0..spec.num_parameters()).map(|_| rng.gen_range(-PI..PI)).collect();
            let i = rng.gen_range(0..spec.num_parameters());
            let analytic = spec.derivative_state(&theta, i).unwrap();
            let h = 1e-4;
            let mut plus = theta.clone();
            plus[i] += h;
            let mut minus = theta.clone();
            minus[i] -= h;
            let (p, m) = (spec.prepare(&plus).unwrap(), spec.prepare(&minus).unwrap());
            let fd: Vec<Complex64> = p
                .amplitudes()
                .iter()
                .zip(m.amplitudes())
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect();
            assert!(max_abs_diff(&analytic, &fd) <= 1e-6);
        }
    }

    #[test]
    fn function_observable_examples() {
        let h = single_edge();
        let ident = diagonal_function_observable(&h, |e| e).unwrap();
        assert_eq!(ident.values(), &[5.0, -5.0, -5.0, 5.0]);
        let ex = diagonal_function_observable(&h, |e| (e * 0.1).exp()).unwrap();
        let (hi, lo) = (0.5f64.exp(), (-0.5f64).exp());
        assert_eq!(ex.values(), &[hi, lo, lo, hi]);
        let sq = diagonal_function_observable(&h, |e| e * e).unwrap();
        assert_eq!(sq.values(), &[25.0; 4]);
        let err = diagonal_function_observable(&h, |e| if e < 0.0 { f64::NAN } else { e }).unwrap_err();
        assert_eq!(err, Error::NonFinite { index: 1 });
    }

    #[test]
    fn solution_probability_examples() {
        let uniform = StateVector::uniform(3);
        assert_relative_eq!(uniform.solution_probability(&[bits("000"), bits("111")]).unwrap(), 0.25);
        assert_eq!(
            StateVector::basis(&bits("000"))
                .solution_probability(&[bits("000")])
                .unwrap(),
            1.0
        );
        let ground = DiagonalObservable::from_hamiltonian(&triangle()).unwrap().ground_set();
        assert_eq!(ground.len(), 6);
        assert_relative_eq!(
            uniform.solution_probability(&ground).unwrap(),
            0.75,
            max_relative = 1e-15
        );
        assert!(uniform.solution_probability(&[]).is_err());
    }

    #[test]
    fn imaginary_evolution() {
        let h = DiagonalObservable::from_hamiltonian(&single_edge()).unwrap();
        let psi = StateVector::uniform(2);
        assert_eq!(psi.exact_imaginary_evolution(&h, 0.0).unwrap(), psi);
        let late = psi.exact_imaginary_evolution(&h, 20.0).unwrap();
        let p = late.probabilities();
        assert!((p[1] - 0.5).abs() < 1e-12 && (p[2] - 0.5).abs() < 1e-12);
        assert!(psi.exact_imaginary_evolution(&h, -1.0).is_err());
    }

    #[test]
    fn imaginary_evolution_commutes_with_upscaling() {
        let h = DiagonalObservable::from_hamiltonian(&triangle()).unwrap();
        let spec = AnsatzSpec::new(3, 1).unwrap();
        let psi = spec
            .prepare(&spec.initial_parameters(3).iter().map(|t| t * 50.0).collect::<Vec<_>>())
            .unwrap();
        let a = psi.exact_imaginary_evolution(&h.scaled(3.0).unwrap(), 0.2).unwrap();
        let b = psi.exact_imaginary_evolution(&h, 0.6).unwrap();
        assert!(max_abs_diff(a.amplitudes(), b.amplitudes()) < 1e-13);
    }

    #[test]
    fn bures_examples() {
        let psi = StateVector::uniform(2);
        assert_eq!(psi.bures_distance(&psi).unwrap(), 0.0);
        assert!(psi.bures_distance(&psi.with_global_phase(1.234)).unwrap() <= 1e-12);
        let a = StateVector::basis(&bits("00"));
        let b = StateVector::basis(&bits("01"));
        assert_relative_eq!(a.bures_distance(&b).unwrap(), SQRT_2);
        assert!(a.bures_distance(&StateVector::uniform(3)).is_err());
    }

    #[test]
    fn state_constructor_checks_norm() {
        let a = vec![Complex64::new(FRAC_1_SQRT_2, 0.0); 2];
        assert!(StateVector::new(a).is_ok());
        assert!(StateVector::new(vec![Complex64::new(1.0, 0.0); 2]).is_err());
        assert!(StateVector::new(vec![Complex64::new(1.0, 0.0); 3]).is_err());
    }
}
