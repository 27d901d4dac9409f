//! Diagonal Ising Hamiltonians `alpha * sum w_ij Z_i Z_j` and their exact spectra.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{BasisState, WeightedGraph, ENUMERATION_GUARD};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsingTerm {
    pub i: usize,
    pub j: usize,
    /// Unscaled weight; the effective coefficient is `alpha * coefficient`.
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsingHamiltonian {
    num_qubits: usize,
    terms: Vec<IsingTerm>,
    alpha: f64,
    /// `sum w_ij / 2`, dropped from the operator itself.
    offset: f64,
}

/// Exact summary of the two lowest levels of a diagonal Hamiltonian.
///
/// `lambda1`/`lambda2` are the same two levels after mapping to the
/// maximization convention `lambda = shift - E`, where the solution is the
/// largest eigenvalue and every eigenvalue is at least `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSummary {
    pub num_qubits: usize,
    pub ground_energy: f64,
    pub ground_degeneracy: usize,
    pub ground_states: Vec<BasisState>,
    pub runner_up_energy: f64,
    pub absolute_gap: f64,
    pub shift: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub ratio: f64,
}

/// Groups sorted values into levels whose members differ by at most `tol`.
pub(crate) fn group_levels(sorted: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut levels: Vec<(f64, usize)> = Vec::new();
    for &v in sorted {
        match levels.last_mut() {
            Some((start, count)) if (v - *start).abs() <= tol => *count += 1,
            _ => levels.push((v, 1)),
        }
    }
    levels
}

pub(crate) fn level_tolerance(values: &[f64]) -> f64 {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    1e-10 * scale.max(1.0)
}

impl IsingHamiltonian {
    /// MaxCut encoding: one `Z_u Z_v` term per edge with coefficient `w_uv`.
    pub fn from_maxcut(graph: &WeightedGraph) -> Result<Self> {
        if graph.edges().is_empty() {
            return Err(Error::EmptyGraph);
        }
        let terms = graph
            .edges()
            .iter()
            .map(|e| IsingTerm {
                i: e.u,
                j: e.v,
                coefficient: e.weight,
            })
            .collect();
        Ok(Self {
            num_qubits: graph.num_nodes(),
            terms,
            alpha: 1.0,
            offset: graph.total_weight() / 2.0,
        })
    }

    pub fn new(num_qubits: usize, terms: Vec<IsingTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyGraph);
        }
        for t in &terms {
            if t.i >= t.j || t.j >= num_qubits || !t.coefficient.is_finite() {
                return Err(Error::invalid(format!("bad term {t:?} on {num_qubits} qubits")));
            }
        }
        let offset = terms.iter().map(|t| t.coefficient).sum::<f64>() / 2.0;
        Ok(Self {
            num_qubits,
            terms,
            alpha: 1.0,
            offset,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[IsingTerm] {
        &self.terms
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Returns `alpha * H`. Scale factors compose multiplicatively.
    pub fn upscale(&self, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 1.0) {
            return Err(Error::InvalidAlpha(alpha));
        }
        Ok(Self {
            alpha: self.alpha * alpha,
            ..self.clone()
        })
    }

    fn unscaled_energy(&self, x: usize) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                if ((x >> t.i) ^ (x >> t.j)) & 1 == 0 {
                    t.coefficient
                } else {
                    -t.coefficient
                }
            })
            .sum()
    }

    /// `alpha * sum w_ij s_i s_j` with spins `s = 1 - 2x`.
    pub fn diagonal_energy(&self, basis: &BasisState) -> Result<f64> {
        basis.expect_len(self.num_qubits)?;
        Ok(self.alpha * self.unscaled_energy(basis.index()))
    }

    fn check_guard(&self, guard: usize) -> Result<()> {
        if self.num_qubits > guard {
            return Err(Error::TooManyQubits {
                num_qubits: self.num_qubits,
                guard,
            });
        }
        Ok(())
    }

    fn unscaled_diagonal(&self) -> Vec<f64> {
        (0..1usize << self.num_qubits)
            .map(|x| self.unscaled_energy(x))
            .collect()
    }

    /// All `2^n` diagonal entries.
    pub fn diagonal(&self) -> Result<Vec<f64>> {
        self.check_guard(ENUMERATION_GUARD)?;
        Ok(self.unscaled_diagonal().into_iter().map(|e| self.alpha * e).collect())
    }

    /// Distinct energy levels in ascending order with multiplicities.
    pub fn energy_levels(&self) -> Result<Vec<(f64, usize)>> {
        let mut diag = self.diagonal()?;
        diag.sort_by(f64::total_cmp);
        let tol = level_tolerance(&diag);
        Ok(group_levels(&diag, tol))
    }

    /// Maximization-convention shift: `alpha * (1 + max unscaled energy)`.
    ///
    /// Scaling the shift with `alpha` keeps `lambda1 / lambda2` independent of
    /// the upscale factor.
    fn maximization_shift(&self, unscaled: &[f64]) -> f64 {
        let top = unscaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.alpha * (1.0 + top.abs())
    }

    /// Levels of `shift - H` in descending order, as `(eigenvalue, multiplicity)`.
    pub fn maximization_spectrum(&self) -> Result<Vec<(f64, u64)>> {
        self.check_guard(ENUMERATION_GUARD)?;
        let unscaled = self.unscaled_diagonal();
        let shift = self.maximization_shift(&unscaled);
        Ok(self
            .energy_levels()?
            .into_iter()
            .map(|(e, m)| (shift - e, m as u64))
            .collect())
    }

    pub fn brute_force_spectrum(&self) -> Result<SpectrumSummary> {
        self.brute_force_spectrum_guarded(ENUMERATION_GUARD)
    }

    pub fn brute_force_spectrum_guarded(&self, guard: usize) -> Result<SpectrumSummary> {
        self.check_guard(guard)?;
        let unscaled = self.unscaled_diagonal();
        let diag: Vec<f64> = unscaled.iter().map(|e| self.alpha * e).collect();
        let mut sorted = diag.clone();
        sorted.sort_by(f64::total_cmp);
        let tol = level_tolerance(&sorted);
        let levels = group_levels(&sorted, tol);
        if levels.len() < 2 {
            return Err(Error::NoGap);
        }
        let (ground_energy, ground_degeneracy) = levels[0];
        let runner_up_energy = levels[1].0;
        let ground_states = diag
            .iter()
            .enumerate()
            .filter(|(_, &e)| (e - ground_energy).abs() <= tol)
            .map(|(x, _)| BasisState::new(x, self.num_qubits))
            .collect::<Result<Vec<_>>>()?;
        let shift = self.maximization_shift(&unscaled);
        let lambda1 = shift - ground_energy;
        let lambda2 = shift - runner_up_energy;
        Ok(SpectrumSummary {
            num_qubits: self.num_qubits,
            ground_energy,
            ground_degeneracy,
            ground_states,
            runner_up_energy,
            absolute_gap: runner_up_energy - ground_energy,
            shift,
            lambda1,
            lambda2,
            ratio: lambda1 / lambda2,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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

    #[test]
    fn one_term_per_edge() {
        let h = triangle();
        let terms: Vec<_> = h.terms().iter().map(|t| (t.i, t.j, t.coefficient)).collect();
        assert_eq!(terms, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]);
        assert_eq!(h.alpha(), 1.0);
        assert_eq!(h.offset(), 1.5);

        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let h = IsingHamiltonian::from_maxcut(&g).unwrap();
        let terms: Vec<_> = h.terms().iter().map(|t| (t.i, t.j, t.coefficient)).collect();
        assert_eq!(terms, vec![(0, 1, 1.0), (1, 2, 1.0)]);
    }

    #[test]
    fn empty_graph_is_rejected() {
        let g = WeightedGraph::new(3, []).unwrap();
        assert_eq!(IsingHamiltonian::from_maxcut(&g).unwrap_err(), Error::EmptyGraph);
    }

    #[test]
    fn single_edge_diagonal() {
        assert_eq!(single_edge().diagonal().unwrap(), vec![5.0, -5.0, -5.0, 5.0]);
    }

    #[test]
    fn triangle_energies() {
        let h = triangle();
        assert_eq!(h.diagonal_energy(&bits("000")).unwrap(), 3.0);
        assert_eq!(h.diagonal_energy(&bits("001")).unwrap(), -1.0);
        let scaled = h.upscale(1.2).unwrap();
        assert!((scaled.diagonal_energy(&bits("001")).unwrap() + 1.2).abs() < 1e-15);
        assert!(h.diagonal_energy(&bits("0010")).is_err());
    }

    #[test]
    fn triangle_spectrum() {
        let s = triangle().brute_force_spectrum().unwrap();
        assert_eq!(s.ground_energy, -1.0);
        assert_eq!(s.ground_degeneracy, 6);
        assert_eq!(s.ground_states.len(), 6);
        assert_eq!(s.runner_up_energy, 3.0);
        assert_eq!(s.absolute_gap, 4.0);
        assert_eq!((s.lambda1, s.lambda2, s.shift), (5.0, 1.0, 4.0));
        assert_eq!(s.ratio, 5.0);
    }

    #[test]
    fn single_edge_spectrum() {
        let s = single_edge().brute_force_spectrum().unwrap();
        assert_eq!(s.ground_energy, -5.0);
        assert_eq!(s.ground_degeneracy, 2);
        assert_eq!(s.runner_up_energy, 5.0);
        assert_eq!(s.absolute_gap, 10.0);
        assert!(s.lambda2 > 0.0);
    }

    #[test]
    fn upscaled_triangle_keeps_ratio() {
        let base = triangle().brute_force_spectrum().unwrap();
        let s = triangle().upscale(2.0).unwrap().brute_force_spectrum().unwrap();
        assert_eq!(s.absolute_gap, 8.0);
        assert_eq!(s.ratio, base.ratio);
        let s = triangle().upscale(1.2).unwrap().brute_force_spectrum().unwrap();
        assert!((s.absolute_gap - 4.8).abs() < 1e-12);
    }

    #[test]
    fn huge_upscale_keeps_ground_set() {
        let base = single_edge().brute_force_spectrum().unwrap();
        let s = single_edge().upscale(1024.0).unwrap().brute_force_spectrum().unwrap();
        assert_eq!(s.absolute_gap, 10240.0);
        assert_eq!(s.ground_states, base.ground_states);
    }

    #[test]
    fn upscale_identity_and_rejection() {
        assert_eq!(triangle().upscale(1.0).unwrap(), triangle());
        assert_eq!(triangle().upscale(0.5).unwrap_err(), Error::InvalidAlpha(0.5));
        assert!(triangle().upscale(f64::NAN).is_err());
    }

    #[test]
    fn guard_is_enforced() {
        let err = triangle().brute_force_spectrum_guarded(2).unwrap_err();
        assert_eq!(
            err,
            Error::TooManyQubits {
                num_qubits: 3,
                guard: 2
            }
        );
    }

    #[test]
    fn fully_degenerate_spectrum_has_no_gap() {
        // +-1e-300 falls inside the level tolerance, leaving a single level.
        let h = IsingHamiltonian::new(
            2,
            vec![IsingTerm {
                i: 0,
                j: 1,
                coefficient: 1e-300,
            }],
        )
        .unwrap();
        assert_eq!(h.brute_force_spectrum().unwrap_err(), Error::NoGap);
    }

    #[test]
    fn maximization_spectrum_is_descending_and_positive() {
        let spec = triangle().maximization_spectrum().unwrap();
        assert_eq!(spec, vec![(5.0, 6), (1.0, 2)]);
    }
}
