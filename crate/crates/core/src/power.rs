//! Exact power iteration over a spectrum with a scalar oracle.
//!
//! Every level of the spectrum carries a probability; one oracle step
//! multiplies the amplitude of level `i` by `f(lambda_i)`, so probabilities are
//! reweighted by `f(lambda_i)^2` and renormalized. All bookkeeping is done on
//! log-probabilities because the double-exponential oracle overflows `f64`
//! almost immediately.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleFunction {
    /// `f(lambda) = lambda`; requires a positive spectrum.
    Identity,
    /// `f(lambda) = exp(lambda * dt)`.
    Exp { dt: f64 },
    /// `f(lambda) = exp(exp(lambda * dt))`.
    DoubleExp { dt: f64 },
}

impl OracleFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            OracleFunction::Identity => Ok(()),
            OracleFunction::Exp { dt } | OracleFunction::DoubleExp { dt } => {
                if dt.is_finite() && dt > 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("oracle step dt must be positive, got {dt}")))
                }
            }
        }
    }

    /// `ln f(lambda)`.
    pub fn log_value(&self, lambda: f64) -> Result<f64> {
        let v = match *self {
            OracleFunction::Identity => {
                if lambda <= 0.0 {
                    return Err(Error::invalid(format!(
                        "identity oracle needs positive eigenvalues, got {lambda}"
                    )));
                }
                lambda.ln()
            }
            OracleFunction::Exp { dt } => lambda * dt,
            OracleFunction::DoubleExp { dt } => (lambda * dt).exp(),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::invalid(format!(
                "oracle value at eigenvalue {lambda} is not representable"
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationLevel {
    pub eigenvalue: f64,
    pub multiplicity: u64,
    /// Natural log of the total probability of the level.
    pub log_probability: f64,
}

impl PopulationLevel {
    pub fn probability(&self) -> f64 {
        self.log_probability.exp()
    }
}

/// Probability distribution over the levels of a spectrum, eigenvalues
/// strictly decreasing. The solution level is the first one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralPopulation {
    levels: Vec<PopulationLevel>,
    solution_index: usize,
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

impl SpectralPopulation {
    /// Uniform superposition over `2^n` basis states grouped into levels.
    pub fn uniform(spectrum: &[(f64, u64)]) -> Result<Self> {
        if spectrum.is_empty() {
            return Err(Error::invalid("empty spectrum"));
        }
        let total: u64 = spectrum.iter().map(|&(_, m)| m).sum();
        if !total.is_power_of_two() {
            return Err(Error::invalid(format!(
                "multiplicities sum to {total}, which is not a power of two"
            )));
        }
        let mut sorted = spectrum.to_vec();
        sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
        for pair in sorted.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::invalid(format!("eigenvalue {} listed twice", pair[0].0)));
            }
        }
        let log_total = (total as f64).ln();
        let levels = sorted
            .into_iter()
            .map(|(eigenvalue, multiplicity)| {
                if multiplicity == 0 || !eigenvalue.is_finite() {
                    return Err(Error::invalid(format!("bad level ({eigenvalue}, {multiplicity})")));
                }
                Ok(PopulationLevel {
                    eigenvalue,
                    multiplicity,
                    log_probability: (multiplicity as f64).ln() - log_total,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            levels,
            solution_index: 0,
        })
    }

    pub fn levels(&self) -> &[PopulationLevel] {
        &self.levels
    }

    pub fn solution_index(&self) -> usize {
        self.solution_index
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.levels.iter().map(PopulationLevel::probability).collect()
    }

    pub fn solution_probability(&self) -> f64 {
        self.levels[self.solution_index].probability()
    }

    /// One oracle application followed by renormalization.
    pub fn apply_oracle(&self, oracle: &OracleFunction) -> Result<Self> {
        oracle.validate()?;
        let weighted = self
            .levels
            .iter()
            .map(|l| Ok(l.log_probability + 2.0 * oracle.log_value(l.eigenvalue)?))
            .collect::<Result<Vec<f64>>>()?;
        let norm = log_sum_exp(weighted.iter().copied());
        let levels = self
            .levels
            .iter()
            .zip(&weighted)
            .map(|(l, &w)| PopulationLevel {
                log_probability: w - norm,
                ..l.clone()
            })
            .collect();
        Ok(Self {
            levels,
            solution_index: self.solution_index,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MajorityOutcome {
    Reached { iterations: u64 },
    BudgetExceeded { max_iter: u64, final_probability: f64 },
}

impl MajorityOutcome {
    pub fn iterations(&self) -> Option<u64> {
        match *self {
            MajorityOutcome::Reached { iterations } => Some(iterations),
            MajorityOutcome::BudgetExceeded { .. } => None,
        }
    }
}

/// Smallest number of oracle steps, starting from the uniform state, after
/// which the top level is measured with probability strictly above 1/2.
pub fn iterations_to_majority(
    spectrum: &[(f64, u64)],
    oracle: &OracleFunction,
    max_iter: u64,
) -> Result<MajorityOutcome> {
    if max_iter == 0 {
        return Err(Error::invalid("max_iter must be at least 1"));
    }
    let mut pop = SpectralPopulation::uniform(spectrum)?;
    if pop.solution_probability() > 0.5 {
        return Ok(MajorityOutcome::Reached { iterations: 0 });
    }
    for k in 1..=max_iter {
        pop = pop.apply_oracle(oracle)?;
        if pop.solution_probability() > 0.5 {
            return Ok(MajorityOutcome::Reached { iterations: k });
        }
    }
    Ok(MajorityOutcome::BudgetExceeded {
        max_iter,
        final_probability: pop.solution_probability(),
    })
}

/// The degenerate-rest spectrum: one solution state at `lambda1`, the other
/// `2^n - 1` states at `lambda2`.
pub fn degenerate_rest_spectrum(n: u32, lambda1: f64, lambda2: f64) -> Result<Vec<(f64, u64)>> {
    if n == 0 || n > 63 {
        return Err(Error::invalid(format!("qubit count {n} outside 1..=63")));
    }
    Ok(vec![(lambda1, 1), (lambda2, (1u64 << n) - 1)])
}

/// Closed-form iterations-to-majority on the degenerate-rest model:
/// the smallest `k` with `(f1/f2)^(2k) > 2^n - 1`.
pub fn closed_form_majority_count(n: u32, lambda1: f64, lambda2: f64, oracle: &OracleFunction) -> Result<u64> {
    oracle.validate()?;
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if !(lambda1 > lambda2) {
        return Err(Error::invalid(format!(
            "need lambda1 > lambda2, got {lambda1} <= {lambda2}"
        )));
    }
    let log_gain = match *oracle {
        OracleFunction::Identity => {
            if lambda2 <= 0.0 {
                return Err(Error::invalid("identity oracle needs positive eigenvalues"));
            }
            (lambda1 / lambda2).ln()
        }
        OracleFunction::Exp { dt } => (lambda1 - lambda2) * dt,
        // e^{a} - e^{b} = e^{b} * expm1(a - b)
        OracleFunction::DoubleExp { dt } => (lambda2 * dt).exp() * ((lambda1 - lambda2) * dt).exp_m1(),
    };
    if !(log_gain > 0.0) {
        return Err(Error::NoAmplification);
    }
    // ln(2^n - 1) = n ln 2 + ln(1 - 2^-n)
    let rest = f64::from(n) * std::f64::consts::LN_2 + (-(2f64.powi(-(n as i32)))).ln_1p();
    Ok((rest / (2.0 * log_gain)).floor() as u64 + 1)
}

/// Iteration lower bounds `n / log2(l1/l2)` and `n / (l1 - l2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationBoundEstimate {
    pub kappa_varqite: f64,
    pub kappa_qipa2: f64,
}

impl IterationBoundEstimate {
    pub fn separation_ratio(&self) -> f64 {
        self.kappa_varqite / self.kappa_qipa2
    }
}

pub fn kappa_bounds(n: u32, lambda1: f64, lambda2: f64) -> Result<IterationBoundEstimate> {
    if !(lambda1 > lambda2 && lambda2 > 0.0 && lambda1.is_finite()) {
        return Err(Error::invalid(format!(
            "kappa bounds need lambda1 > lambda2 > 0, got ({lambda1}, {lambda2})"
        )));
    }
    let gap = lambda1 - lambda2;
    let log2_ratio = (gap / lambda2).ln_1p() / std::f64::consts::LN_2;
    let n = f64::from(n);
    Ok(IterationBoundEstimate {
        kappa_varqite: n / log2_ratio,
        kappa_qipa2: n / gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const EXP1: OracleFunction = OracleFunction::Exp { dt: 1.0 };
    const DEXP1: OracleFunction = OracleFunction::DoubleExp { dt: 1.0 };

    #[test]
    fn uniform_population_probabilities() {
        let pop = SpectralPopulation::uniform(&[(2.0, 1), (1.0, 7)]).unwrap();
        assert_relative_eq!(pop.probabilities()[0], 0.125, max_relative = 1e-15);
        assert_relative_eq!(pop.probabilities()[1], 0.875, max_relative = 1e-15);

        let pop = SpectralPopulation::uniform(&[(-1.0, 6), (3.0, 2)]).unwrap();
        assert_eq!(pop.levels()[0].eigenvalue, 3.0);
        assert_relative_eq!(pop.probabilities()[0], 0.25, max_relative = 1e-15);
        assert_relative_eq!(pop.probabilities()[1], 0.75, max_relative = 1e-15);

        let pop = SpectralPopulation::uniform(&[(4.0, 16)]).unwrap();
        assert_eq!(pop.solution_probability(), 1.0);
    }

    #[test]
    fn uniform_population_rejects_bad_totals() {
        assert!(SpectralPopulation::uniform(&[(2.0, 1), (1.0, 6)]).is_err());
        assert!(SpectralPopulation::uniform(&[(2.0, 1), (2.0, 7)]).is_err());
        assert!(SpectralPopulation::uniform(&[]).is_err());
    }

    #[test]
    fn two_level_exp_step() {
        let pop = SpectralPopulation::uniform(&[(2.0, 1), (1.0, 7)]).unwrap();
        let next = pop.apply_oracle(&EXP1).unwrap();
        let e2 = 1f64.exp().powi(2);
        assert_relative_eq!(next.solution_probability(), e2 / (e2 + 7.0), max_relative = 1e-14);
        assert!((next.solution_probability() - 0.5135).abs() < 1e-4);
    }

    #[test]
    fn two_level_double_exp_step() {
        let pop = SpectralPopulation::uniform(&[(2.0, 1), (1.0, 7)]).unwrap();
        let next = pop.apply_oracle(&DEXP1).unwrap();
        // e^{2e^2} / (e^{2e^2} + 7 e^{2e}), 50-digit reference 0.999386452043
        assert!((next.solution_probability() - 0.999386452043).abs() < 1e-12);
    }

    #[test]
    fn identity_on_flat_spectrum_is_noop() {
        let pop = SpectralPopulation::uniform(&[(3.0, 8)]).unwrap();
        assert_eq!(pop.apply_oracle(&OracleFunction::Identity).unwrap(), pop);
    }

    #[test]
    fn identity_rejects_nonpositive_eigenvalues() {
        let pop = SpectralPopulation::uniform(&[(3.0, 2), (-1.0, 6)]).unwrap();
        assert!(pop.apply_oracle(&OracleFunction::Identity).is_err());
    }

    #[test]
    fn double_exp_survives_large_arguments() {
        let pop = SpectralPopulation::uniform(&[(700.0, 1), (699.0, 3), (1.0, 4)]).unwrap();
        let next = pop.apply_oracle(&DEXP1).unwrap();
        for l in next.levels() {
            assert!(!l.log_probability.is_nan());
        }
        assert!(next.solution_probability() > 0.999);
    }

    #[test]
    fn majority_examples() {
        let spec = degenerate_rest_spectrum(3, 2.0, 1.0).unwrap();
        assert_eq!(
            iterations_to_majority(&spec, &EXP1, 100).unwrap(),
            MajorityOutcome::Reached { iterations: 1 }
        );
        assert_eq!(
            iterations_to_majority(&spec, &OracleFunction::Identity, 100).unwrap(),
            MajorityOutcome::Reached { iterations: 2 }
        );
        // triangle maximization spectrum: solution carries 6 of 8 states
        assert_eq!(
            iterations_to_majority(&[(5.0, 6), (1.0, 2)], &EXP1, 100).unwrap(),
            MajorityOutcome::Reached { iterations: 0 }
        );
    }

    #[test]
    fn majority_budget_is_reported() {
        let spec = degenerate_rest_spectrum(10, 1.001, 1.0).unwrap();
        let out = iterations_to_majority(&spec, &OracleFunction::Identity, 5).unwrap();
        assert!(matches!(out, MajorityOutcome::BudgetExceeded { max_iter: 5, .. }));
        assert_eq!(out.iterations(), None);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_majority_count(3, 2.0, 1.0, &EXP1).unwrap(), 1);
        assert_eq!(
            closed_form_majority_count(3, 2.0, 1.0, &OracleFunction::Identity).unwrap(),
            2
        );
        assert_eq!(closed_form_majority_count(10, 2.0, 1.0, &EXP1).unwrap(), 4);
        assert_eq!(closed_form_majority_count(1, 2.0, 1.0, &EXP1).unwrap(), 1);
    }

    #[test]
    fn closed_form_rejects_flat_oracle() {
        let tiny = OracleFunction::Exp { dt: 5e-324 };
        let top = 1.0 + f64::EPSILON;
        assert_eq!(
            closed_form_majority_count(3, top, 1.0, &tiny).unwrap_err(),
            Error::NoAmplification
        );
        assert!(closed_form_majority_count(3, 1.0, 2.0, &EXP1).is_err());
    }

    #[test]
    fn kappa_examples() {
        let k = kappa_bounds(3, 2.0, 1.0).unwrap();
        assert_eq!((k.kappa_varqite, k.kappa_qipa2), (3.0, 3.0));
        let k = kappa_bounds(7, 9.0, 4.5).unwrap();
        assert_eq!((k.kappa_varqite, k.kappa_qipa2), (7.0, 7.0 / 4.5));
        let k = kappa_bounds(10, 1024.5, 1024.0).unwrap();
        assert_eq!(k.kappa_qipa2, 20.0);
        assert!(k.separation_ratio() > 700.0);
        assert!(kappa_bounds(3, 1.0, 1.0).is_err());
        assert!(kappa_bounds(3, 2.0, 0.0).is_err());
    }
}
