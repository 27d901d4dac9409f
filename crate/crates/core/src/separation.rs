//! The exponential-separation inequality system and the eigenvalue lower
//! bounds that follow from it.
//!
//! With `x = n / (c 2^n)` the system reduces to
//! `l1 / l2 <= 2^x` and `l1 - l2 >= 1 / (d n^(k-1))`, from which
//! `l2 >= 1 / (d n^(k-1) (2^x - 1))` and `l1 >= 1 / (d n^(k-1) (1 - 2^-x))`.
//! `x` is astronomically small for moderate `n`, so both `2^x - 1` and
//! `1 - 2^-x` go through `expm1`.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationConstants {
    pub c: f64,
    pub d: f64,
    pub k: f64,
}

impl Default for SeparationConstants {
    fn default() -> Self {
        Self { c: 1.0, d: 1.0, k: 1.0 }
    }
}

impl SeparationConstants {
    pub fn new(c: f64, d: f64, k: f64) -> Result<Self> {
        let consts = Self { c, d, k };
        consts.validate()?;
        Ok(consts)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c", self.c), ("d", self.d), ("k", self.k)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("constant {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// `n / (c 2^n)`.
    fn exponent(&self, n: u32) -> f64 {
        f64::from(n) * 2f64.powi(-(n as i32)) / self.c
    }

    /// `1 / (d n^(k-1))`, the minimum absolute gap.
    pub fn min_gap(&self, n: u32) -> f64 {
        1.0 / (self.d * f64::from(n).powf(self.k - 1.0))
    }

    /// `2^(n / (c 2^n))`, the largest admissible eigenvalue ratio.
    pub fn max_ratio(&self, n: u32) -> f64 {
        (self.exponent(n) * LN_2).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    /// `n / log2(l1/l2) >= c 2^n`
    pub ineq_varqite_exponential: bool,
    /// `n / (l1 - l2) <= d n^k`
    pub ineq_qipa_polynomial: bool,
    pub ordering: bool,
    /// `l1 - l2 >= 1 / (d n^(k-1))`
    pub cond_i: bool,
    /// `l1 / l2 <= 2^(n / (c 2^n))`
    pub cond_ii: bool,
    /// `l2 >= lambda2_lower_bound(n)`
    pub cond_iii: bool,
    pub separated: bool,
}

impl ConditionReport {
    fn unordered() -> Self {
        Self {
            ineq_varqite_exponential: false,
            ineq_qipa_polynomial: false,
            ordering: false,
            cond_i: false,
            cond_ii: false,
            cond_iii: false,
            separated: false,
        }
    }
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    Ok(())
}

pub fn check_inequality_system(
    n: u32,
    lambda1: f64,
    lambda2: f64,
    consts: &SeparationConstants,
) -> Result<ConditionReport> {
    check_n(n)?;
    consts.validate()?;
    if !(lambda2 > 0.0 && lambda2.is_finite() && lambda1.is_finite()) {
        return Err(Error::invalid(format!(
            "need finite lambda2 > 0, got ({lambda1}, {lambda2})"
        )));
    }
    if !(lambda1 > lambda2) {
        return Ok(ConditionReport::unordered());
    }
    let nf = f64::from(n);
    let gap = lambda1 - lambda2;
    let log2_ratio = (gap / lambda2).ln_1p() / LN_2;

    let ineq_varqite_exponential = nf / log2_ratio >= consts.c * 2f64.powi(n as i32);
    let ineq_qipa_polynomial = nf / gap <= consts.d * nf.powf(consts.k);
    let cond_i = gap >= consts.min_gap(n);
    let cond_ii = lambda1 / lambda2 <= consts.max_ratio(n);
    let cond_iii = lambda2 >= lambda2_lower_bound(n, consts)?;
    let separated = ineq_varqite_exponential && ineq_qipa_polynomial && cond_i && cond_ii && cond_iii;
    Ok(ConditionReport {
        ineq_varqite_exponential,
        ineq_qipa_polynomial,
        ordering: true,
        cond_i,
        cond_ii,
        cond_iii,
        separated,
    })
}

/// `1 / (d n^(k-1) (2^(n/(c 2^n)) - 1))`
pub fn lambda2_lower_bound(n: u32, consts: &SeparationConstants) -> Result<f64> {
    check_n(n)?;
    consts.validate()?;
    let excess = (consts.exponent(n) * LN_2).exp_m1();
    Ok(consts.min_gap(n) / excess)
}

/// `1 / (d n^(k-1) (1 - 2^(-n/(c 2^n))))`
pub fn lambda1_lower_bound(n: u32, consts: &SeparationConstants) -> Result<f64> {
    check_n(n)?;
    consts.validate()?;
    let deficit = -(-consts.exponent(n) * LN_2).exp_m1();
    Ok(consts.min_gap(n) / deficit)
}

/// Smallest `alpha >= 1` for which `alpha * gap` meets the minimum gap.
pub fn minimal_upscale_alpha(gap: f64, n: u32, consts: &SeparationConstants) -> Result<f64> {
    check_n(n)?;
    consts.validate()?;
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(Error::invalid(format!("gap must be positive, got {gap}")));
    }
    let target = consts.min_gap(n);
    let mut alpha = target / gap;
    if alpha <= 1.0 {
        return Ok(1.0);
    }
    // The quotient can be off by an ulp either way; settle on the smallest
    // representable alpha whose product clears the target.
    while alpha * gap < target {
        alpha = alpha.next_up();
    }
    while alpha.next_down() > 1.0 && alpha.next_down() * gap >= target {
        alpha = alpha.next_down();
    }
    Ok(alpha)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub n: u32,
    pub lambda2_bound: f64,
    /// `L(2n) / L(n)` when `2n` is also probed.
    pub doubling_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceProbe {
    pub rows: Vec<ProbeRow>,
    /// First `n` from which the bound is strictly increasing through the last row.
    pub increasing_from: Option<u32>,
}

/// Tabulates `lambda2_lower_bound` over increasing `n` to expose its
/// super-polynomial growth.
pub fn divergence_probe(consts: &SeparationConstants, n_values: &[u32]) -> Result<DivergenceProbe> {
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("n values must be strictly increasing"));
    }
    let bounds = n_values
        .iter()
        .map(|&n| lambda2_lower_bound(n, consts))
        .collect::<Result<Vec<_>>>()?;
    let rows = n_values
        .iter()
        .zip(&bounds)
        .map(|(&n, &b)| {
            let doubling_ratio = n
                .checked_mul(2)
                .and_then(|m| n_values.iter().position(|&v| v == m))
                .map(|j| bounds[j] / b);
            ProbeRow {
                n,
                lambda2_bound: b,
                doubling_ratio,
            }
        })
        .collect();
    let increasing_from = if bounds.len() < 2 {
        None
    } else {
        let mut start = bounds.len() - 1;
        while start > 0 && bounds[start - 1] < bounds[start] {
            start -= 1;
        }
        (start < bounds.len() - 1).then(|| n_values[start])
    };
    Ok(DivergenceProbe { rows, increasing_from })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> SeparationConstants {
        SeparationConstants::default()
    }

    #[test]
    fn separated_example() {
        let r = check_inequality_system(10, 1025.0, 1024.0, &unit()).unwrap();
        assert!(r.ordering && r.ineq_varqite_exponential && r.ineq_qipa_polynomial);
        assert!(r.cond_i && r.cond_ii && r.cond_iii);
        assert!(r.separated);
    }

    #[test]
    fn large_ratio_fails_varqite_inequality() {
        let r = check_inequality_system(10, 4.0, 1.0, &unit()).unwrap();
        assert!(!r.ineq_varqite_exponential);
        assert!(!r.separated);
    }

    #[test]
    fn equal_eigenvalues_are_unordered() {
        let r = check_inequality_system(5, 3.0, 3.0, &unit()).unwrap();
        assert_eq!(r, ConditionReport::unordered());
        assert!(check_inequality_system(5, 3.0, 0.0, &unit()).is_err());
    }

    #[test]
    fn lambda_bounds_small_n() {
        // 50-digit references
        assert_relative_eq!(
            lambda2_lower_bound(1, &unit()).unwrap(),
            2.414_213_562_373_095,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            lambda1_lower_bound(1, &unit()).unwrap(),
            3.414_213_562_373_095,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            lambda2_lower_bound(10, &unit()).unwrap(),
            147.232_536_271_218_7,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            lambda1_lower_bound(10, &unit()).unwrap(),
            148.232_536_271_218_7,
            max_relative = 1e-13
        );
    }

    #[test]
    fn unit_k_drops_polynomial_factor() {
        let a = SeparationConstants::new(1.0, 2.0, 1.0).unwrap();
        for n in 1..20 {
            assert_eq!(a.min_gap(n), 0.5);
        }
    }

    #[test]
    fn lambda1_bound_dominates_lambda2_bound() {
        for n in 1..40 {
            for c in [0.1, 1.0, 3.0] {
                for k in [0.5, 1.0, 2.0] {
                    let consts = SeparationConstants::new(c, 1.5, k).unwrap();
                    let l1 = lambda1_lower_bound(n, &consts).unwrap();
                    let l2 = lambda2_lower_bound(n, &consts).unwrap();
                    assert!(l1 >= l2, "n={n} c={c} k={k}");
                }
            }
        }
    }

    #[test]
    fn bound_is_finite_at_sixty() {
        let b = lambda2_lower_bound(60, &unit()).unwrap();
        assert!(b.is_finite() && b > 0.0);
        assert_relative_eq!(b, 2.772_190_228_717_567e16, max_relative = 1e-12);
    }

    #[test]
    fn upscale_alpha_examples() {
        let k2 = SeparationConstants::new(1.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(
            minimal_upscale_alpha(0.001, 10, &k2).unwrap(),
            100.0,
            max_relative = 1e-14
        );
        assert_eq!(minimal_upscale_alpha(2f64.powi(-10), 10, &unit()).unwrap(), 1024.0);
        assert_eq!(minimal_upscale_alpha(5.0, 10, &k2).unwrap(), 1.0);
        assert!(minimal_upscale_alpha(0.0, 10, &unit()).is_err());
    }

    #[test]
    fn probe_flags() {
        let ns: Vec<u32> = (1..=8).collect();
        let probe = divergence_probe(&unit(), &ns).unwrap();
        // L(1) == L(2), strictly increasing from 2 on
        assert_eq!(probe.increasing_from, Some(2));
        assert_relative_eq!(probe.rows[3].lambda2_bound, 5.285_213_507_883_245, max_relative = 1e-13);
        assert_relative_eq!(probe.rows[4].lambda2_bound, 8.742_271_851_667_437, max_relative = 1e-13);
        assert!(probe.rows[3].doubling_ratio.is_some());
        assert!(probe.rows[4].doubling_ratio.is_none());

        let single = divergence_probe(&unit(), &[7]).unwrap();
        assert_eq!(single.rows.len(), 1);
        assert_eq!(single.increasing_from, None);
        assert_eq!(single.rows[0].doubling_ratio, None);
        assert!(divergence_probe(&unit(), &[3, 3]).is_err());
    }
}
