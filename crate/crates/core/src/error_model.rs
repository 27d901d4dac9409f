//! Error expressions for varQITE and QIPA₂ and their growth under upscaling.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::statevector::{DiagonalObservable, StateVector};

/// Largest `alpha * max(h) * dt` admitted by [`alpha_blowup_scan`] before
/// `dt` is shrunk; keeps `(1 + e^{h dt})^2` well inside `f64` range.
pub const SCAN_EXPONENT_LIMIT: f64 = 200.0;

/// Higher-order remainder of the QIPA₂ error floor; no constant is available for it.
pub const OMITTED_TERM: &str = "O(dtau^(3/2))";

/// `Δ² = <(1+e^{Hδt})²>/δτ² + 2<(e^{Hδt}-1)H>/δτ - <(e^{Hδt}-2)H²>`,
/// every operator diagonal.
pub fn delta_squared(state: &StateVector, h: &DiagonalObservable, dt: f64, dtau: f64) -> Result<f64> {
    if !(dt > 0.0 && dtau > 0.0 && dt.is_finite() && dtau.is_finite()) {
        return Err(Error::invalid(format!(
            "dt and dtau must be positive, got ({dt}, {dtau})"
        )));
    }
    if state.dim() != h.values().len() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: h.values().len(),
        });
    }
    let mut total = 0.0;
    for (x, (a, &e)) in state.amplitudes().iter().zip(h.values()).enumerate() {
        let growth = (e * dt).exp();
        if !growth.is_finite() {
            return Err(Error::Overflow { index: x });
        }
        let entry = (1.0 + growth).powi(2) / (dtau * dtau) + 2.0 * (growth - 1.0) * e / dtau - (growth - 2.0) * e * e;
        total += a.norm_sqr() * entry;
    }
    if !total.is_finite() {
        return Err(Error::invalid("delta squared is not finite; use a smaller dt"));
    }
    Ok(total)
}

/// `Δ` from `Δ²`, zero when rounding or a small `δτ⁻¹` term leaves `Δ²` negative.
pub fn delta(state: &StateVector, h: &DiagonalObservable, dt: f64, dtau: f64) -> Result<f64> {
    Ok(delta_squared(state, h, dt, dtau)?.max(0.0).sqrt())
}

/// Lower bound on the QIPA₂ error: `ε_varQITE + Δ δτ`, remainder omitted.
pub fn qipa_error_floor(eps_varqite: f64, delta: f64, dtau: f64) -> Result<f64> {
    for (name, v) in [("eps_varqite", eps_varqite), ("delta", delta), ("dtau", dtau)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::invalid(format!("{name} must be non-negative, got {v}")));
        }
    }
    Ok(eps_varqite + delta * dtau)
}

/// Accumulated Bures bound `δτ Σ ||e_k||`.
pub fn bures_accumulate(step_error_norms: &[f64], dtau: f64) -> Result<f64> {
    if let Some(bad) = step_error_norms.iter().find(|e| !(**e >= 0.0)) {
        return Err(Error::invalid(format!(
            "step error norms must be non-negative, got {bad}"
        )));
    }
    Ok(dtau * step_error_norms.iter().sum::<f64>())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBudget {
    pub varqite_error: f64,
    pub delta: f64,
    pub qipa_floor: f64,
    pub omitted_term: &'static str,
}

impl ErrorBudget {
    pub fn new(varqite_error: f64, delta: f64, dtau: f64) -> Result<Self> {
        Ok(Self {
            varqite_error,
            delta,
            qipa_floor: qipa_error_floor(varqite_error, delta, dtau)?,
            omitted_term: OMITTED_TERM,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceScaling {
    pub lhs: f64,
    pub rhs: f64,
    pub relative_error: f64,
}

/// Compares `Var(αH)` against `α² Var(H)` on one state.
pub fn variance_scaling_check(h: &DiagonalObservable, state: &StateVector, alpha: f64) -> Result<VarianceScaling> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    let lhs = state.variance(&h.scaled(alpha)?)?;
    let rhs = alpha * alpha * state.variance(h)?;
    let relative_error = if rhs == 0.0 {
        lhs.abs()
    } else {
        (lhs - rhs).abs() / rhs.abs()
    };
    Ok(VarianceScaling {
        lhs,
        rhs,
        relative_error,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupRow {
    pub alpha: f64,
    pub variance: f64,
    pub delta: f64,
    /// Single-step Bures error at zero parameter velocity, `δτ sqrt(Var(αH))`.
    pub varqite_error: f64,
    pub qipa_floor: f64,
    pub dt_used: f64,
    pub dt_shrunk: bool,
    pub ln_delta_squared: f64,
}

/// Variance, `Δ` and the QIPA₂ error floor of `αH` for each `α`.
///
/// When `α max(h) δt` would exceed [`SCAN_EXPONENT_LIMIT`] the row uses the
/// largest admissible `δt` instead and flags the shrink.
pub fn alpha_blowup_scan(
    h: &DiagonalObservable,
    state: &StateVector,
    alphas: &[f64],
    dt: f64,
    dtau: f64,
) -> Result<Vec<BlowupRow>> {
    if alphas.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return Err(Error::invalid("alphas must be positive"));
    }
    if alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("alphas must be strictly increasing"));
    }
    let top = h.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    alphas
        .iter()
        .map(|&alpha| {
            let scaled = h.scaled(alpha)?;
            let peak = alpha * top;
            let (dt_used, dt_shrunk) = if peak > 0.0 && peak * dt > SCAN_EXPONENT_LIMIT {
                (SCAN_EXPONENT_LIMIT / peak, true)
            } else {
                (dt, false)
            };
            let variance = state.variance(&scaled)?;
            let d2 = delta_squared(state, &scaled, dt_used, dtau)?;
            let delta = d2.max(0.0).sqrt();
            let varqite_error = dtau * variance.sqrt();
            Ok(BlowupRow {
                alpha,
                variance,
                delta,
                varqite_error,
                qipa_floor: qipa_error_floor(varqite_error, delta, dtau)?,
                dt_used,
                dt_shrunk,
                ln_delta_squared: d2.ln(),
            })
        })
        .collect()
}
