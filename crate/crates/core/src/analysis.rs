//! Closed-form predictions built on the walk: how far it may stray before
//! losing its bias, how many steps emulate a projective measurement, and
//! the binomial model of success after a fixed number of steps.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, FRAC_PI_4, PI};

use crate::binomial;
use crate::error::{invalid, Error, Result};
use crate::params::{check_phi, is_balanced, WalkParams};
use crate::walk::delta_form_probs_at;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityBound {
    pub phi: f64,
    pub params: WalkParams,
    /// Wrong-direction steps after which `Pr(ax)` of the correct outcome
    /// drops to ½. Infinite at the poles, zero at φ = π/4.
    pub max_wrong_steps: f64,
    /// True when φ > π/4 was reflected to π/2 − φ (roles of j0/j1 swap).
    pub reflected: bool,
}

/// `log(tan φ) / log(tan θ0)`, with φ > π/4 reflected onto φ < π/4.
pub fn stability_bound(phi: f64, params: &WalkParams) -> Result<StabilityBound> {
    check_phi(phi)?;
    let reflected = phi > FRAC_PI_4 && !is_balanced(phi);
    let folded = if reflected { FRAC_PI_2 - phi } else { phi };
    let max_wrong_steps = if is_balanced(phi) {
        0.0
    } else if folded == 0.0 {
        f64::INFINITY
    } else {
        folded.tan().ln() / params.theta0.tan().ln()
    };
    Ok(StabilityBound {
        phi,
        params: *params,
        max_wrong_steps,
        reflected,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrengthScale {
    pub params: WalkParams,
    pub epsilon_proj: f64,
    pub phi_ref: f64,
    pub delta_j_required: f64,
    pub j_proj: f64,
}

/// Reference angle used when the caller has no bound on φ: just short of
/// π/2, where the required drift would otherwise diverge.
pub fn default_phi_ref(params: &WalkParams) -> f64 {
    FRAC_PI_2 - 1.0 / params.c as f64
}

/// Steps needed for the walk to reach `Pr ≥ 1 − ε` from `phi_ref`:
/// `Δj = (2/π)² · log(tan²φ_ref · (1−ε)/ε) · (2μ+1)` and
/// `j_proj = (π/2) · Δj²` from the unbiased drift `Δj = √(2j/π)`.
pub fn strength_scale(params: &WalkParams, epsilon_proj: f64, phi_ref: f64) -> Result<StrengthScale> {
    if !(epsilon_proj > 0.0 && epsilon_proj <= 0.5) {
        return Err(invalid(format!("epsilon_proj = {epsilon_proj} outside (0, 1/2]")));
    }
    if phi_ref >= FRAC_PI_2 {
        return Err(Error::Divergence(format!(
            "tan^2(phi_ref) at phi_ref = {phi_ref}"
        )));
    }
    if phi_ref.is_nan() || phi_ref <= 0.0 {
        return Err(invalid(format!("phi_ref = {phi_ref} must be in (0, pi/2)")));
    }
    let t2 = phi_ref.tan().powi(2);
    let log_term = (t2 * (1.0 - epsilon_proj) / epsilon_proj).ln();
    let delta_j_required = (FRAC_2_PI * FRAC_2_PI * log_term * params.c as f64).max(0.0);
    Ok(StrengthScale {
        params: *params,
        epsilon_proj,
        phi_ref,
        delta_j_required,
        j_proj: FRAC_PI_2 * delta_j_required * delta_j_required,
    })
}

/// Binomial model of reading the qubit after an even number of steps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartialGainModel {
    pub iterations: u64,
    /// Signed drift `ΔJ` the model assumes the walk has reached.
    pub drift: f64,
    /// `Pr(ax = 0)` at that drift; the per-trial success parameter.
    pub p0_model: f64,
    /// `Pr(j0 > J/2)` under `Binomial(J, p0_model)`.
    pub tail: f64,
    /// `sin²φ + cos(2φ) · tail`.
    pub success: f64,
    /// `|cos²φ − Pr(ψ0)|` with `Pr(ψ0)` at the drift point.
    pub disturbance: f64,
    /// Disturbance averaged over the walk ending at `+ΔJ` or `−ΔJ`,
    /// weighted by `success` and `1 − success`.
    pub expected_disturbance: f64,
}

/// Signed drift `∓√(2J/π)`: negative below π/4, positive above, zero at it.
pub fn model_drift(phi: f64, iterations: u64) -> f64 {
    if is_balanced(phi) {
        0.0
    } else {
        let d = (2.0 * iterations as f64 / PI).sqrt();
        if phi < FRAC_PI_4 {
            -d
        } else {
            d
        }
    }
}

pub fn partial_gain(phi: f64, params: &WalkParams, iterations: u64) -> Result<PartialGainModel> {
    check_phi(phi)?;
    if iterations < 2 || !iterations.is_multiple_of(2) {
        return Err(invalid(format!("iteration count J = {iterations} must be even and at least 2")));
    }
    let drift = model_drift(phi, iterations);
    let at_drift = delta_form_probs_at(phi, params, drift)?;
    let mirrored = delta_form_probs_at(phi, params, -drift)?;
    let tail = binomial::upper_tail(iterations, at_drift.pr_ax0, iterations / 2)?;
    let success = if is_balanced(phi) {
        0.5
    } else {
        (phi.sin().powi(2) + (2.0 * phi).cos() * tail).clamp(0.0, 1.0)
    };
    let d_here = disturbance(phi, at_drift.pr_psi0);
    let d_there = disturbance(phi, mirrored.pr_psi0);
    Ok(PartialGainModel {
        iterations,
        drift,
        p0_model: at_drift.pr_ax0,
        tail,
        success,
        disturbance: d_here,
        expected_disturbance: success * d_here + (1.0 - success) * d_there,
    })
}

/// `|cos²φ − Pr(ψ0)|`.
pub fn disturbance(phi: f64, pr_psi0_now: f64) -> f64 {
    (phi.cos().powi(2) - pr_psi0_now).abs()
}
