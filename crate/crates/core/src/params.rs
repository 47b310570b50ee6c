use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{invalid, Result};

/// Walk parameters derived from the number of dummy qubits `mu`.
///
/// The root order is `c = 2μ+1`, the two branches have 1-densities
/// `d0 = μ` and `d1 = μ+1`, and the resulting outcome angles straddle π/4:
/// `θ0 = π/4 − ε`, `θ1 = π/4 + ε` with `ε = π/(4(2μ+1))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkParams {
    pub mu: u32,
    pub c: u32,
    pub d0: u32,
    pub d1: u32,
    pub theta0: f64,
    pub theta1: f64,
    pub epsilon: f64,
}

pub fn make_params(mu: u32) -> Result<WalkParams> {
    if mu == 0 {
        return Err(invalid("mu (number of dummy qubits) must be at least 1"));
    }
    if mu > (u32::MAX - 1) / 2 {
        return Err(invalid(format!("mu = {mu} overflows the root order 2mu+1")));
    }
    let c = 2 * mu + 1;
    let cf = c as f64;
    Ok(WalkParams {
        mu,
        c,
        d0: mu,
        d1: mu + 1,
        theta0: PI * mu as f64 / (2.0 * cf),
        theta1: PI * (mu as f64 + 1.0) / (2.0 * cf),
        epsilon: PI / (4.0 * cf),
    })
}

/// Checks that `phi` lies in the supported quadrant `[0, π/2]`.
pub(crate) fn check_phi(phi: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&phi) {
        return Err(invalid(format!("phi = {phi} is outside [0, pi/2]")));
    }
    Ok(())
}

/// `φ` within this distance of π/4 is treated as the balanced state.
pub const BALANCED_TOL: f64 = 1e-12;

pub fn is_balanced(phi: f64) -> bool {
    (phi - FRAC_PI_4).abs() <= BALANCED_TOL
}
