use crate::error::Result;
use crate::params::{check_phi, WalkParams};

/// Result of one sharp measurement of the auxiliary qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Zero,
    One,
}

impl Outcome {
    /// Draw rule shared by both engines: the outcome is 1 iff `u ≥ p0`.
    pub fn from_draw(u: f64, p0: f64) -> Self {
        if u >= p0 {
            Outcome::One
        } else {
            Outcome::Zero
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Outcome::Zero => 0,
            Outcome::One => 1,
        }
    }
}

impl From<bool> for Outcome {
    fn from(one: bool) -> Self {
        if one {
            Outcome::One
        } else {
            Outcome::Zero
        }
    }
}

/// Two-amplitude state `α|ψ0⟩ + β|ψ1⟩` with the outcome counters.
///
/// Amplitudes are real and non-negative for every `φ ∈ [0, π/2]`: the
/// updates only multiply by positive cosines/sines and renormalize.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkState {
    pub alpha: f64,
    pub beta: f64,
    pub j0: u64,
    pub j1: u64,
    /// Initial angle, kept for disturbance bookkeeping.
    pub phi: f64,
}

impl WalkState {
    pub fn pr_psi0(&self) -> f64 {
        self.alpha * self.alpha
    }

    pub fn pr_psi1(&self) -> f64 {
        self.beta * self.beta
    }

    /// `j1 − j0`.
    pub fn delta_j(&self) -> i64 {
        self.j1 as i64 - self.j0 as i64
    }
}

pub fn prepare_analytic(phi: f64, _params: &WalkParams) -> Result<WalkState> {
    check_phi(phi)?;
    let (s, c) = phi.sin_cos();
    Ok(WalkState {
        alpha: c,
        beta: s,
        j0: 0,
        j1: 0,
        phi,
    })
}
