//! Exact statevector over `1 + μ + 1` qubits, used as an oracle for the
//! two-amplitude engine.
//!
//! Basis ordering is `unknown ⊗ dummies ⊗ aux` with the unknown qubit as the
//! most significant bit and the auxiliary qubit as bit 0. For μ = 1 the
//! index of `|u, d, a⟩` is `4u + 2d + a`.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::gate::{make_gate, ComplexAmplitude};
use crate::params::{check_phi, WalkParams};
use crate::state::Outcome;
use crate::walk::NULL_BRANCH;

/// Largest dummy count the dense oracle accepts (2^14 amplitudes).
pub const MU_MAX: u32 = 12;

/// Amplitudes below this are treated as exact zeros by the invariant checks.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct FullRegister {
    mu: u32,
    amplitudes: Vec<ComplexAmplitude>,
}

pub fn prepare_full(phi: f64, mu: u32) -> Result<FullRegister> {
    if mu == 0 {
        return Err(invalid("mu must be at least 1"));
    }
    if mu > MU_MAX {
        return Err(Error::Capacity { mu, max: MU_MAX });
    }
    check_phi(phi)?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1usize << (mu + 2)];
    let (s, c) = phi.sin_cos();
    amplitudes[FullRegister::branch_index_for(mu, 0)] = Complex64::new(c, 0.0);
    amplitudes[FullRegister::branch_index_for(mu, 1)] = Complex64::new(s, 0.0);
    Ok(FullRegister { mu, amplitudes })
}

impl FullRegister {
    pub fn mu(&self) -> u32 {
        self.mu
    }

    pub fn num_qubits(&self) -> u32 {
        self.mu + 2
    }

    pub fn amplitudes(&self) -> &[ComplexAmplitude] {
        &self.amplitudes
    }

    /// Index of `|b, 1…1, 0⟩` for unknown-qubit value `b`.
    fn branch_index_for(mu: u32, b: usize) -> usize {
        let dummies = ((1usize << mu) - 1) << 1;
        (b << (mu + 1)) | dummies
    }

    pub fn branch_index(&self, b: usize) -> usize {
        Self::branch_index_for(self.mu, b)
    }

    fn dummy_mask(&self) -> usize {
        ((1usize << self.mu) - 1) << 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `Pr(ax = 0)` for a measurement of the auxiliary qubit right now.
    pub fn pr_aux0(&self) -> f64 {
        self.amplitudes.iter().step_by(2).map(|a| a.norm_sqr()).sum()
    }

    /// True when every basis state with a dummy bit at 0 has zero amplitude.
    pub fn dummies_intact(&self) -> bool {
        let mask = self.dummy_mask();
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != mask)
            .all(|(_, a)| a.norm() <= 1e-12)
    }

    /// Applies `M_x`: one controlled-`V` onto the auxiliary qubit per
    /// register qubit (unknown and dummies), each simulated gate by gate.
    pub fn apply_mx(&mut self, params: &WalkParams) -> Result<()> {
        if params.mu != self.mu {
            return Err(invalid(format!(
                "register has mu = {} but parameters have mu = {}",
                self.mu, params.mu
            )));
        }
        let aux_mass: f64 = self.amplitudes.iter().skip(1).step_by(2).map(|a| a.norm_sqr()).sum();
        if aux_mass > RESIDUAL_TOL {
            return Err(invalid("auxiliary qubit must be reset to |0> before M_x"));
        }
        let v = make_gate(params.c)?;
        for control in 1..=self.mu + 1 {
            let bit = 1usize << control;
            for i in (0..self.amplitudes.len()).step_by(2) {
                if i & bit != 0 {
                    let (a0, a1) = v.apply(self.amplitudes[i], self.amplitudes[i | 1]);
                    self.amplitudes[i] = a0;
                    self.amplitudes[i | 1] = a1;
                }
            }
        }
        Ok(())
    }

    /// Measures the auxiliary qubit against a uniform draw in `[0, 1)`,
    /// collapses and renormalizes, then resets the auxiliary qubit to `|0⟩`.
    pub fn measure_aux(&mut self, draw: f64) -> Result<Outcome> {
        let p0 = self.pr_aux0();
        let p1: f64 = self.amplitudes.iter().skip(1).step_by(2).map(|a| a.norm_sqr()).sum();
        let outcome = Outcome::from_draw(draw, p0);
        let (keep, prob) = match outcome {
            Outcome::Zero => (0, p0),
            Outcome::One => (1, p1),
        };
        if prob <= NULL_BRANCH {
            return Err(Error::DegenerateOutcome {
                outcome: outcome.bit(),
                probability: prob,
            });
        }
        let scale = 1.0 / prob.sqrt();
        for i in (0..self.amplitudes.len()).step_by(2) {
            let kept = self.amplitudes[i | keep] * scale;
            self.amplitudes[i] = kept;
            self.amplitudes[i | 1] = Complex64::new(0.0, 0.0);
        }
        Ok(outcome)
    }

    /// Moduli of the `|ψ0⟩` and `|ψ1⟩` branch amplitudes.
    pub fn extract_analytic(&self) -> Result<(f64, f64)> {
        let i0 = self.branch_index(0);
        let i1 = self.branch_index(1);
        for (index, a) in self.amplitudes.iter().enumerate() {
            if index != i0 && index != i1 && a.norm() > RESIDUAL_TOL {
                return Err(Error::EngineDivergence {
                    index,
                    residual: a.norm(),
                });
            }
        }
        Ok((self.amplitudes[i0].norm(), self.amplitudes[i1].norm()))
    }
}
