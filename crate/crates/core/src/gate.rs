//! Partial negation operator: the c-th root of Pauli-X and its powers.
//!
//! With `t = exp(iπ/c)` (principal root of −1), the gate is
//!
//! ```text
//!           ┌             ┐
//! V = 1/2 · │ 1+t    1−t  │
//!           │ 1−t    1+t  │
//!           └             ┘
//! ```
//!
//! and `V^d` is the same matrix with `t` replaced by `t^d`, so `V^c = X`.
//! Applying `V^d` to `|0⟩` leaves outcome probabilities `cos²(dπ/2c)` and
//! `sin²(dπ/2c)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Complex scalar used for gate entries and statevector amplitudes.
pub type ComplexAmplitude = Complex64;

/// Dense 2×2 complex matrix, row major.
pub type Matrix2 = [[ComplexAmplitude; 2]; 2];

const ZERO: ComplexAmplitude = Complex64::new(0.0, 0.0);
const ONE: ComplexAmplitude = Complex64::new(1.0, 0.0);

pub const IDENTITY: Matrix2 = [[ONE, ZERO], [ZERO, ONE]];
pub const PAULI_X: Matrix2 = [[ZERO, ONE], [ONE, ZERO]];

pub fn mat_mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Conjugate transpose.
pub fn dagger(a: &Matrix2) -> Matrix2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &Matrix2, b: &Matrix2) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `½[[1+s, 1−s],[1−s, 1+s]]`, the shape shared by `V` and all its powers.
fn half_sum_matrix(s: ComplexAmplitude) -> Matrix2 {
    let plus = (ONE + s) * 0.5;
    let minus = (ONE - s) * 0.5;
    [[plus, minus], [minus, plus]]
}

fn root_power(c: u32, d: u64) -> ComplexAmplitude {
    // t^d evaluated as a single rotation, not by repeated multiplication.
    let turns = (d % (2 * c as u64)) as f64;
    Complex64::from_polar(1.0, turns * PI / c as f64)
}

/// The c-th root of Pauli-X, `V = X^(1/c)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartialNegationGate {
    c: u32,
    t: ComplexAmplitude,
    matrix: Matrix2,
}

impl PartialNegationGate {
    pub fn c(&self) -> u32 {
        self.c
    }

    /// The principal c-th root of −1, `exp(iπ/c)`.
    pub fn t(&self) -> ComplexAmplitude {
        self.t
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.matrix
    }

    /// Applies the gate to a single-qubit amplitude pair `(a0, a1)`.
    pub fn apply(&self, a0: ComplexAmplitude, a1: ComplexAmplitude) -> (ComplexAmplitude, ComplexAmplitude) {
        let m = &self.matrix;
        (m[0][0] * a0 + m[0][1] * a1, m[1][0] * a0 + m[1][1] * a1)
    }
}

pub fn make_gate(c: u32) -> Result<PartialNegationGate> {
    if c == 0 {
        return Err(invalid("root order c must be at least 1"));
    }
    let t = root_power(c, 1);
    Ok(PartialNegationGate {
        c,
        t,
        matrix: half_sum_matrix(t),
    })
}

/// Closed form of `V^d` for `V = X^(1/c)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GatePower {
    c: u32,
    d: u64,
    matrix: Matrix2,
}

impl GatePower {
    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.matrix
    }
}

pub fn gate_power(c: u32, d: u64) -> Result<GatePower> {
    if c == 0 {
        return Err(invalid("root order c must be at least 1"));
    }
    Ok(GatePower {
        c,
        d,
        matrix: half_sum_matrix(root_power(c, d)),
    })
}

/// Probabilities of reading the auxiliary qubit as 0 or 1 after `V^d` acts
/// on `|0⟩`: `(cos²(dπ/2c), sin²(dπ/2c))`.
pub fn aux_outcome_probs(c: u32, d: u64) -> Result<(f64, f64)> {
    if c == 0 {
        return Err(invalid("root order c must be at least 1"));
    }
    let angle = d as f64 * PI / (2.0 * c as f64);
    let (s, co) = angle.sin_cos();
    Ok((co * co, s * s))
}
