//! Random streams and seed derivation.
//!
//! Every uniform draw comes from ChaCha8 (`rand_chacha::ChaCha8Rng`). A
//! 64-bit seed `s` is expanded to the 32-byte ChaCha key by taking four
//! consecutive SplitMix64 outputs starting from state `s`, each written
//! little-endian. A uniform in `[0, 1)` is `(next_u64 >> 11) · 2⁻⁵³`.
//!
//! Per-trial seeds are a pure function of
//! `(master_seed, mu_index, phi_index, trial_index)`: starting from
//! `h = master_seed`, each index `k` is folded in as
//! `h = mix64(h ^ mix64(k + GOLDEN · (position + 1)))` where `mix64` is the
//! SplitMix64 finalizer, `GOLDEN = 0x9E3779B97F4A7C15` and `position` is
//! 0, 1, 2 for the three indices.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::state::Outcome;

/// Name recorded in output metadata.
pub const RNG_FAMILY: &str = "chacha8 (key = 4x splitmix64(seed), little-endian; u = (next_u64 >> 11) * 2^-53)";

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Advances a SplitMix64 state and returns the next output.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    mix64(*state)
}

pub fn derive_trial_seed(master_seed: u64, mu_index: u64, phi_index: u64, trial_index: u64) -> u64 {
    [mu_index, phi_index, trial_index]
        .iter()
        .enumerate()
        .fold(master_seed, |h, (pos, &k)| {
            mix64(h ^ mix64(k.wrapping_add(GOLDEN.wrapping_mul(pos as u64 + 1))))
        })
}

/// Source of uniform draws in `[0, 1)`.
pub trait UniformSource {
    fn next_uniform(&mut self) -> f64;
}

pub struct TrialRng(ChaCha8Rng);

impl TrialRng {
    pub fn new(seed: u64) -> Self {
        let mut state = seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        TrialRng(ChaCha8Rng::from_seed(key))
    }
}

impl UniformSource for TrialRng {
    fn next_uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Replays a fixed list of draws; panics when exhausted.
#[derive(Clone, Debug)]
pub struct ForcedDraws {
    draws: Vec<f64>,
    next: usize,
}

impl ForcedDraws {
    pub fn new(draws: Vec<f64>) -> Self {
        ForcedDraws { draws, next: 0 }
    }

    /// Draws that force the given outcomes whenever both are possible:
    /// `0.0` selects outcome 0, the largest double below 1 selects outcome 1.
    pub fn forcing(outcomes: &[Outcome]) -> Self {
        let below_one = 1.0 - f64::EPSILON / 2.0;
        Self::new(
            outcomes
                .iter()
                .map(|o| match o {
                    Outcome::Zero => 0.0,
                    Outcome::One => below_one,
                })
                .collect(),
        )
    }
}

impl UniformSource for ForcedDraws {
    fn next_uniform(&mut self) -> f64 {
        let u = self.draws[self.next];
        self.next += 1;
        u
    }
}
