//! Weak readout of an unknown qubit by repeatedly measuring an auxiliary
//! qubit that is entangled with it through roots of Pauli-X.
//!
//! The crate has two interchangeable engines: an exact statevector over the
//! full register ([`register`]) and the two-amplitude walk ([`walk`]) that
//! scales to any number of dummy qubits. [`analysis`] holds the closed-form
//! predictions and [`harness`] the seeded Monte-Carlo runner.

pub mod analysis;
pub mod binomial;
pub mod error;
pub mod gate;
pub mod harness;
pub mod params;
pub mod register;
pub mod rng;
pub mod state;
pub mod verify;
pub mod walk;

pub use analysis::{disturbance, partial_gain, stability_bound, strength_scale, PartialGainModel, StabilityBound, StrengthScale};
pub use error::{Error, Result};
pub use gate::{aux_outcome_probs, gate_power, make_gate, ComplexAmplitude, GatePower, PartialNegationGate};
pub use harness::{run_experiment, run_single_trace, run_sweep, emit_model_curves, ExperimentConfig, Mode, PhiGrid, SweepResult, TrialRecord};
pub use params::{make_params, WalkParams};
pub use register::{prepare_full, FullRegister};
pub use state::{prepare_analytic, Outcome, WalkState};
pub use walk::{closed_form_probs, delta_form_probs, outcome_probs, run_walk, update_on_outcome, StepOutcome, Verdict, WalkTrace};
