//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a flat `Float64Array` with a fixed stride so the page
//! can plot it without any serialization layer. Seeds are `u32` to avoid
//! BigInt on the JavaScript side.

use mbqrw_core::harness::{run_single_trace, run_sweep, ExperimentConfig, Mode, PhiGrid};
use mbqrw_core::emit_model_curves;
use wasm_bindgen::prelude::*;

/// Values per step returned by [`trace`].
pub const TRACE_STRIDE: usize = 4;
/// Values per grid point returned by [`model_curve`].
pub const MODEL_STRIDE: usize = 4;
/// Values returned by [`sweep_point`].
pub const SWEEP_LEN: usize = 7;

/// Per step: `[outcome, delta_j, pr_psi0 after the step, pr_ax0 before it]`.
pub fn trace_values(mu: u32, phi: f64, iterations: u32, seed: u32) -> Result<Vec<f64>, String> {
    let trace = run_single_trace(mu, phi, iterations.into(), seed.into()).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(trace.steps.len() * TRACE_STRIDE);
    let mut delta = 0i64;
    for s in &trace.steps {
        let bit = s.outcome.bit();
        delta += if bit == 0 { -1 } else { 1 };
        out.extend_from_slice(&[f64::from(bit), delta as f64, s.alpha_after * s.alpha_after, s.p0_before]);
    }
    Ok(out)
}

/// Per grid point: `[sin2phi, model_success, model_disturbance, model_pr_ax0]`
/// for `n_points` evenly spaced values of sin²φ in `[0, 1]`.
pub fn model_values(mu: u32, iterations: u32, n_points: u32) -> Result<Vec<f64>, String> {
    if n_points < 2 {
        return Err("n_points must be at least 2".into());
    }
    let step = 1.0 / f64::from(n_points - 1);
    let grid = PhiGrid::Sin2Range { start: 0.0, stop: 1.0, step };
    let rows = emit_model_curves(&[mu], iterations.into(), &grid).map_err(|e| e.to_string())?;
    Ok(rows
        .iter()
        .flat_map(|r| [r.sin2phi, r.model_success, r.model_disturbance, r.model_pr_ax0])
        .collect())
}

/// `[empirical_success, se, model_success, empirical_disturbance,
/// model_disturbance, j0_mean, ties]` for one `(mu, phi)` point.
pub fn sweep_values(mu: u32, phi: f64, iterations: u32, trials: u32, seed: u32) -> Result<Vec<f64>, String> {
    let config = ExperimentConfig {
        mu_list: vec![mu],
        iterations: iterations.into(),
        phi_grid: PhiGrid::Explicit(vec![phi]),
        trials_per_point: trials.into(),
        master_seed: seed.into(),
        output_path: None,
        mode: Mode::Sweep,
        parallel: false,
    };
    let result = run_sweep(&config).map_err(|e| e.to_string())?;
    let p = result.points.first().ok_or("sweep produced no points")?;
    Ok(vec![
        p.empirical_success,
        p.standard_error,
        p.model_success,
        p.empirical_disturbance_mean,
        p.model_disturbance,
        p.j0_mean,
        p.ties as f64,
    ])
}

#[wasm_bindgen]
pub fn trace(mu: u32, phi: f64, iterations: u32, seed: u32) -> Result<Vec<f64>, JsValue> {
    trace_values(mu, phi, iterations, seed).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn model_curve(mu: u32, iterations: u32, n_points: u32) -> Result<Vec<f64>, JsValue> {
    model_values(mu, iterations, n_points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn sweep_point(mu: u32, phi: f64, iterations: u32, trials: u32, seed: u32) -> Result<Vec<f64>, JsValue> {
    sweep_values(mu, phi, iterations, trials, seed).map_err(|e| JsValue::from_str(&e))
}
