//! Runtime invariant suite behind `mbqrw verify`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

use crate::analysis::stability_bound;
use crate::error::Result;
use crate::gate::{dagger, gate_power, make_gate, mat_mul, max_abs_diff, IDENTITY, PAULI_X};
use crate::params::make_params;
use crate::register::prepare_full;
use crate::rng::{TrialRng, UniformSource};
use crate::state::{prepare_analytic, Outcome};
use crate::walk::{closed_form_probs, delta_form_probs, outcome_probs, update_on_outcome};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst deviation observed, or the failing case.
    pub detail: String,
}

fn outcomes_from_bits(bits: u32, len: u32) -> Vec<Outcome> {
    (0..len).map(|i| Outcome::from(bits >> i & 1 == 1)).collect()
}

fn check(name: &'static str, tol: f64, body: impl FnOnce() -> Result<f64>) -> CheckResult {
    match body() {
        Ok(worst) => CheckResult {
            name,
            passed: worst <= tol,
            detail: format!("worst deviation {worst:.3e} (tolerance {tol:.0e})"),
        },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn gate_identities() -> Result<f64> {
    let mut worst = 0.0f64;
    for mu in 1..=20u32 {
        let c = 2 * mu + 1;
        let v = make_gate(c)?;
        worst = worst.max(max_abs_diff(&mat_mul(v.matrix(), &dagger(v.matrix())), &IDENTITY));
        worst = worst.max(max_abs_diff(gate_power(c, c as u64)?.matrix(), &PAULI_X));
        let mut acc = IDENTITY;
        for d in 0..=c as u64 {
            worst = worst.max(max_abs_diff(&acc, gate_power(c, d)?.matrix()));
            acc = mat_mul(&acc, v.matrix());
        }
    }
    Ok(worst)
}

fn engine_equivalence() -> Result<f64> {
    let mut worst = 0.0f64;
    for mu in 1..=6u32 {
        let params = make_params(mu)?;
        for phi in [0.0, FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8, FRAC_PI_2] {
            for bits in 0..64u32 {
                let mut reg = prepare_full(phi, mu)?;
                let mut state = prepare_analytic(phi, &params)?;
                for o in outcomes_from_bits(bits, 6) {
                    reg.apply_mx(&params)?;
                    let (p0, _) = outcome_probs(&state, &params);
                    worst = worst.max((reg.pr_aux0() - p0).abs());
                    let draw = if o == Outcome::Zero { 0.0 } else { 1.0 - f64::EPSILON / 2.0 };
                    let got = reg.measure_aux(draw)?;
                    state = update_on_outcome(&state, &params, got)?;
                    let (a, b) = reg.extract_analytic()?;
                    worst = worst.max((a - state.alpha).abs()).max((b - state.beta).abs());
                }
            }
        }
    }
    Ok(worst)
}

fn reversibility() -> Result<f64> {
    let mut worst = 0.0f64;
    for mu in 1..=20u32 {
        let params = make_params(mu)?;
        for k in 0..50 {
            let phi = FRAC_PI_2 * k as f64 / 49.0;
            for half in 1..=5u32 {
                let seq = [vec![Outcome::One; half as usize], vec![Outcome::Zero; half as usize]].concat();
                let mut state = prepare_analytic(phi, &params)?;
                for o in seq {
                    state = update_on_outcome(&state, &params, o)?;
                }
                worst = worst.max((state.pr_psi0() - phi.cos().powi(2)).abs());
            }
        }
    }
    Ok(worst)
}

fn closed_form_vs_recurrence() -> Result<f64> {
    let mut rng = TrialRng::new(0x5EED);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let phi = rng.next_uniform() * FRAC_PI_2;
        let mu = 1 + (rng.next_uniform() * 40.0) as u32;
        let len = (rng.next_uniform() * 51.0) as usize;
        let params = make_params(mu)?;
        let mut state = prepare_analytic(phi, &params)?;
        for _ in 0..len {
            state = update_on_outcome(&state, &params, Outcome::from(rng.next_uniform() < 0.5))?;
        }
        let cf = closed_form_probs(phi, &params, state.j0, state.j1)?;
        let df = delta_form_probs(phi, &params, state.delta_j())?;
        let (p0, _) = outcome_probs(&state, &params);
        worst = worst
            .max((cf.pr_psi0 - state.pr_psi0()).abs())
            .max((cf.pr_ax0 - p0).abs())
            .max((df.pr_psi0 - cf.pr_psi0).abs());
    }
    Ok(worst)
}

fn martingale() -> Result<f64> {
    let mut worst = 0.0f64;
    for mu in [1u32, 3, 10] {
        let params = make_params(mu)?;
        for phi in [0.0, 0.2, FRAC_PI_4, 1.1, FRAC_PI_2] {
            for len in 1..=8u32 {
                let (mut total, mut mean) = (0.0, 0.0);
                for bits in 0..1u32 << len {
                    let mut state = prepare_analytic(phi, &params)?;
                    let mut weight = 1.0;
                    for o in outcomes_from_bits(bits, len) {
                        let (p0, p1) = outcome_probs(&state, &params);
                        weight *= if o == Outcome::Zero { p0 } else { p1 };
                        state = update_on_outcome(&state, &params, o)?;
                    }
                    total += weight;
                    mean += weight * state.pr_psi0();
                }
                worst = worst.max((total - 1.0).abs()).max((mean - phi.cos().powi(2)).abs());
            }
        }
    }
    Ok(worst)
}

/// Returns 0 on success, 1 for every violated bracket.
fn stability_bracketing() -> Result<f64> {
    let mut rng = TrialRng::new(0xB0B);
    let mut failures = 0.0;
    for _ in 0..200 {
        let mu = 1 + (rng.next_uniform() * 50.0) as u32;
        let phi = 1e-3 + rng.next_uniform() * (FRAC_PI_4 - 2e-3);
        let params = make_params(mu)?;
        let b = stability_bound(phi, &params)?.max_wrong_steps;
        let below = delta_form_probs(phi, &params, b.floor() as i64)?;
        let above = delta_form_probs(phi, &params, b.floor() as i64 + 1)?;
        if below.pr_ax0 < 0.5 - 1e-9 || above.pr_ax0 >= 0.5 {
            failures += 1.0;
        }
    }
    Ok(failures)
}

fn product_identity() -> Result<f64> {
    let mut worst = 0.0f64;
    for mu in 1..=20u32 {
        let p = make_params(mu)?;
        let r = (p.theta1.cos() * p.theta1.sin()) / (p.theta0.cos() * p.theta0.sin());
        for m in 0..=100 {
            worst = worst.max((r.powi(m) - 1.0).abs());
        }
    }
    Ok(worst)
}

pub fn run_invariant_suite() -> Vec<CheckResult> {
    vec![
        check("gate identities (mu 1..20)", 1e-12, gate_identities),
        check("engine equivalence (mu 1..6, 2^6 sequences)", 1e-10, engine_equivalence),
        check("reversibility at j0 = j1", 1e-10, reversibility),
        check("closed form vs recurrence", 1e-9, closed_form_vs_recurrence),
        check("path probabilities and martingale", 1e-10, martingale),
        check("stability bound bracketing", 0.0, stability_bracketing),
        check("cos/sin product identity", 1e-12, product_identity),
    ]
}
