//! The iterative measure-and-update loop on the two-amplitude state, and
//! the closed forms of its recurrences.
//!
//! Each step measures the auxiliary qubit with
//! `Pr(ax=0) = α²cos²θ0 + β²cos²θ1` and rescales the branches by
//! `cos θ0, cos θ1` (outcome 0) or `sin θ0, sin θ1` (outcome 1) before
//! renormalizing. Because `cos θ1 = sin θ0` and `sin θ1 = cos θ0`, the state
//! after any sequence depends only on `Δj = j1 − j0`, and equal counts
//! restore the initial weights exactly.

use crate::error::{Error, Result};
use crate::params::{check_phi, WalkParams};
use crate::rng::UniformSource;
use crate::state::{prepare_analytic, Outcome, WalkState};

/// Selected outcomes with probability at or below this are refused.
pub const NULL_BRANCH: f64 = 1e-300;

pub fn outcome_probs(state: &WalkState, params: &WalkParams) -> (f64, f64) {
    let (s0, c0) = params.theta0.sin_cos();
    let (s1, c1) = params.theta1.sin_cos();
    let a2 = state.alpha * state.alpha;
    let b2 = state.beta * state.beta;
    (a2 * c0 * c0 + b2 * c1 * c1, a2 * s0 * s0 + b2 * s1 * s1)
}

pub fn update_on_outcome(state: &WalkState, params: &WalkParams, outcome: Outcome) -> Result<WalkState> {
    let (p0, p1) = outcome_probs(state, params);
    let (prob, f0, f1) = match outcome {
        Outcome::Zero => (p0, params.theta0.cos(), params.theta1.cos()),
        Outcome::One => (p1, params.theta0.sin(), params.theta1.sin()),
    };
    if prob <= NULL_BRANCH {
        return Err(Error::DegenerateOutcome {
            outcome: outcome.bit(),
            probability: prob,
        });
    }
    let norm = prob.sqrt();
    let mut next = WalkState {
        alpha: state.alpha * f0 / norm,
        beta: state.beta * f1 / norm,
        ..*state
    };
    match outcome {
        Outcome::Zero => next.j0 += 1,
        Outcome::One => next.j1 += 1,
    }
    Ok(next)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub outcome: Outcome,
    pub p0_before: f64,
    pub p1_before: f64,
    pub alpha_after: f64,
    pub beta_after: f64,
}

/// One draw-measure-update step using the `u ≥ p0 ⇒ 1` rule.
pub fn step(state: &WalkState, params: &WalkParams, u: f64) -> Result<(WalkState, StepOutcome)> {
    let (p0, p1) = outcome_probs(state, params);
    let outcome = Outcome::from_draw(u, p0);
    let next = update_on_outcome(state, params, outcome)?;
    Ok((
        next,
        StepOutcome {
            outcome,
            p0_before: p0,
            p1_before: p1,
            alpha_after: next.alpha,
            beta_after: next.beta,
        },
    ))
}

/// Final reading of the walk. Ties go to `Closer0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Closer0,
    Closer1,
}

impl Verdict {
    pub fn from_counts(j0: u64, j1: u64) -> Self {
        if j1 > j0 {
            Verdict::Closer1
        } else {
            Verdict::Closer0
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkTrace {
    pub params: WalkParams,
    pub phi: f64,
    pub steps: Vec<StepOutcome>,
    pub j0: u64,
    pub j1: u64,
}

impl WalkTrace {
    pub fn verdict(&self) -> Verdict {
        Verdict::from_counts(self.j0, self.j1)
    }

    pub fn is_tie(&self) -> bool {
        self.j0 == self.j1
    }

    pub fn delta_j(&self) -> i64 {
        self.j1 as i64 - self.j0 as i64
    }

    /// `Pr(|ψ0⟩)` after the last step (the initial weight for an empty trace).
    pub fn final_pr_psi0(&self) -> f64 {
        match self.steps.last() {
            Some(s) => s.alpha_after * s.alpha_after,
            None => self.phi.cos().powi(2),
        }
    }
}

pub fn run_walk(phi: f64, params: &WalkParams, r: u64, rng: &mut impl UniformSource) -> Result<WalkTrace> {
    if r == 0 {
        return Err(crate::error::invalid("iteration count must be at least 1"));
    }
    let mut state = prepare_analytic(phi, params)?;
    let mut steps = Vec::with_capacity(r as usize);
    for _ in 0..r {
        let (next, rec) = step(&state, params, rng.next_uniform())?;
        steps.push(rec);
        state = next;
    }
    Ok(WalkTrace {
        params: *params,
        phi,
        steps,
        j0: state.j0,
        j1: state.j1,
    })
}

/// Same walk as [`run_walk`] without recording the per-step log.
pub fn run_walk_final(phi: f64, params: &WalkParams, r: u64, rng: &mut impl UniformSource) -> Result<WalkState> {
    if r == 0 {
        return Err(crate::error::invalid("iteration count must be at least 1"));
    }
    let mut state = prepare_analytic(phi, params)?;
    for _ in 0..r {
        state = step(&state, params, rng.next_uniform())?.0;
    }
    Ok(state)
}

/// State weights and next-measurement probabilities after `(j0, j1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchProbs {
    pub pr_psi0: f64,
    pub pr_psi1: f64,
    pub pr_ax0: f64,
    pub pr_ax1: f64,
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Closed forms in the counts `(j0, j1)`, evaluated with branch weights in
/// log space so long walks neither underflow nor overflow. The two branch
/// angles are used independently (no `θ1 = π/2 − θ0` shortcut).
pub fn closed_form_probs(phi: f64, params: &WalkParams, j0: u64, j1: u64) -> Result<BranchProbs> {
    check_phi(phi)?;
    let (sp, cp) = phi.sin_cos();
    let (s0, c0) = params.theta0.sin_cos();
    let (s1, c1) = params.theta1.sin_cos();
    let (j0, j1) = (j0 as f64, j1 as f64);
    let w0 = 2.0 * cp.ln() + 2.0 * j0 * c0.ln() + 2.0 * j1 * s0.ln();
    let w1 = 2.0 * sp.ln() + 2.0 * j0 * c1.ln() + 2.0 * j1 * s1.ln();
    let den = log_sum_exp(w0, w1);
    let ax0 = log_sum_exp(w0 + 2.0 * c0.ln(), w1 + 2.0 * c1.ln());
    let ax1 = log_sum_exp(w0 + 2.0 * s0.ln(), w1 + 2.0 * s1.ln());
    Ok(BranchProbs {
        pr_psi0: (w0 - den).exp(),
        pr_psi1: (w1 - den).exp(),
        pr_ax0: (ax0 - den).exp(),
        pr_ax1: (ax1 - den).exp(),
    })
}

/// The same probabilities written in `Δj = j1 − j0` alone, valid for any
/// real `Δj` (the drift models evaluate it off the integer lattice).
///
/// `Pr(ψ1) = σ(2 ln tan φ − 2Δj ln tan θ0)`, which is the ratio
/// `tan²φ / (tan²φ + tan^{2Δj} θ0)` computed without forming either power.
pub fn delta_form_probs_at(phi: f64, params: &WalkParams, delta_j: f64) -> Result<BranchProbs> {
    check_phi(phi)?;
    let (sp, cp) = phi.sin_cos();
    let (s0, c0) = params.theta0.sin_cos();
    let ln_tan_phi = sp.ln() - cp.ln();
    let ln_tan_theta0 = s0.ln() - c0.ln();
    let x = 2.0 * ln_tan_phi - 2.0 * delta_j * ln_tan_theta0;
    let pr_psi1 = logistic(x);
    let pr_psi0 = logistic(-x);
    Ok(BranchProbs {
        pr_psi0,
        pr_psi1,
        pr_ax0: pr_psi0 * c0 * c0 + pr_psi1 * s0 * s0,
        pr_ax1: pr_psi0 * s0 * s0 + pr_psi1 * c0 * c0,
    })
}

pub fn delta_form_probs(phi: f64, params: &WalkParams, delta_j: i64) -> Result<BranchProbs> {
    delta_form_probs_at(phi, params, delta_j as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;
    use crate::rng::{ForcedDraws, TrialRng};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    const TOL: f64 = 1e-12;

    fn walk_outcomes(phi: f64, p: &WalkParams, outcomes: &[Outcome]) -> WalkState {
        outcomes
            .iter()
            .fold(prepare_analytic(phi, p).unwrap(), |s, &o| update_on_outcome(&s, p, o).unwrap())
    }

    #[test]
    fn outcome_prob_examples() {
        let p1 = make_params(1).unwrap();
        let (a, b) = outcome_probs(&prepare_analytic(FRAC_PI_4, &p1).unwrap(), &p1);
        assert!((a - 0.5).abs() < TOL && (b - 0.5).abs() < TOL);

        let (a, b) = outcome_probs(&prepare_analytic(0.0, &p1).unwrap(), &p1);
        assert!((a - 0.75).abs() < TOL && (b - 0.25).abs() < TOL);

        let p10 = make_params(10).unwrap();
        let (a, b) = outcome_probs(&prepare_analytic(FRAC_PI_2, &p10).unwrap(), &p10);
        let th = 11.0 * PI / 42.0;
        assert!((a - th.cos().powi(2)).abs() < TOL);
        assert!((b - th.sin().powi(2)).abs() < TOL);
    }

    #[test]
    fn update_examples() {
        let p = make_params(1).unwrap();
        let s = walk_outcomes(FRAC_PI_4, &p, &[Outcome::Zero]);
        assert!((s.alpha - 3f64.sqrt() / 2.0).abs() < TOL);
        assert!((s.beta - 0.5).abs() < TOL);
        assert_eq!((s.j0, s.j1), (1, 0));

        for mu in [1, 7, 40] {
            let p = make_params(mu).unwrap();
            let s = walk_outcomes(0.0, &p, &[Outcome::Zero, Outcome::One, Outcome::One]);
            assert_eq!((s.alpha, s.beta), (1.0, 0.0));
        }

        let s = walk_outcomes(FRAC_PI_4, &p, &[Outcome::Zero, Outcome::One]);
        assert!((s.alpha - FRAC_PI_4.cos()).abs() < TOL);
        assert!((s.beta - FRAC_PI_4.sin()).abs() < TOL);
    }

    #[test]
    fn null_branch_is_refused() {
        let p = make_params(1).unwrap();
        let s = WalkState {
            alpha: 0.0,
            beta: 0.0,
            j0: 0,
            j1: 0,
            phi: 0.0,
        };
        assert!(matches!(update_on_outcome(&s, &p, Outcome::Zero), Err(Error::DegenerateOutcome { .. })));
    }

    #[test]
    fn forced_walks_give_forced_verdicts() {
        let p = make_params(1).unwrap();
        let mut zeros = ForcedDraws::new(vec![0.0; 30]);
        let t = run_walk(0.0, &p, 30, &mut zeros).unwrap();
        assert_eq!((t.j0, t.j1), (30, 0));
        assert_eq!(t.verdict(), Verdict::Closer0);

        let mut ones = ForcedDraws::forcing(&[Outcome::One; 30]);
        let t = run_walk(FRAC_PI_2, &p, 30, &mut ones).unwrap();
        assert_eq!((t.j0, t.j1), (0, 30));
        assert_eq!(t.verdict(), Verdict::Closer1);
    }

    #[test]
    fn ties_read_as_closer_to_zero() {
        assert_eq!(Verdict::from_counts(5, 5), Verdict::Closer0);
        assert_eq!(Verdict::from_counts(4, 6), Verdict::Closer1);
    }

    #[test]
    fn zero_iterations_rejected() {
        let p = make_params(1).unwrap();
        assert!(run_walk(0.3, &p, 0, &mut TrialRng::new(1)).is_err());
    }

    #[test]
    fn trace_counts_match_steps() {
        let p = make_params(3).unwrap();
        let t = run_walk(0.6, &p, 257, &mut TrialRng::new(9)).unwrap();
        let ones = t.steps.iter().filter(|s| s.outcome == Outcome::One).count() as u64;
        assert_eq!(t.j1, ones);
        assert_eq!(t.j0 + t.j1, 257);
        let f = run_walk_final(0.6, &p, 257, &mut TrialRng::new(9)).unwrap();
        assert_eq!((f.j0, f.j1), (t.j0, t.j1));
        assert_eq!(f.alpha * f.alpha, t.final_pr_psi0());
    }

    #[test]
    fn closed_form_examples() {
        let p = make_params(1).unwrap();
        let cf = closed_form_probs(FRAC_PI_4, &p, 1, 0).unwrap();
        assert!((cf.pr_psi0 - 0.75).abs() < TOL);

        for k in [0, 1, 5, 300] {
            let cf = closed_form_probs(0.4, &p, k, k).unwrap();
            assert!((cf.pr_psi0 - 0.4f64.cos().powi(2)).abs() < 1e-10);
            assert!((cf.pr_ax0 + cf.pr_ax1 - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn closed_form_at_endpoints() {
        let p = make_params(4).unwrap();
        let cf = closed_form_probs(0.0, &p, 3, 9).unwrap();
        assert_eq!(cf.pr_psi1, 0.0);
        assert!((cf.pr_ax0 - p.theta0.cos().powi(2)).abs() < TOL);
        let cf = closed_form_probs(FRAC_PI_2, &p, 3, 9).unwrap();
        assert!(cf.pr_psi0 < 1e-30);
    }

    #[test]
    fn delta_form_examples() {
        let p = make_params(1).unwrap();
        let d = delta_form_probs(0.3, &p, 0).unwrap();
        assert!((d.pr_psi0 - 0.3f64.cos().powi(2)).abs() < TOL);

        let d = delta_form_probs(FRAC_PI_4, &p, -1).unwrap();
        assert!((d.pr_psi0 - 0.75).abs() < TOL);

        // tan φ = 1/3 puts the crossing of Pr(ax=0) = 1/2 at Δj = 2.
        let d = delta_form_probs((1.0f64 / 3.0).atan(), &p, 2).unwrap();
        assert!((d.pr_ax0 - 0.5).abs() < TOL);
    }

    #[test]
    fn delta_form_survives_long_walks() {
        let p = make_params(50).unwrap();
        for dj in [-100_000i64, -5_000, 5_000, 100_000] {
            let d = delta_form_probs(0.3, &p, dj).unwrap();
            assert!(d.pr_psi0.is_finite() && d.pr_psi1.is_finite());
            assert!((d.pr_psi0 + d.pr_psi1 - 1.0).abs() < TOL);
        }
        let d = delta_form_probs(FRAC_PI_2, &p, 10).unwrap();
        assert!(d.pr_psi0 < 1e-20);
    }

    #[test]
    fn drift_points_towards_the_nearer_pole() {
        for mu in [1, 5, 30] {
            let p = make_params(mu).unwrap();
            for phi in [0.05, 0.3, 0.7] {
                let (p0, p1) = outcome_probs(&prepare_analytic(phi, &p).unwrap(), &p);
                assert!(p1 - p0 < 0.0, "mu={mu} phi={phi}");
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn outcomes(max: usize) -> impl Strategy<Value = Vec<Outcome>> {
            prop::collection::vec(any::<bool>().prop_map(Outcome::from), 0..max)
        }

        proptest! {
            #[test]
            fn only_counts_matter(phi in 0.0..FRAC_PI_2, mu in 1u32..30, seq in outcomes(40), seed in any::<u64>()) {
                let p = make_params(mu).unwrap();
                let a = walk_outcomes(phi, &p, &seq);
                let mut shuffled = seq.clone();
                // deterministic Fisher-Yates from the seed
                let mut rng = TrialRng::new(seed);
                for i in (1..shuffled.len()).rev() {
                    let j = (rng.next_uniform() * (i + 1) as f64) as usize;
                    shuffled.swap(i, j);
                }
                let b = walk_outcomes(phi, &p, &shuffled);
                prop_assert!((a.pr_psi0() - b.pr_psi0()).abs() < 1e-10);
            }

            #[test]
            fn closed_form_tracks_recurrence(phi in 0.0..FRAC_PI_2, mu in 1u32..30, seq in outcomes(50)) {
                let p = make_params(mu).unwrap();
                let s = walk_outcomes(phi, &p, &seq);
                let cf = closed_form_probs(phi, &p, s.j0, s.j1).unwrap();
                let df = delta_form_probs(phi, &p, s.delta_j()).unwrap();
                let (p0, _) = outcome_probs(&s, &p);
                prop_assert!((cf.pr_psi0 - s.pr_psi0()).abs() < 1e-9);
                prop_assert!((cf.pr_ax0 - p0).abs() < 1e-9);
                prop_assert!((df.pr_psi0 - cf.pr_psi0).abs() < 1e-10);
                prop_assert!((df.pr_ax0 - cf.pr_ax0).abs() < 1e-10);
            }

            #[test]
            fn norm_is_preserved(phi in 0.0..FRAC_PI_2, mu in 1u32..200, seed in any::<u64>()) {
                let p = make_params(mu).unwrap();
                let s = run_walk_final(phi, &p, 10_000, &mut TrialRng::new(seed)).unwrap();
                prop_assert!((s.alpha * s.alpha + s.beta * s.beta - 1.0).abs() < 1e-10);
                prop_assert!(s.alpha >= 0.0 && s.beta >= 0.0);
            }
        }
    }
}
