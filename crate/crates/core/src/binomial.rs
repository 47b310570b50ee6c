//! Binomial upper tails evaluated term by term in log space.

use crate::error::{invalid, Result};

/// Largest trial count evaluated exactly; no normal approximation beyond it.
pub const MAX_TRIALS: u64 = 10_000;

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn ln_factorials(n: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = CompensatedSum::default();
    out.push(0.0);
    for i in 1..=n {
        acc.add((i as f64).ln());
        out.push(acc.value());
    }
    out
}

/// `Pr(X > k)` for `X ~ Binomial(n, p)`.
pub fn upper_tail(n: u64, p: f64, k: u64) -> Result<f64> {
    if n > MAX_TRIALS {
        return Err(invalid(format!("binomial tail limited to n <= {MAX_TRIALS}, got {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("success probability {p} outside [0, 1]")));
    }
    if k >= n {
        return Ok(0.0);
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let lf = ln_factorials(n);
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let terms: Vec<f64> = (k + 1..=n)
        .map(|i| {
            let (i_, n_) = (i as usize, n as usize);
            lf[n_] - lf[i_] - lf[n_ - i_] + i as f64 * lp + (n - i) as f64 * lq
        })
        .collect();
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut acc = CompensatedSum::default();
    for t in &terms {
        acc.add((t - m).exp());
    }
    Ok((m.exp() * acc.value()).clamp(0.0, 1.0))
}
