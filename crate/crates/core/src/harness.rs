//! Seeded Monte-Carlo experiments over grids of φ and μ, with plot-ready
//! CSV output.
//!
//! A trial counts as a success when the strict majority of outcomes points
//! at the nearer pole: `j0 > j1` for φ < π/4, `j1 > j0` for φ > π/4. Ties
//! are failures except at φ = π/4, where every trial is scored correct and
//! the point is flagged `balanced`.

use std::f64::consts::FRAC_PI_4;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::analysis::{disturbance, partial_gain};
use crate::error::{invalid, Error, Result};
use crate::params::{check_phi, is_balanced, make_params, WalkParams};
use crate::rng::{derive_trial_seed, TrialRng, RNG_FAMILY};
use crate::walk::{run_walk, run_walk_final, Verdict, WalkTrace};

pub const SWEEP_HEADER: &str =
    "mu,J,phi,sin2phi,trials,j0_mean,empirical_success,se,model_success,empirical_disturbance,model_disturbance";
pub const TRACE_HEADER: &str = "step,outcome,j0,j1,delta_j,pr_psi0,pr_ax0";
pub const MODEL_HEADER: &str = "mu,J,phi,sin2phi,model_success,model_disturbance,model_pr_ax0,model_tail";

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub phi: f64,
    pub sin2phi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PhiGrid {
    /// Evenly spaced values of sin²φ, inclusive of both ends.
    Sin2Range { start: f64, stop: f64, step: f64 },
    Explicit(Vec<f64>),
}

impl PhiGrid {
    /// Parses `start:stop:step` over sin²φ.
    pub fn parse_range(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(invalid(format!("grid '{spec}' is not start:stop:step")));
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("grid '{spec}': '{s}' is not a number")))
        };
        let grid = PhiGrid::Sin2Range {
            start: num(parts[0])?,
            stop: num(parts[1])?,
            step: num(parts[2])?,
        };
        grid.points()?;
        Ok(grid)
    }

    pub fn points(&self) -> Result<Vec<GridPoint>> {
        match *self {
            PhiGrid::Sin2Range { start, stop, step } => {
                if step.is_nan() || step <= 0.0 || !step.is_finite() {
                    return Err(invalid(format!("grid step {step} must be positive")));
                }
                if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) || start > stop {
                    return Err(invalid(format!("sin^2 range {start}..{stop} must lie in [0, 1]")));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                Ok((0..n)
                    .map(|i| {
                        let s = (start + i as f64 * step).min(stop);
                        GridPoint {
                            phi: s.sqrt().asin(),
                            sin2phi: s,
                        }
                    })
                    .collect())
            }
            PhiGrid::Explicit(ref phis) => {
                if phis.is_empty() {
                    return Err(invalid("explicit phi grid is empty"));
                }
                phis.iter()
                    .map(|&phi| {
                        check_phi(phi)?;
                        Ok(GridPoint {
                            phi,
                            sin2phi: phi.sin().powi(2),
                        })
                    })
                    .collect()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sweep,
    SingleTrace,
    ModelOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub mu_list: Vec<u32>,
    pub iterations: u64,
    pub phi_grid: PhiGrid,
    pub trials_per_point: u64,
    pub master_seed: u64,
    pub output_path: Option<PathBuf>,
    pub mode: Mode,
    /// Run trials on the rayon pool. Output is identical either way.
    pub parallel: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mu_list.is_empty() {
            return Err(invalid("mu list is empty"));
        }
        for &mu in &self.mu_list {
            make_params(mu)?;
        }
        if self.trials_per_point == 0 {
            return Err(invalid("trials per point must be at least 1"));
        }
        if self.iterations == 0 {
            return Err(invalid("iteration count must be at least 1"));
        }
        if self.mode != Mode::SingleTrace && !self.iterations.is_multiple_of(2) {
            return Err(invalid(format!(
                "iteration count J = {} must be even for the success model",
                self.iterations
            )));
        }
        let points = self.phi_grid.points()?;
        if self.mode == Mode::SingleTrace && (self.mu_list.len() != 1 || points.len() != 1) {
            return Err(invalid("a single trace takes exactly one mu and one phi"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialRecord {
    pub mu: u32,
    pub phi: f64,
    pub seed: u64,
    pub j0: u64,
    pub j1: u64,
    pub verdict: Verdict,
    pub tie: bool,
    pub final_pr_psi0: f64,
    pub disturbance: f64,
}

impl TrialRecord {
    pub fn correct(&self) -> bool {
        if is_balanced(self.phi) {
            true
        } else if self.phi < FRAC_PI_4 {
            self.j0 > self.j1
        } else {
            self.j1 > self.j0
        }
    }
}

pub fn run_trial(params: &WalkParams, phi: f64, iterations: u64, seed: u64) -> Result<TrialRecord> {
    let state = run_walk_final(phi, params, iterations, &mut TrialRng::new(seed))?;
    let final_pr_psi0 = state.pr_psi0();
    Ok(TrialRecord {
        mu: params.mu,
        phi,
        seed,
        j0: state.j0,
        j1: state.j1,
        verdict: Verdict::from_counts(state.j0, state.j1),
        tie: state.j0 == state.j1,
        final_pr_psi0,
        disturbance: disturbance(phi, final_pr_psi0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub mu: u32,
    pub iterations: u64,
    pub phi: f64,
    pub sin2phi: f64,
    pub balanced: bool,
    pub trials: u64,
    pub successes: u64,
    pub ties: u64,
    pub j0_mean: f64,
    pub empirical_success: f64,
    pub standard_error: f64,
    pub model_success: f64,
    pub empirical_disturbance_mean: f64,
    /// Standard error of the mean disturbance (sample standard deviation / √n).
    pub disturbance_se: f64,
    pub model_disturbance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
}

fn map_trials<F>(n: u64, parallel: bool, f: F) -> Result<Vec<TrialRecord>>
where
    F: Fn(u64) -> Result<TrialRecord> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..n).map(f).collect()
}

/// Folds trial records in index order, so serial and parallel runs agree
/// bit for bit.
fn aggregate(params: &WalkParams, point: GridPoint, iterations: u64, trials: &[TrialRecord]) -> Result<SweepPoint> {
    let n = trials.len() as u64;
    let nf = n as f64;
    let successes = trials.iter().filter(|t| t.correct()).count() as u64;
    let ties = trials.iter().filter(|t| t.tie).count() as u64;
    let j0_sum: u64 = trials.iter().map(|t| t.j0).sum();
    let d_sum: f64 = trials.iter().map(|t| t.disturbance).sum();
    let d_mean = d_sum / nf;
    let d_var = if n > 1 {
        trials.iter().map(|t| (t.disturbance - d_mean).powi(2)).sum::<f64>() / (nf - 1.0)
    } else {
        0.0
    };
    let p = successes as f64 / nf;
    let model = partial_gain(point.phi, params, iterations)?;
    Ok(SweepPoint {
        mu: params.mu,
        iterations,
        phi: point.phi,
        sin2phi: point.sin2phi,
        balanced: is_balanced(point.phi),
        trials: n,
        successes,
        ties,
        j0_mean: j0_sum as f64 / nf,
        empirical_success: p,
        standard_error: (p * (1.0 - p) / nf).sqrt(),
        model_success: model.success,
        empirical_disturbance_mean: d_mean,
        disturbance_se: (d_var / nf).sqrt(),
        model_disturbance: model.expected_disturbance,
    })
}

pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let grid = config.phi_grid.points()?;
    let mut points = Vec::with_capacity(grid.len() * config.mu_list.len());
    for (mu_index, &mu) in config.mu_list.iter().enumerate() {
        let params = make_params(mu)?;
        for (phi_index, &point) in grid.iter().enumerate() {
            let trials = map_trials(config.trials_per_point, config.parallel, |t| {
                let seed = derive_trial_seed(config.master_seed, mu_index as u64, phi_index as u64, t);
                run_trial(&params, point.phi, config.iterations, seed)
            })?;
            points.push(aggregate(&params, point, config.iterations, &trials)?);
        }
    }
    Ok(SweepResult { points })
}

pub fn write_sweep_csv<W: Write>(result: &SweepResult, mut w: W) -> io::Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for p in &result.points {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            p.mu,
            p.iterations,
            fmt_f64(p.phi),
            fmt_f64(p.sin2phi),
            p.trials,
            fmt_f64(p.j0_mean),
            fmt_f64(p.empirical_success),
            fmt_f64(p.standard_error),
            fmt_f64(p.model_success),
            fmt_f64(p.empirical_disturbance_mean),
            fmt_f64(p.model_disturbance),
        )?;
    }
    Ok(())
}

/// Runs one walk seeded directly with `seed` (no per-trial derivation).
pub fn run_single_trace(mu: u32, phi: f64, iterations: u64, seed: u64) -> Result<WalkTrace> {
    let params = make_params(mu)?;
    run_walk(phi, &params, iterations, &mut TrialRng::new(seed))
}

/// One row per step: the outcome drawn, the counters after it, `Pr(ψ0)`
/// after the update and the `Pr(ax=0)` the draw was made against.
pub fn write_trace_csv<W: Write>(trace: &WalkTrace, mut w: W) -> io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    let (mut j0, mut j1) = (0u64, 0u64);
    for (i, s) in trace.steps.iter().enumerate() {
        match s.outcome.bit() {
            0 => j0 += 1,
            _ => j1 += 1,
        }
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            i + 1,
            s.outcome.bit(),
            j0,
            j1,
            j1 as i64 - j0 as i64,
            fmt_f64(s.alpha_after * s.alpha_after),
            fmt_f64(s.p0_before),
        )?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelRow {
    pub mu: u32,
    pub iterations: u64,
    pub phi: f64,
    pub sin2phi: f64,
    pub model_success: f64,
    pub model_disturbance: f64,
    pub model_pr_ax0: f64,
    pub model_tail: f64,
}

pub fn emit_model_curves(mu_list: &[u32], iterations: u64, grid: &PhiGrid) -> Result<Vec<ModelRow>> {
    let points = grid.points()?;
    let mut rows = Vec::with_capacity(points.len() * mu_list.len());
    for &mu in mu_list {
        let params = make_params(mu)?;
        for pt in &points {
            let m = partial_gain(pt.phi, &params, iterations)?;
            rows.push(ModelRow {
                mu,
                iterations,
                phi: pt.phi,
                sin2phi: pt.sin2phi,
                model_success: m.success,
                model_disturbance: m.expected_disturbance,
                model_pr_ax0: m.p0_model,
                model_tail: m.tail,
            });
        }
    }
    Ok(rows)
}

pub fn write_model_csv<W: Write>(rows: &[ModelRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{MODEL_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.mu,
            r.iterations,
            fmt_f64(r.phi),
            fmt_f64(r.sin2phi),
            fmt_f64(r.model_success),
            fmt_f64(r.model_disturbance),
            fmt_f64(r.model_pr_ax0),
            fmt_f64(r.model_tail),
        )?;
    }
    Ok(())
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Path of the provenance sidecar written next to a CSV file.
pub fn metadata_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

fn write_outputs(path: &Path, config: &ExperimentConfig, body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(io_err(path))?;

    let meta = metadata_path(path);
    let mode = match config.mode {
        Mode::Sweep => "sweep",
        Mode::SingleTrace => "trace",
        Mode::ModelOnly => "model",
    };
    let text = format!(
        "generator=mbqrw-core {}\nmode={mode}\nrng={RNG_FAMILY}\nseed_derivation={}\nmaster_seed={}\n",
        env!("CARGO_PKG_VERSION"),
        match config.mode {
            Mode::SingleTrace => "trace seeded directly with master_seed",
            _ => "splitmix64 fold of (master_seed, mu_index, phi_index, trial_index)",
        },
        config.master_seed,
    );
    std::fs::write(&meta, text).map_err(io_err(&meta))
}

/// Runs the experiment selected by `config.mode` and writes the CSV (plus
/// a `.meta` sidecar) when an output path is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let output = match config.mode {
        Mode::Sweep => ExperimentOutput::Sweep(run_sweep(config)?),
        Mode::ModelOnly => ExperimentOutput::Model(emit_model_curves(&config.mu_list, config.iterations, &config.phi_grid)?),
        Mode::SingleTrace => {
            let phi = config.phi_grid.points()?[0].phi;
            ExperimentOutput::Trace(run_single_trace(config.mu_list[0], phi, config.iterations, config.master_seed)?)
        }
    };
    if let Some(path) = &config.output_path {
        write_outputs(path, config, |w| output.write_csv(w))?;
    }
    Ok(output)
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExperimentOutput {
    Sweep(SweepResult),
    Trace(WalkTrace),
    Model(Vec<ModelRow>),
}

impl ExperimentOutput {
    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        match self {
            ExperimentOutput::Sweep(r) => write_sweep_csv(r, w),
            ExperimentOutput::Trace(t) => write_trace_csv(t, w),
            ExperimentOutput::Model(rows) => write_model_csv(rows, w),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn config(mu: Vec<u32>, phis: Vec<f64>, trials: u64, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            mu_list: mu,
            iterations: 100,
            phi_grid: PhiGrid::Explicit(phis),
            trials_per_point: trials,
            master_seed: seed,
            output_path: None,
            mode: Mode::Sweep,
            parallel: true,
        }
    }

    #[test]
    fn grid_parsing() {
        let g = PhiGrid::parse_range("0:1:0.01").unwrap();
        let pts = g.points().unwrap();
        assert_eq!(pts.len(), 101);
        assert_eq!(pts[0].phi, 0.0);
        assert_eq!(pts[100].phi, FRAC_PI_2);
        assert!(is_balanced(pts[50].phi));
        assert_eq!(PhiGrid::parse_range("0:1:0.001").unwrap().points().unwrap().len(), 1001);
        assert!(PhiGrid::parse_range("0:1").is_err());
        assert!(PhiGrid::parse_range("0:1:0").is_err());
        assert!(PhiGrid::parse_range("0:1.5:0.1").is_err());
        assert!(PhiGrid::parse_range("a:1:0.1").is_err());
        assert!(PhiGrid::Explicit(vec![2.0]).points().is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = config(vec![1], vec![0.0], 10, 1);
        assert!(c.validate().is_ok());
        c.iterations = 99;
        assert!(c.validate().is_err());
        c.mode = Mode::SingleTrace;
        assert!(c.validate().is_ok());
        c.mu_list = vec![1, 2];
        assert!(c.validate().is_err());
        let mut c = config(vec![0], vec![0.0], 10, 1);
        assert!(c.validate().is_err());
        c.mu_list = vec![1];
        c.trials_per_point = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn scoring_rule() {
        let mk = |phi: f64, j0, j1| TrialRecord {
            mu: 1,
            phi,
            seed: 0,
            j0,
            j1,
            verdict: Verdict::from_counts(j0, j1),
            tie: j0 == j1,
            final_pr_psi0: 0.0,
            disturbance: 0.0,
        };
        assert!(mk(0.1, 51, 49).correct());
        assert!(!mk(0.1, 50, 50).correct());
        assert!(mk(1.2, 49, 51).correct());
        assert!(!mk(1.2, 50, 50).correct());
        assert!(mk(FRAC_PI_4, 50, 50).correct());
        assert!(mk(FRAC_PI_4, 10, 90).correct());
    }

    #[test]
    fn trial_record_invariants() {
        let p = make_params(3).unwrap();
        let t = run_trial(&p, 0.5, 100, 99).unwrap();
        assert_eq!(t.j0 + t.j1, 100);
        assert!((t.disturbance - (0.5f64.cos().powi(2) - t.final_pr_psi0).abs()).abs() < 1e-12);
    }

    #[test]
    fn collapse_at_the_pole_for_one_dummy() {
        let r = run_sweep(&config(vec![1], vec![0.0], 200, 7)).unwrap();
        assert!(r.points[0].empirical_success >= 0.99);
    }

    #[test]
    fn balanced_point_raw_majority_is_fair() {
        let r = run_sweep(&config(vec![1], vec![FRAC_PI_4], 1000, 3)).unwrap();
        let pt = r.points[0];
        assert_eq!(pt.empirical_success, 1.0);
        // raw Pr(j0 > j1) from the mean of the counters
        let trials: Vec<_> = (0..1000)
            .map(|t| run_trial(&make_params(1).unwrap(), FRAC_PI_4, 100, derive_trial_seed(3, 0, 0, t)).unwrap())
            .collect();
        let raw = trials.iter().filter(|t| t.j0 > t.j1).count() as f64 / 1000.0;
        let decided = trials.iter().filter(|t| !t.tie).count() as f64 / 1000.0;
        let se = (0.25f64 / 1000.0).sqrt();
        assert!((raw - decided / 2.0).abs() <= 3.0 * se, "raw = {raw}");
    }

    #[test]
    fn sweep_csv_shape() {
        let mut c = config(vec![1, 4], vec![], 20, 11);
        c.phi_grid = PhiGrid::parse_range("0:1:0.25").unwrap();
        let r = run_sweep(&c).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SWEEP_HEADER);
        assert_eq!(lines.len(), 1 + 2 * 5);
        assert!(lines[1].starts_with("1,100,0.0000000000000000e0,"));
        for l in &lines[1..] {
            assert_eq!(l.split(',').count(), 11);
        }
    }

    #[test]
    fn serial_and_parallel_agree() {
        let mut c = config(vec![2, 9], vec![0.2, 0.9, 1.4], 300, 5);
        let par = run_sweep(&c).unwrap();
        c.parallel = false;
        let ser = run_sweep(&c).unwrap();
        assert_eq!(par, ser);
    }

    #[test]
    fn trace_csv_rows() {
        let t = run_single_trace(10, std::f64::consts::FRAC_PI_6, 200, 7).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], TRACE_HEADER);
        assert_eq!(lines.len(), 201);
        let last: Vec<&str> = lines[200].split(',').collect();
        assert_eq!(last[0], "200");
        assert_eq!(last[2].parse::<u64>().unwrap(), t.j0);
        assert_eq!(last[4].parse::<i64>().unwrap(), t.delta_j());
    }

    #[test]
    fn model_rows() {
        let g = PhiGrid::parse_range("0:1:0.1").unwrap();
        let rows = emit_model_curves(&[1], 100, &g).unwrap();
        assert_eq!(rows.len(), 11);
        assert!((rows[5].model_success - 0.5).abs() < 1e-15);
        assert!(rows[0].model_success > 0.999);
        let mut buf = Vec::new();
        write_model_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 12);
        assert_eq!(text.lines().next().unwrap(), MODEL_HEADER);
    }

    #[test]
    fn unwritable_output_is_io_error() {
        let mut c = config(vec![1], vec![0.3], 2, 1);
        c.output_path = Some(PathBuf::from("/nonexistent-dir/for/sure/out.csv"));
        assert!(matches!(run_experiment(&c), Err(Error::Io { .. })));
    }
}
