mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mbqrw_core::harness::{run_experiment, ExperimentConfig, Mode, PhiGrid};
use mbqrw_core::verify::run_invariant_suite;
use mbqrw_core::Error;

use crate::config::FileConfig;

const DEFAULT_MU: &[u32] = &[1, 10, 50];
const DEFAULT_ITERATIONS: u64 = 100;
const DEFAULT_GRID: &str = "0:1:0.01";
const FULL_GRID: &str = "0:1:0.001";
const DEFAULT_TRIALS: u64 = 1000;
const DEFAULT_SEED: u64 = 42;

const EXIT_INVALID: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

/// Measurement-based quantum random walk experiments.
#[derive(Parser, Debug)]
#[command(name = "mbqrw", version)]
struct Cli {
    /// Flat key=value file with defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte-Carlo success and disturbance over a grid of sin²φ.
    Sweep(GridArgs),
    /// Per-step log of one walk.
    Trace(TraceArgs),
    /// Model curves only, no sampling.
    Model(GridArgs),
    /// Run the invariant suite; exits 4 on any failure.
    Verify,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Comma-separated dummy-qubit counts.
    #[arg(long, value_delimiter = ',')]
    mu: Option<Vec<u32>>,
    /// Measurements per walk (J, even).
    #[arg(long)]
    iterations: Option<u64>,
    /// sin²φ range as start:stop:step.
    #[arg(long, conflicts_with = "phi")]
    grid: Option<String>,
    /// Explicit comma-separated φ values in radians.
    #[arg(long, value_delimiter = ',')]
    phi: Option<Vec<f64>>,
    /// Trials per grid point (sweep only).
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Full-scale grid (sin²φ step 0.001).
    #[arg(long)]
    full: bool,
    /// Run trials on one thread.
    #[arg(long)]
    serial: bool,
}

#[derive(Args, Debug)]
struct TraceArgs {
    #[arg(long)]
    mu: Option<u32>,
    /// Initial angle in radians.
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn grid_config(args: GridArgs, file: &FileConfig, mode: Mode) -> Result<ExperimentConfig, Error> {
    let full = args.full || file.flag("full")?;
    let phi_grid = match (args.grid, args.phi) {
        (Some(g), _) => PhiGrid::parse_range(&g)?,
        (None, Some(p)) => PhiGrid::Explicit(p),
        (None, None) => match (file.raw("grid"), file.get_list::<f64>("phi")?) {
            (Some(g), _) => PhiGrid::parse_range(g)?,
            (None, Some(p)) => PhiGrid::Explicit(p),
            (None, None) => PhiGrid::parse_range(if full { FULL_GRID } else { DEFAULT_GRID })?,
        },
    };
    Ok(ExperimentConfig {
        mu_list: match args.mu {
            Some(m) => m,
            None => file.get_list("mu")?.unwrap_or_else(|| DEFAULT_MU.to_vec()),
        },
        iterations: args.iterations.or(file.get("iterations")?).unwrap_or(DEFAULT_ITERATIONS),
        phi_grid,
        trials_per_point: args.trials.or(file.get("trials")?).unwrap_or(DEFAULT_TRIALS),
        master_seed: args.seed.or(file.get("seed")?).unwrap_or(DEFAULT_SEED),
        output_path: args.out.or(file.get("out")?),
        mode,
        parallel: !(args.serial || file.flag("serial")?),
    })
}

fn trace_config(args: TraceArgs, file: &FileConfig) -> Result<ExperimentConfig, Error> {
    let mu = match args.mu.or(file.get("mu")?) {
        Some(m) => m,
        None => return Err(Error::InvalidParameter("trace needs --mu".into())),
    };
    let phi = match args.phi.or(file.get("phi")?) {
        Some(p) => p,
        None => return Err(Error::InvalidParameter("trace needs --phi".into())),
    };
    Ok(ExperimentConfig {
        mu_list: vec![mu],
        iterations: args.iterations.or(file.get("iterations")?).unwrap_or(DEFAULT_ITERATIONS),
        phi_grid: PhiGrid::Explicit(vec![phi]),
        trials_per_point: 1,
        master_seed: args.seed.or(file.get("seed")?).unwrap_or(DEFAULT_SEED),
        output_path: args.out.or(file.get("out")?),
        mode: Mode::SingleTrace,
        parallel: false,
    })
}

fn run_config(cfg: ExperimentConfig) -> Result<(), Error> {
    let output = run_experiment(&cfg)?;
    if cfg.output_path.is_none() {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        output
            .write_csv(&mut lock)
            .and_then(|_| lock.flush())
            .map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })?;
    }
    Ok(())
}

fn verify() -> ExitCode {
    let results = run_invariant_suite();
    let failed = results.iter().filter(|r| !r.passed).count();
    for r in &results {
        println!("[{}] {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    if failed > 0 {
        eprintln!("{failed} invariant check(s) failed");
        ExitCode::from(EXIT_INVARIANT)
    } else {
        ExitCode::SUCCESS
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } => EXIT_IO,
        Error::DegenerateOutcome { .. } | Error::EngineDivergence { .. } => EXIT_INVARIANT,
        _ => EXIT_INVALID,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match cli.config.as_deref().map(FileConfig::load).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(e) => {
            eprintln!("mbqrw: {e}");
            // An unreadable config file is a configuration problem, not an output failure.
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let result = match cli.command {
        Command::Verify => return verify(),
        Command::Sweep(a) => grid_config(a, &file, Mode::Sweep).and_then(run_config),
        Command::Model(a) => grid_config(a, &file, Mode::ModelOnly).and_then(run_config),
        Command::Trace(a) => trace_config(a, &file).and_then(run_config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mbqrw: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
