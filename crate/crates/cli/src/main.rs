//! `specfact`: spectral factors, single-pair estimate checks, family sweeps
//! and constants from the command line.
//!
//! Exit codes: 0 success, 1 violation or failed computation, 2 malformed
//! input, 3 violated hypothesis.

mod commands;
mod run;
mod sources;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use specfact::bounds::{TheoremKind, VIOLATION_TOLERANCE};
use specfact::families::{FamilyId, SweepConfig};

use run::{read_json, CliError, RunConfig, Status};

#[derive(Parser)]
#[command(
    name = "specfact",
    version,
    about = "Spectral factorization and continuity-bound checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Output {
    /// Output directory.
    #[arg(long, env = "SPECFACT_OUT_DIR", default_value = "specfact-out")]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct Params {
    /// Builtin generator, or `file` to read densities from --input/--input-g.
    #[arg(long)]
    family: String,
    /// Grid size N (a power of two for the FFT paths).
    #[arg(long)]
    grid_n: Option<usize>,
    /// Arc parameter of the examples, or the perturbation size of `random`.
    #[arg(long, default_value_t = 1e-2)]
    eps: f64,
    #[arg(long, default_value_t = 2.0)]
    p0: f64,
    #[arg(long, default_value_t = 2.0)]
    p1: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Off-arc parameter of the examples.
    #[arg(long)]
    delta: Option<f64>,
    /// Matrix size of the random densities.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Polynomial degree of the random densities.
    #[arg(long, default_value_t = 4)]
    degree: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Density file (circle CSV).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Second density file for pairs.
    #[arg(long)]
    input_g: Option<PathBuf>,
    /// Iteration cap of the matrix factorizer.
    #[arg(long)]
    max_iterations: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Factorize a density and write the factor samples and a summary.
    Factor {
        #[command(flatten)]
        params: Params,
        /// Write only factor.json, not the factor samples.
        #[arg(long)]
        summary_only: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Compare ‖F⁺ − G⁺‖² with one or more right-hand sides.
    Verify {
        #[command(flatten)]
        params: Params,
        /// Estimate ids, e.g. thm1.3,thm1.3-inf.
        #[arg(long, value_delimiter = ',', required = true)]
        theorem: Vec<String>,
        #[arg(long, default_value_t = VIOLATION_TOLERANCE)]
        tolerance: f64,
        /// Repeat on the doubled grid even without a violation.
        #[arg(long)]
        always_double: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Run a family sweep from a JSON config or from flags.
    Sweep {
        /// Sweep config; flags given alongside override its fields.
        config: Option<PathBuf>,
        /// ex1, ex2 or scalar6.
        #[arg(long)]
        family: Option<String>,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        theorem: Option<Vec<String>>,
        #[arg(long)]
        p0: Option<f64>,
        #[arg(long)]
        p1: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        grid_n: Option<usize>,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Print K and K0 with the reference comparisons.
    Constants,
    /// Run the randomized property suites.
    Selftest {
        /// Suite names; all suites when omitted.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
        #[arg(long, default_value_t = specfact::properties::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = specfact::properties::DEFAULT_CASES)]
        cases: usize,
        /// Also write selftest.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rerun the invocation recorded in a factor.json, verify.json or sweep
    /// summary.
    Replay {
        report: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn parse_theorems(ids: &[String]) -> Result<Vec<TheoremKind>, CliError> {
    ids.iter()
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|e: specfact::bounds::BoundsError| CliError::Parse(e.to_string()))
        })
        .collect()
}

fn run_config(command: &str, params: Params, out: PathBuf) -> RunConfig {
    RunConfig {
        grid_n: params.grid_n,
        eps: params.eps,
        p0: params.p0,
        p1: params.p1,
        alpha: params.alpha,
        delta: params.delta,
        dim: params.dim,
        degree: params.degree,
        seed: params.seed,
        input: params.input,
        input_g: params.input_g,
        max_iterations: params.max_iterations,
        ..RunConfig::new(command, &params.family, out)
    }
}

#[allow(clippy::too_many_arguments)]
fn sweep_config(
    path: Option<PathBuf>,
    family: Option<String>,
    eps: Option<Vec<f64>>,
    theorem: Option<Vec<String>>,
    p0: Option<f64>,
    p1: Option<f64>,
    alpha: Option<f64>,
    delta: Option<f64>,
    grid_n: Option<usize>,
    tolerance: Option<f64>,
) -> Result<SweepConfig, CliError> {
    let family = family
        .map(|f| {
            f.parse::<FamilyId>()
                .map_err(|e| CliError::Parse(e.to_string()))
        })
        .transpose()?;
    let mut config = match (path, family) {
        (Some(path), family) => {
            let mut c: SweepConfig = read_json(&path)?;
            if let Some(f) = family {
                c.family = f;
            }
            c
        }
        (None, Some(f)) => SweepConfig::new(f),
        (None, None) => {
            return Err(CliError::Parse(
                "sweep needs a config file or --family".into(),
            ))
        }
    };
    if eps.is_some() {
        config.eps = eps;
    }
    if let Some(ids) = theorem {
        config.theorems = Some(parse_theorems(&ids)?);
    }
    config.p0 = p0.unwrap_or(config.p0);
    config.p1 = p1.unwrap_or(config.p1);
    config.alpha = alpha.unwrap_or(config.alpha);
    config.delta = delta.or(config.delta);
    config.grid_size = grid_n.or(config.grid_size);
    config.tolerance = tolerance.unwrap_or(config.tolerance);
    Ok(config)
}

fn dispatch(command: Command) -> Result<Status, CliError> {
    match command {
        Command::Factor {
            params,
            summary_only,
            output,
        } => {
            let mut run = run_config("factor", params, output.out);
            run.summary_only = summary_only;
            commands::factor(&run)
        }
        Command::Verify {
            params,
            theorem,
            tolerance,
            always_double,
            output,
        } => {
            let mut run = run_config("verify", params, output.out);
            run.theorems = parse_theorems(&theorem)?;
            run.tolerance = tolerance;
            run.always_double = always_double;
            commands::verify(&run)
        }
        Command::Sweep {
            config,
            family,
            eps,
            theorem,
            p0,
            p1,
            alpha,
            delta,
            grid_n,
            tolerance,
            jobs,
            output,
        } => {
            let config = sweep_config(
                config, family, eps, theorem, p0, p1, alpha, delta, grid_n, tolerance,
            )?;
            commands::sweep(&config, jobs, &output.out)
        }
        Command::Constants => Ok(commands::constants()),
        Command::Selftest {
            suite,
            seed,
            cases,
            out,
        } => commands::selftest(&suite, seed, cases, out.as_deref()),
        Command::Replay { report, out, jobs } => commands::replay(&report, out.as_deref(), jobs),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(Status::Clean) => ExitCode::SUCCESS,
        Ok(Status::Violation) => ExitCode::from(1),
        Ok(Status::Precondition(message)) => {
            eprintln!("precondition failed: {message}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
