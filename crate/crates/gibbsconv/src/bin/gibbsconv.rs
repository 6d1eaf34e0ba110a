//! Command-line front end for the scenario runners.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure
//! (non-convergence, resource guard, failed optimization), 4 verification
//! sweep reported a failing bound.

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gibbsconv::error::Error;
use gibbsconv::scenarios::{
    cmd_appendix, cmd_convolve, cmd_derivative, cmd_entropy, cmd_iterate, cmd_periodic,
    cmd_variational, verify_all, Config, PotentialSpec, ScenarioResult,
};

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "gibbsconv",
    about = "Gibbs measures for the doubling map: convolution, entropy, and regularity diagnostics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Jacobian grid resolution: 2^GRID sample points.
    #[arg(long, global = true, default_value_t = 12)]
    grid: u32,

    /// Dyadic atom level: measures carry 2^LEVEL atoms.
    #[arg(long, global = true, default_value_t = 14)]
    level: u32,

    /// Eigen-solver tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,

    /// Finite-difference step for derivative checks.
    #[arg(long, global = true, default_value_t = 1e-4)]
    fd_step: f64,

    /// Descent step budget for the variational minimizer.
    #[arg(long, global = true, default_value_t = 2000)]
    steps: usize,

    /// Seed for randomized audits.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entropy and regularity of a single Gibbs measure.
    Entropy {
        /// Potential: family[:param] or inline JSON.
        spec: String,
    },
    /// Convolve two Gibbs measures and audit the entropy identity.
    Convolve {
        spec1: String,
        /// Second potential; ignored with --mu2-periodic-third.
        #[arg(default_value = "cosine:0.3")]
        spec2: String,
        /// Use the period-2 orbit measure (atoms at 1/3, 2/3) as the second factor.
        #[arg(long)]
        mu2_periodic_third: bool,
    },
    /// Convolve with the period-2 orbit measure: fixed-point and two-valued cases.
    Periodic { spec: String },
    /// Iterated self-convolution toward Lebesgue measure.
    Iterate {
        spec: String,
        #[arg(long, default_value_t = 10)]
        k_max: u32,
    },
    /// Variational descent to the entropy with a randomized lower-bound audit.
    Variational { spec: String },
    /// Entropy derivative along a Gibbs curve, formula vs finite difference.
    Derivative {
        spec1: String,
        spec2: String,
        /// Perturbation direction: constant, cos:K, or sin:K (K <= 4).
        #[arg(long, default_value = "cos:2")]
        direction: String,
    },
    /// Affine blend path: dominance, monotone entropy, tangent identities.
    Appendix {
        spec1: String,
        spec2: String,
        #[arg(long, default_value_t = 21)]
        t_steps: usize,
    },
    /// Run the full verification sweep; prints one line per bound.
    VerifyAll,
}

fn emit(result: &ScenarioResult, fmt: Format, out: Option<&std::path::Path>) -> gibbsconv::Result<()> {
    let text = match fmt {
        Format::Json => result.to_json_string()?,
        Format::Csv => result.to_csv(),
    };
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> gibbsconv::Result<bool> {
    let cfg = Config {
        grid: cli.grid,
        level: cli.level,
        tol: cli.tol,
        fd_step: cli.fd_step,
        steps: cli.steps,
        seed: cli.seed,
    };
    if !(2..=24).contains(&cfg.grid) {
        return Err(Error::Validation(format!(
            "--grid must lie in 2..=24, got {}",
            cfg.grid
        )));
    }
    if !(1..=24).contains(&cfg.level) {
        return Err(Error::Validation(format!(
            "--level must lie in 1..=24, got {}",
            cfg.level
        )));
    }
    let result = match &cli.command {
        Command::Entropy { spec } => cmd_entropy(&PotentialSpec::parse(spec)?, &cfg)?,
        Command::Convolve {
            spec1,
            spec2,
            mu2_periodic_third,
        } => cmd_convolve(
            &PotentialSpec::parse(spec1)?,
            &PotentialSpec::parse(spec2)?,
            *mu2_periodic_third,
            &cfg,
        )?,
        Command::Periodic { spec } => cmd_periodic(&PotentialSpec::parse(spec)?, &cfg)?,
        Command::Iterate { spec, k_max } => {
            cmd_iterate(&PotentialSpec::parse(spec)?, *k_max, &cfg)?
        }
        Command::Variational { spec } => cmd_variational(&PotentialSpec::parse(spec)?, &cfg)?,
        Command::Derivative {
            spec1,
            spec2,
            direction,
        } => cmd_derivative(
            &PotentialSpec::parse(spec1)?,
            &PotentialSpec::parse(spec2)?,
            direction,
            &cfg,
        )?,
        Command::Appendix {
            spec1,
            spec2,
            t_steps,
        } => cmd_appendix(
            &PotentialSpec::parse(spec1)?,
            &PotentialSpec::parse(spec2)?,
            *t_steps,
            &cfg,
        )?,
        Command::VerifyAll => {
            let results = verify_all(&cfg)?;
            let mut all_pass = true;
            let mut text = String::new();
            for r in &results {
                text.push_str(&r.line());
                text.push('\n');
                all_pass &= r.pass;
            }
            match cli.out.as_deref() {
                Some(path) => std::fs::write(path, &text)?,
                None => print!("{text}"),
            }
            return Ok(all_pass);
        }
    };
    emit(&result, cli.format, cli.out.as_deref())?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Validation(_) => ExitCode::from(2),
                Error::Convergence { .. } | Error::Resource(_) | Error::Optimization(_) => {
                    ExitCode::from(3)
                }
                Error::Io(_) | Error::Json(_) => ExitCode::from(2),
            }
        }
    }
}
