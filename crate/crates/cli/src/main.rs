//! `emint`: verification suites, tail simulations and constant tables.
//!
//! Exit status: 0 on success, 2 on configuration errors, 1 on other runtime
//! failures, and 10 to 15 for the first failing verification suite.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use emint_core::bounds::geometric_grid;
use emint_core::space::DEFAULT_ENUMERATION_CAP;
use emint_core::verify::{Fault, Scale};

use commands::{BoundsArgs, CliError, ConstantsArgs, TailsArgs, VerifyArgs};
use config::{
    parse_grid, require, BoundConstants, FileConfig, Grid, Mode, DEFAULT_K_MAX, DEFAULT_M_MAX,
    DEFAULT_N_MAX, DEFAULT_REPLICATES, DEFAULT_SEED,
};

#[derive(Debug, Parser)]
#[command(
    name = "emint",
    version,
    about = "Multiple integrals with respect to normalized empirical measures"
)]
struct Cli {
    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the randomized exact verification suites and print a JSON report.
    Verify(VerifyCmd),
    /// Monte Carlo tail estimate of |J| for a kernel, with bound columns.
    Tails(TailsCmd),
    /// Emit the constant-system and expectation-constant tables.
    Constants(ConstantsCmd),
    /// Evaluate the two-regime and Bernstein-type bounds over a grid.
    Bounds(BoundsCmd),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScaleArg {
    Desk,
    Quick,
}

impl From<ScaleArg> for Scale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Desk => Scale::Desk,
            ScaleArg::Quick => Scale::Quick,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FaultArg {
    DiagramCoefficient,
}

#[derive(Debug, Args)]
struct Common {
    /// Arithmetic mode.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Master seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct VerifyCmd {
    #[command(flatten)]
    common: Common,
    /// Sweep size.
    #[arg(long, value_enum)]
    scale: Option<ScaleArg>,
    /// Largest number of samples enumerated by exact oracles [default: 1000000].
    #[arg(long)]
    enum_cap: Option<u64>,
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<FaultArg>,
}

#[derive(Debug, Args)]
struct TailsCmd {
    #[command(flatten)]
    common: Common,
    /// Space descriptor (JSON).
    #[arg(long, value_name = "FILE")]
    space: Option<PathBuf>,
    /// Kernel descriptor (JSON).
    #[arg(long, value_name = "FILE")]
    kernel: Option<PathBuf>,
    /// Sample size.
    #[arg(long)]
    n: Option<usize>,
    /// Monte Carlo replicates [default: 100000].
    #[arg(long)]
    replicates: Option<u64>,
    /// Comma-separated increasing grid; automatic when omitted.
    #[arg(long, value_parser = parse_grid)]
    x_grid: Option<Grid>,
    /// Variance parameter for the bound columns; defaults to the kernel's L2 norm.
    #[arg(long)]
    sigma: Option<f64>,
    /// JSON constants {c, alpha, c1, c2}; fitted from the estimate when omitted.
    #[arg(long, value_name = "FILE")]
    constants_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConstantsCmd {
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Largest k in both tables [default: 8].
    #[arg(long)]
    k_max: Option<usize>,
    /// Largest m in the constant-system table [default: 16].
    #[arg(long)]
    m_max: Option<usize>,
    /// Largest n in the expectation-constant table [default: 30].
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Debug, Args)]
struct BoundsCmd {
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Kernel arity.
    #[arg(long)]
    k: Option<usize>,
    /// Variance parameter in (0, 1].
    #[arg(long)]
    sigma: Option<f64>,
    /// Sample size.
    #[arg(long)]
    n: Option<u64>,
    /// Comma-separated increasing grid [default: 61 geometric points in 1e-3..1e3].
    #[arg(long, value_parser = parse_grid)]
    x_grid: Option<Grid>,
    /// JSON constants {c, alpha, c1, c2} [default: all 1].
    #[arg(long, value_name = "FILE")]
    constants_file: Option<PathBuf>,
}

fn out_dir(flag: Option<PathBuf>, file: &FileConfig) -> PathBuf {
    flag.or_else(|| file.out.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}

fn constants(path: Option<PathBuf>) -> Result<Option<BoundConstants>, CliError> {
    path.map(|p| {
        commands::require_path(Some(p), "constants-file").and_then(|p| BoundConstants::load(&p))
    })
    .transpose()
    .map_err(CliError::from)
}

fn run(cli: Cli) -> commands::CmdResult {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Verify(c) => commands::cmd_verify(VerifyArgs {
            mode: c.common.mode.or(file.mode).unwrap_or_default(),
            seed: c.common.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            scale: c.scale.map(Scale::from).or(file.scale).unwrap_or_default(),
            enum_cap: c
                .enum_cap
                .or(file.enum_cap)
                .unwrap_or(DEFAULT_ENUMERATION_CAP),
            out: c.common.out.or(file.out.clone()),
            fault: c
                .inject_fault
                .map(|FaultArg::DiagramCoefficient| Fault::DiagramCoefficient),
        }),
        Command::Tails(c) => commands::cmd_tails(TailsArgs {
            space: commands::require_path(c.space.or(file.space.clone()), "space")?,
            kernel: commands::require_path(c.kernel.or(file.kernel.clone()), "kernel")?,
            mode: c.common.mode.or(file.mode).unwrap_or_default(),
            out: out_dir(c.common.out, &file),
            seed: c.common.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            replicates: c
                .replicates
                .or(file.replicates)
                .unwrap_or(DEFAULT_REPLICATES),
            n: require(c.n.or(file.n), "n")?,
            x_grid: c.x_grid.map(|g| g.0).or(file.x_grid.clone()),
            sigma: c.sigma.or(file.sigma),
            constants: constants(c.constants_file.or(file.constants_file.clone()))?,
        }),
        Command::Constants(c) => commands::cmd_constants(ConstantsArgs {
            out: out_dir(c.out, &file),
            k_max: c.k_max.or(file.k_max).unwrap_or(DEFAULT_K_MAX),
            m_max: c.m_max.or(file.m_max).unwrap_or(DEFAULT_M_MAX),
            n_max: c.n_max.or(file.n_max).unwrap_or(DEFAULT_N_MAX),
        }),
        Command::Bounds(c) => commands::cmd_bounds(BoundsArgs {
            out: out_dir(c.out, &file),
            k: require(c.k.or(file.k), "k")?,
            sigma: require(c.sigma.or(file.sigma), "sigma")?,
            n: require(c.n.or(file.n.map(|n| n as u64)), "n")?,
            x_grid: c
                .x_grid
                .map(|g| g.0)
                .or(file.x_grid.clone())
                .unwrap_or_else(|| geometric_grid(1e-3, 1e3, 61)),
            constants: constants(c.constants_file.or(file.constants_file.clone()))?
                .unwrap_or_default(),
        }),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(CliError::Config(e)) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
