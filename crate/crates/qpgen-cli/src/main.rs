//! `qpgen`: batch front end for pair-breaking rate studies.
//!
//! Exit codes: 0 success, 2 invalid config or arguments, 3 numerical or i/o failure,
//! 4 convergence audit above threshold.

mod commands;
mod config;
mod error;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Ctx;
use crate::config::ProfileName;
use crate::error::CliError;

/// BLAS kernel family used when the variable is unset (see `.cargo/config.toml`).
const CORETYPE: &str = "Haswell";

#[derive(Parser)]
#[command(name = "qpgen", version, about = "Multiphoton pair-breaking rates in driven superconducting qubits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rate table of a transmon map, Stark cut, readout or SQUID scenario.
    Sweep(Common),
    /// Structure factors, closed form against quadrature.
    StructureFactors(Common),
    /// Effective SQUID potential per flux amplitude.
    Potential(Common),
    /// Overlap of the labeled ground state along a drive-amplitude sweep.
    LabelDemo(Common),
    /// Truncation convergence audit of one scenario point.
    Converge(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Worker threads; falls back to QPGEN_THREADS, then to all cores.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    profile: Option<ProfileArg>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: bool,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ProfileArg {
    Ci,
    Full,
}

impl From<ProfileArg> for ProfileName {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Ci => ProfileName::Ci,
            ProfileArg::Full => ProfileName::Full,
        }
    }
}

fn threads(flag: Option<usize>) -> Result<usize, CliError> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var("QPGEN_THREADS") {
            Ok(s) => s.trim().parse().map_err(|_| CliError::validation(format!("QPGEN_THREADS={s:?} is not a count")))?,
            Err(_) => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        },
    };
    if n == 0 {
        return Err(CliError::validation("thread count must be positive"));
    }
    Ok(n)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, c) = match &cli.command {
        Command::Sweep(c) => ("sweep", c),
        Command::StructureFactors(c) => ("structure-factors", c),
        Command::Potential(c) => ("potential", c),
        Command::LabelDemo(c) => ("label-demo", c),
        Command::Converge(c) => ("converge", c),
    };
    let n = threads(c.threads)?;
    let cfg = config::load(&c.config)?;
    let resolved = config::resolve(cfg, c.profile.map(Into::into), c.out.clone())?;
    let ctx = Ctx::new(name, resolved, n, c.svg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::numeric(format!("thread pool: {e}")))?;
    pool.install(|| {
        let path = match cli.command {
            Command::Sweep(_) => commands::sweep::run(ctx)?,
            Command::StructureFactors(_) => commands::tools::structure_factors(ctx)?,
            Command::Potential(_) => commands::tools::potential(ctx)?,
            Command::LabelDemo(_) => commands::tools::label_demo(ctx)?,
            Command::Converge(_) => {
                let (path, pass) = commands::converge::run(ctx)?;
                if !pass {
                    return Err(CliError::Drift(format!("see {}", path.display())));
                }
                path
            }
        };
        println!("{}", path.display());
        Ok(())
    })
}

/// Re-executes with a safe BLAS kernel selection unless the caller chose one.
#[cfg(unix)]
fn ensure_coretype() {
    use std::os::unix::process::CommandExt;
    if std::env::var_os("OPENBLAS_CORETYPE").is_some() {
        return;
    }
    if let Ok(exe) = std::env::current_exe() {
        let err = std::process::Command::new(exe)
            .args(std::env::args_os().skip(1))
            .env("OPENBLAS_CORETYPE", CORETYPE)
            .exec();
        eprintln!("warning: could not re-execute with OPENBLAS_CORETYPE={CORETYPE}: {err}");
    }
}

#[cfg(not(unix))]
fn ensure_coretype() {}

fn main() -> ExitCode {
    ensure_coretype();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qpgen: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
