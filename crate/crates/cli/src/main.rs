//! `erdos`: verify, decompose and enumerate Erdős matrices exactly.

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use output::Format;

/// Exit statuses shared by every subcommand.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VERDICT_FALSE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const INPUT: u8 = 3;
    pub const TRUNCATED: u8 = 4;
}

#[derive(Parser)]
#[command(name = "erdos", version, about = "Exact tools for Erdős matrices: bistochastic A with ‖A‖²_F = maxTr(A)")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,

    /// Print decimal approximations next to exact values.
    #[arg(long, global = true)]
    approx: bool,

    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Method {
    Auto,
    Brute,
    Hungarian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Reduce {
    None,
    Affine,
    Linear,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether a matrix file is an Erdős matrix.
    Verify {
        /// Matrix file (`-` for stdin).
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// List every Erdős matrix of size n up to equivalence.
    Enumerate {
        #[arg(short)]
        n: usize,
        /// Largest support size to search; defaults to (n-1)²+1.
        #[arg(long)]
        max_support: Option<usize>,
        /// Wall-clock limit, e.g. `90s` or `10m`.
        #[arg(long, value_parser = humantime::parse_duration)]
        budget: Option<Duration>,
        /// Worker threads; defaults to the available cores.
        #[arg(long, env = "ERDOS_WORKERS")]
        workers: Option<usize>,
        /// Skip families equivalent to one already examined and report
        /// family orbit counts.
        #[arg(long)]
        prefilter: bool,
    },
    /// Birkhoff decomposition of a matrix file.
    Decompose {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Reduce::None)]
        reduce: Reduce,
    },
    /// Canonical representative of the equivalence class of a matrix file.
    Canon { file: PathBuf },
    /// The matrices (I + P)/2, one per conjugacy class of S_n.
    Family {
        #[arg(short)]
        n: usize,
    },
    /// Upper bounds on the number of Erdős matrices.
    Bound {
        #[arg(short)]
        n: usize,
    },
    /// Every 2×2 bistochastic matrix with maxTr − ‖A‖² equal to alpha.
    Omega2 {
        #[arg(allow_hyphen_values = true)]
        alpha: String,
    },
    /// The matrix (I + J)/2 that maximises maxTr − ‖A‖².
    Maxdelta {
        #[arg(short)]
        n: usize,
    },
}

pub struct Ctx {
    pub format: Format,
    pub approx: bool,
}

/// A failure with its exit status.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl std::fmt::Display) -> Self {
        Failure { code: exit::USAGE, message: message.to_string() }
    }

    pub fn input(message: impl std::fmt::Display) -> Self {
        Failure { code: exit::INPUT, message: message.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let ctx = Ctx { format: cli.format, approx: cli.approx };
    let result = match cli.command {
        Command::Verify { file, method } => commands::verify(&ctx, &file, method),
        Command::Enumerate { n, max_support, budget, workers, prefilter } => {
            commands::enumerate(&ctx, n, max_support, budget, workers, prefilter)
        }
        Command::Decompose { file, reduce } => commands::decompose(&ctx, &file, reduce),
        Command::Canon { file } => commands::canon(&ctx, &file),
        Command::Family { n } => commands::family(&ctx, n),
        Command::Bound { n } => commands::bound(&ctx, n),
        Command::Omega2 { alpha } => commands::omega2(&ctx, &alpha),
        Command::Maxdelta { n } => commands::maxdelta(&ctx, n),
    };
    match result {
        Ok((text, code)) => {
            let mut stdout = std::io::stdout().lock();
            let written = stdout.write_all(text.as_bytes()).and_then(|_| {
                if text.ends_with('\n') {
                    Ok(())
                } else {
                    stdout.write_all(b"\n")
                }
            });
            // A closed pipe (`erdos ... | head`) is not an error worth reporting.
            match written {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    eprintln!("erdos: {e}");
                    ExitCode::from(exit::INPUT)
                }
                _ => ExitCode::from(code),
            }
        }
        Err(f) => {
            eprintln!("erdos: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
