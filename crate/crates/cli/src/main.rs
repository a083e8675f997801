mod commands;
mod output;

use std::process::ExitCode;

use clap::error::{ContextKind, ErrorKind};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mkcf_core::Error;

use crate::output::Format;

/// Exact and certified (m,k)-continued fractions, natural extensions and approximation
/// coefficients.
#[derive(Parser, Debug)]
#[command(name = "mkcf", version)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Working precision in bits for certified values [env: MKCF_PRECISION, default 256].
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(64..=8192))]
    prec: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    /// 0 for the Gauss-like family, 1 for the Renyi-like family.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    m: u8,
    /// k ≥ 1 as a literal: integer, p/q, decimal or quadratic surd.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    k: String,
}

#[derive(Args, Debug, Clone)]
struct BatchArgs {
    /// Number of random seeds.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    seeds: u64,
    /// Orbit steps per seed.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    window: u64,
    /// Master RNG seed.
    #[arg(long, default_value_t = 0)]
    rng: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Digits and futures of a seed.
    Expand {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_hyphen_values = true)]
        seed: String,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        steps: u64,
        /// Report classical partial quotients (digit + 1).
        #[arg(long)]
        classical_digits: bool,
    },
    /// Value of a finite digit string, optionally with a tail.
    Eval {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        digits: Vec<u64>,
        #[arg(long, allow_hyphen_values = true)]
        tail: Option<String>,
        /// Digits are classical partial quotients (digit + 1).
        #[arg(long)]
        classical_digits: bool,
    },
    /// Convergents p_n/q_n of a digit string or of a seed's expansion.
    Convergents {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "seed", required_unless_present = "seed")]
        digits: Vec<u64>,
        #[arg(long, allow_hyphen_values = true)]
        seed: Option<String>,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        steps: u64,
        #[arg(long)]
        classical_digits: bool,
    },
    /// Natural-extension orbit of a dynamic pair (x, y).
    Orbit {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        steps: u64,
    },
    /// Extend a BAC from a seed Jager pair (θ_{n−1}, θ_n).
    Bac {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        steps: u64,
        #[arg(long, value_enum, default_value_t = DirectionArg::Forward)]
        direction: DirectionArg,
    },
    /// Digit a_{n+1} from a Jager pair.
    RecoverDigit {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        /// Treat (u, v) as (θ_n, θ_{n+1}) and use the second floor expression.
        #[arg(long)]
        from_next: bool,
    },
    /// Table of ξ_a and C_a.
    Constants {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 5)]
        max_digit: u64,
    },
    /// Run a randomised verification suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        batch: BatchArgs,
    },
    /// Scans over long orbits.
    #[command(subcommand)]
    Scan(ScanCommand),
    /// Orbit statistics.
    #[command(subcommand)]
    Stats(StatsCommand),
}

#[derive(Subcommand, Debug)]
enum ScanCommand {
    /// Positions with θ_n ≤ C_0 (m = 0).
    Hurwitz {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        batch: BatchArgs,
    },
    /// Extremal construction for the Renyi-like bounds (m = 1).
    RenyiBounds {
        #[command(flatten)]
        params: ParamArgs,
        /// Small digit l.
        #[arg(long)]
        l: u64,
        /// Large digit L.
        #[arg(long)]
        big_l: u64,
        #[arg(long, default_value_t = 1 << 14, value_parser = clap::value_parser!(u64).range(1..))]
        depth: u64,
    },
}

#[derive(Subcommand, Debug)]
enum StatsCommand {
    /// Empirical digit frequencies against the invariant density.
    Birkhoff {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Seed literal; a random dyadic seed when absent.
        #[arg(long, allow_hyphen_values = true)]
        seed: Option<String>,
        #[arg(long, default_value_t = 0)]
        rng: u64,
    },
    /// Histogram of θ along random orbits.
    Histogram {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        batch: BatchArgs,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        bins: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DirectionArg {
    Forward,
    Backward,
}

/// Why a run stopped early.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Kernel(Error),
    Verification,
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Kernel(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Io(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::PrecisionExhausted { .. } => 2,
        Error::InvalidParams(_) | Error::Parse(_) | Error::OutOfDomain(_) => 1,
        _ => 3,
    }
}

/// One line naming the offending argument.
fn usage_line(err: &clap::Error) -> String {
    let rendered = err.to_string();
    let first = rendered.lines().next().unwrap_or("error").trim().to_string();
    match err.get(ContextKind::InvalidArg) {
        Some(arg) if !first.contains(&arg.to_string()) => format!("{first} {arg}"),
        _ => first,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", usage_line(&e));
            return ExitCode::from(1);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Kernel(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Verification) => ExitCode::from(4),
        Err(Failure::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
