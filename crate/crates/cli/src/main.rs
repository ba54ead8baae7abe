//! `coalition-core`: run the solvers, oracles and reduction generators on
//! instance files. Reports go to stdout as JSON, a short summary to stderr.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use coalition_core::Error;

#[derive(Parser)]
#[command(name = "coalition-core", version, about = "Least-core and dissatisfaction solvers for threshold profit games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the core is empty
    CoreCheck {
        /// Game JSON; `-` or omitted reads stdin
        game: Option<PathBuf>,
    },
    /// Relative least-core value
    Rlcv {
        game: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = RlcvMethodArg::Exact)]
        method: RlcvMethodArg,
        #[arg(long, default_value_t = 10_000)]
        max_rounds: usize,
    },
    /// Absolute least-core value
    Alcv {
        game: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = AlcvMethodArg::Exact)]
        method: AlcvMethodArg,
        /// Ladder step of the relaxed program (approx only)
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        /// Discretization refinement; defaults to the number of players
        #[arg(long)]
        m_disc: Option<usize>,
        /// Trust the dynamic program alone instead of enumerating on a miss
        #[arg(long)]
        no_exact_fallback: bool,
        #[arg(long, default_value_t = 10_000)]
        max_rounds: usize,
    },
    /// Least average dissatisfaction value
    Ladv {
        game: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = LadvMethodArg::Exact)]
        method: LadvMethodArg,
        /// SGD iterations
        #[arg(long = "T", default_value_t = 100_000)]
        t: u64,
        /// Step size; defaults to sqrt(sigma(V)^4 / (T n^4))
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Derive T from --epsilon via sigma(V)^4 n^4 / eps^2
        #[arg(long)]
        theorem8: bool,
        #[arg(long, requires = "theorem8")]
        epsilon: Option<f64>,
        /// Write the per-iteration objective as CSV
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Adversarial covering value of a game with eta = sigma(V)
    Adversarial { game: Option<PathBuf> },
    /// Generate a game instance from a combinatorial problem
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Brute-force reference value
    Oracle {
        #[arg(value_enum)]
        quantity: Quantity,
        instance: Option<PathBuf>,
    },
    /// Influence spread of a seed set
    Spread {
        /// Social graph JSON (or an ic_graph game file)
        graph: Option<PathBuf>,
        /// Comma-separated seed node ids
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        seeds: Vec<u64>,
        /// Monte Carlo samples; exact evaluation when omitted
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// DIMACS CNF formula
    Sat {
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Edge-list graph
    Maxcut {
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Edge-list graph and target size
    Domset {
        input: Option<PathBuf>,
        #[arg(long)]
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Set-cover spec JSON `{universe, sets, budget}`
    Setcover {
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RlcvMethodArg {
    EtaZero,
    Exact,
    Cutgen,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlcvMethodArg {
    Exact,
    Approx,
}

#[derive(Clone, Copy, ValueEnum)]
enum LadvMethodArg {
    Exact,
    Sgd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    Core,
    Rlcv,
    Alcv,
    AlcvRe,
    AlcvStr,
    Ladv,
    Maxcut,
    Domset,
    Sat,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Parse(String),
    Limit(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Limit(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Parse(m) | Failure::Limit(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Parse { .. } | Error::InvalidGame(_) | Error::InvalidGraph(_) | Error::MalformedLp(_) => {
                Failure::Parse(msg)
            }
            Error::TooManyPlayers { .. }
            | Error::TooManyProbabilisticEdges { .. }
            | Error::RoundLimit { .. }
            | Error::InvalidCut { .. }
            | Error::LpStatus(_) => Failure::Limit(msg),
            Error::WidthMismatch { .. }
            | Error::PlayerOutOfRange { .. }
            | Error::WrongMethod { .. }
            | Error::InvalidParameter(_) => Failure::Usage(msg),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("COALITION_CORE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| Failure::Usage(format!("COALITION_CORE_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot size the worker pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match configure_threads().and_then(|()| commands::run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
