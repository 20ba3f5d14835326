mod commands;
mod render;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use permix::acceptance::{DEFAULT_SEED, SLOW_TOL};

/// Mixing of x -> mx mod 1 composed with interval exchange permutations.
///
/// Permutations are written in one-line form "[0,2,1,3]" (image of 0, 1, ...)
/// or as space-separated cycles "(0 1 2)(3 4)"; the cycle form needs --N.
#[derive(Parser, Debug)]
#[command(name = "permix", version, about, long_about = None)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Args, Debug, Clone)]
pub struct Params {
    /// Slope of the expanding map
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Number of subintervals permuted
    #[arg(long = "N", global = true)]
    pub n: Option<usize>,
    /// Number of cosets (N = m*ell), or the subshift size (N = 2*ell)
    #[arg(long, global = true)]
    pub ell: Option<usize>,
    /// Permutation literal
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sigma: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Eigenvalue tolerance; also the margin in Lambda > 1/m + tol
    #[arg(long, global = true, default_value_t = SLOW_TOL)]
    pub tol: f64,
    #[arg(long, global = true, value_enum)]
    pub output: Option<Format>,
    /// Lift the caps on exhaustive sweeps (up to S_12)
    #[arg(long, global = true)]
    pub long_run: bool,
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true, env = "PERMIX_THREADS")]
    pub threads: Option<usize>,
    /// Add runtime_ms to JSON output and report it on stderr
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    /// m^-1 A(m,N) P(sigma)
    Ap,
    /// m^-1 B(m,N) Q(sigma)
    Bq,
    A,
    B,
    C,
    P,
    Q,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether sigma o f is mixing (--m, --sigma; or --ell for the subshift example)
    Classify,
    /// Eigenvalues of one of the transfer matrices
    Spectrum {
        #[arg(long, value_enum, default_value_t = MatrixKind::Ap)]
        matrix: MatrixKind,
        /// Print the integer matrix as CSV instead of its spectrum
        #[arg(long)]
        export: bool,
    },
    /// Mixing rate Lambda_sigma and related checks (--m, --sigma)
    Rate {
        /// Also estimate the rate from this many steps of density evolution
        #[arg(long)]
        evolve: Option<usize>,
        /// Also decide Lambda_sigma > 1/m in exact arithmetic
        #[arg(long)]
        exact: bool,
    },
    /// Slowest permutation and the rate bound (--m, --N coprime)
    Worst,
    /// Exhaustive counts: slow permutations (--m, --N) or p(ell, m) (--m, --ell)
    Enumerate,
    /// Monte Carlo proportion of slow permutations (--m, --N, --samples, --seed)
    Sample,
    /// Reproduce the tables of slow-permutation counts and proportions
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
    },
    /// Census and transfer-operator data for the subshift example (--ell)
    Subshift,
    /// Run the acceptance checks and print PASS/FAIL per criterion
    Verify {
        /// Criteria to run (default: all)
        #[arg(long, value_delimiter = ',')]
        criterion: Vec<usize>,
    },
}

pub enum CliError {
    Usage(String),
    Failed(String),
}

impl From<permix::Error> for CliError {
    fn from(e: permix::Error) -> Self {
        match e {
            permix::Error::InvalidPermutation(_)
            | permix::Error::DegreeMismatch { .. }
            | permix::Error::InvalidParameter(_)
            | permix::Error::NotMultiple { .. }
            | permix::Error::TooLarge { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.params.threads {
        if t == 0 {
            return usage_error("--threads must be positive");
        }
        if rayon::ThreadPoolBuilder::new().num_threads(t).build_global().is_err() {
            return usage_error("could not size the worker pool");
        }
    }
    let start = Instant::now();
    let result = commands::run(&cli.command, &cli.params, start);
    if cli.params.timing {
        eprintln!("runtime_ms: {}", start.elapsed().as_millis());
    }
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => usage_error(&msg),
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}\n");
    eprintln!("{}", Cli::command().render_usage());
    ExitCode::from(2)
}

pub(crate) fn default_seed() -> u64 {
    DEFAULT_SEED
}
