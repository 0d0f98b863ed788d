//! `anongame`: generate, solve, verify and convert anonymous games.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use anongame::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "anongame", version, about = "Approximate equilibria of anonymous games")]
struct Cli {
    /// Worker threads for the parallel solvers (default: all cores).
    #[arg(long, global = true, env = "ANONY_THREADS")]
    threads: Option<usize>,

    /// Include wall-clock timings in reports. Off by default so reports are
    /// byte-stable.
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a game and write it to a file.
    Gen(GenArgs),
    /// Solve a game for an approximate equilibrium.
    Solve(SolveArgs),
    /// Check a profile against a game.
    Verify(VerifyArgs),
    /// Convert profiles or games.
    #[command(subcommand)]
    Convert(ConvertCommand),
    /// Well-supported equilibrium via padding, a base solver and conversion.
    Pipeline(PipelineArgs),
    /// Solve seeded random games over a grid of sizes.
    Bench(BenchArgs),
    /// Run the structural diagnostic sweeps.
    Diag(DiagArgs),
    /// Brute-force tools for small games.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Print outcome distributions.
    #[command(subcommand)]
    Pmf(PmfCommand),
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "uniform-random")]
    kind: String,
    #[arg(long)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Algo {
    MomentSearch,
    Smooth,
}

#[derive(Args, Debug, Clone)]
struct MomentArgs {
    /// Target regret is n^-c.
    #[arg(long, default_value_t = 0.5)]
    c: f64,
    /// Multiplies the strategy grid step.
    #[arg(long, default_value_t = 1.0)]
    grid_coarsen: f64,
    /// Highest moment degree kept in data vectors.
    #[arg(long)]
    moment_degree: Option<u32>,
    /// Data accuracy as a fraction of the target regret.
    #[arg(long, default_value_t = 0.2)]
    data_fraction: f64,
    /// Best-response admission slack as a fraction of the target regret.
    #[arg(long, default_value_t = 0.6)]
    admit_fraction: f64,
}

#[derive(Args, Debug)]
struct SolveArgs {
    game: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    #[command(flatten)]
    moment: MomentArgs,
    /// Trembling probability for the smoothing solver.
    #[arg(long)]
    delta: Option<f64>,
    /// Where to write the profile.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    game: PathBuf,
    profile: PathBuf,
    #[arg(long)]
    eps: f64,
    /// Check the well-supported condition instead of max regret.
    #[arg(long)]
    well_supported: bool,
}

#[derive(Subcommand, Debug)]
enum ConvertCommand {
    /// Approximate equilibrium to well-supported equilibrium.
    Ws {
        game: PathBuf,
        profile: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Add dummy players up to `n_prime` players.
    Pad {
        game: PathBuf,
        #[arg(long)]
        n_prime: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Base {
    Oracle,
    MomentSearch,
}

#[derive(Args, Debug)]
struct PipelineArgs {
    game: PathBuf,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long, value_enum)]
    base: Base,
    /// Grid step of the oracle base solver.
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    /// Profile cap of the oracle base solver.
    #[arg(long, default_value_t = anongame::oracle::DEFAULT_PROFILE_CAP)]
    profile_cap: u64,
    /// Largest padded player count allowed.
    #[arg(long, default_value_t = anongame::reductions::DEFAULT_PADDING_CAP)]
    padding_cap: usize,
    #[command(flatten)]
    moment: MomentArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Cells to run, as `n=<list> k=<list>` with comma-separated lists.
    #[arg(long, num_args = 2, value_names = ["N_LIST", "K_LIST"])]
    sweep: Vec<String>,
    #[arg(long, value_enum, default_value = "smooth")]
    algo: Algo,
    /// First seed; games use consecutive seeds.
    #[arg(long)]
    seed: u64,
    /// Games per cell.
    #[arg(long, default_value_t = 1)]
    games: u64,
    #[arg(long)]
    delta: Option<f64>,
    #[command(flatten)]
    moment: MomentArgs,
}

#[derive(Args, Debug)]
struct DiagArgs {
    #[arg(long)]
    seed: u64,
    /// Player counts for the equal-data sampling diagnostic.
    #[arg(long, value_delimiter = ',', default_values_t = [50usize, 100, 200])]
    representative_n: Vec<usize>,
    /// Pairs sampled per player count.
    #[arg(long, default_value_t = 20)]
    pairs: usize,
    /// Trials per spectrum cell.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Samples in the variance sweep.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Exhaustive search over profiles on a probability grid.
    Search {
        game: PathBuf,
        #[arg(long)]
        step: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        well_supported: bool,
        #[arg(long, default_value_t = anongame::oracle::DEFAULT_PROFILE_CAP)]
        cap: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum PmfCommand {
    /// Print the opponents' outcome distribution for one player, or the
    /// distribution of all players' choices.
    Dump {
        profile: PathBuf,
        /// 1-based player whose opponents are summed.
        #[arg(long)]
        player: Option<usize>,
    },
}

/// Process exit status by outcome.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::ResourceLimit(_) => 3,
        Error::Precondition(_) | Error::NotFound(_) | Error::InternalConsistency(_) => 2,
        Error::InvalidArgument(_) | Error::Parse { .. } | Error::InfeasibleGrid(_) | Error::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot start {t} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(commands::Outcome::Verified) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Failed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
