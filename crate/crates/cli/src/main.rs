//! `sibc`: rate regions, thresholds, Fourier–Motzkin derivations and scheme simulation for AWGN
//! broadcast channels with receiver message side information.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use input::FileConfig;

#[derive(Debug, Parser)]
#[command(name = "sibc", version, about = "AWGN broadcast channels with receiver message side information")]
struct Cli {
    /// TOML file with default values for the flags below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Group, member, known-message sets and capacity status of a configuration.
    Classify(ClassifyArgs),
    /// Boundary of a rate region along a two-dimensional slice.
    Region(RegionArgs),
    /// Group-4 rate thresholds as functions of R1.
    Thresholds(ThresholdArgs),
    /// Fourier–Motzkin elimination of a linear system.
    Fme(FmeArgs),
    /// Monte Carlo simulation of a configuration's transmission scheme.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Graph as JSON text, a JSON file, or `group:member`.
    #[arg(long)]
    graph: Option<String>,
    /// Channel as JSON text or file, e.g. {"P":10,"N":[1,2,4]}.
    #[arg(long)]
    channel: Option<String>,
    /// Output file; `.csv` or `.json` selects the format.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    common: Common,
    /// Classify all 64 three-receiver configurations.
    #[arg(long)]
    all: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SliceMethod {
    Direct,
    Bisect,
}

#[derive(Debug, Args)]
struct RegionArgs {
    #[command(flatten)]
    common: Common,
    /// capacity, inner, outer, bestknown-inner, bestknown-outer or joint-inner.
    #[arg(long)]
    bound: Option<String>,
    /// Fixed rate, e.g. R1=0.3; repeatable.
    #[arg(long)]
    fix: Vec<String>,
    #[arg(long, default_value = "R2")]
    sweep: String,
    #[arg(long, default_value = "R3")]
    response: String,
    /// Number of sweep values.
    #[arg(long)]
    grid: Option<usize>,
    /// Sweep interval `lo,hi`; defaults to the region's extent.
    #[arg(long)]
    range: Option<String>,
    /// Grid points per power-split coordinate of the parameter search.
    #[arg(long)]
    search_grid: Option<usize>,
    /// Membership tolerance of the bisection method.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = SliceMethod::Direct)]
    method: SliceMethod,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated R1 values; defaults to 0, 0.1, … up to C(P/N1).
    #[arg(long)]
    r1: Option<String>,
}

#[derive(Debug, Args)]
struct FmeArgs {
    /// System file in the text format, or `builtin:<name>` for a shipped derivation.
    system: String,
    /// Comma-separated variables to eliminate; overrides the `eliminate:` header.
    #[arg(long)]
    eliminate: Option<String>,
    /// Compare the result against this system by sampled equivalence.
    #[arg(long)]
    expect: Option<String>,
    /// Random constant assignments used by `--expect`.
    #[arg(long)]
    assignments: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Joint,
    Separate,
    Compare,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated rates R1,R2,R3 in bits per channel use.
    #[arg(long)]
    rates: Option<String>,
    /// Comma-separated message sizes in bits; overrides --rates.
    #[arg(long)]
    bits: Option<String>,
    /// Comma-separated power fractions of the subcodebooks.
    #[arg(long)]
    alpha: Option<String>,
    /// Blocklength.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest message size derived from --rates.
    #[arg(long)]
    bit_cap: Option<u32>,
    #[arg(long, value_enum, default_value_t = ModeArg::Joint)]
    mode: ModeArg,
}

fn run(cli: Cli) -> Result<(), input::Failure> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Classify(a) => commands::classify(a, &file),
        Command::Region(a) => commands::region(a, &file),
        Command::Thresholds(a) => commands::thresholds(a, &file),
        Command::Fme(a) => commands::fme(a, &file),
        Command::Simulate(a) => commands::simulate(a, &file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { input::code::PARSE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
