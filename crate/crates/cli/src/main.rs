//! `beamloc` command-line front end.
//!
//! Exit codes: 0 success, 1 configuration error, 2 domain error (including a
//! receiver outside the area of interest), 3 I/O error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use beamloc::harness::CodebookChoice;
use beamloc::localizer::SearchMode;
use clap::{Args, Parser, Subcommand};

use config::NoiseSetting;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(beamloc::Error),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use beamloc::Error as E;
        match self {
            CliError::Config(_) => 1,
            CliError::Core(E::Config(_)) => 1,
            CliError::Core(E::Domain(_) | E::OutsideArea(_) | E::EmptySample) => 2,
            CliError::Core(E::Io(_) | E::Csv(_) | E::Json(_)) => 3,
            CliError::Io { .. } => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl From<beamloc::Error> for CliError {
    fn from(e: beamloc::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "beamloc",
    version,
    about = "Near-field beam-focusing localization simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Cap on worker threads (results do not depend on it)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Log more (-v info, -vv debug)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Built-in scenario: scenario1, scenario2, scenario1-track, scenario2-track
    #[arg(long)]
    preset: Option<String>,

    /// JSON config file; may itself name a preset and override fields
    #[arg(long)]
    config: Option<PathBuf>,

    /// measured, ideal or perfect-phase1
    #[arg(long)]
    mode: Option<SearchMode>,

    /// Direction codebook: bfr or rbfr
    #[arg(long)]
    codebook: Option<CodebookChoice>,

    /// Noise power in dBm, or "none"
    #[arg(long, allow_hyphen_values = true)]
    noise_dbm: Option<NoiseSetting>,

    /// Monte-Carlo iterations (trajectories for `track`)
    #[arg(long)]
    n: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the codebooks level by level; optionally dump them as JSON
    Codebook {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// JSON output file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Localize one receiver and print the estimate with its search trace
    Localize {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Receiver angle (degrees); random from --seed when omitted
        #[arg(long, allow_hyphen_values = true, requires = "distance_m")]
        theta_deg: Option<f64>,
        /// Receiver distance (m)
        #[arg(long, requires = "theta_deg")]
        distance_m: Option<f64>,
        /// Write the pilot-by-pilot trace as JSON lines
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Monte-Carlo campaign: error CDF, per-sample table and summary
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output directory for cdf.csv, samples.csv and summary.json
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Campaign per noise level or per focus-codebook depth
    #[command(group = clap::ArgGroup::new("axis").required(true).args(["noise", "levels"]))]
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Noise powers as start:step:stop in dBm
        #[arg(long, allow_hyphen_values = true)]
        noise: Option<String>,
        /// Comma-separated focus codebook depths
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<usize>>,
        /// Output directory for sweep.csv (or levels.csv) and summary.json
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Track receivers moving along random straight lines
    Track {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output directory for track.csv and summary.json
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Codebook { scenario, out } => commands::codebook(&scenario, out.as_deref()),
        Command::Localize {
            scenario,
            theta_deg,
            distance_m,
            trace,
        } => commands::localize(&scenario, theta_deg.zip(distance_m), trace.as_deref()),
        Command::Simulate { scenario, out } => commands::simulate(&scenario, out.as_deref()),
        Command::Sweep {
            scenario,
            noise,
            levels,
            out,
        } => commands::sweep(
            &scenario,
            noise.as_deref(),
            levels.as_deref(),
            out.as_deref(),
        ),
        Command::Track { scenario, out } => commands::track(&scenario, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("beamloc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
