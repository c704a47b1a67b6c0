//! Command-line front end: argument parsing, config merging and exit codes.

pub mod commands;
pub mod config;

use std::io::Write;
use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

pub use config::{ConfigError, RunConfig, ScenarioKind, SEED_ENV};

use crate::market_data::{fetch_prices, FetchOptions, ReferencePriceMode};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cascadenet", version, about = "Exposure networks, default cascades and tail risk from equity prices")]
pub struct Cli {
    /// Log more (repeat for debug output).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Download daily lows into a wide price CSV.
    Fetch(FetchArgs),
    /// Descriptive statistics of log returns and normalized prices.
    Stats(CommonArgs),
    /// Correlation and exposure networks, clustering and VaR/CVaR.
    Network(CommonArgs),
    /// Monte Carlo and deterministic default cascades.
    Cascade(CommonArgs),
    /// Loss CCDFs, Hill plots and tail classification.
    Tail(CommonArgs),
    /// Everything above in one run.
    Report(CommonArgs),
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    #[arg(long = "ticker", required = true)]
    pub tickers: Vec<String>,
    #[arg(long)]
    pub start: NaiveDate,
    #[arg(long)]
    pub end: NaiveDate,
    /// Base URL; each ticker is requested as `<endpoint>/<ticker>?start=..&end=..`.
    #[arg(long)]
    pub endpoint: String,
    #[arg(long, default_value = "prices.csv")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub attempts: u32,
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Wide price CSV with a `date` column.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// JSON run configuration; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub start: Option<NaiveDate>,
    #[arg(long)]
    pub end: Option<NaiveDate>,
    /// Exposure threshold; repeat for several networks.
    #[arg(long = "theta")]
    pub thetas: Vec<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long = "scenario", value_enum)]
    pub scenarios: Vec<ScenarioKind>,
    #[arg(long = "target")]
    pub targets: Vec<String>,
    /// Propagate losses along transposed exposures.
    #[arg(long)]
    pub transpose_exposures: bool,
    /// In the general scenario, shock every asset instead of one at random.
    #[arg(long)]
    pub shock_all: bool,
    #[arg(long = "ref-price", value_enum)]
    pub ref_price: Option<ReferencePriceMode>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Also write each thresholded exposure matrix.
    #[arg(long)]
    pub dump_adjacency: bool,
    /// Print the effective configuration (to PATH, or stdout) and exit.
    #[arg(long, num_args = 0..=1, value_name = "PATH")]
    pub dump_config: Option<Option<PathBuf>>,
}

impl CommonArgs {
    /// Defaults < `CASCADENET_SEED` < config file < flags.
    pub fn resolve(&self, env_seed: Option<&str>) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::from_sources(self.config.as_deref(), env_seed)?;
        if let Some(p) = &self.input {
            cfg.input_csv = Some(p.clone());
        }
        if self.start.is_some() {
            cfg.start_date = self.start;
        }
        if self.end.is_some() {
            cfg.end_date = self.end;
        }
        if !self.thetas.is_empty() {
            cfg.theta_list = self.thetas.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(r) = self.runs {
            cfg.n_runs = r;
        }
        if !self.scenarios.is_empty() {
            cfg.scenarios = self.scenarios.clone();
        }
        if !self.targets.is_empty() {
            cfg.targets = self.targets.clone();
        }
        cfg.transpose_exposures |= self.transpose_exposures;
        cfg.shock_all |= self.shock_all;
        cfg.dump_adjacency |= self.dump_adjacency;
        if let Some(m) = self.ref_price {
            cfg.reference_price_mode = m;
        }
        if let Some(d) = &self.output_dir {
            cfg.output_dir = d.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Exit code for a library error: bad input data is 2, I/O and network 3.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter(_) | Error::UnknownAsset(_) => EXIT_USAGE,
        e if e.is_data_error() => EXIT_DATA,
        _ => EXIT_IO,
    }
}

/// Parses `args`; on failure returns the exit code after printing clap's
/// message (0 for `--help`/`--version`, 1 otherwise).
pub fn parse<I, T>(args: I) -> Result<Cli, i32>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(args).map_err(|e| {
        let _ = e.print();
        if e.use_stderr() {
            EXIT_USAGE
        } else {
            EXIT_OK
        }
    })
}

/// Runs a parsed command, returning the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let env_seed = std::env::var(SEED_ENV).ok();
    dispatch(cli.command, env_seed.as_deref())
}

/// [`parse`] then [`execute`].
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse(args) {
        Ok(cli) => execute(cli),
        Err(code) => code,
    }
}

fn dispatch(command: Command, env_seed: Option<&str>) -> i32 {
    let (args, which) = match command {
        Command::Fetch(f) => return run_fetch(&f),
        Command::Stats(a) => (a, commands::cmd_stats as Runner),
        Command::Network(a) => (a, commands::cmd_network as Runner),
        Command::Cascade(a) => (a, commands::cmd_cascade as Runner),
        Command::Tail(a) => (a, commands::cmd_tail as Runner),
        Command::Report(a) => (a, commands::cmd_report as Runner),
    };
    let cfg = match args.resolve(env_seed) {
        Ok(c) => c,
        Err(e) => {
            log::error!("{e}");
            return EXIT_USAGE;
        }
    };
    if let Some(target) = &args.dump_config {
        let text = cfg.to_json();
        let written = match target {
            Some(path) => std::fs::write(path, text),
            None => std::io::stdout().write_all(text.as_bytes()),
        };
        return match written {
            Ok(()) => EXIT_OK,
            Err(e) => {
                log::error!("cannot write config: {e}");
                EXIT_IO
            }
        };
    }
    let result = commands::load_panel(&cfg)
        .and_then(|panel| which(&cfg, &panel))
        .and_then(|out| out.write_to(&cfg.output_dir));
    match result {
        Ok(paths) => {
            log::info!("wrote {} files to {}", paths.len(), cfg.output_dir.display());
            EXIT_OK
        }
        Err(e) => {
            log::error!("{e}");
            exit_code(&e)
        }
    }
}

type Runner = fn(&RunConfig, &commands::Panel) -> crate::Result<commands::Outputs>;

fn run_fetch(args: &FetchArgs) -> i32 {
    let mut opts = FetchOptions::new(args.endpoint.clone());
    opts.max_attempts = args.attempts.max(1);
    match fetch_prices(&args.tickers, args.start, args.end, &opts, &args.out) {
        Ok(outcome) => {
            log::info!(
                "wrote {} tickers, {} rows to {}",
                outcome.tickers_written.len(),
                outcome.rows,
                args.out.display()
            );
            EXIT_OK
        }
        Err(e) => {
            log::error!("{e}");
            exit_code(&e)
        }
    }
}
