use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "dosefind", version, about = "Dose-finding designs, convergence classifiers and trial sessions")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Output file (for `table1`, a directory).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for batch commands (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// One JSON object per line.
    Records,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DesignChoice {
    Interval,
    Point,
    Crm,
}

#[derive(Debug, Clone, Args)]
pub struct DesignArgs {
    #[arg(long, value_enum, default_value_t = DesignChoice::Interval)]
    pub design: DesignChoice,
    /// Lower half-width of the interval design.
    #[arg(long, default_value_t = 0.1)]
    pub dp1: f64,
    /// Upper half-width of the interval design.
    #[arg(long, default_value_t = 0.1)]
    pub dp2: f64,
    /// Use isotonic estimates in the interval rule.
    #[arg(long)]
    pub monotonized: bool,
    /// CRM skeleton; defaults to the built-in skeleton for 5 or 10 levels.
    #[arg(long, value_delimiter = ',')]
    pub skeleton: Option<Vec<f64>>,
    /// Limit CRM moves to one level per cohort.
    #[arg(long)]
    pub no_skipping: bool,
    #[arg(long, default_value_t = 1)]
    pub cohort: usize,
    #[arg(long, default_value_t = 1)]
    pub start: usize,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct ScenarioSource {
    /// Inline curve, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub f: Option<Vec<f64>>,
    /// JSON-lines file; each record needs an `f` array.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Predict interval-design and CRM behaviour on known curves.
    Classify {
        #[command(flatten)]
        source: ScenarioSource,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.1)]
        dp1: f64,
        #[arg(long, default_value_t = 0.1)]
        dp2: f64,
        #[arg(long, value_delimiter = ',')]
        skeleton: Option<Vec<f64>>,
    },
    /// Draw an ensemble of random curves.
    GenScenarios {
        #[arg(long, default_value_t = 5)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0.3)]
        p: f64,
    },
    /// Run replicated trials of one design on each curve.
    Simulate {
        #[command(flatten)]
        source: ScenarioSource,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        /// Share of the trial used to read off the limit set.
        #[arg(long, default_value_t = 0.1)]
        tail: f64,
    },
    /// Cross-tabulate CRM and interval-design classes over a generated ensemble.
    Table1 {
        #[arg(long, value_delimiter = ',', default_values_t = [5usize, 10])]
        m: Vec<usize>,
        #[arg(long, default_value_t = 2500)]
        count: usize,
        #[arg(long, default_value_t = 0.3)]
        p: f64,
    },
    /// Estimate how often the point design abandons the MTD for good.
    Counterexample {
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.3])]
        f: Vec<f64>,
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        cohort: usize,
        #[arg(long, default_value_t = 1)]
        start: usize,
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        reps: usize,
    },
    /// Serve the trial-session HTTP API.
    Serve {
        #[arg(long, env = "DOSEFIND_LISTEN", default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
        /// Append-only session event log.
        #[arg(long, default_value = "dosefind-sessions.jsonl")]
        log: PathBuf,
    },
}
