//! Command-line front end: reconstruct co-occurrence networks from check-in
//! logs, analyze their topology against degree-preserving null models,
//! correlate node centrality with per-student trait scores, and emit
//! core-periphery figure data. `run` chains every stage from one config file.

mod commands;
mod config;
mod errors;
mod io_util;
mod table;

use clap::error::ErrorKind;
use clap::Parser;

use dinet_core::ingest::StudyCalendar;

use crate::errors::{AppError, AppResult};

/// Calendar flags shared by the ingestion-facing subcommands.
#[derive(clap::Args, Debug)]
pub struct CalendarArgs {
    /// First day of week 1 (YYYY-MM-DD)
    #[arg(long, default_value = "2013-01-06")]
    pub study_start: String,
    /// Number of raw 7-day weeks in the study range
    #[arg(long, default_value_t = 21)]
    pub week_count: u32,
    /// Comma list of 1-based raw week indices to exclude
    #[arg(long, default_value = "")]
    pub exclude_weeks: String,
    /// Fixed UTC offset in seconds for local day boundaries
    #[arg(long, default_value_t = -18_000, allow_hyphen_values = true)]
    pub tz_offset: i32,
}

impl CalendarArgs {
    pub fn build(&self) -> AppResult<StudyCalendar> {
        let start = dinet_core::CivilDate::parse(&self.study_start).map_err(AppError::data)?;
        let excluded = config::parse_week_list(&self.exclude_weeks)?;
        StudyCalendar::new(start, self.week_count, excluded, self.tz_offset)
            .map_err(AppError::data)
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "dinet",
    version,
    about = "Co-occurrence network analysis of timestamped check-in logs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand, Debug)]
enum Command {
    /// Parse and validate check-in logs; emit the record manifest
    Ingest(commands::ingest::IngestArgs),
    /// Generate a synthetic cohort with planted structure
    Synth(commands::synth::SynthArgs),
    /// Build weekly and cumulative co-occurrence graphs
    Build(commands::build::BuildArgs),
    /// Clustering and centrality tables for one graph
    Metrics(commands::metrics::MetricsArgs),
    /// Degree-preserving null-model clustering baseline
    Nullmodel(commands::nullmodel::NullmodelArgs),
    /// Centrality vs trait-score correlation matrix
    Correlate(commands::correlate::CorrelateArgs),
    /// Core-periphery layout and scatter figure data
    Layout(commands::layout::LayoutArgs),
    /// Full pipeline from a config file
    Run(commands::run::RunArgs),
}

fn dispatch(cli: &Cli) -> AppResult<()> {
    match &cli.command {
        Command::Ingest(args) => commands::ingest::run(args),
        Command::Synth(args) => commands::synth::run(args),
        Command::Build(args) => commands::build::run(args),
        Command::Metrics(args) => commands::metrics::run(args),
        Command::Nullmodel(args) => commands::nullmodel::run(args),
        Command::Correlate(args) => commands::correlate::run(args),
        Command::Layout(args) => commands::layout::run(args),
        Command::Run(args) => commands::run::run(args),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = dispatch(&cli) {
        eprintln!("{err}");
        std::process::exit(err.exit_code());
    }
}
