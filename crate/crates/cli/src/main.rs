mod analyze;
mod fetch;
mod matching;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cvekw_core::keywords::parse_keyword_config;
use cvekw_core::KeywordSet;

use crate::settings::{RunConfig, Settings};

/// Cryptographic keyword statistics over NVD CVE descriptions.
#[derive(Debug, Parser)]
#[command(name = "cvekw", version)]
struct Cli {
    /// Flat key = value file supplying defaults for the flags below
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(flatten)]
    settings: Settings,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Download the window from the NVD API into the corpus cache
    Fetch,
    /// Compute keyword and CWE statistics and heatmaps from the cache
    Analyze,
    /// Show which keywords a piece of text matches
    Match {
        /// Text to match; read from standard input when omitted
        text: Option<String>,
    },
    /// Re-render the output files from a saved analysis.json
    Report {
        /// Saved analysis (default: <out>/analysis.json)
        #[arg(long, value_name = "FILE")]
        analysis: Option<PathBuf>,
    },
}

/// Process exit statuses.
pub mod exit {
    pub const OK: u8 = 0;
    pub const NO_MATCH: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const REMOTE: u8 = 3;
}

/// An error paired with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: exit::USAGE, error: error.into() }
    }

    pub fn remote(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: exit::REMOTE, error: error.into() }
    }
}

pub type Outcome = Result<u8, Failure>;

pub fn load_keywords(config: &RunConfig) -> Result<KeywordSet, Failure> {
    match &config.keywords {
        Some(path) => parse_keyword_config(path).map_err(Failure::usage),
        None => Ok(KeywordSet::default_crypto()),
    }
}

fn run(cli: Cli) -> Outcome {
    let file = match &cli.config {
        Some(path) => Settings::from_file(path).map_err(Failure::usage)?,
        None => Settings::default(),
    };
    let config = RunConfig::resolve(cli.settings.or(file)).map_err(Failure::usage)?;
    log::debug!("{config:?}");
    match cli.command {
        Command::Fetch => fetch::run(&config),
        Command::Analyze => analyze::run(&config),
        Command::Match { text } => matching::run(&config, text),
        Command::Report { analysis } => output::report(&config, analysis),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}
