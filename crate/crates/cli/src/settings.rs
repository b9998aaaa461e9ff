//! Run configuration: command-line flags layered over an optional flat
//! `key = value` file, layered over the defaults.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use chrono::NaiveDate;
use clap::{Args, ValueEnum};
use cvekw_core::report::Format;
use cvekw_nvd::MAX_PAGE_SIZE;

pub const DEFAULT_FROM: &str = "2023-01-01";
pub const DEFAULT_TO: &str = "2024-09-30";
pub const DEFAULT_PAGE_SIZE: u32 = 2000;
pub const DEFAULT_CACHE: &str = "cache/corpus.tsv";
pub const DEFAULT_OUT: &str = "out";
pub const DEFAULT_TOP_N: usize = 25;
pub const DEFAULT_API_KEY_ENV: &str = "NVD_API_KEY";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Tex,
    Svg,
}

impl OutputFormat {
    pub fn to_core(self) -> Format {
        match self {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Tex => Format::LatexFragment,
            OutputFormat::Svg => Format::Svg,
        }
    }
}

/// Every setting, each optional so flags, file and defaults can be layered.
#[derive(Debug, Default, Clone, Args)]
pub struct Settings {
    /// First publication date (inclusive), YYYY-MM-DD
    #[arg(long, global = true, value_name = "DATE")]
    pub from: Option<NaiveDate>,

    /// Last publication date (inclusive), YYYY-MM-DD
    #[arg(long, global = true, value_name = "DATE")]
    pub to: Option<NaiveDate>,

    /// Results per API request (1..=2000)
    #[arg(long, global = true, value_name = "N")]
    pub page_size: Option<u32>,

    /// Keyword list, one per line (default: the built-in crypto list)
    #[arg(long, global = true, value_name = "FILE")]
    pub keywords: Option<PathBuf>,

    /// Corpus cache file
    #[arg(long, global = true, value_name = "FILE")]
    pub cache: Option<PathBuf>,

    /// Output directory
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Number of CWEs in the CWE table and heatmaps
    #[arg(long, global = true, value_name = "N")]
    pub top_n: Option<usize>,

    /// Output format; repeat for several (default: all)
    #[arg(long = "format", global = true, value_enum, value_name = "FORMAT")]
    pub formats: Vec<OutputFormat>,

    /// Serve NVD pages from this directory instead of the network
    #[arg(long, global = true, value_name = "DIR")]
    pub replay_dir: Option<PathBuf>,

    /// Environment variable holding the NVD API key
    #[arg(long, global = true, value_name = "NAME")]
    pub api_key_env: Option<String>,
}

impl Settings {
    /// Fills every unset field from `fallback`.
    pub fn or(self, fallback: Settings) -> Settings {
        Settings {
            from: self.from.or(fallback.from),
            to: self.to.or(fallback.to),
            page_size: self.page_size.or(fallback.page_size),
            keywords: self.keywords.or(fallback.keywords),
            cache: self.cache.or(fallback.cache),
            out: self.out.or(fallback.out),
            top_n: self.top_n.or(fallback.top_n),
            formats: if self.formats.is_empty() { fallback.formats } else { self.formats },
            replay_dir: self.replay_dir.or(fallback.replay_dir),
            api_key_env: self.api_key_env.or(fallback.api_key_env),
        }
    }

    pub fn from_file(path: &Path) -> anyhow::Result<Settings> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Settings::parse_config(&text).with_context(|| format!("config {}", path.display()))
    }

    /// Parses `key = value` lines; `#` starts a comment line. Keys match the
    /// long flag names, with `-` or `_`. `format` takes a comma list.
    pub fn parse_config(text: &str) -> anyhow::Result<Settings> {
        let mut s = Settings::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key = value", n + 1))?;
            let value = value.trim();
            let at = |e: String| anyhow!("line {}: {}: {e}", n + 1, key.trim());
            match key.trim().replace('-', "_").as_str() {
                "from" => s.from = Some(parse(value).map_err(at)?),
                "to" => s.to = Some(parse(value).map_err(at)?),
                "page_size" => s.page_size = Some(parse(value).map_err(at)?),
                "keywords" => s.keywords = Some(value.into()),
                "cache" => s.cache = Some(value.into()),
                "out" => s.out = Some(value.into()),
                "top_n" => s.top_n = Some(parse(value).map_err(at)?),
                "format" | "formats" => {
                    s.formats = value
                        .split(',')
                        .map(|f| OutputFormat::from_str(f.trim(), true))
                        .collect::<Result<_, _>>()
                        .map_err(at)?
                }
                "replay_dir" => s.replay_dir = Some(value.into()),
                "api_key_env" => s.api_key_env = Some(value.to_string()),
                other => bail!("line {}: unknown key {other:?}", n + 1),
            }
        }
        Ok(s)
    }
}

fn parse<T: FromStr>(value: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| e.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub from: NaiveDate,
    pub to: NaiveDate,
    pub page_size: u32,
    pub keywords: Option<PathBuf>,
    pub cache: PathBuf,
    pub out: PathBuf,
    pub top_n: usize,
    pub formats: Vec<OutputFormat>,
    pub replay_dir: Option<PathBuf>,
    pub api_key_env: String,
}

impl RunConfig {
    pub fn resolve(settings: Settings) -> anyhow::Result<RunConfig> {
        let from = settings.from.unwrap_or_else(|| DEFAULT_FROM.parse().unwrap());
        let to = settings.to.unwrap_or_else(|| DEFAULT_TO.parse().unwrap());
        if from > to {
            bail!("invalid window: --from {from} is after --to {to}");
        }
        let page_size = settings.page_size.unwrap_or(DEFAULT_PAGE_SIZE);
        if !(1..=MAX_PAGE_SIZE).contains(&page_size) {
            bail!("--page-size must be in 1..={MAX_PAGE_SIZE}, got {page_size}");
        }
        let top_n = settings.top_n.unwrap_or(DEFAULT_TOP_N);
        if top_n == 0 {
            bail!("--top-n must be at least 1");
        }
        let mut formats = settings.formats;
        if formats.is_empty() {
            formats = OutputFormat::value_variants().to_vec();
        }
        formats.sort();
        formats.dedup();
        Ok(RunConfig {
            from,
            to,
            page_size,
            keywords: settings.keywords,
            cache: settings.cache.unwrap_or_else(|| DEFAULT_CACHE.into()),
            out: settings.out.unwrap_or_else(|| DEFAULT_OUT.into()),
            top_n,
            formats,
            replay_dir: settings.replay_dir,
            api_key_env: settings.api_key_env.unwrap_or_else(|| DEFAULT_API_KEY_ENV.to_string()),
        })
    }

    pub fn wants(&self, format: OutputFormat) -> bool {
        self.formats.contains(&format)
    }
}
