//! `fetch`: pages are recorded into a staging directory next to the cache,
//! with a progress marker saved after each one, so an interrupted run picks
//! up where it stopped. Once every page is in, the staging directory is
//! replayed into the cache and removed.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use cvekw_core::corpus::{parse_nvd_page, save_corpus};
use cvekw_core::report::format_fixed;
use cvekw_core::{Corpus, DateWindow};
use cvekw_nvd::{
    plan_window, FetchPlan, FetchProgress, Fetcher, HttpTransport, RateLimit, RecordingTransport, ReplayTransport,
    SystemClock, Transport,
};

use crate::settings::RunConfig;
use crate::{exit, Failure, Outcome};

const PROGRESS_FILE: &str = "progress.json";

pub fn staging_dir(cache: &Path) -> PathBuf {
    let mut name = cache.as_os_str().to_owned();
    name.push(".pages");
    PathBuf::from(name)
}

fn io_failure(e: std::io::Error, what: &str, path: &Path) -> Failure {
    Failure::usage(anyhow!(e).context(format!("{what} {}", path.display())))
}

/// Resumes from the saved marker when it belongs to the same plan; otherwise
/// starts over with an empty staging directory.
fn starting_point(plan: &FetchPlan, staging: &Path) -> Result<FetchProgress, Failure> {
    let marker = staging.join(PROGRESS_FILE);
    if marker.exists() {
        match FetchProgress::load(&marker) {
            Ok(p) if &p.plan == plan => {
                log::info!("resuming at chunk {} start index {}", p.chunk_index, p.start_index);
                return Ok(p);
            }
            Ok(_) => log::warn!("{} is for a different window or page size; starting over", marker.display()),
            Err(e) => log::warn!("{e}; starting over"),
        }
    }
    if staging.exists() {
        fs::remove_dir_all(staging).map_err(|e| io_failure(e, "clearing", staging))?;
    }
    fs::create_dir_all(staging).map_err(|e| io_failure(e, "creating", staging))?;
    Ok(FetchProgress::start(plan))
}

pub fn run(config: &RunConfig) -> Outcome {
    let plan = plan_window(config.from, config.to, config.page_size).map_err(Failure::usage)?;
    let window = DateWindow::new(config.from, config.to).map_err(Failure::usage)?;
    let staging = staging_dir(&config.cache);
    let marker = staging.join(PROGRESS_FILE);
    let progress = starting_point(&plan, &staging)?;

    let (inner, limit): (Box<dyn Transport>, RateLimit) = match &config.replay_dir {
        Some(dir) => (Box::new(ReplayTransport::new(dir)), RateLimit::unlimited()),
        None => {
            let http = HttpTransport::new().map_err(|e| Failure::remote(anyhow!("{e:?}")))?;
            (Box::new(http), RateLimit::nvd(false))
        }
    };
    let api_key = match &config.replay_dir {
        Some(_) => None,
        None => std::env::var(&config.api_key_env).ok().filter(|k| !k.is_empty()),
    };
    let limit = if api_key.is_some() { RateLimit::nvd(true) } else { limit };

    let mut fetcher = Fetcher::resume(progress, RecordingTransport::new(inner, &staging), SystemClock::new())
        .with_rate_limit(limit)
        .with_api_key(api_key);
    while let Some(page) = fetcher.next() {
        let saved = fetcher.progress().save(&marker);
        match page {
            Ok(page) => {
                saved.map_err(Failure::usage)?;
                log::info!(
                    "chunk {}/{} records {}..{} of {}",
                    page.chunk_index + 1,
                    plan.chunks.len(),
                    page.start_index,
                    page.start_index + page.record_count,
                    page.total_results
                );
            }
            Err(e) => {
                if let Err(save_error) = saved {
                    log::error!("{save_error}");
                }
                return Err(Failure::remote(
                    anyhow!(e).context(format!("fetch stopped; rerun to resume from {}", marker.display())),
                ));
            }
        }
    }

    let corpus = assemble(&plan, &staging, window)?;
    if let Some(parent) = config.cache.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_failure(e, "creating", parent))?;
    }
    save_corpus(&corpus, &config.cache).map_err(Failure::usage)?;
    fs::remove_dir_all(&staging).map_err(|e| io_failure(e, "removing", &staging))?;
    log::info!("wrote {}", config.cache.display());

    let rejected = corpus.rejected_count();
    let kept = corpus.filter_rejected();
    println!("records={}", kept.len() + rejected);
    println!("rejected={rejected}");
    let average = kept.dataset_average_score().map(|v| format_fixed(v, 2)).unwrap_or_default();
    println!("dataset_avg_score={average}");
    Ok(exit::OK)
}

/// Replays the completed staging directory into a corpus.
fn assemble(plan: &FetchPlan, staging: &Path, window: DateWindow) -> Result<Corpus, Failure> {
    let mut records = Vec::new();
    for page in Fetcher::new(plan, ReplayTransport::new(staging), SystemClock::new()) {
        let page = page.map_err(Failure::remote)?;
        let parsed = parse_nvd_page(&page.body)
            .with_context(|| format!("chunk {} start index {}", page.chunk_index, page.start_index))
            .map_err(Failure::remote)?;
        records.extend(parsed);
    }
    let (corpus, report) = Corpus::assemble(window, records).map_err(Failure::remote)?;
    if report.duplicates > 0 {
        log::warn!("dropped {} duplicate CVE ids", report.duplicates);
    }
    if report.outside_window > 0 {
        log::warn!("dropped {} records published outside {window}", report.outside_window);
    }
    Ok(corpus)
}
