use anyhow::anyhow;
use cvekw_core::corpus::load_corpus;
use cvekw_core::{match_corpus, Analysis, CweId, HeatmapKind, HeatmapMatrix, KeywordSet};

use crate::output::{render_all, save_report, summary_text, AnalysisReport};
use crate::settings::RunConfig;
use crate::{exit, load_keywords, Failure, Outcome};

pub fn run(config: &RunConfig) -> Outcome {
    if !config.cache.exists() {
        return Err(Failure::usage(anyhow!(
            "corpus cache {} not found; run `cvekw fetch` first",
            config.cache.display()
        )));
    }
    let keywords = load_keywords(config)?;
    let corpus = load_corpus(&config.cache).map_err(Failure::usage)?;
    log::info!("loaded {} records for {} from {}", corpus.len(), corpus.window(), config.cache.display());
    let report = build_report(corpus, &keywords, config.top_n)?;
    render_all(&report, config, &config.out)?;
    save_report(&report, &config.out)?;
    print!("{}", summary_text(&report.summary));
    Ok(exit::OK)
}

/// Runs the whole analysis on a cache's records, rejected ones dropped.
pub fn build_report(
    corpus: cvekw_core::Corpus,
    keywords: &KeywordSet,
    top_n: usize,
) -> Result<AnalysisReport, Failure> {
    let window = corpus.window();
    let corpus = corpus.filter_rejected();
    let matches = match_corpus(&corpus, keywords);
    let analysis = Analysis::new(&corpus, keywords, &matches).map_err(Failure::usage)?;

    let cwe_stats = analysis.top_cwes(top_n).map_err(Failure::usage)?;
    let rows: Vec<CweId> = cwe_stats.iter().map(|s| s.cwe.clone()).collect();
    let cols: Vec<String> = keywords.keywords().iter().map(|k| k.canonical().to_string()).collect();
    let (prevalence, severity) = if rows.is_empty() {
        (empty(HeatmapKind::PrevalenceNormalized, &cols), empty(HeatmapKind::AvgSeverityMinSupport, &cols))
    } else {
        (
            analysis.prevalence_heatmap(&rows).map_err(Failure::usage)?,
            analysis.severity_heatmap(&rows).map_err(Failure::usage)?,
        )
    };

    Ok(AnalysisReport {
        window,
        keywords: cols,
        summary: analysis.matched_subset_summary(),
        keyword_stats: analysis.keyword_stats().into_iter().filter(|s| s.cve_count > 0).collect(),
        cwe_stats,
        prevalence,
        severity,
    })
}

fn empty(kind: HeatmapKind, cols: &[String]) -> HeatmapMatrix {
    HeatmapMatrix { kind, rows: Vec::new(), cols: cols.to_vec(), raw_counts: Vec::new(), values: Vec::new() }
}
