//! The saved analysis and every file rendered from it.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use cvekw_core::report::{
    export_counts_csv, export_matrix_csv, format_fixed, render_cwe_table, render_heatmap_svg, render_keyword_table,
    RenderOptions,
};
use cvekw_core::{CweStats, DateWindow, HeatmapMatrix, KeywordStats, MatchedSummary};
use serde::{Deserialize, Serialize};

use crate::settings::{OutputFormat, RunConfig};
use crate::{exit, Failure, Outcome};

pub const ANALYSIS_FILE: &str = "analysis.json";
pub const SUMMARY_FILE: &str = "summary.txt";

/// Everything the renderers need, so `report` never recomputes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub window: DateWindow,
    pub keywords: Vec<String>,
    pub summary: MatchedSummary,
    /// Keywords found in at least one CVE.
    pub keyword_stats: Vec<KeywordStats>,
    pub cwe_stats: Vec<CweStats>,
    /// Rows follow `cwe_stats`; no rows when nothing matched.
    pub prevalence: HeatmapMatrix,
    pub severity: HeatmapMatrix,
}

pub fn summary_text(summary: &MatchedSummary) -> String {
    let opt = |v: Option<f64>, d| v.map(|v| format_fixed(v, d)).unwrap_or_default();
    format!(
        "total_cves={}\nmatched_cves={}\nmatched_share_percent={}\nmatched_avg_score={}\ndataset_avg_score={}\n",
        summary.total,
        summary.matched,
        opt(summary.share_percent, 1),
        opt(summary.avg_score, 2),
        opt(summary.dataset_avg_score, 2),
    )
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display())).map_err(Failure::usage)?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

fn rendered<T, E: std::error::Error + Send + Sync + 'static>(r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| Failure { code: exit::USAGE, error: e.into() })
}

/// Writes the summary and every table and heatmap in the configured formats.
pub fn render_all(report: &AnalysisReport, config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).map_err(Failure::usage)?;
    let mut written = vec![write(dir, SUMMARY_FILE, &summary_text(&report.summary))?];
    let heatmaps = [("prevalence_heatmap", &report.prevalence), ("severity_heatmap", &report.severity)];

    for format in &config.formats {
        let opts = RenderOptions::new(format.to_core());
        let ext = opts.format.extension();
        match format {
            OutputFormat::Csv | OutputFormat::Tex => {
                let keywords = rendered(render_keyword_table(&report.keyword_stats, &opts))?;
                written.push(write(dir, &format!("keyword_stats.{ext}"), &keywords)?);
                let cwes = rendered(render_cwe_table(&report.cwe_stats, &opts))?;
                written.push(write(dir, &format!("cwe_stats.{ext}"), &cwes)?);
            }
            OutputFormat::Svg => {}
        }
        for (stem, matrix) in heatmaps {
            match format {
                OutputFormat::Csv => {
                    let values = rendered(export_matrix_csv(matrix, opts.decimals))?;
                    written.push(write(dir, &format!("{stem}.csv"), &values)?);
                    let counts = rendered(export_counts_csv(matrix))?;
                    written.push(write(dir, &format!("{stem}.counts.csv"), &counts)?);
                }
                OutputFormat::Svg if matrix.rows.is_empty() => {
                    log::warn!("{stem}: no CWE has a keyword match, skipping the SVG");
                    let stale = dir.join(format!("{stem}.svg"));
                    if stale.exists() {
                        fs::remove_file(&stale).map_err(Failure::usage)?;
                    }
                }
                OutputFormat::Svg => {
                    let svg = rendered(render_heatmap_svg(matrix, &opts))?;
                    written.push(write(dir, &format!("{stem}.svg"), &svg)?);
                }
                OutputFormat::Tex => {}
            }
        }
    }
    Ok(written)
}

pub fn save_report(report: &AnalysisReport, dir: &Path) -> Result<PathBuf, Failure> {
    let mut json = serde_json::to_string_pretty(report).map_err(Failure::usage)?;
    json.push('\n');
    write(dir, ANALYSIS_FILE, &json)
}

pub fn report(config: &RunConfig, analysis: Option<PathBuf>) -> Outcome {
    let path = analysis.unwrap_or_else(|| config.out.join(ANALYSIS_FILE));
    let text = fs::read_to_string(&path)
        .with_context(|| format!("reading {} (run `cvekw analyze` first)", path.display()))
        .map_err(Failure::usage)?;
    let saved: AnalysisReport =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())).map_err(Failure::usage)?;
    render_all(&saved, config, &config.out)?;
    print!("{}", summary_text(&saved.summary));
    Ok(exit::OK)
}
