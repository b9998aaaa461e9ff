use crate::analytics::{CweStats, HeatmapMatrix, KeywordStats};

use super::{format_fixed, Format, RenderOptions, ReportError};

const RED: &str = "\\textcolor{red}";

/// Table of per-keyword statistics: Keyword, CVE, Unique CWE, Avg Score.
pub fn render_keyword_table(stats: &[KeywordStats], opts: &RenderOptions) -> Result<String, ReportError> {
    opts.validate()?;
    match opts.format {
        Format::Csv => {
            let mut rows = vec![csv_row(["keyword", "cve", "unique_cwe", "avg_score", "above_avg"])];
            for s in stats {
                rows.push(csv_row([
                    s.keyword.clone(),
                    s.cve_count.to_string(),
                    s.unique_cwe_count.to_string(),
                    opt_fixed(s.avg_score, opts.decimals),
                    s.above_dataset_avg.to_string(),
                ]));
            }
            to_csv(rows)
        }
        Format::LatexFragment => {
            let body = stats
                .iter()
                .map(|s| {
                    let score = tex_score(s.avg_score, opts.decimals, opts.highlight && s.above_dataset_avg);
                    format!("{} & {} & {} & {score} \\\\", tex_escape(&s.keyword), s.cve_count, s.unique_cwe_count)
                })
                .collect();
            Ok(tex_table("Keyword & CVE & Unique CWE & Avg Score \\\\", body))
        }
        Format::Svg => Err(ReportError::UnsupportedFormat(Format::Svg)),
    }
}

/// Table of per-CWE statistics: CWE, Title, Keywords, Avg Score, Dataset.
///
/// The CSV form also carries the highlight flag, the CVE count, and the
/// keyword count scaled by that CVE count.
pub fn render_cwe_table(stats: &[CweStats], opts: &RenderOptions) -> Result<String, ReportError> {
    opts.validate()?;
    match opts.format {
        Format::Csv => {
            let mut rows = vec![csv_row([
                "cwe",
                "title",
                "keywords",
                "avg_score",
                "dataset",
                "above_dataset",
                "cves",
                "keywords_per_cve",
            ])];
            for s in stats {
                rows.push(csv_row([
                    s.cwe.to_string(),
                    s.title.clone().unwrap_or_default(),
                    s.keyword_count.to_string(),
                    opt_fixed(s.avg_score_matched, opts.decimals),
                    opt_fixed(s.avg_score_dataset, opts.decimals),
                    s.above_dataset.to_string(),
                    s.cve_count.to_string(),
                    opt_fixed(s.scaled_keyword_count, opts.decimals),
                ]));
            }
            to_csv(rows)
        }
        Format::LatexFragment => {
            let body = stats
                .iter()
                .map(|s| {
                    let matched = tex_score(s.avg_score_matched, opts.decimals, opts.highlight && s.above_dataset);
                    let dataset = tex_score(s.avg_score_dataset, opts.decimals, false);
                    format!(
                        "{} & {} & {} & {matched} & {dataset} \\\\",
                        tex_escape(s.cwe.as_str()),
                        tex_escape(s.title.as_deref().unwrap_or("")),
                        s.keyword_count
                    )
                })
                .collect();
            Ok(tex_table("CWE & Title & Keywords & Avg Score & Dataset \\\\", body))
        }
        Format::Svg => Err(ReportError::UnsupportedFormat(Format::Svg)),
    }
}

/// Heatmap values, one line per CWE, one column per keyword.
pub fn export_matrix_csv(matrix: &HeatmapMatrix, decimals: u32) -> Result<String, ReportError> {
    if decimals > 6 {
        return Err(ReportError::Decimals(decimals));
    }
    matrix_csv(matrix, |i, j| format_fixed(matrix.values[i][j], decimals))
}

/// Companion to [`export_matrix_csv`] holding the raw per-cell counts.
pub fn export_counts_csv(matrix: &HeatmapMatrix) -> Result<String, ReportError> {
    matrix_csv(matrix, |i, j| matrix.raw_counts[i][j].to_string())
}

fn matrix_csv(matrix: &HeatmapMatrix, cell: impl Fn(usize, usize) -> String) -> Result<String, ReportError> {
    if !matrix.is_well_formed() {
        return Err(ReportError::MalformedMatrix);
    }
    let mut rows = Vec::with_capacity(matrix.rows.len() + 1);
    rows.push(std::iter::once("cwe".to_string()).chain(matrix.cols.iter().cloned()).collect());
    for (i, cwe) in matrix.rows.iter().enumerate() {
        rows.push(std::iter::once(cwe.to_string()).chain((0..matrix.cols.len()).map(|j| cell(i, j))).collect());
    }
    to_csv(rows)
}

fn csv_row<S: Into<String>, const N: usize>(fields: [S; N]) -> Vec<String> {
    fields.into_iter().map(Into::into).collect()
}

fn to_csv(rows: Vec<Vec<String>>) -> Result<String, ReportError> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for row in rows {
        writer.write_record(&row).map_err(|e| ReportError::Csv(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| ReportError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| ReportError::Csv(e.to_string()))
}

fn opt_fixed(value: Option<f64>, decimals: u32) -> String {
    value.map(|v| format_fixed(v, decimals)).unwrap_or_default()
}

fn tex_score(value: Option<f64>, decimals: u32, red: bool) -> String {
    match value {
        None => "--".to_string(),
        Some(v) if red => format!("{RED}{{{}}}", format_fixed(v, decimals)),
        Some(v) => format_fixed(v, decimals),
    }
}

fn tex_table(header: &str, body: Vec<String>) -> String {
    let mut out = String::new();
    out.push_str("\\toprule\n");
    out.push_str(header);
    out.push_str("\n\\midrule\n");
    for line in body {
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str("\\bottomrule\n");
    out
}

fn tex_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '\\' => out.push_str("\\textbackslash{}"),
            '&' | '%' | '$' | '#' | '_' | '{' | '}' => {
                out.push('\\');
                out.push(ch);
            }
            '~' => out.push_str("\\textasciitilde{}"),
            '^' => out.push_str("\\textasciicircum{}"),
            _ => out.push(ch),
        }
    }
    out
}
