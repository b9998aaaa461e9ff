//! Keyword and CWE statistics over a matched corpus.
//!
//! Every statistic is computed from three aligned inputs: the (rejected
//! filtered) corpus, the keyword set, and one [`MatchResult`] per record.
//! [`Analysis`] checks the alignment once and then exposes each aggregate as a
//! pure function of those inputs.
//!
//! Notation used in the docs below: `k(c)` is the set of distinct keywords
//! matched in CVE `c`, and `w(c)` its set of assigned CWEs.

mod cwe_titles;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{mean, Corpus, CveRecord, CweId};
use crate::keywords::{KeywordSet, MatchResult};

pub use cwe_titles::cwe_title;

/// Minimum number of scored CVEs behind a severity heatmap cell.
pub const SEVERITY_MIN_SUPPORT: usize = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalyticsError {
    #[error("{matches} match results for {records} corpus records")]
    LengthMismatch { records: usize, matches: usize },

    #[error("match result {index} is for {found}, expected {expected}")]
    IdMismatch { index: usize, expected: String, found: String },

    #[error("match result {index} references keyword index {keyword} outside the keyword set")]
    UnknownKeyword { index: usize, keyword: usize },

    #[error("heatmap needs at least one CWE row")]
    NoRows,

    #[error("top-n must be at least 1")]
    ZeroTopN,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordStats {
    pub keyword: String,
    pub cve_count: usize,
    pub unique_cwe_count: usize,
    pub avg_score: Option<f64>,
    pub above_dataset_avg: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CweStats {
    pub cwe: CweId,
    pub title: Option<String>,
    /// `kc(w)`: sum of `|k(c)|` over CVEs assigned to the CWE.
    pub keyword_count: usize,
    /// Number of corpus CVEs assigned to the CWE.
    pub cve_count: usize,
    /// `kc(w)` divided by `cve_count`.
    pub scaled_keyword_count: Option<f64>,
    /// Mean score of CVEs with the CWE and at least one keyword.
    pub avg_score_matched: Option<f64>,
    /// Mean score of every CVE with the CWE.
    pub avg_score_dataset: Option<f64>,
    pub above_dataset: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedSummary {
    pub total: usize,
    /// CVEs with at least one keyword.
    pub matched: usize,
    /// `matched / total` as a percentage; absent for an empty corpus.
    pub share_percent: Option<f64>,
    pub avg_score: Option<f64>,
    pub dataset_avg_score: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeatmapKind {
    /// Co-occurrence counts scaled so each row's maximum is 1.
    PrevalenceNormalized,
    /// Mean base score per cell, zero below [`SEVERITY_MIN_SUPPORT`].
    AvgSeverityMinSupport,
}

impl HeatmapKind {
    /// Upper end of the value scale: 1 for prevalence, the CVSS maximum for
    /// severity.
    pub fn value_max(self) -> f64 {
        match self {
            HeatmapKind::PrevalenceNormalized => 1.0,
            HeatmapKind::AvgSeverityMinSupport => 10.0,
        }
    }
}

/// CWE × keyword matrix. `raw_counts[i][j]` and `values[i][j]` belong to
/// `rows[i]` and `cols[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapMatrix {
    pub kind: HeatmapKind,
    pub rows: Vec<CweId>,
    pub cols: Vec<String>,
    pub raw_counts: Vec<Vec<usize>>,
    pub values: Vec<Vec<f64>>,
}

impl HeatmapMatrix {
    pub fn is_well_formed(&self) -> bool {
        self.raw_counts.len() == self.rows.len()
            && self.values.len() == self.rows.len()
            && self.raw_counts.iter().all(|r| r.len() == self.cols.len())
            && self.values.iter().all(|r| r.len() == self.cols.len())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Analysis<'a> {
    corpus: &'a Corpus,
    keywords: &'a KeywordSet,
    matches: &'a [MatchResult],
}

impl<'a> Analysis<'a> {
    pub fn new(
        corpus: &'a Corpus,
        keywords: &'a KeywordSet,
        matches: &'a [MatchResult],
    ) -> Result<Self, AnalyticsError> {
        let records = corpus.records();
        if records.len() != matches.len() {
            return Err(AnalyticsError::LengthMismatch { records: records.len(), matches: matches.len() });
        }
        for (index, (record, m)) in records.iter().zip(matches).enumerate() {
            if record.id != m.cve_id {
                return Err(AnalyticsError::IdMismatch { index, expected: record.id.clone(), found: m.cve_id.clone() });
            }
            if let Some(&keyword) = m.matched.iter().find(|&&k| k >= keywords.len()) {
                return Err(AnalyticsError::UnknownKeyword { index, keyword });
            }
        }
        Ok(Analysis { corpus, keywords, matches })
    }

    fn pairs(&self) -> impl Iterator<Item = (&'a CveRecord, &'a MatchResult)> + 'a {
        self.corpus.records().iter().zip(self.matches.iter())
    }

    pub fn dataset_average_score(&self) -> Option<f64> {
        self.corpus.dataset_average_score()
    }

    /// One row per keyword, sorted by CVE count descending, then keyword.
    /// Keywords that never matched are included with a zero count.
    pub fn keyword_stats(&self) -> Vec<KeywordStats> {
        let n = self.keywords.len();
        let mut cve_count = vec![0usize; n];
        let mut cwes: Vec<BTreeSet<&CweId>> = vec![BTreeSet::new(); n];
        let mut scores: Vec<Vec<f64>> = vec![Vec::new(); n];
        for (record, m) in self.pairs() {
            for &k in &m.matched {
                cve_count[k] += 1;
                cwes[k].extend(record.cwes.iter());
                if let Some(s) = record.base_score {
                    scores[k].push(s);
                }
            }
        }

        let dataset_avg = self.dataset_average_score();
        let mut rows: Vec<KeywordStats> = self
            .keywords
            .keywords()
            .iter()
            .enumerate()
            .map(|(k, kw)| {
                let avg_score = mean(scores[k].iter().copied());
                KeywordStats {
                    keyword: kw.canonical().to_string(),
                    cve_count: cve_count[k],
                    unique_cwe_count: cwes[k].len(),
                    avg_score,
                    above_dataset_avg: is_above(avg_score, dataset_avg),
                }
            })
            .collect();
        rows.sort_by(|a, b| b.cve_count.cmp(&a.cve_count).then_with(|| a.keyword.cmp(&b.keyword)));
        rows
    }

    pub fn matched_subset_summary(&self) -> MatchedSummary {
        let total = self.corpus.len();
        let matched: Vec<&CveRecord> = self.pairs().filter(|(_, m)| !m.is_empty()).map(|(r, _)| r).collect();
        MatchedSummary {
            total,
            matched: matched.len(),
            share_percent: (total > 0).then(|| 100.0 * matched.len() as f64 / total as f64),
            avg_score: mean(matched.iter().filter_map(|r| r.base_score)),
            dataset_avg_score: self.dataset_average_score(),
        }
    }

    /// `kc(w)`: the sum of `|k(c)|` over every CVE `c` with `w ∈ w(c)`.
    pub fn keyword_count(&self, cwe: &CweId) -> usize {
        self.pairs().filter(|(r, _)| r.cwes.contains(cwe)).map(|(_, m)| m.matched.len()).sum()
    }

    /// `kc(w)` divided by the number of CVEs assigned to `w`.
    pub fn scaled_keyword_count(&self, cwe: &CweId) -> Option<f64> {
        let (kc, cves) = self
            .pairs()
            .filter(|(r, _)| r.cwes.contains(cwe))
            .fold((0usize, 0usize), |(kc, n), (_, m)| (kc + m.matched.len(), n + 1));
        (cves > 0).then(|| kc as f64 / cves as f64)
    }

    /// CWEs with a non-zero keyword count, highest first (ties by CWE id),
    /// truncated to `n`.
    pub fn top_cwes(&self, n: usize) -> Result<Vec<CweStats>, AnalyticsError> {
        if n == 0 {
            return Err(AnalyticsError::ZeroTopN);
        }

        #[derive(Default)]
        struct Acc {
            keyword_count: usize,
            cve_count: usize,
            matched_scores: Vec<f64>,
            dataset_scores: Vec<f64>,
        }

        let mut per_cwe: BTreeMap<&CweId, Acc> = BTreeMap::new();
        for (record, m) in self.pairs() {
            for cwe in &record.cwes {
                let acc = per_cwe.entry(cwe).or_default();
                acc.keyword_count += m.matched.len();
                acc.cve_count += 1;
                if let Some(s) = record.base_score {
                    acc.dataset_scores.push(s);
                    if !m.is_empty() {
                        acc.matched_scores.push(s);
                    }
                }
            }
        }

        let mut rows: Vec<CweStats> = per_cwe
            .into_iter()
            .filter(|(_, acc)| acc.keyword_count > 0)
            .map(|(cwe, acc)| {
                let avg_score_matched = mean(acc.matched_scores);
                let avg_score_dataset = mean(acc.dataset_scores);
                CweStats {
                    title: cwe_title(cwe).map(str::to_string),
                    cwe: cwe.clone(),
                    keyword_count: acc.keyword_count,
                    cve_count: acc.cve_count,
                    scaled_keyword_count: Some(acc.keyword_count as f64 / acc.cve_count as f64),
                    avg_score_matched,
                    avg_score_dataset,
                    above_dataset: is_above(avg_score_matched, avg_score_dataset),
                }
            })
            .collect();
        // BTreeMap iteration already yields CWE order; a stable sort keeps it for ties.
        rows.sort_by_key(|r| std::cmp::Reverse(r.keyword_count));
        rows.truncate(n);
        Ok(rows)
    }

    /// Per (CWE, keyword) co-occurrence counts, each row divided by its maximum.
    pub fn prevalence_heatmap(&self, cwes: &[CweId]) -> Result<HeatmapMatrix, AnalyticsError> {
        let raw_counts: Vec<Vec<usize>> =
            self.cell_members(cwes, |_| Some(()))?.into_iter().map(|row| row.iter().map(Vec::len).collect()).collect();
        let values = raw_counts
            .iter()
            .map(|row| {
                let max = row.iter().copied().max().unwrap_or(0);
                row.iter().map(|&c| if max == 0 { 0.0 } else { c as f64 / max as f64 }).collect()
            })
            .collect();
        Ok(self.matrix(HeatmapKind::PrevalenceNormalized, cwes, raw_counts, values))
    }

    /// Per (CWE, keyword) mean base score over scored CVEs, or zero when fewer
    /// than [`SEVERITY_MIN_SUPPORT`] scored CVEs support the cell.
    pub fn severity_heatmap(&self, cwes: &[CweId]) -> Result<HeatmapMatrix, AnalyticsError> {
        let scores = self.cell_members(cwes, |r| r.base_score)?;
        let raw_counts = scores.iter().map(|row| row.iter().map(Vec::len).collect()).collect();
        let values = scores
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| {
                        if cell.len() >= SEVERITY_MIN_SUPPORT {
                            mean(cell.iter().copied()).unwrap_or(0.0)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(self.matrix(HeatmapKind::AvgSeverityMinSupport, cwes, raw_counts, values))
    }

    /// For every cell, `extract(record)` of each CVE carrying both the row's
    /// CWE and the column's keyword (`None` skips the CVE).
    fn cell_members<T>(
        &self,
        cwes: &[CweId],
        extract: impl Fn(&CveRecord) -> Option<T>,
    ) -> Result<Vec<Vec<Vec<T>>>, AnalyticsError> {
        if cwes.is_empty() {
            return Err(AnalyticsError::NoRows);
        }
        let cols = self.keywords.len();
        let mut cells: Vec<Vec<Vec<T>>> = (0..cwes.len()).map(|_| (0..cols).map(|_| Vec::new()).collect()).collect();
        for (record, m) in self.pairs() {
            if m.is_empty() {
                continue;
            }
            for (row, cwe) in cwes.iter().enumerate() {
                if !record.cwes.contains(cwe) {
                    continue;
                }
                for &k in &m.matched {
                    if let Some(v) = extract(record) {
                        cells[row][k].push(v);
                    }
                }
            }
        }
        Ok(cells)
    }

    fn matrix(
        &self,
        kind: HeatmapKind,
        cwes: &[CweId],
        raw_counts: Vec<Vec<usize>>,
        values: Vec<Vec<f64>>,
    ) -> HeatmapMatrix {
        HeatmapMatrix {
            kind,
            rows: cwes.to_vec(),
            cols: self.keywords.keywords().iter().map(|k| k.canonical().to_string()).collect(),
            raw_counts,
            values,
        }
    }
}

fn is_above(value: Option<f64>, reference: Option<f64>) -> bool {
    matches!((value, reference), (Some(v), Some(r)) if v > r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CveStatus, DateWindow};
    use crate::keywords::{match_corpus, Keyword};

    fn cwe(s: &str) -> CweId {
        CweId::parse(s).unwrap()
    }

    fn record(n: u32, score: Option<f64>, cwes: &[&str], description: &str) -> CveRecord {
        CveRecord {
            id: format!("CVE-2023-{n:04}"),
            published: "2023-06-01".parse().unwrap(),
            status: CveStatus::Other,
            description: description.to_string(),
            base_score: score,
            cwes: cwes.iter().map(|c| cwe(c)).collect(),
        }
    }

    fn corpus(records: Vec<CveRecord>) -> Corpus {
        let window = DateWindow::new("2023-01-01".parse().unwrap(), "2024-09-30".parse().unwrap()).unwrap();
        Corpus::new(window, records).unwrap()
    }

    fn abc() -> KeywordSet {
        KeywordSet::new(vec![
            Keyword::new("alpha").unwrap(),
            Keyword::new("beta").unwrap(),
            Keyword::new("gamma").unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn keyword_count_formula() {
        // c1: {alpha, beta} with {W1, W2}; c2: {beta} with {W1}
        let c = corpus(vec![
            record(1, None, &["CWE-1", "CWE-2"], "alpha beta"),
            record(2, None, &["CWE-1"], "beta beta"),
            record(3, None, &["CWE-3"], "nothing here"),
        ]);
        let kws = abc();
        let m = match_corpus(&c, &kws);
        let a = Analysis::new(&c, &kws, &m).unwrap();
        assert_eq!(a.keyword_count(&cwe("CWE-1")), 3);
        assert_eq!(a.keyword_count(&cwe("CWE-2")), 2);
        assert_eq!(a.keyword_count(&cwe("CWE-3")), 0);
        assert_eq!(a.keyword_count(&cwe("CWE-4")), 0);
        assert_eq!(a.scaled_keyword_count(&cwe("CWE-1")), Some(1.5));
        assert_eq!(a.scaled_keyword_count(&cwe("CWE-3")), Some(0.0));
        assert_eq!(a.scaled_keyword_count(&cwe("CWE-4")), None);

        let top = a.top_cwes(10).unwrap();
        let ids: Vec<&str> = top.iter().map(|r| r.cwe.as_str()).collect();
        assert_eq!(ids, ["CWE-1", "CWE-2"]);
        assert_eq!(a.top_cwes(1).unwrap().len(), 1);
        assert_eq!(a.top_cwes(0), Err(AnalyticsError::ZeroTopN));
    }

    #[test]
    fn single_record_keyword_stats() {
        let c = corpus(vec![record(1, Some(5.0), &["CWE-79"], "weak password")]);
        let kws = KeywordSet::default_crypto();
        let m = match_corpus(&c, &kws);
        let a = Analysis::new(&c, &kws, &m).unwrap();
        let stats = a.keyword_stats();
        assert_eq!(stats.len(), 31);
        let row = &stats[0];
        assert_eq!(
            (row.keyword.as_str(), row.cve_count, row.unique_cwe_count, row.avg_score),
            ("password", 1, 1, Some(5.0))
        );
        assert!(!row.above_dataset_avg);
        assert!(stats[1..].iter().all(|r| r.cve_count == 0 && r.avg_score.is_none()));
        // zero rows sorted by keyword
        assert_eq!(stats[1].keyword, "AES");
    }

    #[test]
    fn summary_without_matches() {
        let c = corpus(vec![record(1, Some(5.0), &[], "nothing")]);
        let kws = abc();
        let m = match_corpus(&c, &kws);
        let s = Analysis::new(&c, &kws, &m).unwrap().matched_subset_summary();
        assert_eq!((s.total, s.matched, s.share_percent, s.avg_score), (1, 0, Some(0.0), None));

        let empty = corpus(vec![]);
        let s = Analysis::new(&empty, &kws, &[]).unwrap().matched_subset_summary();
        assert_eq!(s.share_percent, None);
    }

    #[test]
    fn prevalence_row_max() {
        // W1 row: alpha 2, beta 4, gamma 0
        let mut records = Vec::new();
        for i in 0..2 {
            records.push(record(i, None, &["CWE-1"], "alpha beta"));
        }
        for i in 2..4 {
            records.push(record(i, None, &["CWE-1"], "beta"));
        }
        records.push(record(4, None, &["CWE-2"], "nothing"));
        let c = corpus(records);
        let kws = abc();
        let m = match_corpus(&c, &kws);
        let a = Analysis::new(&c, &kws, &m).unwrap();
        let h = a.prevalence_heatmap(&[cwe("CWE-1"), cwe("CWE-2")]).unwrap();
        assert!(h.is_well_formed());
        assert_eq!(h.raw_counts, vec![vec![2, 4, 0], vec![0, 0, 0]]);
        assert_eq!(h.values, vec![vec![0.5, 1.0, 0.0], vec![0.0, 0.0, 0.0]]);
        assert_eq!(a.prevalence_heatmap(&[]), Err(AnalyticsError::NoRows));
    }

    #[test]
    fn severity_min_support() {
        let c = corpus(vec![
            record(1, Some(9.8), &["CWE-1"], "alpha"),
            record(2, Some(6.0), &["CWE-2"], "beta"),
            record(3, Some(8.0), &["CWE-2"], "beta"),
            record(4, None, &["CWE-2"], "beta gamma"),
            record(5, Some(7.0), &["CWE-2"], "gamma"),
        ]);
        let kws = abc();
        let m = match_corpus(&c, &kws);
        let a = Analysis::new(&c, &kws, &m).unwrap();
        let h = a.severity_heatmap(&[cwe("CWE-1"), cwe("CWE-2")]).unwrap();
        assert_eq!(h.raw_counts, vec![vec![1, 0, 0], vec![0, 2, 1]]);
        assert_eq!(h.values, vec![vec![0.0, 0.0, 0.0], vec![0.0, 7.0, 0.0]]);
    }

    #[test]
    fn misaligned_matches_rejected() {
        let c = corpus(vec![record(1, None, &[], "alpha")]);
        let kws = abc();
        assert!(matches!(Analysis::new(&c, &kws, &[]), Err(AnalyticsError::LengthMismatch { .. })));
        let wrong_id = [MatchResult { cve_id: "CVE-2023-9999".into(), matched: vec![] }];
        assert!(matches!(Analysis::new(&c, &kws, &wrong_id), Err(AnalyticsError::IdMismatch { .. })));
        let bad_kw = [MatchResult { cve_id: "CVE-2023-0001".into(), matched: vec![7] }];
        assert!(matches!(Analysis::new(&c, &kws, &bad_kw), Err(AnalyticsError::UnknownKeyword { .. })));
    }
}
