use std::collections::{BTreeMap, BTreeSet};

use cvekw_core::{CveRecord, CweId, KeywordSet, MatchMode};

/// A keyword as the oracle sees it: display name, normalized pattern, and
/// whether occurrences must be delimited by non-alphanumerics.
#[derive(Debug, Clone)]
pub struct RefKeyword {
    pub name: String,
    pub pattern: String,
    pub bounded: bool,
}

pub fn ref_keywords(set: &KeywordSet) -> Vec<RefKeyword> {
    set.keywords()
        .iter()
        .map(|k| RefKeyword {
            name: k.canonical().to_string(),
            pattern: ref_normalize(k.canonical()),
            bounded: k.mode() == MatchMode::BoundedToken,
        })
        .collect()
}

pub fn ref_normalize(text: &str) -> String {
    let mut dehyphenated = String::new();
    for ch in text.chars() {
        if ch == '-' || ch == '\u{2010}' || ch == '\u{2011}' {
            dehyphenated.push(' ');
        } else {
            dehyphenated.push(ch);
        }
    }
    dehyphenated.to_lowercase()
}

/// Every byte offset at which `pattern` occurs in `text` (overlaps included).
pub fn occurrences(text: &str, pattern: &str) -> Vec<usize> {
    (0..=text.len().saturating_sub(pattern.len()))
        .filter(|&i| text.is_char_boundary(i) && text[i..].starts_with(pattern))
        .collect()
}

fn delimited(text: &str, at: usize, len: usize) -> bool {
    let before = text[..at].chars().next_back();
    let after = text[at + len..].chars().next();
    let blocks = |c: Option<char>| c.is_some_and(|c| c.is_ascii_alphanumeric());
    !blocks(before) && !blocks(after)
}

pub fn ref_match(text: &str, keywords: &[RefKeyword]) -> BTreeSet<String> {
    let normalized = ref_normalize(text);
    let mut found = BTreeSet::new();
    for kw in keywords {
        if kw.pattern.is_empty() {
            continue;
        }
        let hit = occurrences(&normalized, &kw.pattern)
            .into_iter()
            .any(|at| !kw.bounded || delimited(&normalized, at, kw.pattern.len()));
        if hit {
            found.insert(kw.name.clone());
        }
    }
    found
}

pub fn ref_match_all(records: &[CveRecord], keywords: &[RefKeyword]) -> Vec<BTreeSet<String>> {
    records.iter().map(|r| ref_match(&r.description, keywords)).collect()
}

fn ref_mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefKeywordRow {
    pub keyword: String,
    pub cve_count: usize,
    pub unique_cwe_count: usize,
    pub avg_score: Option<f64>,
    pub above: bool,
}

pub fn ref_dataset_avg(records: &[CveRecord]) -> Option<f64> {
    let scores: Vec<f64> = records.iter().filter_map(|r| r.base_score).collect();
    ref_mean(&scores)
}

pub fn ref_keyword_stats(
    records: &[CveRecord],
    matched: &[BTreeSet<String>],
    keywords: &[RefKeyword],
) -> Vec<RefKeywordRow> {
    let dataset = ref_dataset_avg(records);
    let mut rows = Vec::new();
    for kw in keywords {
        let mut count = 0;
        let mut cwes = BTreeSet::new();
        let mut scores = Vec::new();
        for (r, m) in records.iter().zip(matched) {
            if m.contains(&kw.name) {
                count += 1;
                for c in &r.cwes {
                    cwes.insert(c.as_str().to_string());
                }
                if let Some(s) = r.base_score {
                    scores.push(s);
                }
            }
        }
        let avg = ref_mean(&scores);
        let above = match (avg, dataset) {
            (Some(a), Some(d)) => a > d,
            _ => false,
        };
        rows.push(RefKeywordRow {
            keyword: kw.name.clone(),
            cve_count: count,
            unique_cwe_count: cwes.len(),
            avg_score: avg,
            above,
        });
    }
    rows.sort_by(|a, b| b.cve_count.cmp(&a.cve_count).then(a.keyword.cmp(&b.keyword)));
    rows
}

/// (matched count, share in percent, matched average score)
pub fn ref_summary(records: &[CveRecord], matched: &[BTreeSet<String>]) -> (usize, Option<f64>, Option<f64>) {
    let mut count = 0;
    let mut scores = Vec::new();
    for (r, m) in records.iter().zip(matched) {
        if !m.is_empty() {
            count += 1;
            scores.extend(r.base_score);
        }
    }
    let share = if records.is_empty() { None } else { Some(count as f64 * 100.0 / records.len() as f64) };
    (count, share, ref_mean(&scores))
}

pub fn ref_kc(cwe: &str, records: &[CveRecord], matched: &[BTreeSet<String>]) -> usize {
    let mut total = 0;
    for (r, m) in records.iter().zip(matched) {
        if r.cwes.iter().any(|c| c.as_str() == cwe) {
            total += m.len();
        }
    }
    total
}

pub fn ref_scaled_kc(cwe: &str, records: &[CveRecord], matched: &[BTreeSet<String>]) -> Option<f64> {
    let assigned = records.iter().filter(|r| r.cwes.iter().any(|c| c.as_str() == cwe)).count();
    if assigned == 0 {
        None
    } else {
        Some(ref_kc(cwe, records, matched) as f64 / assigned as f64)
    }
}

pub fn all_cwes(records: &[CveRecord]) -> Vec<String> {
    let mut set = BTreeSet::new();
    for r in records {
        for c in &r.cwes {
            set.insert(c.as_str().to_string());
        }
    }
    set.into_iter().collect()
}

/// Sort key: numbered CWEs by number, then pseudo-identifiers by name.
pub fn cwe_sort_key(id: &str) -> (u8, u64, String) {
    match id.strip_prefix("CWE-") {
        Some(n) => (0, n.parse().unwrap(), String::new()),
        None => (1, 0, id.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefCweRow {
    pub cwe: String,
    pub keyword_count: usize,
    pub cve_count: usize,
    pub avg_matched: Option<f64>,
    pub avg_dataset: Option<f64>,
    pub above: bool,
}

pub fn ref_top_cwes(records: &[CveRecord], matched: &[BTreeSet<String>], n: usize) -> Vec<RefCweRow> {
    let mut rows = Vec::new();
    for cwe in all_cwes(records) {
        let kc = ref_kc(&cwe, records, matched);
        if kc == 0 {
            continue;
        }
        let mut all = Vec::new();
        let mut with_kw = Vec::new();
        let mut cves = 0;
        for (r, m) in records.iter().zip(matched) {
            if !r.cwes.iter().any(|c| c.as_str() == cwe) {
                continue;
            }
            cves += 1;
            if let Some(s) = r.base_score {
                all.push(s);
                if !m.is_empty() {
                    with_kw.push(s);
                }
            }
        }
        let avg_matched = ref_mean(&with_kw);
        let avg_dataset = ref_mean(&all);
        let above = matches!((avg_matched, avg_dataset), (Some(a), Some(d)) if a > d);
        rows.push(RefCweRow { cwe, keyword_count: kc, cve_count: cves, avg_matched, avg_dataset, above });
    }
    rows.sort_by(|a, b| b.keyword_count.cmp(&a.keyword_count).then(cwe_sort_key(&a.cwe).cmp(&cwe_sort_key(&b.cwe))));
    rows.truncate(n);
    rows
}

/// (raw counts, row-max normalized values)
pub fn ref_prevalence(
    records: &[CveRecord],
    matched: &[BTreeSet<String>],
    rows: &[String],
    cols: &[String],
) -> (Vec<Vec<usize>>, Vec<Vec<f64>>) {
    let mut counts = vec![vec![0usize; cols.len()]; rows.len()];
    for (i, cwe) in rows.iter().enumerate() {
        for (j, kw) in cols.iter().enumerate() {
            for (r, m) in records.iter().zip(matched) {
                if r.cwes.iter().any(|c| c.as_str() == cwe) && m.contains(kw) {
                    counts[i][j] += 1;
                }
            }
        }
    }
    let values = counts
        .iter()
        .map(|row| {
            let max = *row.iter().max().unwrap_or(&0);
            row.iter().map(|&c| if max == 0 { 0.0 } else { c as f64 / max as f64 }).collect()
        })
        .collect();
    (counts, values)
}

/// (scored supporting CVE counts, mean score or 0 below two supporters)
pub fn ref_severity(
    records: &[CveRecord],
    matched: &[BTreeSet<String>],
    rows: &[String],
    cols: &[String],
) -> (Vec<Vec<usize>>, Vec<Vec<f64>>) {
    let mut counts = vec![vec![0usize; cols.len()]; rows.len()];
    let mut values = vec![vec![0.0; cols.len()]; rows.len()];
    for (i, cwe) in rows.iter().enumerate() {
        for (j, kw) in cols.iter().enumerate() {
            let mut scores = Vec::new();
            for (r, m) in records.iter().zip(matched) {
                if r.cwes.iter().any(|c| c.as_str() == cwe) && m.contains(kw) {
                    if let Some(s) = r.base_score {
                        scores.push(s);
                    }
                }
            }
            counts[i][j] = scores.len();
            if scores.len() >= 2 {
                values[i][j] = ref_mean(&scores).unwrap();
            }
        }
    }
    (counts, values)
}

pub fn cwe_strings(ids: &[CweId]) -> Vec<String> {
    ids.iter().map(|c| c.as_str().to_string()).collect()
}

/// Keyword-count map over every CWE present, for formula identity checks.
pub fn ref_kc_all(records: &[CveRecord], matched: &[BTreeSet<String>]) -> BTreeMap<String, usize> {
    all_cwes(records)
        .into_iter()
        .map(|c| {
            let kc = ref_kc(&c, records, matched);
            (c, kc)
        })
        .collect()
}
