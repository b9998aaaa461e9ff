//! Whole-corpus comparisons between the production path and the oracle.
//! Each check returns a short description of what it covered, or the first
//! discrepancy found.

use std::collections::BTreeSet;

use cvekw_core::{match_corpus, Analysis, Corpus, CweId, HeatmapMatrix, KeywordSet};
use rand::Rng;

use crate::gen::{self, CorpusShape};
use crate::oracle::{self, RefKeyword};

pub const TOLERANCE: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOLERANCE
}

fn opt_close(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => close(a, b),
        (None, None) => true,
        _ => false,
    }
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn compare_matrix(name: &str, got: &HeatmapMatrix, counts: &[Vec<usize>], values: &[Vec<f64>]) -> Result<(), String> {
    ensure!(got.is_well_formed(), "{name}: malformed matrix");
    ensure!(got.raw_counts == counts, "{name}: raw counts differ from oracle");
    for (i, row) in got.values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            ensure!(
                close(v, values[i][j]),
                "{name}: cell ({}, {}) = {v}, oracle {}",
                got.rows[i],
                got.cols[j],
                values[i][j]
            );
        }
    }
    Ok(())
}

/// Every aggregate on `corpus` against the oracle, with the default keywords.
pub fn oracle_equivalence(corpus: &Corpus) -> Result<String, String> {
    let set = KeywordSet::default_crypto();
    let matches = match_corpus(corpus, &set);
    let analysis = Analysis::new(corpus, &set, &matches).map_err(|e| e.to_string())?;
    let records = corpus.records();
    let refs = oracle::ref_keywords(&set);
    let matched = oracle::ref_match_all(records, &refs);

    for (m, r) in matches.iter().zip(&matched) {
        let got: BTreeSet<String> = m.canonical(&set).into_iter().map(str::to_string).collect();
        ensure!(&got == r, "{}: matched {got:?}, oracle {r:?}", m.cve_id);
    }

    let stats = analysis.keyword_stats();
    let ref_stats = oracle::ref_keyword_stats(records, &matched, &refs);
    ensure!(stats.len() == ref_stats.len(), "keyword_stats: {} rows, oracle {}", stats.len(), ref_stats.len());
    for (g, r) in stats.iter().zip(&ref_stats) {
        ensure!(
            g.keyword == r.keyword
                && g.cve_count == r.cve_count
                && g.unique_cwe_count == r.unique_cwe_count
                && opt_close(g.avg_score, r.avg_score)
                && g.above_dataset_avg == r.above,
            "keyword_stats: {g:?} vs oracle {r:?}"
        );
    }

    let summary = analysis.matched_subset_summary();
    let (count, share, avg) = oracle::ref_summary(records, &matched);
    ensure!(summary.total == records.len(), "summary total {}", summary.total);
    ensure!(summary.matched == count, "summary matched {} vs {count}", summary.matched);
    ensure!(opt_close(summary.share_percent, share), "summary share {:?} vs {share:?}", summary.share_percent);
    ensure!(opt_close(summary.avg_score, avg), "summary avg {:?} vs {avg:?}", summary.avg_score);
    ensure!(
        opt_close(summary.dataset_avg_score, oracle::ref_dataset_avg(records)),
        "summary dataset avg {:?}",
        summary.dataset_avg_score
    );

    let cwes = oracle::all_cwes(records);
    for cwe in &cwes {
        let id = CweId::parse(cwe).map_err(|e| e.to_string())?;
        let kc = oracle::ref_kc(cwe, records, &matched);
        ensure!(analysis.keyword_count(&id) == kc, "kc({cwe}) = {}, oracle {kc}", analysis.keyword_count(&id));
        let scaled = oracle::ref_scaled_kc(cwe, records, &matched);
        ensure!(opt_close(analysis.scaled_keyword_count(&id), scaled), "scaled kc({cwe}) differs");
    }

    let n = cwes.len().max(1);
    let top = analysis.top_cwes(n).map_err(|e| e.to_string())?;
    let ref_top = oracle::ref_top_cwes(records, &matched, n);
    ensure!(top.len() == ref_top.len(), "top_cwes: {} rows, oracle {}", top.len(), ref_top.len());
    for (g, r) in top.iter().zip(&ref_top) {
        ensure!(
            g.cwe.as_str() == r.cwe
                && g.keyword_count == r.keyword_count
                && g.cve_count == r.cve_count
                && opt_close(g.avg_score_matched, r.avg_matched)
                && opt_close(g.avg_score_dataset, r.avg_dataset)
                && g.above_dataset == r.above,
            "top_cwes: {g:?} vs oracle {r:?}"
        );
    }

    let rows: Vec<CweId> = top.iter().map(|s| s.cwe.clone()).collect();
    let cols: Vec<String> = refs.iter().map(|k| k.name.clone()).collect();
    if !rows.is_empty() {
        let row_names = oracle::cwe_strings(&rows);
        let prevalence = analysis.prevalence_heatmap(&rows).map_err(|e| e.to_string())?;
        let (counts, values) = oracle::ref_prevalence(records, &matched, &row_names, &cols);
        compare_matrix("prevalence", &prevalence, &counts, &values)?;
        let severity = analysis.severity_heatmap(&rows).map_err(|e| e.to_string())?;
        let (counts, values) = oracle::ref_severity(records, &matched, &row_names, &cols);
        compare_matrix("severity", &severity, &counts, &values)?;
    }

    Ok(format!(
        "{} records, {} matched, {} CWEs, {}x{} heatmaps",
        records.len(),
        count,
        cwes.len(),
        rows.len(),
        cols.len()
    ))
}

fn hyphen_variant<R: Rng>(rng: &mut R, text: &str) -> String {
    text.chars()
        .map(|c| match c {
            ' ' | '-' | '\u{2010}' | '\u{2011}' => [' ', '-', '\u{2010}', '\u{2011}'][rng.gen_range(0..4)],
            other => other,
        })
        .collect()
}

/// Fixed cases for near misses and the traversal/RSA collision.
pub const NON_MATCHES: &[&str] = &[
    "path traversal",
    "A path traversal vulnerability in the upload handler",
    "aesthetic atlas",
    "ECDHE-RSA2048",
    "hmacs and ecdsa256",
    "",
];

pub fn matching_semantics(descriptions: usize, seed: u64) -> Result<String, String> {
    let set = KeywordSet::default_crypto();
    let refs: Vec<RefKeyword> = oracle::ref_keywords(&set);
    let mut rng = gen::rng(seed);
    let mut matched_total = 0usize;

    for case in NON_MATCHES {
        ensure!(set.match_indices(case).is_empty(), "{case:?} matched {:?}", set.match_description(case));
    }
    let pinned = set.match_description("TLS certificate pinning bypass");
    ensure!(pinned == BTreeSet::from(["TLS", "certificate"]), "TLS certificate case: {pinned:?}");

    for i in 0..descriptions {
        let text = gen::description(&mut rng);
        let got: BTreeSet<String> = set.match_description(&text).into_iter().map(str::to_string).collect();
        let want = oracle::ref_match(&text, &refs);
        ensure!(got == want, "#{i} {text:?}: matched {got:?}, oracle {want:?}");
        matched_total += got.len();

        let indices = set.match_indices(&text);
        ensure!(indices.windows(2).all(|w| w[0] < w[1]), "#{i} {text:?}: indices not strictly ascending {indices:?}");

        for variant in [text.to_uppercase(), text.to_lowercase()] {
            ensure!(set.match_indices(&variant) == indices, "#{i} case variant {variant:?} changed the match set");
        }
        let hyphens = hyphen_variant(&mut rng, &text);
        ensure!(set.match_indices(&hyphens) == indices, "#{i} hyphen variant {hyphens:?} changed the match set");

        let repeated = format!("{text}. {text}. {text}");
        ensure!(set.match_indices(&repeated) == indices, "#{i} repetition changed the match set");
    }
    Ok(format!("{descriptions} descriptions, {matched_total} keyword hits"))
}

/// kc(w) equals the row sum of raw prevalence counts, and Σ_w kc(w) bounds
/// Σ_c |k(c)| over CVEs carrying at least one CWE, with equality exactly when
/// every matched CVE has a single CWE.
pub fn formula_identity(corpora: usize, seed: u64) -> Result<String, String> {
    let set = KeywordSet::default_crypto();
    let mut rng = gen::rng(seed);
    let (mut equal, mut strict) = (0, 0);
    for i in 0..corpora {
        let shape = CorpusShape {
            records: rng.gen_range(0..=50),
            max_cwes: 1 + i % 3,
            cwe_pool: rng.gen_range(2..=8),
            ..CorpusShape::default()
        };
        let corpus = gen::corpus(rng.gen(), &shape);
        let matches = match_corpus(&corpus, &set);
        let analysis = Analysis::new(&corpus, &set, &matches).map_err(|e| e.to_string())?;
        let cwes: Vec<CweId> = oracle::all_cwes(corpus.records()).iter().map(|c| CweId::parse(c).unwrap()).collect();
        let mut kc_total = 0;
        if !cwes.is_empty() {
            let prevalence = analysis.prevalence_heatmap(&cwes).map_err(|e| e.to_string())?;
            for (w, row) in cwes.iter().zip(&prevalence.raw_counts) {
                let kc = analysis.keyword_count(w);
                ensure!(
                    kc == row.iter().sum::<usize>(),
                    "corpus {i}: kc({w}) = {kc}, row sum {}",
                    row.iter().sum::<usize>()
                );
                kc_total += kc;
            }
        }
        let mut per_cve = 0;
        let mut all_single = true;
        for (r, m) in corpus.records().iter().zip(&matches) {
            if r.cwes.is_empty() {
                continue;
            }
            per_cve += m.matched.len();
            if !m.is_empty() && r.cwes.len() > 1 {
                all_single = false;
            }
        }
        ensure!(kc_total >= per_cve, "corpus {i}: Σ kc = {kc_total} < Σ |k(c)| = {per_cve}");
        ensure!(
            (kc_total == per_cve) == all_single,
            "corpus {i}: Σ kc = {kc_total}, Σ |k(c)| = {per_cve}, all single-CWE = {all_single}"
        );
        if all_single {
            equal += 1;
        } else {
            strict += 1;
        }
    }
    Ok(format!("{corpora} corpora ({equal} with equality, {strict} strict)"))
}

/// Every (CWE, keyword) cell of the severity heatmap over all CWEs present:
/// zero exactly when fewer than two scored CVEs support it, the oracle mean
/// otherwise.
pub fn severity_zeroing(corpus: &Corpus) -> Result<String, String> {
    let set = KeywordSet::default_crypto();
    let matches = match_corpus(corpus, &set);
    let analysis = Analysis::new(corpus, &set, &matches).map_err(|e| e.to_string())?;
    let records = corpus.records();
    ensure!(
        records.iter().filter_map(|r| r.base_score).all(|s| s > 0.0),
        "corpus has zero scores; zero would be ambiguous"
    );
    let names = oracle::all_cwes(records);
    let rows: Vec<CweId> = names.iter().map(|c| CweId::parse(c).unwrap()).collect();
    let refs = oracle::ref_keywords(&set);
    let cols: Vec<String> = refs.iter().map(|k| k.name.clone()).collect();
    let matched = oracle::ref_match_all(records, &refs);
    let (support, means) = oracle::ref_severity(records, &matched, &names, &cols);
    let severity = analysis.severity_heatmap(&rows).map_err(|e| e.to_string())?;
    let (mut zeroed, mut kept) = (0, 0);
    for (i, row) in severity.values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let n = support[i][j];
            ensure!((v == 0.0) == (n < 2), "({}, {}): value {v} with {n} scored CVEs", names[i], cols[j]);
            ensure!(close(v, means[i][j]), "({}, {}): value {v}, oracle {}", names[i], cols[j], means[i][j]);
            if n < 2 {
                zeroed += 1;
            } else {
                kept += 1;
            }
        }
    }
    Ok(format!("{} cells ({kept} averaged, {zeroed} zeroed)", kept + zeroed))
}
