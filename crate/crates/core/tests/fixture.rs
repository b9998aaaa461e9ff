use std::path::PathBuf;
use std::time::Instant;

use cvekw_core::corpus::write_corpus;
use cvekw_core::report::{
    export_counts_csv, export_matrix_csv, render_cwe_table, render_heatmap_svg, render_keyword_table, Format,
    RenderOptions,
};
use cvekw_core::{match_corpus, Analysis, CweId, Keyword, KeywordSet};
use cvekw_testkit::{checks, fixture};

/// Compares against `tests/golden/<name>`. With `CVEKW_BLESS=1` the file is
/// (re)written instead.
fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("CVEKW_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e} (run with CVEKW_BLESS=1 to create)", path.display()));
    assert!(expected == actual, "{name} differs from golden file");
}

#[test]
fn fixture_counts_match_generator() {
    let raw = fixture::load_raw();
    assert_eq!(raw.len(), fixture::RECORDS);
    assert_eq!(raw.rejected_count(), fixture::REJECTED);
    let corpus = raw.filter_rejected();
    assert_eq!(corpus.len(), fixture::NON_REJECTED);
    assert_eq!(corpus.records().iter().filter(|r| r.base_score.is_some()).count(), fixture::SCORED);
    let mean = corpus.dataset_average_score().unwrap();
    assert!((mean - fixture::DATASET_MEAN).abs() < 1e-12, "{mean}");
}

#[test]
fn fixture_reserializes_byte_identically() {
    let original = std::fs::read_to_string(fixture::fixture_path()).unwrap();
    let mut out = Vec::new();
    write_corpus(&fixture::load_raw(), &mut out).unwrap();
    assert!(String::from_utf8(out).unwrap() == original);
}

#[test]
fn fixture_matches_oracle_within_a_second() {
    let corpus = fixture::load();
    let start = Instant::now();
    let summary = checks::oracle_equivalence(&corpus).unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0, "{:?}", start.elapsed());
    println!("{summary}");
}

#[test]
fn fixture_severity_zeroing_is_exhaustive() {
    checks::severity_zeroing(&fixture::load()).unwrap();
}

#[test]
fn fixture_has_the_edge_cases_it_claims() {
    let raw = fixture::load_raw();
    let records = raw.records();
    assert!(records.iter().any(|r| r.base_score.is_none() && !r.is_rejected()));
    assert!(records.iter().any(|r| r.cwes.iter().any(CweId::is_pseudo)));
    assert!(records.iter().any(|r| r.description.contains("path traversal")));
    assert!(records.iter().any(|r| r.description.contains('\n') && r.description.contains('\t')));
    assert!(records.iter().any(|r| r.description.contains('\u{2011}')));
    assert!(records.iter().any(|r| r.description.is_empty()));
}

fn fixture_outputs() -> Vec<(&'static str, String)> {
    let corpus = fixture::load();
    let set = KeywordSet::default_crypto();
    let matches = match_corpus(&corpus, &set);
    let analysis = Analysis::new(&corpus, &set, &matches).unwrap();
    let csv = RenderOptions::new(Format::Csv);
    let tex = RenderOptions::new(Format::LatexFragment);
    let svg = RenderOptions::new(Format::Svg);

    let stats = analysis.keyword_stats();
    let top = analysis.top_cwes(25).unwrap();
    let rows: Vec<CweId> = top.iter().take(5).map(|s| s.cwe.clone()).collect();
    let severity = analysis.severity_heatmap(&rows).unwrap();

    let narrow = KeywordSet::new(
        cvekw_core::keywords::DEFAULT_KEYWORDS[..10].iter().map(|k| Keyword::new(k).unwrap()).collect(),
    )
    .unwrap();
    let narrow_matches = match_corpus(&corpus, &narrow);
    let narrow_analysis = Analysis::new(&corpus, &narrow, &narrow_matches).unwrap();
    let narrow_rows: Vec<CweId> = narrow_analysis.top_cwes(5).unwrap().into_iter().map(|s| s.cwe).collect();
    let grid = narrow_analysis.prevalence_heatmap(&narrow_rows).unwrap();
    assert_eq!((grid.rows.len(), grid.cols.len()), (5, 10));

    vec![
        ("keyword_stats.csv", render_keyword_table(&stats, &csv).unwrap()),
        ("keyword_stats.tex", render_keyword_table(&stats, &tex).unwrap()),
        ("cwe_stats.csv", render_cwe_table(&top, &csv).unwrap()),
        ("cwe_stats.tex", render_cwe_table(&top, &tex).unwrap()),
        ("severity_top5.csv", export_matrix_csv(&severity, 2).unwrap()),
        ("severity_top5.counts.csv", export_counts_csv(&severity).unwrap()),
        ("prevalence_5x10.svg", render_heatmap_svg(&grid, &svg).unwrap()),
    ]
}

#[test]
fn fixture_renders_match_golden_files() {
    let first = fixture_outputs();
    let second = fixture_outputs();
    assert_eq!(first, second);
    for (name, text) in &first {
        golden(name, text);
    }
}
